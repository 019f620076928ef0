#pragma once

#include <optional>
#include <string>
#include <vector>

#include "seq2form/corpus.hpp"
#include "seq2form/params.hpp"
#include "seq2form/tape.hpp"

namespace s2f {

// Bilinear attention weight, d x 4d.
struct AttentionParams {
    Tensor* bilinear = nullptr;
};

// Cache pathway weights. cache_matrix scores the whole source vocabulary;
// the two gate projections feed the reset gate.
struct CacheParams {
    Tensor* cache_matrix = nullptr;       // [4d, |V_s|]
    Tensor* gate_state_proj = nullptr;    // [d, |V_s|]
    Tensor* gate_context_proj = nullptr;  // [4d, |V_s|]
};

// Write head over the target vocabulary, applied to [state; context].
struct OutputParams {
    Tensor* write_proj = nullptr;  // [5d, |V_t|]
};

// The six selectable cache scoring functions.
enum class CacheFunctionKind { F1, F2, F3, F4, F5, F6 };

// Parses "f1".."f6"; "off" -> nullopt. Throws on anything else.
std::optional<CacheFunctionKind> parse_cache_fn(const std::string& text);
std::string cache_fn_name(std::optional<CacheFunctionKind> kind);

struct Attention {
    Var scores;   // e_j: one logit per source position (copy logits)
    Var alpha;    // softmax of scores
    Var context;  // attention-weighted annotation sum, width 4d
};

// Attention over annotation rows: score_i = stateᵀ W b_i, alpha = softmax,
// context = Σ alpha_i b_i.
Attention attend(Tape& tape, const AttentionParams& attn, Var state_h, Var annotation_matrix);

// Reset gate over the source vocabulary:
// z = σ(stateᵀ·gate_state_proj + contextᵀ·gate_context_proj).
Var reset_gate(Tape& tape, const CacheParams& cache, Var state_h, Var context);

// Raw cache scores per kind. F6 requires a valid gate; others ignore it.
Var cache_scores(Tape& tape, CacheFunctionKind kind, const CacheParams& cache,
                 const AttentionParams& attn, Var state_h, Var context, Var gate);

// Index layout of the concatenated output space.
struct SegmentLayout {
    int vt = 0;  // target-vocabulary writes, [0, vt)
    int m = 0;   // copy positions, [vt, vt+m)
    int vs = 0;  // cache entries, [vt+m, vt+m+vs); 0 when the segment is off
    int total() const { return vt + m + vs; }
    bool has_cache() const { return vs > 0; }
};

struct JointDistribution {
    Var logits;
    Var probs;
    SegmentLayout layout;
};

// One softmax over concat(write logits, copy logits, gate ⊙ cache scores).
// Pass an invalid gate/cache_raw pair to omit the cache segment entirely.
// apply_gate=false appends cache_raw without the elementwise gate (used when
// a cache function already folds the gate in).
JointDistribution joint_distribution(Tape& tape, const OutputParams& output, Var state_h,
                                     Var context, Var copy_logits, Var gate, Var cache_raw,
                                     bool apply_gate = true);

struct StepLossStats {
    int unreachable = 0;  // steps where no segment entry resolves to gold
};

// Marginal negative log-likelihood of the gold token at position j: the
// summed probability of every segment entry resolving to the gold surface —
// the write entry when gold is in-vocabulary, all flagged copy positions,
// and the cache entry for gold's source-vocabulary index when present.
// If nothing resolves to gold, falls back to -log P_write(UNK) and bumps
// stats->unreachable.
Var step_loss(Tape& tape, const JointDistribution& dist, const Example& example, int position,
              const Vocabulary& source_vocab, StepLossStats* stats = nullptr);

}  // namespace s2f
