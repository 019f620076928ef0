#include "seq2form/decoder.hpp"

#include <stdexcept>

namespace s2f {

std::optional<CacheFunctionKind> parse_cache_fn(const std::string& text) {
    if (text == "off") return std::nullopt;
    if (text == "f1") return CacheFunctionKind::F1;
    if (text == "f2") return CacheFunctionKind::F2;
    if (text == "f3") return CacheFunctionKind::F3;
    if (text == "f4") return CacheFunctionKind::F4;
    if (text == "f5") return CacheFunctionKind::F5;
    if (text == "f6") return CacheFunctionKind::F6;
    throw std::invalid_argument("cache_fn must be one of f1..f6|off, got " + text);
}

std::string cache_fn_name(std::optional<CacheFunctionKind> kind) {
    if (!kind) return "off";
    switch (*kind) {
        case CacheFunctionKind::F1: return "f1";
        case CacheFunctionKind::F2: return "f2";
        case CacheFunctionKind::F3: return "f3";
        case CacheFunctionKind::F4: return "f4";
        case CacheFunctionKind::F5: return "f5";
        case CacheFunctionKind::F6: return "f6";
    }
    throw std::logic_error("cache_fn_name: bad kind");
}

Attention attend(Tape& tape, const AttentionParams& attn, Var state_h, Var annotation_matrix) {
    Attention out;
    // stateᵀW has width 4d; scoring every annotation row at once is one
    // matrix-vector product against the [m, 4d] annotation matrix.
    Var projected = tape.matvec_t(tape.param(*attn.bilinear), state_h);
    out.scores = tape.matvec(annotation_matrix, projected);
    out.alpha = tape.softmax(out.scores);
    out.context = tape.matvec_t(annotation_matrix, out.alpha);
    return out;
}

Var reset_gate(Tape& tape, const CacheParams& cache, Var state_h, Var context) {
    Var from_state = tape.matvec_t(tape.param(*cache.gate_state_proj), state_h);
    Var from_context = tape.matvec_t(tape.param(*cache.gate_context_proj), context);
    return tape.sigmoid(tape.add(from_state, from_context));
}

Var cache_scores(Tape& tape, CacheFunctionKind kind, const CacheParams& cache,
                 const AttentionParams& attn, Var state_h, Var context, Var gate) {
    auto through_cache_matrix = [&](Var vec4d) {
        return tape.matvec_t(tape.param(*cache.cache_matrix), vec4d);
    };
    auto state_through_attn = [&] {
        // stateᵀ W_bilinear, then through the cache matrix.
        return through_cache_matrix(tape.matvec_t(tape.param(*attn.bilinear), state_h));
    };
    switch (kind) {
        case CacheFunctionKind::F1:
            return state_through_attn();
        case CacheFunctionKind::F2:
            return tape.sigmoid(state_through_attn());
        case CacheFunctionKind::F3:
            return tape.sigmoid(tape.add(state_through_attn(), through_cache_matrix(context)));
        case CacheFunctionKind::F4:
            return tape.sigmoid(tape.matvec_t(tape.param(*cache.gate_state_proj), state_h));
        case CacheFunctionKind::F5:
            return tape.tanh(tape.matvec_t(tape.param(*cache.gate_state_proj), state_h));
        case CacheFunctionKind::F6: {
            if (!gate.valid()) {
                throw std::invalid_argument("cache_scores: f6 requires the reset gate");
            }
            Var kept = tape.mul(gate, tape.sigmoid(state_through_attn()));
            Var ones = tape.input(Tensor::full(tape.val(gate).shape, 1.0));
            Var dropped = tape.mul(tape.sub(ones, gate),
                                   tape.sigmoid(through_cache_matrix(context)));
            return tape.add(kept, dropped);
        }
    }
    throw std::logic_error("cache_scores: bad kind");
}

JointDistribution joint_distribution(Tape& tape, const OutputParams& output, Var state_h,
                                     Var context, Var copy_logits, Var gate, Var cache_raw,
                                     bool apply_gate) {
    JointDistribution dist;
    Var write_logits =
        tape.matvec_t(tape.param(*output.write_proj), tape.concat({state_h, context}));
    dist.layout.vt = static_cast<int>(tape.val(write_logits).size());
    dist.layout.m = static_cast<int>(tape.val(copy_logits).size());

    if (cache_raw.valid()) {
        Var cache_logits = cache_raw;
        if (apply_gate) {
            if (!gate.valid()) {
                throw std::invalid_argument("joint_distribution: gating requested without a gate");
            }
            cache_logits = tape.mul(gate, cache_raw);
        }
        dist.layout.vs = static_cast<int>(tape.val(cache_logits).size());
        dist.logits = tape.concat({write_logits, copy_logits, cache_logits});
    } else {
        dist.layout.vs = 0;
        dist.logits = tape.concat({write_logits, copy_logits});
    }
    dist.probs = tape.softmax(dist.logits);
    return dist;
}

Var step_loss(Tape& tape, const JointDistribution& dist, const Example& example, int position,
              const Vocabulary& source_vocab, StepLossStats* stats) {
    const auto& layout = dist.layout;
    if (position < 0 || position >= static_cast<int>(example.tgt_ids.size())) {
        throw std::invalid_argument("step_loss: position " + std::to_string(position) +
                                    " out of range for target length " +
                                    std::to_string(example.tgt_ids.size()));
    }
    int gold = example.tgt_ids[static_cast<std::size_t>(position)];
    if (gold < 0 || gold >= layout.vt) {
        throw std::invalid_argument("step_loss: gold index " + std::to_string(gold) +
                                    " outside target vocabulary of size " +
                                    std::to_string(layout.vt));
    }

    // Collect every concatenated index resolving to the gold surface token.
    std::vector<int> gold_entries;
    // Write entry: UNK is a bucket of many surfaces, never "the" gold token.
    if (gold != Vocabulary::kUnk) gold_entries.push_back(gold);
    const auto& copy_row = example.copy_matrix[static_cast<std::size_t>(position)];
    if (static_cast<int>(copy_row.size()) != layout.m) {
        throw std::invalid_argument("step_loss: copy matrix width " +
                                    std::to_string(copy_row.size()) +
                                    " != copy segment size " + std::to_string(layout.m));
    }
    for (int i = 0; i < layout.m; ++i) {
        if (copy_row[static_cast<std::size_t>(i)]) gold_entries.push_back(layout.vt + i);
    }
    if (layout.has_cache() && position < static_cast<int>(example.tgt.size())) {
        const std::string& surface = example.tgt[static_cast<std::size_t>(position)];
        if (source_vocab.contains(surface)) {
            gold_entries.push_back(layout.vt + layout.m + source_vocab.index_of(surface));
        }
    }

    if (gold_entries.empty()) {
        // Gold is unreachable through any segment; score the UNK write slot
        // so training still gets a signal, and record the event.
        if (stats) ++stats->unreachable;
        gold_entries.push_back(Vocabulary::kUnk);
    }

    Var log_z = tape.logsumexp(dist.logits);
    Var log_gold = tape.logsumexp_subset(dist.logits, std::move(gold_entries));
    return tape.sub(log_z, log_gold);
}

}  // namespace s2f
