#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seq2form/corpus.hpp"
#include "seq2form/decoder.hpp"
#include "seq2form/encoder.hpp"
#include "seq2form/params.hpp"

namespace s2f {

struct ModelConfig {
    int d = 200;
    int emb_dim = 100;
    // nullopt: no cache parameters exist at all.
    std::optional<CacheFunctionKind> cache_fn = CacheFunctionKind::F1;
    // false: cache parameters may exist but the output concatenation stops
    // after the copy segment (the "copy" baseline configuration).
    bool use_cache_segment = true;
    // f6 already mixes the reset gate internally; this applies the outer
    // elementwise gate on top of it as well (the default reading).
    bool double_gate_f6 = true;
    int max_len = 100;
};

// Where an emitted token came from.
enum class Origin { Write, Copy, Cache };

std::string origin_name(Origin o);

struct DecodeResult {
    std::vector<std::string> tokens;  // resolved surface tokens, EOS excluded
    std::vector<Origin> origins;      // one per token
};

// Encoder-decoder with the joint write/copy/cache output distribution.
// Movable, not copyable (sub-structures point into the parameter store).
class Model {
public:
    Model(ModelConfig config, int src_vocab_size, int tgt_vocab_size);
    Model(const Model&) = delete;
    Model& operator=(const Model&) = delete;
    Model(Model&&) = default;
    Model& operator=(Model&&) = default;

    const ModelConfig& config() const { return config_; }
    int source_vocab_size() const { return src_vocab_size_; }
    int target_vocab_size() const { return tgt_vocab_size_; }
    ParameterStore& params() { return store_; }
    const ParameterStore& params() const { return store_; }

    // Uniform [-range, range], one RNG stream per parameter name.
    void init_params(std::uint64_t seed, double range = 1.0);

    struct Step {
        JointDistribution dist;
        LstmState state;
    };
    // One decoder step: feed the target-vocabulary token id, advance the
    // LSTM, attend, and build the joint distribution.
    Step decoder_step(Tape& tape, const EncoderOut& enc_out, const LstmState& prev,
                      int fed_token);

    EncoderOut encode_source(Tape& tape, const std::vector<int>& src_ids);

    // Teacher-forced loss summed over all gold positions (EOS included).
    // `fed_tokens`, when given, records the token id fed at each step.
    Var example_loss(Tape& tape, const Example& example, const Vocabulary& source_vocab,
                     StepLossStats* stats = nullptr, std::vector<int>* fed_tokens = nullptr);

    // Greedy argmax decode (ties -> lowest concatenated index). Halts on a
    // write-segment EOS or after max_len emitted tokens. Reads parameters
    // only, so concurrent decodes over one frozen model are safe.
    DecodeResult greedy_decode(const std::vector<int>& src_ids,
                               const std::vector<std::string>& src_surfaces,
                               const Vocabulary& source_vocab, const Vocabulary& target_vocab);

private:
    ModelConfig config_;
    int src_vocab_size_ = 0;
    int tgt_vocab_size_ = 0;
    ParameterStore store_;
    EncoderParams encoder_;
    LstmCell decoder_cell_;
    Tensor* decoder_embedding_ = nullptr;
    AttentionParams attention_;
    CacheParams cache_;
    OutputParams output_;
};

}  // namespace s2f
