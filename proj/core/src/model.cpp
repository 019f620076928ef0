#include "seq2form/model.hpp"

#include <stdexcept>

namespace s2f {

std::string origin_name(Origin o) {
    switch (o) {
        case Origin::Write: return "write";
        case Origin::Copy: return "copy";
        case Origin::Cache: return "cache";
    }
    throw std::logic_error("origin_name: bad origin");
}

Model::Model(ModelConfig config, int src_vocab_size, int tgt_vocab_size)
    : config_(config), src_vocab_size_(src_vocab_size), tgt_vocab_size_(tgt_vocab_size) {
    if (config_.d <= 0 || config_.emb_dim <= 0 || config_.max_len <= 0) {
        throw std::invalid_argument("Model: d, emb_dim and max_len must be positive");
    }
    if (src_vocab_size_ < Vocabulary::kReserved || tgt_vocab_size_ < Vocabulary::kReserved) {
        throw std::invalid_argument("Model: vocabulary sizes must cover the reserved tokens");
    }
    int d = config_.d;
    encoder_ = make_encoder(store_, d, config_.emb_dim, src_vocab_size_);
    decoder_cell_ = make_lstm_cell(store_, "decoder.cell", d, config_.emb_dim);
    decoder_embedding_ = &store_.create("decoder.embedding", {tgt_vocab_size_, config_.emb_dim});
    attention_.bilinear = &store_.create("attention.bilinear", {d, 4 * d});
    output_.write_proj = &store_.create("output.write_proj", {5 * d, tgt_vocab_size_});
    if (config_.cache_fn) {
        cache_.cache_matrix = &store_.create("cache.cache_matrix", {4 * d, src_vocab_size_});
        cache_.gate_state_proj = &store_.create("cache.gate_state_proj", {d, src_vocab_size_});
        cache_.gate_context_proj =
            &store_.create("cache.gate_context_proj", {4 * d, src_vocab_size_});
    }
}

void Model::init_params(std::uint64_t seed, double range) {
    store_.init_uniform(seed, range);
}

EncoderOut Model::encode_source(Tape& tape, const std::vector<int>& src_ids) {
    return encode(tape, encoder_, src_ids);
}

Model::Step Model::decoder_step(Tape& tape, const EncoderOut& enc_out, const LstmState& prev,
                                int fed_token) {
    if (fed_token < 0 || fed_token >= tgt_vocab_size_) {
        throw std::invalid_argument("decoder_step: fed token " + std::to_string(fed_token) +
                                    " outside target vocabulary");
    }
    Step step;
    Var x = tape.row(tape.param(*decoder_embedding_), fed_token);
    step.state = lstm_step(tape, decoder_cell_, x, prev);
    Attention attn = attend(tape, attention_, step.state.h, enc_out.annotation_matrix);

    bool with_cache = config_.cache_fn.has_value() && config_.use_cache_segment;
    if (with_cache) {
        Var gate = reset_gate(tape, cache_, step.state.h, attn.context);
        Var raw = cache_scores(tape, *config_.cache_fn, cache_, attention_, step.state.h,
                               attn.context, gate);
        bool apply_gate =
            config_.cache_fn != CacheFunctionKind::F6 || config_.double_gate_f6;
        step.dist = joint_distribution(tape, output_, step.state.h, attn.context, attn.scores,
                                       gate, raw, apply_gate);
    } else {
        step.dist = joint_distribution(tape, output_, step.state.h, attn.context, attn.scores,
                                       Var{}, Var{});
    }
    return step;
}

Var Model::example_loss(Tape& tape, const Example& example, const Vocabulary& source_vocab,
                        StepLossStats* stats, std::vector<int>* fed_tokens) {
    if (example.tgt_ids.empty()) {
        throw std::invalid_argument("example_loss: example has no target tokens");
    }
    EncoderOut enc_out = encode_source(tape, example.src_ids);
    LstmState state = enc_out.s0;
    int fed = Vocabulary::kBos;
    Var total;
    for (std::size_t j = 0; j < example.tgt_ids.size(); ++j) {
        if (fed_tokens) fed_tokens->push_back(fed);
        Step step = decoder_step(tape, enc_out, state, fed);
        Var loss = step_loss(tape, step.dist, example, static_cast<int>(j), source_vocab, stats);
        total = total.valid() ? tape.add(total, loss) : loss;
        state = step.state;
        fed = example.tgt_ids[j];  // teacher forcing: gold token, never the prediction
    }
    return total;
}

DecodeResult Model::greedy_decode(const std::vector<int>& src_ids,
                                  const std::vector<std::string>& src_surfaces,
                                  const Vocabulary& source_vocab,
                                  const Vocabulary& target_vocab) {
    if (src_ids.size() != src_surfaces.size()) {
        throw std::invalid_argument("greedy_decode: ids and surfaces disagree in length");
    }
    DecodeResult result;
    Tape tape;
    EncoderOut enc_out = encode_source(tape, src_ids);
    LstmState state = enc_out.s0;
    int fed = Vocabulary::kBos;
    for (int emitted = 0; emitted < config_.max_len; ++emitted) {
        Step step = decoder_step(tape, enc_out, state, fed);
        state = step.state;
        auto logits = tape.values(step.dist.logits);
        int best = 0;
        for (std::size_t i = 1; i < logits.size(); ++i) {
            if (logits[i] > logits[best]) best = static_cast<int>(i);
        }
        const auto& layout = step.dist.layout;
        std::string surface;
        if (best < layout.vt) {
            if (best == Vocabulary::kEos) break;  // only a write-segment EOS halts
            surface = target_vocab.token_at(best);
            result.origins.push_back(Origin::Write);
        } else if (best < layout.vt + layout.m) {
            surface = src_surfaces[static_cast<std::size_t>(best - layout.vt)];
            result.origins.push_back(Origin::Copy);
        } else {
            surface = source_vocab.token_at(best - layout.vt - layout.m);
            result.origins.push_back(Origin::Cache);
        }
        result.tokens.push_back(surface);
        // Feedback embedding: the resolved token's target-vocabulary row,
        // UNK when it has none.
        fed = target_vocab.index_of(surface);
    }
    return result;
}

}  // namespace s2f
