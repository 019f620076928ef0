#include "seq2form/encoder.hpp"

#include <stdexcept>

namespace s2f {

EncoderParams make_encoder(ParameterStore& store, int d, int emb_dim, int src_vocab_size) {
    EncoderParams enc;
    enc.d = d;
    enc.emb_dim = emb_dim;
    enc.fwd = make_lstm_cell(store, "encoder.fwd", d, emb_dim);
    enc.bwd = make_lstm_cell(store, "encoder.bwd", d, emb_dim);
    enc.embedding = &store.create("encoder.embedding", {src_vocab_size, emb_dim});
    enc.init_h_w = &store.create("decoder.init_h_w", {d, 4 * d});
    enc.init_h_b = &store.create("decoder.init_h_b", {d});
    enc.init_c_w = &store.create("decoder.init_c_w", {d, 4 * d});
    enc.init_c_b = &store.create("decoder.init_c_b", {d});
    return enc;
}

EncoderOut encode(Tape& tape, const EncoderParams& enc, const std::vector<int>& tokens) {
    if (tokens.empty()) throw std::invalid_argument("encode: empty token sequence");
    std::size_t m = tokens.size();
    Var emb = tape.param(*enc.embedding);

    std::vector<LstmState> fwd_states(m), bwd_states(m);
    LstmState state = lstm_zero_state(tape, enc.d);
    for (std::size_t i = 0; i < m; ++i) {
        state = lstm_step(tape, enc.fwd, tape.row(emb, tokens[i]), state);
        fwd_states[i] = state;
    }
    state = lstm_zero_state(tape, enc.d);
    for (std::size_t i = m; i-- > 0;) {
        state = lstm_step(tape, enc.bwd, tape.row(emb, tokens[i]), state);
        bwd_states[i] = state;
    }

    EncoderOut out;
    out.annotations.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        out.annotations.push_back(tape.concat(
            {fwd_states[i].h, fwd_states[i].c, bwd_states[i].h, bwd_states[i].c}));
    }
    out.annotation_matrix = tape.stack_rows(out.annotations);

    // Boundary summary: final forward state plus the backward state that has
    // read the whole sequence (position 0).
    Var boundary = tape.concat(
        {fwd_states[m - 1].h, fwd_states[m - 1].c, bwd_states[0].h, bwd_states[0].c});
    out.s0.h = tape.add(tape.matvec(tape.param(*enc.init_h_w), boundary),
                        tape.param(*enc.init_h_b));
    out.s0.c = tape.add(tape.matvec(tape.param(*enc.init_c_w), boundary),
                        tape.param(*enc.init_c_b));
    return out;
}

}  // namespace s2f
