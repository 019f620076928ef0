#pragma once

#include <vector>

#include "seq2form/lstm.hpp"
#include "seq2form/params.hpp"
#include "seq2form/tape.hpp"

namespace s2f {

// Bidirectional encoder parameters. Each annotation is the 4d concatenation
// [forward h; forward c; backward h; backward c] at that position. The
// decoder's initial (h, c) comes from two learned affine maps of the
// boundary states (final forward, first-position backward), 4d -> d each.
struct EncoderParams {
    int d = 0;
    int emb_dim = 0;
    LstmCell fwd;
    LstmCell bwd;
    Tensor* embedding = nullptr;  // [|V_s|, emb_dim]
    Tensor* init_h_w = nullptr;   // [d, 4d]
    Tensor* init_h_b = nullptr;   // [d]
    Tensor* init_c_w = nullptr;   // [d, 4d]
    Tensor* init_c_b = nullptr;   // [d]
};

EncoderParams make_encoder(ParameterStore& store, int d, int emb_dim, int src_vocab_size);

struct EncoderOut {
    std::vector<Var> annotations;  // one per source position, each width 4d
    Var annotation_matrix;         // [m, 4d], rows are the annotations
    LstmState s0;                  // decoder initial state, h and c width d
};

// Runs both directions over the token ids and assembles annotations.
// Throws on an empty token sequence.
EncoderOut encode(Tape& tape, const EncoderParams& enc, const std::vector<int>& tokens);

}  // namespace s2f
