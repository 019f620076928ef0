#pragma once

#include <string>

#include "seq2form/params.hpp"
#include "seq2form/tape.hpp"

namespace s2f {

// Standard LSTM cell: four gates, each with input weights [d, x_dim],
// recurrent weights [d, d] and a bias [d].
struct LstmCell {
    int d = 0;
    int x_dim = 0;
    Tensor* w_in = nullptr;   // input gate
    Tensor* u_in = nullptr;
    Tensor* b_in = nullptr;
    Tensor* w_forget = nullptr;
    Tensor* u_forget = nullptr;
    Tensor* b_forget = nullptr;
    Tensor* w_out = nullptr;
    Tensor* u_out = nullptr;
    Tensor* b_out = nullptr;
    Tensor* w_cand = nullptr;  // candidate (cell update)
    Tensor* u_cand = nullptr;
    Tensor* b_cand = nullptr;
};

// Creates (or re-binds) the cell's tensors in `store` under
// "<prefix>.{w,u,b}_{in,forget,out,cand}".
LstmCell make_lstm_cell(ParameterStore& store, const std::string& prefix, int d, int x_dim);

struct LstmState {
    Var h;
    Var c;
};

// Zero state of width d as constant tape inputs.
LstmState lstm_zero_state(Tape& tape, int d);

// One recurrence step:
//   i = σ(W_i x + U_i h + b_i), f = σ(...), o = σ(...), g = tanh(...)
//   c' = f⊙c + i⊙g ; h' = o⊙tanh(c')
LstmState lstm_step(Tape& tape, const LstmCell& cell, Var x, const LstmState& prev);

}  // namespace s2f
