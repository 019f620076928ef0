#include "seq2form/lstm.hpp"

#include <stdexcept>

namespace s2f {

LstmCell make_lstm_cell(ParameterStore& store, const std::string& prefix, int d, int x_dim) {
    if (d <= 0 || x_dim <= 0) {
        throw std::invalid_argument("make_lstm_cell: d and x_dim must be positive");
    }
    LstmCell cell;
    cell.d = d;
    cell.x_dim = x_dim;
    cell.w_in = &store.create(prefix + ".w_in", {d, x_dim});
    cell.u_in = &store.create(prefix + ".u_in", {d, d});
    cell.b_in = &store.create(prefix + ".b_in", {d});
    cell.w_forget = &store.create(prefix + ".w_forget", {d, x_dim});
    cell.u_forget = &store.create(prefix + ".u_forget", {d, d});
    cell.b_forget = &store.create(prefix + ".b_forget", {d});
    cell.w_out = &store.create(prefix + ".w_out", {d, x_dim});
    cell.u_out = &store.create(prefix + ".u_out", {d, d});
    cell.b_out = &store.create(prefix + ".b_out", {d});
    cell.w_cand = &store.create(prefix + ".w_cand", {d, x_dim});
    cell.u_cand = &store.create(prefix + ".u_cand", {d, d});
    cell.b_cand = &store.create(prefix + ".b_cand", {d});
    return cell;
}

LstmState lstm_zero_state(Tape& tape, int d) {
    LstmState s;
    s.h = tape.input(Tensor(Shape{d}));
    s.c = tape.input(Tensor(Shape{d}));
    return s;
}

LstmState lstm_step(Tape& tape, const LstmCell& cell, Var x, const LstmState& prev) {
    if (static_cast<int>(tape.val(x).size()) != cell.x_dim) {
        throw std::invalid_argument("lstm_step: input width " +
                                    std::to_string(tape.val(x).size()) + " != cell x_dim " +
                                    std::to_string(cell.x_dim));
    }
    auto gate = [&](Tensor* w, Tensor* u, Tensor* b) {
        return tape.add(tape.add(tape.matvec(tape.param(*w), x),
                                 tape.matvec(tape.param(*u), prev.h)),
                        tape.param(*b));
    };
    Var i = tape.sigmoid(gate(cell.w_in, cell.u_in, cell.b_in));
    Var f = tape.sigmoid(gate(cell.w_forget, cell.u_forget, cell.b_forget));
    Var o = tape.sigmoid(gate(cell.w_out, cell.u_out, cell.b_out));
    Var g = tape.tanh(gate(cell.w_cand, cell.u_cand, cell.b_cand));
    LstmState next;
    next.c = tape.add(tape.mul(f, prev.c), tape.mul(i, g));
    next.h = tape.mul(o, tape.tanh(next.c));
    return next;
}

}  // namespace s2f
