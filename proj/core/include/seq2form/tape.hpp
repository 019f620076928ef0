#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <unordered_map>
#include <vector>

#include "seq2form/tensor.hpp"

namespace s2f {

// Handle to a node on a Tape.
struct Var {
    std::int32_t idx = -1;
    bool valid() const { return idx >= 0; }
};

// Define-by-run reverse-mode tape. Nodes are appended in evaluation order, so
// the recorded list is always topological: every node's inputs precede it.
// One tape is built per example and discarded; parameters live outside the
// tape and are leased in via param().
//
// Forward evaluation is eager and uses a fixed operation order, so rebuilding
// a tape from identical inputs reproduces identical values bit-for-bit.
class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    // Leases an external tensor as a leaf node. backward() writes d(loss)/d(t)
    // into t.grad (assignment, not accumulation). Leasing the same tensor
    // twice returns the same node.
    Var param(Tensor& t);

    // Constant leaves (no gradient writeback).
    Var input(const Tensor& t);
    Var input(std::vector<double> v);
    Var input(Shape shape, std::vector<double> v);

    const Tensor& val(Var v) const;
    std::span<const double> values(Var v) const;
    double scalar(Var v) const;
    // Gradient of the last backward() pass w.r.t. node v.
    std::span<const double> grad_of(Var v) const;
    std::size_t node_count() const { return nodes_.size(); }

    // Elementwise and reductions. Shapes must match exactly for binary ops.
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var affine(Var a, double scale, double shift);  // scale*x + shift
    Var sigmoid(Var a);
    Var tanh(Var a);
    Var softmax(Var a);                      // vector -> probability vector
    Var sum(Var a);                          // -> scalar
    Var dot(Var a, Var b);                   // vectors -> scalar
    Var logsumexp(Var a);                    // vector -> scalar
    Var logsumexp_subset(Var a, std::vector<int> idxs);  // over idxs only

    // Linear algebra (row-major).
    Var matmul(Var a, Var b);    // [m,k]·[k,n] -> [m,n]
    Var matvec(Var w, Var x);    // [r,c]·[c]   -> [r]
    Var matvec_t(Var w, Var x);  // wᵀx: [r,c],[r] -> [c]
    Var row(Var m, int r);       // matrix row -> vector (grads scatter back)

    // Structure.
    Var concat(std::span<const Var> parts);
    Var concat(std::initializer_list<Var> parts);
    Var slice(Var a, int offset, int len);
    Var stack_rows(std::span<const Var> rows);  // m vectors of length k -> [m,k]

    // Reverse sweep from a scalar loss; fills grads of every node and then
    // assigns gradients into every leased parameter tensor. Parameters not
    // reachable from the loss get zero gradients.
    void backward_from(Var loss);

private:
    struct Node {
        Tensor value;
        std::vector<double> grad;
        std::function<void(Tape&)> back;  // empty for leaves
        Tensor* leased = nullptr;
        std::vector<int> aux;  // op-specific index payload
    };

    std::vector<Node> nodes_;
    std::unordered_map<const Tensor*, std::int32_t> leased_;

    Var push(Tensor value, std::function<void(Tape&)> back);
    const Node& node(Var v) const;
    std::vector<double>& g(int idx) { return nodes_[static_cast<std::size_t>(idx)].grad; }
    const std::vector<double>& v(int idx) const {
        return nodes_[static_cast<std::size_t>(idx)].value.values;
    }
    void check(Var v, const char* op) const;
};

// Runs the reverse sweep; loss must be a scalar node of the tape.
void backward(Tape& tape, Var loss);

}  // namespace s2f
