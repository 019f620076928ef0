#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "seq2form/rng.hpp"

namespace s2f {

using Shape = std::vector<int>;

std::int64_t numel(const Shape& shape);
std::string shape_str(const Shape& shape);

// Dense row-major double tensor with an optional gradient slot of the same
// shape. This is the substrate for every real-valued vector/matrix in the
// toolkit; all math is 64-bit.
struct Tensor {
    Shape shape;
    std::vector<double> values;
    std::vector<double> grad;  // empty, or values.size() entries

    Tensor() = default;
    explicit Tensor(Shape s);
    Tensor(Shape s, std::vector<double> v);

    static Tensor zeros(Shape s) { return Tensor(std::move(s)); }
    static Tensor full(Shape s, double fill);
    static Tensor uniform(Shape s, SeededRng& rng, double lo, double hi);

    int rank() const { return static_cast<int>(shape.size()); }
    int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }
    std::int64_t size() const { return static_cast<std::int64_t>(values.size()); }

    // 1-D / 2-D accessors (row-major).
    double& at(int i) { return values[static_cast<std::size_t>(i)]; }
    double at(int i) const { return values[static_cast<std::size_t>(i)]; }
    double& at(int r, int c) {
        return values[static_cast<std::size_t>(r) * dim(1) + c];
    }
    double at(int r, int c) const {
        return values[static_cast<std::size_t>(r) * dim(1) + c];
    }

    bool has_grad() const { return !grad.empty(); }
    void ensure_grad();
    void zero_grad();
    void drop_grad() { grad.clear(); }
};

// Numerically stable softmax (max subtraction). Rejects NaN/Inf input with a
// diagnostic naming the offending index. Output sums to 1 within 1e-9.
std::vector<double> softmax(std::span<const double> v);

// log(sum(exp(v))) with max subtraction; same finiteness requirements.
double logsumexp(std::span<const double> v);

}  // namespace s2f
