#include "seq2form/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace s2f {

std::int64_t numel(const Shape& shape) {
    std::int64_t n = 1;
    for (int d : shape) n *= d;
    return n;
}

std::string shape_str(const Shape& shape) {
    std::string out = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(shape[i]);
    }
    out += "]";
    return out;
}

Tensor::Tensor(Shape s) : shape(std::move(s)) {
    for (int d : shape) {
        if (d <= 0) throw std::invalid_argument("Tensor: nonpositive dimension in " + shape_str(shape));
    }
    values.assign(static_cast<std::size_t>(numel(shape)), 0.0);
}

Tensor::Tensor(Shape s, std::vector<double> v) : shape(std::move(s)), values(std::move(v)) {
    for (int d : shape) {
        if (d <= 0) throw std::invalid_argument("Tensor: nonpositive dimension in " + shape_str(shape));
    }
    if (static_cast<std::int64_t>(values.size()) != numel(shape)) {
        throw std::invalid_argument("Tensor: " + std::to_string(values.size()) +
                                    " values do not fill shape " + shape_str(shape));
    }
}

Tensor Tensor::full(Shape s, double fill) {
    Tensor t(std::move(s));
    std::fill(t.values.begin(), t.values.end(), fill);
    return t;
}

Tensor Tensor::uniform(Shape s, SeededRng& rng, double lo, double hi) {
    Tensor t(std::move(s));
    for (double& v : t.values) v = rng.uniform(lo, hi);
    return t;
}

void Tensor::ensure_grad() {
    if (grad.size() != values.size()) grad.assign(values.size(), 0.0);
}

void Tensor::zero_grad() {
    if (grad.empty()) {
        ensure_grad();
    } else {
        std::fill(grad.begin(), grad.end(), 0.0);
    }
}

static void check_finite(std::span<const double> v, const char* op) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) {
            throw std::invalid_argument(std::string(op) + ": non-finite input at index " +
                                        std::to_string(i) + " (value " + std::to_string(v[i]) + ")");
        }
    }
}

std::vector<double> softmax(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("softmax: empty input");
    check_finite(v, "softmax");
    double mx = *std::max_element(v.begin(), v.end());
    std::vector<double> out(v.size());
    double total = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = std::exp(v[i] - mx);
        total += out[i];
    }
    for (double& p : out) p /= total;
    return out;
}

double logsumexp(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("logsumexp: empty input");
    check_finite(v, "logsumexp");
    double mx = *std::max_element(v.begin(), v.end());
    double total = 0.0;
    for (double x : v) total += std::exp(x - mx);
    return mx + std::log(total);
}

}  // namespace s2f
