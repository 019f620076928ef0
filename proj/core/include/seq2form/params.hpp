#pragma once

#include <map>
#include <string>
#include <vector>

#include "seq2form/gradcheck.hpp"
#include "seq2form/tensor.hpp"

namespace s2f {

// Named parameter tensors, ordered by name. Each tensor is initialized from
// its own RNG stream keyed by the parameter's name, so the values a given
// parameter receives do not depend on which other parameters exist or on
// creation order. That keeps differently-configured models bit-comparable on
// their shared parameters.
class ParameterStore {
public:
    // Creates (or returns the existing) tensor under `name`. An existing
    // tensor must match `shape` or this throws.
    Tensor& create(const std::string& name, Shape shape);

    // Fills every tensor i.i.d. uniform on [-range, range], each from stream
    // fnv1a64(name) of the given seed.
    void init_uniform(std::uint64_t seed, double range);

    bool contains(const std::string& name) const;
    Tensor& get(const std::string& name);                // throws if absent
    const Tensor& get(const std::string& name) const;    // throws if absent

    void zero_grads();
    // L2 norm over all grads (tensors without grads count as zero).
    double grad_norm() const;
    // In-place multiply of all grads by factor.
    void scale_grads(double factor);
    // values -= lr * grad for every tensor carrying a grad.
    void sgd_step(double lr);

    std::size_t size() const { return tensors_.size(); }
    std::size_t total_values() const;

    std::vector<NamedParam> named() ;
    std::vector<std::string> names() const;

    auto begin() { return tensors_.begin(); }
    auto end() { return tensors_.end(); }
    auto begin() const { return tensors_.begin(); }
    auto end() const { return tensors_.end(); }

private:
    std::map<std::string, Tensor> tensors_;  // ordered: stable iteration
};

}  // namespace s2f
