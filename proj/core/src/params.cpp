#include "seq2form/params.hpp"

#include <cmath>
#include <stdexcept>

#include "seq2form/rng.hpp"

namespace s2f {

Tensor& ParameterStore::create(const std::string& name, Shape shape) {
    auto it = tensors_.find(name);
    if (it != tensors_.end()) {
        if (it->second.shape != shape) {
            throw std::invalid_argument("ParameterStore: " + name + " exists with shape " +
                                        shape_str(it->second.shape) + ", requested " +
                                        shape_str(shape));
        }
        return it->second;
    }
    auto [pos, ok] = tensors_.emplace(name, Tensor(std::move(shape)));
    (void)ok;
    return pos->second;
}

void ParameterStore::init_uniform(std::uint64_t seed, double range) {
    for (auto& [name, t] : tensors_) {
        SeededRng rng(seed, fnv1a64(name));
        for (double& v : t.values) v = rng.uniform(-range, range);
    }
}

bool ParameterStore::contains(const std::string& name) const {
    return tensors_.find(name) != tensors_.end();
}

Tensor& ParameterStore::get(const std::string& name) {
    auto it = tensors_.find(name);
    if (it == tensors_.end()) {
        throw std::out_of_range("ParameterStore: no parameter named " + name);
    }
    return it->second;
}

const Tensor& ParameterStore::get(const std::string& name) const {
    auto it = tensors_.find(name);
    if (it == tensors_.end()) {
        throw std::out_of_range("ParameterStore: no parameter named " + name);
    }
    return it->second;
}

void ParameterStore::zero_grads() {
    for (auto& [name, t] : tensors_) t.zero_grad();
}

double ParameterStore::grad_norm() const {
    double sq = 0.0;
    for (const auto& [name, t] : tensors_) {
        if (!t.has_grad()) continue;
        for (double g : t.grad) sq += g * g;
    }
    return std::sqrt(sq);
}

void ParameterStore::scale_grads(double factor) {
    for (auto& [name, t] : tensors_) {
        if (!t.has_grad()) continue;
        for (double& g : t.grad) g *= factor;
    }
}

void ParameterStore::sgd_step(double lr) {
    for (auto& [name, t] : tensors_) {
        if (!t.has_grad()) continue;
        for (std::size_t i = 0; i < t.values.size(); ++i) t.values[i] -= lr * t.grad[i];
    }
}

std::size_t ParameterStore::total_values() const {
    std::size_t n = 0;
    for (const auto& [name, t] : tensors_) n += t.values.size();
    return n;
}

std::vector<NamedParam> ParameterStore::named() {
    std::vector<NamedParam> out;
    out.reserve(tensors_.size());
    for (auto& [name, t] : tensors_) out.push_back({name, &t});
    return out;
}

std::vector<std::string> ParameterStore::names() const {
    std::vector<std::string> out;
    out.reserve(tensors_.size());
    for (const auto& [name, t] : tensors_) out.push_back(name);
    return out;
}

}  // namespace s2f
