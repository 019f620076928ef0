#pragma once

#include <string>
#include <utility>
#include <vector>

#include "seq2form/corpus.hpp"

namespace s2f {

// Sparse feature vector: (feature index, value) pairs, indices strictly
// increasing. The bias is folded in as a constant-1 feature at the last
// index, so it is regularized with everything else and the Hessian stays
// bounded below by lambda.
using SparseVec = std::vector<std::pair<int, double>>;

struct BowDataset {
    std::vector<SparseVec> x;
    std::vector<double> y;  // +1 / -1
    int dim = 0;            // feature count including the bias column
};

// L2-regularized logistic regression over bag-of-words utterance features.
// Loss: (1/n) Σ log(1 + exp(-y θᵀx)) + (λ/2)‖θ‖².
class BowClassifier {
public:
    std::vector<double> theta;
    double lambda = 0.0;
    BowDataset data;                         // retained: Hessian work needs it
    std::vector<std::string> feature_names;  // per index; last is "<bias>"

    double margin(const SparseVec& x) const;               // θᵀx
    double predict(const SparseVec& x) const;              // σ(θᵀx)
    double loss(const BowDataset& set) const;              // mean data loss + reg
    double data_loss(const BowDataset& set) const;         // mean data loss only
    // Mean data-loss gradient over `set` (regularizer excluded: influence
    // work perturbs the data term, the regularizer stays fixed).
    std::vector<double> data_gradient(const BowDataset& set) const;
    // Single-example data-loss gradient.
    std::vector<double> example_gradient(int index) const;
    // Full regularized Hessian at theta, materialized densely (dim ≤ 2000).
    std::vector<double> hessian() const;  // row-major dim x dim
};

// Turns the two corpora into one labeled dataset (a: +1, b: -1) with a
// shared feature vocabulary built from both sides, bias column appended.
BowClassifier make_bow_problem(const Corpus& a, const Corpus& b, double lambda);

// Newton iterations with Cholesky solves and backtracking, run to gradient
// norm ≤ 1e-8. Deterministic: the problem is strictly convex.
BowClassifier train_classifier(const Corpus& a, const Corpus& b, double lambda);
void fit(BowClassifier& clf, double grad_tol = 1e-8, int max_iter = 200);

// Solves H x = v with the exact regularized Hessian via Cholesky.
// Throws when dim > 2000 (materialization guard), when H is numerically
// singular, or when the verified residual exceeds 1e-10.
std::vector<double> exact_inverse_hvp(const BowClassifier& clf, const std::vector<double>& v);

// Dense SPD solve helper (Cholesky). Throws std::runtime_error when a pivot
// fails, i.e. the matrix is not positive definite to machine precision.
std::vector<double> solve_spd(std::vector<double> a, std::vector<double> b);

}  // namespace s2f
