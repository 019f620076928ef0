#include "seq2form/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace s2f {

namespace {

double stable_sigmoid(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

// log(1 + exp(x)) without overflow.
double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

double BowClassifier::margin(const SparseVec& x) const {
    double m = 0.0;
    for (const auto& [i, v] : x) m += theta[static_cast<std::size_t>(i)] * v;
    return m;
}

double BowClassifier::predict(const SparseVec& x) const { return stable_sigmoid(margin(x)); }

double BowClassifier::data_loss(const BowDataset& set) const {
    if (set.x.empty()) throw std::invalid_argument("BowClassifier: empty dataset");
    double total = 0.0;
    for (std::size_t i = 0; i < set.x.size(); ++i) {
        total += softplus(-set.y[i] * margin(set.x[i]));
    }
    return total / static_cast<double>(set.x.size());
}

double BowClassifier::loss(const BowDataset& set) const {
    double reg = 0.0;
    for (double t : theta) reg += t * t;
    return data_loss(set) + 0.5 * lambda * reg;
}

std::vector<double> BowClassifier::data_gradient(const BowDataset& set) const {
    if (set.x.empty()) throw std::invalid_argument("BowClassifier: empty dataset");
    std::vector<double> grad(theta.size(), 0.0);
    for (std::size_t i = 0; i < set.x.size(); ++i) {
        // d/dθ log(1+exp(-y m)) = -σ(-y m)·y·x
        double coeff = -stable_sigmoid(-set.y[i] * margin(set.x[i])) * set.y[i];
        for (const auto& [j, v] : set.x[i]) grad[static_cast<std::size_t>(j)] += coeff * v;
    }
    for (double& g : grad) g /= static_cast<double>(set.x.size());
    return grad;
}

std::vector<double> BowClassifier::example_gradient(int index) const {
    const SparseVec& x = data.x[static_cast<std::size_t>(index)];
    double y = data.y[static_cast<std::size_t>(index)];
    double coeff = -stable_sigmoid(-y * margin(x)) * y;
    std::vector<double> grad(theta.size(), 0.0);
    for (const auto& [j, v] : x) grad[static_cast<std::size_t>(j)] = coeff * v;
    return grad;
}

std::vector<double> BowClassifier::hessian() const {
    auto dim = static_cast<std::size_t>(data.dim);
    std::vector<double> h(dim * dim, 0.0);
    for (std::size_t i = 0; i < data.x.size(); ++i) {
        double p = stable_sigmoid(margin(data.x[i]));
        double w = p * (1.0 - p);
        for (const auto& [a, va] : data.x[i]) {
            for (const auto& [b, vb] : data.x[i]) {
                h[static_cast<std::size_t>(a) * dim + static_cast<std::size_t>(b)] += w * va * vb;
            }
        }
    }
    double inv_n = 1.0 / static_cast<double>(data.x.size());
    for (double& v : h) v *= inv_n;
    for (std::size_t d = 0; d < dim; ++d) h[d * dim + d] += lambda;
    return h;
}

BowClassifier make_bow_problem(const Corpus& a, const Corpus& b, double lambda) {
    if (a.examples.empty() || b.examples.empty()) {
        throw std::invalid_argument("make_bow_problem: both corpora must be nonempty");
    }
    if (lambda <= 0.0) {
        throw std::invalid_argument("make_bow_problem: lambda must be positive");
    }

    // Shared feature vocabulary over both corpora's source tokens, ordered
    // lexicographically for stability.
    std::map<std::string, int> features;
    auto collect = [&features](const Corpus& c) {
        for (const auto& e : c.examples) {
            for (const auto& t : e.src) features.emplace(t, 0);
        }
    };
    collect(a);
    collect(b);
    int next = 0;
    for (auto& [tok, idx] : features) idx = next++;

    BowClassifier clf;
    clf.lambda = lambda;
    clf.data.dim = next + 1;  // + bias
    clf.feature_names.reserve(static_cast<std::size_t>(clf.data.dim));
    for (const auto& [tok, idx] : features) clf.feature_names.push_back(tok);
    clf.feature_names.push_back("<bias>");

    auto add_examples = [&](const Corpus& c, double label) {
        for (const auto& e : c.examples) {
            std::map<int, double> counts;
            for (const auto& t : e.src) counts[features.at(t)] += 1.0;
            SparseVec x(counts.begin(), counts.end());
            x.emplace_back(clf.data.dim - 1, 1.0);  // bias
            clf.data.x.push_back(std::move(x));
            clf.data.y.push_back(label);
        }
    };
    add_examples(a, +1.0);
    add_examples(b, -1.0);
    clf.theta.assign(static_cast<std::size_t>(clf.data.dim), 0.0);
    return clf;
}

void fit(BowClassifier& clf, double grad_tol, int max_iter) {
    auto full_gradient = [&clf] {
        std::vector<double> g = clf.data_gradient(clf.data);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += clf.lambda * clf.theta[i];
        return g;
    };

    for (int iter = 0; iter < max_iter; ++iter) {
        std::vector<double> grad = full_gradient();
        if (norm2(grad) <= grad_tol) return;

        std::vector<double> step = solve_spd(clf.hessian(), grad);  // Newton direction
        double f0 = clf.loss(clf.data);
        double decrement = 0.0;
        for (std::size_t i = 0; i < grad.size(); ++i) decrement += grad[i] * step[i];

        // Backtracking on the Armijo condition; Newton steps on this strictly
        // convex objective accept t=1 almost always.
        std::vector<double> theta0 = clf.theta;
        double t = 1.0;
        for (int bt = 0; bt < 60; ++bt) {
            for (std::size_t i = 0; i < clf.theta.size(); ++i) {
                clf.theta[i] = theta0[i] - t * step[i];
            }
            if (clf.loss(clf.data) <= f0 - 1e-4 * t * decrement) break;
            t *= 0.5;
        }
    }
    if (norm2(full_gradient()) > grad_tol) {
        throw std::runtime_error("fit: Newton did not reach gradient norm " +
                                 std::to_string(grad_tol));
    }
}

BowClassifier train_classifier(const Corpus& a, const Corpus& b, double lambda) {
    BowClassifier clf = make_bow_problem(a, b, lambda);
    fit(clf);
    return clf;
}

std::vector<double> solve_spd(std::vector<double> a, std::vector<double> b) {
    std::size_t n = b.size();
    if (a.size() != n * n) throw std::invalid_argument("solve_spd: dimension mismatch");

    // In-place Cholesky a = L Lᵀ (lower triangle).
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k) diag -= a[j * n + k] * a[j * n + k];
        if (diag <= 0.0 || !std::isfinite(diag)) {
            throw std::runtime_error("solve_spd: matrix is not positive definite (pivot " +
                                     std::to_string(diag) + " at " + std::to_string(j) + ")");
        }
        double root = std::sqrt(diag);
        a[j * n + j] = root;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) v -= a[i * n + k] * a[j * n + k];
            a[i * n + j] = v / root;
        }
    }
    // Forward then backward substitution.
    for (std::size_t i = 0; i < n; ++i) {
        double v = b[i];
        for (std::size_t k = 0; k < i; ++k) v -= a[i * n + k] * b[k];
        b[i] = v / a[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
        double v = b[i];
        for (std::size_t k = i + 1; k < n; ++k) v -= a[k * n + i] * b[k];
        b[i] = v / a[i * n + i];
    }
    return b;
}

std::vector<double> exact_inverse_hvp(const BowClassifier& clf, const std::vector<double>& v) {
    if (clf.data.dim > 2000) {
        throw std::invalid_argument("exact_inverse_hvp: dimension " +
                                    std::to_string(clf.data.dim) +
                                    " too large to materialize the Hessian (limit 2000)");
    }
    if (static_cast<int>(v.size()) != clf.data.dim) {
        throw std::invalid_argument("exact_inverse_hvp: vector length " +
                                    std::to_string(v.size()) + " != dimension " +
                                    std::to_string(clf.data.dim));
    }
    std::vector<double> h = clf.hessian();
    std::vector<double> x = solve_spd(h, v);

    // Residual check against the untouched Hessian.
    double vnorm = norm2(v);
    if (vnorm > 0.0) {
        std::size_t n = v.size();
        std::vector<double> hx(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += h[i * n + j] * x[j];
            hx[i] = acc;
        }
        double rnorm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double r = hx[i] - v[i];
            rnorm += r * r;
        }
        rnorm = std::sqrt(rnorm);
        if (rnorm / vnorm > 1e-10) {
            throw std::runtime_error("exact_inverse_hvp: residual " + std::to_string(rnorm / vnorm) +
                                     " exceeds 1e-10");
        }
    }
    return x;
}

}  // namespace s2f
