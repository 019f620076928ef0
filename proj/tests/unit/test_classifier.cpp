#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "seq2form/classifier.hpp"
#include "seq2form/corpus.hpp"

using namespace s2f;

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Corpus corpus_from_lines(const std::string& tag, const std::vector<std::string>& lines) {
    auto path = std::filesystem::temp_directory_path() /
                ("s2f_clf_" + tag + "_" + std::to_string(::getpid()) + ".tsv");
    {
        std::ofstream out(path);
        for (const auto& l : lines) out << l << "\n";
    }
    Corpus c = load_corpus(path.string(), tag);
    std::filesystem::remove(path);
    return c;
}

Corpus side_a() {
    return corpus_from_lines("a", {
        "what rivers cross texas\tanswer river",
        "which rivers traverse ohio\tanswer river",
        "rivers in utah\tanswer river",
    });
}

Corpus side_b() {
    return corpus_from_lines("b", {
        "list all meetings today\tanswer meeting",
        "meetings on monday please\tanswer meeting",
        "show meetings tomorrow\tanswer meeting",
    });
}

}  // namespace

TEST_CASE("make_bow_problem labels a-side +1, b-side -1, bias last") {
    BowClassifier clf = make_bow_problem(side_a(), side_b(), 0.1);
    REQUIRE(clf.data.y.size() == 6);
    for (int i = 0; i < 3; ++i) CHECK(clf.data.y[static_cast<std::size_t>(i)] == 1.0);
    for (int i = 3; i < 6; ++i) CHECK(clf.data.y[static_cast<std::size_t>(i)] == -1.0);
    CHECK(clf.feature_names.back() == "<bias>");
    CHECK(clf.data.dim == static_cast<int>(clf.feature_names.size()));
    CHECK(static_cast<int>(clf.theta.size()) == clf.data.dim);

    // every example carries the bias feature with value 1 at the last index
    for (const auto& x : clf.data.x) {
        REQUIRE(!x.empty());
        CHECK(x.back().first == clf.data.dim - 1);
        CHECK(x.back().second == 1.0);
        for (std::size_t k = 1; k < x.size(); ++k) CHECK(x[k - 1].first < x[k].first);
    }

    CHECK_THROWS(make_bow_problem(side_a(), side_b(), 0.0));
    CHECK_THROWS(make_bow_problem(side_a(), side_b(), -1.0));
}

TEST_CASE("two-feature hand algebra: loss, gradient and hessian at a fixed theta") {
    // One example x = (1, bias 1), y = +1, theta = (t0, t1) = (0.5, -0.25).
    // margin = 0.25; data loss = log(1 + exp(-0.25)).
    BowClassifier clf;
    clf.lambda = 0.1;
    clf.data.dim = 2;
    clf.data.x = {SparseVec{{0, 1.0}, {1, 1.0}}};
    clf.data.y = {1.0};
    clf.theta = {0.5, -0.25};
    clf.feature_names = {"w", "<bias>"};

    double m = clf.margin(clf.data.x[0]);
    CHECK(m == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(clf.predict(clf.data.x[0]) == doctest::Approx(sigmoid(0.25)).epsilon(1e-12));

    double want_data = std::log(1.0 + std::exp(-0.25));
    CHECK(clf.data_loss(clf.data) == doctest::Approx(want_data).epsilon(1e-12));
    double want_full = want_data + 0.05 * (0.25 + 0.0625);
    CHECK(clf.loss(clf.data) == doctest::Approx(want_full).epsilon(1e-12));

    // d/dθ log(1+exp(-yθᵀx)) = -y σ(-yθᵀx) x
    double coeff = -sigmoid(-0.25);
    auto g = clf.data_gradient(clf.data);
    CHECK(g[0] == doctest::Approx(coeff).epsilon(1e-12));
    CHECK(g[1] == doctest::Approx(coeff).epsilon(1e-12));
    auto ge = clf.example_gradient(0);
    CHECK(ge[0] == doctest::Approx(coeff).epsilon(1e-12));

    // H = (1/n) Σ σ(m)(1-σ(m)) x xᵀ + λ I
    double w = sigmoid(0.25) * (1.0 - sigmoid(0.25));
    auto h = clf.hessian();
    CHECK(h[0] == doctest::Approx(w + 0.1).epsilon(1e-12));
    CHECK(h[1] == doctest::Approx(w).epsilon(1e-12));
    CHECK(h[2] == doctest::Approx(w).epsilon(1e-12));
    CHECK(h[3] == doctest::Approx(w + 0.1).epsilon(1e-12));
}

TEST_CASE("data_gradient equals the mean of example gradients") {
    BowClassifier clf = make_bow_problem(side_a(), side_b(), 0.2);
    for (std::size_t i = 0; i < clf.theta.size(); ++i)
        clf.theta[i] = 0.01 * static_cast<double>(i % 5) - 0.02;
    auto g = clf.data_gradient(clf.data);
    std::vector<double> mean(static_cast<std::size_t>(clf.data.dim), 0.0);
    for (int i = 0; i < static_cast<int>(clf.data.y.size()); ++i) {
        auto gi = clf.example_gradient(i);
        for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += gi[k];
    }
    for (std::size_t k = 0; k < mean.size(); ++k) {
        mean[k] /= static_cast<double>(clf.data.y.size());
        CHECK(g[k] == doctest::Approx(mean[k]).epsilon(1e-12));
    }
}

TEST_CASE("gradient matches finite differences of the full loss") {
    BowClassifier clf = make_bow_problem(side_a(), side_b(), 0.3);
    for (std::size_t i = 0; i < clf.theta.size(); ++i)
        clf.theta[i] = 0.05 * std::sin(static_cast<double>(i));
    // full gradient = data gradient + λθ
    auto g = clf.data_gradient(clf.data);
    const double h = 1e-6;
    for (std::size_t k = 0; k < clf.theta.size(); k += 3) {
        double keep = clf.theta[k];
        clf.theta[k] = keep + h;
        double up = clf.loss(clf.data);
        clf.theta[k] = keep - h;
        double dn = clf.loss(clf.data);
        clf.theta[k] = keep;
        double num = (up - dn) / (2.0 * h);
        CHECK(g[k] + clf.lambda * keep == doctest::Approx(num).epsilon(1e-5));
    }
}

TEST_CASE("fit reaches the gradient tolerance and separates separable data") {
    BowClassifier clf = train_classifier(side_a(), side_b(), 0.05);
    // stationarity of the regularized objective
    auto g = clf.data_gradient(clf.data);
    double norm = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        double full = g[k] + clf.lambda * clf.theta[k];
        norm += full * full;
    }
    CHECK(std::sqrt(norm) <= 2e-8);

    // disjoint vocabularies: every example lands on its own side
    for (std::size_t i = 0; i < clf.data.x.size(); ++i) {
        double p = clf.predict(clf.data.x[i]);
        if (clf.data.y[i] > 0)
            CHECK(p > 0.5);
        else
            CHECK(p < 0.5);
    }
}

TEST_CASE("stronger regularization shrinks the solution toward zero") {
    BowClassifier weak = train_classifier(side_a(), side_b(), 0.01);
    BowClassifier strong = train_classifier(side_a(), side_b(), 100.0);
    auto norm = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x * x;
        return std::sqrt(s);
    };
    CHECK(norm(strong.theta) < 0.01 * norm(weak.theta));
    CHECK(norm(strong.theta) < 0.02);  // λ → ∞ drives θ → 0
}

TEST_CASE("hessian eigenvalues are bounded below by lambda") {
    BowClassifier clf = train_classifier(side_a(), side_b(), 0.7);
    auto h = clf.hessian();
    int dim = clf.data.dim;
    // Rayleigh quotient on a few probe directions stays >= lambda
    for (int probe = 0; probe < 5; ++probe) {
        std::vector<double> v(static_cast<std::size_t>(dim), 0.0);
        for (int k = probe; k < dim; k += 5) v[static_cast<std::size_t>(k)] = 1.0;
        double vhv = 0.0, vv = 0.0;
        for (int r = 0; r < dim; ++r) {
            double row = 0.0;
            for (int c = 0; c < dim; ++c)
                row += h[static_cast<std::size_t>(r) * static_cast<std::size_t>(dim) +
                         static_cast<std::size_t>(c)] * v[static_cast<std::size_t>(c)];
            vhv += v[static_cast<std::size_t>(r)] * row;
            vv += v[static_cast<std::size_t>(r)] * v[static_cast<std::size_t>(r)];
        }
        CHECK(vhv / vv >= clf.lambda - 1e-12);
    }
}

TEST_CASE("solve_spd solves a known system and rejects indefinite input") {
    // A = [[4,2],[2,3]], b = [2,5] -> x = A⁻¹b = [-0.5, 2]
    std::vector<double> a{4, 2, 2, 3};
    std::vector<double> x = solve_spd(a, {2, 5});
    CHECK(x[0] == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(x[1] == doctest::Approx(2.0).epsilon(1e-12));

    std::vector<double> indef{1, 0, 0, -1};
    CHECK_THROWS_AS(solve_spd(indef, {1, 1}), std::runtime_error);
}

TEST_CASE("exact_inverse_hvp has a tiny verified residual") {
    BowClassifier clf = train_classifier(side_a(), side_b(), 0.4);
    std::vector<double> v(static_cast<std::size_t>(clf.data.dim), 0.0);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = 0.1 * static_cast<double>(k % 3) - 0.1;
    std::vector<double> x = exact_inverse_hvp(clf, v);

    auto h = clf.hessian();
    int dim = clf.data.dim;
    double res = 0.0;
    for (int r = 0; r < dim; ++r) {
        double row = 0.0;
        for (int c = 0; c < dim; ++c)
            row += h[static_cast<std::size_t>(r) * static_cast<std::size_t>(dim) +
                     static_cast<std::size_t>(c)] * x[static_cast<std::size_t>(c)];
        double d = row - v[static_cast<std::size_t>(r)];
        res += d * d;
    }
    CHECK(std::sqrt(res) <= 1e-10);
}

TEST_CASE("exact_inverse_hvp rejects oversized problems") {
    BowClassifier clf;
    clf.lambda = 0.1;
    clf.data.dim = 2001;
    clf.theta.assign(2001, 0.0);
    std::vector<double> v(2001, 1.0);
    CHECK_THROWS(exact_inverse_hvp(clf, v));
}
