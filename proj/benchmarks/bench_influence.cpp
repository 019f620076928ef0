#include <benchmark/benchmark.h>

#include <set>
#include <string>
#include <vector>

#include "seq2form/classifier.hpp"
#include "seq2form/influence.hpp"
#include "seq2form/rng.hpp"

namespace {

using namespace s2f;

// Synthetic sparse logistic problem: n examples over `features` binary
// features plus bias, planted linear labels.
BowClassifier make_problem(int n, int features, std::uint64_t seed) {
    SeededRng rng(seed, fnv1a64("bench.problem"));
    std::vector<double> planted(static_cast<std::size_t>(features) + 1);
    for (double& w : planted) w = rng.uniform(-1.0, 1.0);

    BowClassifier clf;
    clf.lambda = 0.1;
    clf.data.dim = features + 1;
    clf.theta.assign(static_cast<std::size_t>(features) + 1, 0.0);
    for (int f = 0; f < features; ++f) clf.feature_names.push_back("w" + std::to_string(f));
    clf.feature_names.push_back("<bias>");

    int active = std::max(3, features / 6);
    for (int i = 0; i < n; ++i) {
        std::set<int> chosen;
        while (static_cast<int>(chosen.size()) < active)
            chosen.insert(static_cast<int>(rng.next_below(static_cast<std::uint64_t>(features))));
        SparseVec x;
        double margin = planted.back();
        for (int f : chosen) {
            x.emplace_back(f, 1.0);
            margin += planted[static_cast<std::size_t>(f)];
        }
        x.emplace_back(features, 1.0);
        clf.data.x.push_back(std::move(x));
        clf.data.y.push_back(margin >= 0.0 ? 1.0 : -1.0);
    }
    return clf;
}

void BM_NewtonFit(benchmark::State& state) {
    BowClassifier base = make_problem(static_cast<int>(state.range(0)), 50, 3);
    for (auto _ : state) {
        BowClassifier clf = base;
        std::fill(clf.theta.begin(), clf.theta.end(), 0.0);
        fit(clf);
        benchmark::DoNotOptimize(clf.theta.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_NewtonFit)->RangeMultiplier(2)->Range(128, 1024)->Complexity();

void BM_ExactInverseHvp(benchmark::State& state) {
    BowClassifier clf = make_problem(500, static_cast<int>(state.range(0)), 5);
    fit(clf);
    std::vector<double> v = clf.data_gradient(clf.data);
    v[0] += 0.1;
    for (auto _ : state) {
        std::vector<double> x = exact_inverse_hvp(clf, v);
        benchmark::DoNotOptimize(x.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ExactInverseHvp)->RangeMultiplier(2)->Range(32, 256)->Complexity();

void BM_StochasticHvp(benchmark::State& state) {
    BowClassifier clf = make_problem(500, 50, 7);
    fit(clf);
    std::vector<double> v = clf.data_gradient(clf.data);
    v[0] += 0.1;
    HvpConfig cfg;
    cfg.depth = static_cast<int>(state.range(0));
    std::uint64_t stream = 0;
    for (auto _ : state) {
        SeededRng rng(11, stream++);
        std::vector<double> h = stochastic_hvp(clf, v, cfg, rng);
        benchmark::DoNotOptimize(h.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_StochasticHvp)->RangeMultiplier(4)->Range(256, 4096)->Complexity();

}  // namespace

BENCHMARK_MAIN();
