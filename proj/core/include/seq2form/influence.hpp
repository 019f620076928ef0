#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seq2form/classifier.hpp"
#include "seq2form/corpus.hpp"
#include "seq2form/rng.hpp"
#include "seq2form/train.hpp"

namespace s2f {

struct HvpConfig {
    int repetitions = 1000;
    int depth = 5000;      // LiSSA recursion length
    double damping = 0.0;  // added to the Hessian diagonal inside the recursion
    // Recursion scale; 0 picks max_i(‖x_i‖²/4) + λ + damping automatically,
    // an upper bound on the largest per-example Hessian eigenvalue.
    double scale = 0.0;
    int sample_size = 100;  // examples drawn by select_influential
    int top_k = 100;        // examples counted per repetition
    bool full_batch = false;  // degenerate mode: exact Hessian each step
    // Replace the stochastic recursion by the exact inverse-Hessian solve
    // (selection becomes deterministic across repetitions).
    bool exact = false;
    double lambda = 0.1;  // classifier regularization
    std::uint64_t seed = 13;

    void validate() const;
};

// LiSSA-style stochastic inverse-HVP:
//   h_0 = v;  h_{t+1} = v + (I − (Ĥ_t + damping·I)/scale) h_t
// with Ĥ_t a single uniformly-sampled example's Hessian (or the full Hessian
// when full_batch). Returns h_depth / scale.
// Throws when ‖h_t‖ grows beyond 1e6·‖v‖, advising a larger scale.
std::vector<double> stochastic_hvp(const BowClassifier& clf, const std::vector<double>& v,
                                   const HvpConfig& config, SeededRng& rng);

struct InfluenceScore {
    int example_id = -1;
    double score = 0.0;  // up-weighting influence on the test loss
    int occurrences = 0;  // times in the per-repetition top-k
};

// Classical up-weighting influence of training example `index` against a
// precomputed s_test = H⁻¹ ∇L(test): score = −s_testᵀ ∇ℓ(z).
double influence_score(const BowClassifier& clf, int index, const std::vector<double>& s_test);

// Influence of every classifier training example on `test`'s mean loss,
// using the exact inverse Hessian.
std::vector<InfluenceScore> influence_scores_exact(const BowClassifier& clf,
                                                   const BowDataset& test);

struct SelectionResult {
    std::vector<InfluenceScore> scores;  // per source example, mean over reps
    std::vector<int> sampled_ids;        // indices into source.examples
    int uniform_fill = 0;  // how many ids were filled in uniformly (logged)
};

// Trains a target-vs-source domain classifier, runs `repetitions`
// independent inverse-HVP estimates of the target-side test gradient (fresh
// RNG stream each), counts per-repetition top-k membership of the source
// examples, then samples sample_size of them without replacement with
// probability proportional to the counts.
SelectionResult select_influential(const Corpus& source, const Corpus& target,
                                   const HvpConfig& config);

// Baseline sampler: uniform without replacement, same interface.
std::vector<int> select_random(const Corpus& source, int sample_size, std::uint64_t seed);

// Writes one JSON object per source example: {"id":..,"score":..,"count":..},
// then a final line {"sampled":[...]}.
void write_selection_jsonl(const SelectionResult& result, const std::string& path);

struct SweepPoint {
    int n = 0;
    double seq = 0.0;
    double tok = 0.0;
};

// For each prefix size in `steps`, trains on target_train + the first n
// selected source examples and evaluates on target_test.
std::vector<SweepPoint> augment_and_sweep(const Corpus& target_train, const Corpus& target_test,
                                          const Corpus& source, const std::vector<int>& selected,
                                          const std::vector<int>& steps,
                                          const TrainConfig& train_config);

void write_sweep_csv(const std::vector<SweepPoint>& curve, const std::string& path);

struct DomainAffinity {
    std::string domain;
    double gain = 0.0;  // metric improvement over the target-only baseline
};

// Trains target-only, then target+candidate for every candidate, and ranks
// candidates by gain on the chosen metric ("seq" or "tok").
std::vector<DomainAffinity> domain_affinity(const Corpus& target_train,
                                            const Corpus& target_test,
                                            const std::vector<Corpus>& candidates,
                                            const std::string& metric,
                                            const TrainConfig& train_config);

// Merges extra examples into a training corpus: surfaces are appended and
// vocabularies rebuilt from the merged training data.
Corpus merge_corpora(const Corpus& base, const std::vector<Example>& extra);

}  // namespace s2f
