#include "seq2form/influence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "seq2form/metrics.hpp"

namespace s2f {

namespace {

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double auto_scale(const BowClassifier& clf, double damping) {
    // Upper bound on any per-example Hessian eigenvalue: the sigmoid
    // curvature never exceeds 1/4, so λ_max(w x xᵀ) ≤ ‖x‖²/4.
    double max_sq = 0.0;
    for (const auto& x : clf.data.x) {
        double sq = 0.0;
        for (const auto& [i, v] : x) sq += v * v;
        max_sq = std::max(max_sq, sq);
    }
    return max_sq / 4.0 + clf.lambda + damping;
}

// (Ĥ + damping·I)·h for one example's regularized Hessian estimate.
void example_hvp_into(const BowClassifier& clf, std::size_t index, double damping,
                      const std::vector<double>& h, std::vector<double>& out) {
    const SparseVec& x = clf.data.x[index];
    double p = clf.predict(x);
    double w = p * (1.0 - p);
    double xh = 0.0;
    for (const auto& [i, v] : x) xh += v * h[static_cast<std::size_t>(i)];
    double reg = clf.lambda + damping;
    for (std::size_t i = 0; i < h.size(); ++i) out[i] = reg * h[i];
    for (const auto& [i, v] : x) out[static_cast<std::size_t>(i)] += w * xh * v;
}

void full_hvp_into(const BowClassifier& clf, double damping, const std::vector<double>& h,
                   std::vector<double>& out) {
    double reg = clf.lambda + damping;
    for (std::size_t i = 0; i < h.size(); ++i) out[i] = reg * h[i];
    double inv_n = 1.0 / static_cast<double>(clf.data.x.size());
    for (const auto& x : clf.data.x) {
        double p = clf.predict(x);
        double w = p * (1.0 - p);
        double xh = 0.0;
        for (const auto& [i, v] : x) xh += v * h[static_cast<std::size_t>(i)];
        for (const auto& [i, v] : x) out[static_cast<std::size_t>(i)] += inv_n * w * xh * v;
    }
}

}  // namespace

void HvpConfig::validate() const {
    if (repetitions < 1) throw std::invalid_argument("HvpConfig: repetitions must be >= 1");
    if (depth < 1) throw std::invalid_argument("HvpConfig: depth must be >= 1");
    if (damping < 0.0) throw std::invalid_argument("HvpConfig: damping must be >= 0");
    if (scale < 0.0) throw std::invalid_argument("HvpConfig: scale must be >= 0");
    if (sample_size < 1) throw std::invalid_argument("HvpConfig: sample_size must be >= 1");
    if (top_k < 1) throw std::invalid_argument("HvpConfig: top_k must be >= 1");
    if (lambda <= 0.0) throw std::invalid_argument("HvpConfig: lambda must be positive");
}

std::vector<double> stochastic_hvp(const BowClassifier& clf, const std::vector<double>& v,
                                   const HvpConfig& config, SeededRng& rng) {
    config.validate();
    if (static_cast<int>(v.size()) != clf.data.dim) {
        throw std::invalid_argument("stochastic_hvp: vector length " + std::to_string(v.size()) +
                                    " != dimension " + std::to_string(clf.data.dim));
    }
    double vnorm = norm2(v);
    if (vnorm == 0.0) return std::vector<double>(v.size(), 0.0);

    double scale = config.scale > 0.0 ? config.scale : auto_scale(clf, config.damping);
    std::vector<double> h = v;
    std::vector<double> hvp(v.size(), 0.0);
    std::size_t n = clf.data.x.size();
    for (int t = 0; t < config.depth; ++t) {
        if (config.full_batch) {
            full_hvp_into(clf, config.damping, h, hvp);
        } else {
            example_hvp_into(clf, rng.next_below(n), config.damping, h, hvp);
        }
        for (std::size_t i = 0; i < h.size(); ++i) h[i] = v[i] + h[i] - hvp[i] / scale;
        if (norm2(h) > 1e6 * vnorm) {
            throw std::runtime_error(
                "stochastic_hvp: recursion diverged at step " + std::to_string(t) +
                "; increase scale (current " + std::to_string(scale) + ")");
        }
    }
    for (double& x : h) x /= scale;
    return h;
}

double influence_score(const BowClassifier& clf, int index, const std::vector<double>& s_test) {
    return -dot(s_test, clf.example_gradient(index));
}

std::vector<InfluenceScore> influence_scores_exact(const BowClassifier& clf,
                                                   const BowDataset& test) {
    std::vector<double> s_test = exact_inverse_hvp(clf, clf.data_gradient(test));
    std::vector<InfluenceScore> out;
    out.reserve(clf.data.x.size());
    for (std::size_t i = 0; i < clf.data.x.size(); ++i) {
        InfluenceScore s;
        s.example_id = static_cast<int>(i);
        s.score = influence_score(clf, static_cast<int>(i), s_test);
        out.push_back(s);
    }
    return out;
}

SelectionResult select_influential(const Corpus& source, const Corpus& target,
                                   const HvpConfig& config) {
    config.validate();
    // Target is the positive class; its examples occupy the first block of
    // the classifier dataset, source examples the second.
    BowClassifier clf = train_classifier(target, source, config.lambda);
    std::size_t n_target = target.examples.size();
    std::size_t n_source = source.examples.size();

    BowDataset target_slice;
    target_slice.dim = clf.data.dim;
    target_slice.x.assign(clf.data.x.begin(), clf.data.x.begin() + static_cast<long>(n_target));
    target_slice.y.assign(clf.data.y.begin(), clf.data.y.begin() + static_cast<long>(n_target));
    std::vector<double> test_grad = clf.data_gradient(target_slice);

    SelectionResult result;
    result.scores.resize(n_source);
    for (std::size_t i = 0; i < n_source; ++i) {
        result.scores[i].example_id = static_cast<int>(i);
    }

    int k = std::min<int>(config.top_k, static_cast<int>(n_source));
    std::vector<std::size_t> ranked(n_source);
    std::vector<double> rep_scores(n_source);
    std::vector<double> exact_s_test;
    if (config.exact) exact_s_test = exact_inverse_hvp(clf, test_grad);
    for (int rep = 0; rep < config.repetitions; ++rep) {
        SeededRng rng(config.seed, fnv1a64("influence.rep-" + std::to_string(rep)));
        std::vector<double> s_test =
            config.exact ? exact_s_test : stochastic_hvp(clf, test_grad, config, rng);
        for (std::size_t i = 0; i < n_source; ++i) {
            rep_scores[i] =
                influence_score(clf, static_cast<int>(n_target + i), s_test);
            result.scores[i].score += rep_scores[i];
        }
        std::iota(ranked.begin(), ranked.end(), std::size_t{0});
        std::sort(ranked.begin(), ranked.end(), [&rep_scores](std::size_t a, std::size_t b) {
            if (rep_scores[a] != rep_scores[b]) return rep_scores[a] > rep_scores[b];
            return a < b;
        });
        for (int j = 0; j < k; ++j) ++result.scores[ranked[static_cast<std::size_t>(j)]].occurrences;
    }
    for (auto& s : result.scores) s.score /= config.repetitions;

    // Sample without replacement, probability proportional to counts.
    int want = std::min<int>(config.sample_size, static_cast<int>(n_source));
    std::vector<std::size_t> pool;
    std::vector<double> weights;
    for (std::size_t i = 0; i < n_source; ++i) {
        if (result.scores[i].occurrences > 0) {
            pool.push_back(i);
            weights.push_back(static_cast<double>(result.scores[i].occurrences));
        }
    }
    SeededRng sample_rng(config.seed, fnv1a64("influence.sample"));
    while (static_cast<int>(result.sampled_ids.size()) < want && !pool.empty()) {
        double total = std::accumulate(weights.begin(), weights.end(), 0.0);
        double u = sample_rng.uniform01() * total;
        std::size_t pick = 0;
        double acc = 0.0;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            acc += weights[i];
            if (u < acc) {
                pick = i;
                break;
            }
            pick = i;  // numeric slack: fall through to the last entry
        }
        result.sampled_ids.push_back(static_cast<int>(pool[pick]));
        pool.erase(pool.begin() + static_cast<long>(pick));
        weights.erase(weights.begin() + static_cast<long>(pick));
    }
    if (static_cast<int>(result.sampled_ids.size()) < want) {
        // Not enough examples ever hit a top-k; pad uniformly at random.
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < n_source; ++i) {
            if (std::find(result.sampled_ids.begin(), result.sampled_ids.end(),
                          static_cast<int>(i)) == result.sampled_ids.end()) {
                rest.push_back(i);
            }
        }
        sample_rng.shuffle(rest);
        while (static_cast<int>(result.sampled_ids.size()) < want && !rest.empty()) {
            result.sampled_ids.push_back(static_cast<int>(rest.back()));
            rest.pop_back();
            ++result.uniform_fill;
        }
        std::cerr << "select_influential: filled " << result.uniform_fill
                  << " sample slots uniformly (too few nonzero counts)\n";
    }
    std::sort(result.scores.begin(), result.scores.end(),
              [](const InfluenceScore& a, const InfluenceScore& b) {
                  if (a.score != b.score) return a.score > b.score;
                  return a.example_id < b.example_id;
              });
    return result;
}

std::vector<int> select_random(const Corpus& source, int sample_size, std::uint64_t seed) {
    std::vector<int> ids(source.examples.size());
    std::iota(ids.begin(), ids.end(), 0);
    SeededRng rng(seed, fnv1a64("influence.random-baseline"));
    rng.shuffle(ids);
    ids.resize(std::min<std::size_t>(ids.size(), static_cast<std::size_t>(sample_size)));
    return ids;
}

void write_selection_jsonl(const SelectionResult& result, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("write_selection_jsonl: cannot open " + path);
    for (const auto& s : result.scores) {
        nlohmann::json row = {{"id", s.example_id}, {"score", s.score}, {"count", s.occurrences}};
        os << row.dump() << '\n';
    }
    nlohmann::json tail = {{"sampled", result.sampled_ids}};
    os << tail.dump() << '\n';
    if (!os) throw std::runtime_error("write_selection_jsonl: write failed for " + path);
}

Corpus merge_corpora(const Corpus& base, const std::vector<Example>& extra) {
    Corpus merged;
    merged.tag = base.tag;
    merged.examples = base.examples;
    for (const auto& e : extra) merged.examples.push_back(e);
    for (std::size_t i = 0; i < merged.examples.size(); ++i) {
        merged.examples[i].id = static_cast<int>(i);
    }
    // The merged set is training data; vocabularies rebuild from all of it.
    std::vector<std::vector<std::string>> src_seqs, tgt_seqs;
    for (const auto& e : merged.examples) {
        src_seqs.push_back(e.src);
        tgt_seqs.push_back(e.tgt);
    }
    merged.source_vocab = Vocabulary::build(src_seqs);
    merged.target_vocab = Vocabulary::build(tgt_seqs);
    reindex(merged);
    return merged;
}

std::vector<SweepPoint> augment_and_sweep(const Corpus& target_train, const Corpus& target_test,
                                          const Corpus& source, const std::vector<int>& selected,
                                          const std::vector<int>& steps,
                                          const TrainConfig& train_config) {
    std::vector<SweepPoint> curve;
    for (int n : steps) {
        if (n < 0 || n > static_cast<int>(selected.size())) {
            throw std::invalid_argument("augment_and_sweep: step " + std::to_string(n) +
                                        " outside selected list of size " +
                                        std::to_string(selected.size()));
        }
        std::vector<Example> extra;
        for (int i = 0; i < n; ++i) {
            extra.push_back(source.examples[static_cast<std::size_t>(selected[static_cast<std::size_t>(i)])]);
        }
        Corpus merged = merge_corpora(target_train, extra);
        auto [model, train_report] = train_new(merged, train_config);
        MetricReport metrics = evaluate(model, target_test, merged.source_vocab,
                                        merged.target_vocab);
        SweepPoint point;
        point.n = n;
        point.seq = metrics.seq_accuracy;
        point.tok = metrics.tok_accuracy;
        curve.push_back(point);
    }
    return curve;
}

void write_sweep_csv(const std::vector<SweepPoint>& curve, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("write_sweep_csv: cannot open " + path);
    os << "n,seq,tok\n";
    for (const auto& p : curve) {
        os << p.n << ',' << p.seq << ',' << p.tok << '\n';
    }
    if (!os) throw std::runtime_error("write_sweep_csv: write failed for " + path);
}

std::vector<DomainAffinity> domain_affinity(const Corpus& target_train,
                                            const Corpus& target_test,
                                            const std::vector<Corpus>& candidates,
                                            const std::string& metric,
                                            const TrainConfig& train_config) {
    if (metric != "seq" && metric != "tok") {
        throw std::invalid_argument("domain_affinity: metric must be seq or tok, got " + metric);
    }
    auto score = [&](const Corpus& train_corpus) {
        auto [model, report] = train_new(train_corpus, train_config);
        MetricReport m = evaluate(model, target_test, train_corpus.source_vocab,
                                  train_corpus.target_vocab);
        return metric == "seq" ? m.seq_accuracy : m.tok_accuracy;
    };
    double baseline = score(target_train);

    std::vector<DomainAffinity> ranked;
    for (const auto& candidate : candidates) {
        Corpus merged = merge_corpora(target_train, candidate.examples);
        DomainAffinity a;
        a.domain = candidate.tag;
        a.gain = score(merged) - baseline;
        ranked.push_back(std::move(a));
    }
    std::sort(ranked.begin(), ranked.end(), [](const DomainAffinity& a, const DomainAffinity& b) {
        if (a.gain != b.gain) return a.gain > b.gain;
        return a.domain < b.domain;
    });
    return ranked;
}

}  // namespace s2f
