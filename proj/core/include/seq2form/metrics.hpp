#pragma once

#include <string>
#include <vector>

#include "seq2form/corpus.hpp"
#include "seq2form/model.hpp"

namespace s2f {

// Exact-match fraction over whole sequences (surface tokens, EOS excluded).
// Throws on list length mismatch.
double sequence_accuracy(const std::vector<std::vector<std::string>>& predictions,
                         const std::vector<std::vector<std::string>>& golds);

// Micro-averaged positional accuracy: matching positions within the shared
// prefix, summed over examples, divided by total gold length. Extra
// predicted tokens neither count nor cost.
double token_accuracy(const std::vector<std::vector<std::string>>& predictions,
                      const std::vector<std::vector<std::string>>& golds);

struct ExampleRecord {
    std::vector<std::string> source;
    std::vector<std::string> gold;
    std::vector<std::string> predicted;
    std::vector<Origin> origins;  // one per predicted token
    bool seq_match = false;
};

struct MetricReport {
    double seq_accuracy = 0.0;
    double tok_accuracy = 0.0;
    int n = 0;
    std::string corpus_tag;
    std::string config_hash;
    std::vector<ExampleRecord> records;
};

// Greedy-decodes every example against the given (training-side)
// vocabularies. `threads` > 1 fans decoding out across a worker pool; the
// model is only read, per the frozen-parameter contract.
MetricReport evaluate(Model& model, const Corpus& eval_corpus, const Vocabulary& source_vocab,
                      const Vocabulary& target_vocab, int threads = 1);

// Writes summary.txt, metrics.json ({seq, tok, n, config_hash}) and
// examples.tsv (source, gold, predicted, origin trace) under `dir`.
void emit_report(const MetricReport& report, const std::string& dir);

// metrics.json round-trip helpers.
std::string metrics_json(const MetricReport& report);
MetricReport parse_metrics_json(const std::string& text);

}  // namespace s2f
