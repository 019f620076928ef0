#include "seq2form/metrics.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

namespace s2f {

namespace {

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += tokens[i];
    }
    return out;
}

void check_lengths(std::size_t p, std::size_t g, const char* what) {
    if (p != g) {
        throw std::invalid_argument(std::string(what) + ": " + std::to_string(p) +
                                    " predictions vs " + std::to_string(g) + " golds");
    }
}

}  // namespace

double sequence_accuracy(const std::vector<std::vector<std::string>>& predictions,
                         const std::vector<std::vector<std::string>>& golds) {
    check_lengths(predictions.size(), golds.size(), "sequence_accuracy");
    if (golds.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < golds.size(); ++i) {
        if (predictions[i] == golds[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(golds.size());
}

double token_accuracy(const std::vector<std::vector<std::string>>& predictions,
                      const std::vector<std::vector<std::string>>& golds) {
    check_lengths(predictions.size(), golds.size(), "token_accuracy");
    long long matched = 0, total = 0;
    for (std::size_t i = 0; i < golds.size(); ++i) {
        total += static_cast<long long>(golds[i].size());
        std::size_t upto = std::min(predictions[i].size(), golds[i].size());
        for (std::size_t j = 0; j < upto; ++j) {
            if (predictions[i][j] == golds[i][j]) ++matched;
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(total);
}

MetricReport evaluate(Model& model, const Corpus& eval_corpus, const Vocabulary& source_vocab,
                      const Vocabulary& target_vocab, int threads) {
    MetricReport report;
    report.n = static_cast<int>(eval_corpus.examples.size());
    report.corpus_tag = eval_corpus.tag;
    report.records.resize(eval_corpus.examples.size());

    auto decode_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const Example& e = eval_corpus.examples[i];
            // Index the source against the model's vocabulary; the stored
            // ids may come from a different corpus.
            std::vector<int> src_ids;
            src_ids.reserve(e.src.size());
            for (const auto& t : e.src) src_ids.push_back(source_vocab.index_of(t));
            DecodeResult decoded =
                model.greedy_decode(src_ids, e.src, source_vocab, target_vocab);
            ExampleRecord& rec = report.records[i];
            rec.source = e.src;
            rec.gold = e.tgt;
            rec.predicted = std::move(decoded.tokens);
            rec.origins = std::move(decoded.origins);
            rec.seq_match = rec.predicted == rec.gold;
        }
    };

    std::size_t n = eval_corpus.examples.size();
    if (threads <= 1 || n < 2) {
        decode_range(0, n);
    } else {
        std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
        std::vector<std::thread> pool;
        std::size_t chunk = (n + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            std::size_t begin = w * chunk;
            std::size_t end = std::min(n, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(decode_range, begin, end);
        }
        for (auto& t : pool) t.join();
    }

    std::vector<std::vector<std::string>> preds, golds;
    preds.reserve(n);
    golds.reserve(n);
    for (const auto& rec : report.records) {
        preds.push_back(rec.predicted);
        golds.push_back(rec.gold);
    }
    report.seq_accuracy = sequence_accuracy(preds, golds);
    report.tok_accuracy = token_accuracy(preds, golds);
    return report;
}

std::string metrics_json(const MetricReport& report) {
    nlohmann::json j = {{"seq", report.seq_accuracy},
                        {"tok", report.tok_accuracy},
                        {"n", report.n},
                        {"config_hash", report.config_hash}};
    return j.dump(2) + "\n";
}

MetricReport parse_metrics_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    MetricReport report;
    report.seq_accuracy = j.at("seq").get<double>();
    report.tok_accuracy = j.at("tok").get<double>();
    report.n = j.at("n").get<int>();
    report.config_hash = j.at("config_hash").get<std::string>();
    return report;
}

void emit_report(const MetricReport& report, const std::string& dir) {
    std::filesystem::create_directories(dir);

    {
        std::ofstream os(dir + "/metrics.json", std::ios::trunc);
        if (!os) throw std::runtime_error("emit_report: cannot write " + dir + "/metrics.json");
        os << metrics_json(report);
    }
    {
        std::ofstream os(dir + "/summary.txt", std::ios::trunc);
        if (!os) throw std::runtime_error("emit_report: cannot write " + dir + "/summary.txt");
        os << "corpus: " << report.corpus_tag << "\n"
           << "examples: " << report.n << "\n"
           << "sequence accuracy: " << report.seq_accuracy << "\n"
           << "token accuracy: " << report.tok_accuracy << "\n"
           << "config: " << report.config_hash << "\n";
    }
    {
        std::ofstream os(dir + "/examples.tsv", std::ios::trunc);
        if (!os) throw std::runtime_error("emit_report: cannot write " + dir + "/examples.tsv");
        os << "source\tgold\tpredicted\torigins\n";
        for (const auto& rec : report.records) {
            std::string origins;
            for (std::size_t i = 0; i < rec.origins.size(); ++i) {
                if (i) origins += ' ';
                origins += origin_name(rec.origins[i]);
            }
            os << join(rec.source) << '\t' << join(rec.gold) << '\t' << join(rec.predicted)
               << '\t' << origins << '\n';
        }
        if (!os) throw std::runtime_error("emit_report: write failed in " + dir);
    }
}

}  // namespace s2f
