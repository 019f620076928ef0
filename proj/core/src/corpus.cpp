#include "seq2form/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "seq2form/rng.hpp"

namespace s2f {

namespace {

constexpr int kMaxTargetLen = 100;

std::vector<std::string> split_tokens(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += tokens[i];
    }
    return out;
}

void index_example(Example& e, const Vocabulary& src_v, const Vocabulary& tgt_v) {
    e.src_ids.clear();
    e.tgt_ids.clear();
    for (const auto& t : e.src) e.src_ids.push_back(src_v.index_of(t));
    for (const auto& t : e.tgt) e.tgt_ids.push_back(tgt_v.index_of(t));
    e.tgt_ids.push_back(Vocabulary::kEos);
    annotate_copies(e);
}

void build_vocabs_and_index(Corpus& c) {
    std::vector<std::vector<std::string>> src_seqs, tgt_seqs;
    src_seqs.reserve(c.examples.size());
    tgt_seqs.reserve(c.examples.size());
    for (const auto& e : c.examples) {
        src_seqs.push_back(e.src);
        tgt_seqs.push_back(e.tgt);
    }
    c.source_vocab = Vocabulary::build(src_seqs);
    c.target_vocab = Vocabulary::build(tgt_seqs);
    for (auto& e : c.examples) index_example(e, c.source_vocab, c.target_vocab);
}

bool is_variable_token(const std::string& tok) {
    return tok.size() == 1 && std::isupper(static_cast<unsigned char>(tok[0]));
}

}  // namespace

Corpus load_corpus(const std::string& path, const std::string& tag, const std::string& domain) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_corpus: cannot open " + path);

    Corpus corpus;
    corpus.tag = tag;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto first_tab = line.find('\t');
        if (first_tab == std::string::npos || line.find('\t', first_tab + 1) != std::string::npos) {
            throw std::runtime_error("load_corpus: " + path + ":" + std::to_string(line_no) +
                                     ": expected exactly one tab");
        }
        Example e;
        e.src = split_tokens(line.substr(0, first_tab));
        e.tgt = split_tokens(line.substr(first_tab + 1));
        if (e.src.empty()) {
            throw std::runtime_error("load_corpus: " + path + ":" + std::to_string(line_no) +
                                     ": empty utterance");
        }
        if (e.tgt.empty()) {
            throw std::runtime_error("load_corpus: " + path + ":" + std::to_string(line_no) +
                                     ": empty logical form");
        }
        if (static_cast<int>(e.tgt.size()) > kMaxTargetLen) {
            throw std::runtime_error("load_corpus: " + path + ":" + std::to_string(line_no) +
                                     ": logical form longer than " +
                                     std::to_string(kMaxTargetLen) + " tokens (" +
                                     std::to_string(e.tgt.size()) + ")");
        }
        e.domain = domain;
        e.id = static_cast<int>(corpus.examples.size());
        corpus.examples.push_back(std::move(e));
    }
    if (corpus.examples.empty()) {
        throw std::runtime_error("load_corpus: " + path + ": no examples");
    }
    build_vocabs_and_index(corpus);
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("save_corpus: cannot open " + path + " for writing");
    for (const auto& e : corpus.examples) {
        os << join_tokens(e.src) << '\t' << join_tokens(e.tgt) << '\n';
    }
    if (!os) throw std::runtime_error("save_corpus: write failed for " + path);
}

std::vector<std::string> debruijn_standardize(const std::vector<std::string>& tokens) {
    std::map<std::string, std::string> renames;
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& tok : tokens) {
        if (!is_variable_token(tok)) {
            out.push_back(tok);
            continue;
        }
        auto it = renames.find(tok);
        if (it == renames.end()) {
            it = renames.emplace(tok, "v" + std::to_string(renames.size())).first;
        }
        out.push_back(it->second);
    }
    return out;
}

std::vector<std::string> strip_logic_tokens(const std::vector<std::string>& tokens,
                                            const std::map<std::string, std::string>& mapping) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& tok : tokens) {
        if (tok.find('_') == std::string::npos) {
            out.push_back(tok);
            continue;
        }
        auto it = mapping.find(tok);
        if (it != mapping.end()) {
            out.push_back(it->second);
            continue;
        }
        std::string stripped;
        for (char c : tok) {
            if (c != '_') stripped += c;
        }
        if (stripped.empty()) {
            // Pure-underscore token vanishes entirely; note it and move on.
            std::cerr << "[debug] strip_logic_tokens: dropped token \"" << tok << "\"\n";
            continue;
        }
        out.push_back(stripped);
    }
    return out;
}

std::map<std::string, std::string> load_token_mapping(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_token_mapping: cannot open " + path);
    std::map<std::string, std::string> mapping;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw std::runtime_error("load_token_mapping: " + path + ":" +
                                     std::to_string(line_no) + ": expected predicate<TAB>word");
        }
        mapping[line.substr(0, tab)] = line.substr(tab + 1);
    }
    return mapping;
}

void annotate_copies(Example& example) {
    std::size_t rows = example.tgt.size() + 1;  // + EOS row
    example.copy_matrix.assign(rows, std::vector<bool>(example.src.size(), false));
    for (std::size_t j = 0; j < example.tgt.size(); ++j) {
        for (std::size_t i = 0; i < example.src.size(); ++i) {
            if (example.tgt[j] == example.src[i]) example.copy_matrix[j][i] = true;
        }
    }
}

void reindex(Corpus& corpus) {
    for (auto& e : corpus.examples) index_example(e, corpus.source_vocab, corpus.target_vocab);
}

void preprocess(Corpus& corpus, const PreprocessOptions& options) {
    auto apply_debruijn = [](Example& e) { e.tgt = debruijn_standardize(e.tgt); };
    auto apply_strip = [&options](Example& e) {
        e.tgt = strip_logic_tokens(e.tgt, options.mapping);
    };
    for (auto& e : corpus.examples) {
        if (options.debruijn_first) {
            if (options.debruijn) apply_debruijn(e);
            if (options.strip) apply_strip(e);
        } else {
            if (options.strip) apply_strip(e);
            if (options.debruijn) apply_debruijn(e);
        }
        if (e.tgt.empty()) {
            throw std::runtime_error("preprocess: example " + std::to_string(e.id) +
                                     " has empty logical form after preprocessing");
        }
    }
    build_vocabs_and_index(corpus);
}

std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus, const std::string& spec) {
    std::size_t n = corpus.examples.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::size_t train_count = 0;

    if (spec == "standard:geoquery") {
        if (n != 880) {
            throw std::runtime_error("split_corpus: standard:geoquery expects 880 examples, got " +
                                     std::to_string(n));
        }
        train_count = 680;
    } else if (spec.rfind("frac:", 0) == 0) {
        auto comma = spec.find(",seed:");
        if (comma == std::string::npos) {
            throw std::runtime_error("split_corpus: expected frac:<p>,seed:<s>, got " + spec);
        }
        double frac = std::stod(spec.substr(5, comma - 5));
        std::uint64_t seed = std::stoull(spec.substr(comma + 6));
        if (frac < 0.0 || frac > 1.0) {
            throw std::runtime_error("split_corpus: fraction must be in [0,1], got " +
                                     std::to_string(frac));
        }
        train_count = static_cast<std::size_t>(std::lround(frac * static_cast<double>(n)));
        SeededRng rng(seed, fnv1a64("corpus-split"));
        rng.shuffle(order);
    } else {
        throw std::runtime_error("split_corpus: unknown spec " + spec);
    }
    if (train_count > n) {
        throw std::runtime_error("split_corpus: train count " + std::to_string(train_count) +
                                 " exceeds corpus size " + std::to_string(n));
    }

    Corpus train, test;
    train.tag = corpus.tag;
    test.tag = corpus.tag;
    for (std::size_t k = 0; k < n; ++k) {
        Example e = corpus.examples[order[k]];
        if (k < train_count) {
            train.examples.push_back(std::move(e));
        } else {
            test.examples.push_back(std::move(e));
        }
    }
    // Vocabularies come from the training half only; test-side tokens the
    // training data never saw become UNK (surfaces stay for copy matching).
    build_vocabs_and_index(train);
    test.source_vocab = train.source_vocab;
    test.target_vocab = train.target_vocab;
    reindex(test);
    return {std::move(train), std::move(test)};
}

}  // namespace s2f
