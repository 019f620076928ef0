#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "seq2form/vocab.hpp"

namespace s2f {

// One utterance / logical-form pair. Surface tokens are kept alongside the
// index sequences: copy matching works on surfaces, so a source token that is
// UNK in the vocabulary can still be copied.
struct Example {
    std::vector<std::string> src;  // source surface tokens
    std::vector<std::string> tgt;  // target surface tokens (without EOS)
    std::vector<int> src_ids;      // indexed against source vocabulary
    std::vector<int> tgt_ids;      // indexed against target vocabulary, EOS-terminated
    // copy_matrix[j][i] == true iff surface(tgt[j]) == surface(src[i]).
    // Has |tgt|+1 rows; the final (EOS) row is all false.
    std::vector<std::vector<bool>> copy_matrix;
    std::string domain;
    int id = -1;
};

struct Corpus {
    std::vector<Example> examples;
    Vocabulary source_vocab;
    Vocabulary target_vocab;
    std::string tag;  // e.g. "geoquery", "geoquery-s", "overnight:calendar"
};

// Reads a TSV corpus ("<utterance>\t<logical form>", space-separated tokens)
// and builds vocabularies from everything it loaded. Pipelines that hold out
// a test set should pass the combined file through split_corpus, which
// rebuilds vocabularies from the training half only.
// Throws std::runtime_error naming the line on: missing/extra tab, empty
// utterance or logical form, target longer than 100 tokens, empty file.
Corpus load_corpus(const std::string& path, const std::string& tag = "",
                   const std::string& domain = "");

// Writes examples back as TSV (surface tokens, space-joined, one tab).
void save_corpus(const Corpus& corpus, const std::string& path);

// Canonical variable renaming: each single-capital-letter token becomes
// v0, v1, ... in order of first occurrence. Everything else passes through.
std::vector<std::string> debruijn_standardize(const std::vector<std::string>& tokens);

// Replaces underscore-bearing tokens by their mapped word; unmapped ones just
// lose their underscores. A token that becomes empty is dropped. Tokens
// without underscores are untouched.
std::vector<std::string> strip_logic_tokens(const std::vector<std::string>& tokens,
                                            const std::map<std::string, std::string>& mapping);

// Loads a "predicate<TAB>word" table for strip_logic_tokens.
std::map<std::string, std::string> load_token_mapping(const std::string& path);

// Recomputes copy_matrix from the example's surface tokens.
void annotate_copies(Example& example);

// Re-derives src_ids/tgt_ids/copy_matrix for every example against the
// corpus's current vocabularies.
void reindex(Corpus& corpus);

struct PreprocessOptions {
    bool debruijn = false;
    bool strip = false;
    bool debruijn_first = true;  // apply standardization before stripping
    std::map<std::string, std::string> mapping;
};

// Applies target-side preprocessing in the configured order, then rebuilds
// vocabularies and annotations.
void preprocess(Corpus& corpus, const PreprocessOptions& options);

// Splits per `spec`: "standard:geoquery" (exactly 880 examples -> first 680
// train, last 200 test) or "frac:<p>,seed:<s>" (seeded shuffle, first
// round(p*n) to train). Vocabularies are rebuilt from the training half and
// both halves are reindexed against them, so unseen test-side tokens become
// UNK while their surfaces stay available for copying.
std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus, const std::string& spec);

}  // namespace s2f
