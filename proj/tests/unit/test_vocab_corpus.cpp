#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "seq2form/corpus.hpp"
#include "seq2form/vocab.hpp"

using namespace s2f;

namespace {

std::filesystem::path write_temp(const std::string& tag, const std::string& text) {
    auto path = std::filesystem::temp_directory_path() /
                ("s2f_corpus_" + tag + "_" + std::to_string(::getpid()) + ".tsv");
    std::ofstream out(path);
    out << text;
    return path;
}

const std::string kDataDir = TEST_DATA_DIR;

}  // namespace

TEST_CASE("vocabulary reserves unk/bos/eos and orders by frequency then token") {
    Vocabulary v = Vocabulary::build({{"b", "a", "b"}, {"c", "b", "a"}});
    CHECK(v.size() == 6);
    CHECK(v.index_of("<unk>") == Vocabulary::kUnk);
    CHECK(v.index_of("<s>") == Vocabulary::kBos);
    CHECK(v.index_of("</s>") == Vocabulary::kEos);
    // b appears 3x, a 2x, c 1x
    CHECK(v.index_of("b") == 3);
    CHECK(v.index_of("a") == 4);
    CHECK(v.index_of("c") == 5);
    CHECK(v.token_at(3) == "b");
}

TEST_CASE("vocabulary tie-break is lexicographic and rebuild-stable") {
    Vocabulary v1 = Vocabulary::build({{"zeta", "alpha", "mid"}});
    Vocabulary v2 = Vocabulary::build({{"mid", "zeta", "alpha"}});
    CHECK(v1 == v2);  // equal frequencies sort by token, not first sight
    CHECK(v1.index_of("alpha") == 3);
    CHECK(v1.index_of("mid") == 4);
    CHECK(v1.index_of("zeta") == 5);
}

TEST_CASE("unknown tokens map to UNK") {
    Vocabulary v = Vocabulary::build({{"x"}});
    CHECK(v.index_of("never-seen") == Vocabulary::kUnk);
    CHECK(!v.contains("never-seen"));
    CHECK(v.contains("x"));
    CHECK_THROWS_AS(v.token_at(99), std::out_of_range);
}

TEST_CASE("load_corpus parses pairs and builds both vocabularies") {
    auto path = write_temp("ok", "what is x\tanswer ( x )\nname y\ty\n");
    Corpus c = load_corpus(path.string(), "toy");
    REQUIRE(c.examples.size() == 2);
    CHECK(c.tag == "toy");
    CHECK(c.examples[0].src == std::vector<std::string>{"what", "is", "x"});
    CHECK(c.examples[0].tgt == std::vector<std::string>{"answer", "(", "x", ")"});
    CHECK(c.examples[0].id == 0);
    CHECK(c.examples[1].id == 1);
    // indexed and EOS-terminated
    CHECK(c.examples[0].tgt_ids.size() == 5);
    CHECK(c.examples[0].tgt_ids.back() == Vocabulary::kEos);
    CHECK(c.source_vocab.contains("what"));
    CHECK(c.target_vocab.contains("answer"));
    std::filesystem::remove(path);
}

TEST_CASE("load_corpus rejects malformed lines, naming the position") {
    auto no_tab = write_temp("notab", "just words no tab\n");
    CHECK_THROWS_WITH_AS(load_corpus(no_tab.string()), doctest::Contains(":1:"),
                         std::runtime_error);
    std::filesystem::remove(no_tab);

    auto two_tabs = write_temp("twotabs", "a\tb\nsrc\tmid\textra\n");
    CHECK_THROWS_WITH_AS(load_corpus(two_tabs.string()), doctest::Contains(":2:"),
                         std::runtime_error);
    std::filesystem::remove(two_tabs);

    auto empty_side = write_temp("empty_side", "\ttarget only\n");
    CHECK_THROWS(load_corpus(empty_side.string()));
    std::filesystem::remove(empty_side);

    auto empty_file = write_temp("empty_file", "");
    CHECK_THROWS(load_corpus(empty_file.string()));
    std::filesystem::remove(empty_file);
}

TEST_CASE("load_corpus rejects over-long targets") {
    std::string long_tgt;
    for (int i = 0; i < 101; ++i) long_tgt += "t ";
    auto path = write_temp("long", "short question\t" + long_tgt + "\n");
    CHECK_THROWS(load_corpus(path.string()));
    std::filesystem::remove(path);
}

TEST_CASE("save_corpus then load_corpus round-trips surfaces") {
    auto path = write_temp("rt", "a b\tc d\ne\tf\n");
    Corpus c = load_corpus(path.string());
    auto out = write_temp("rt2", "");
    save_corpus(c, out.string());
    Corpus c2 = load_corpus(out.string());
    REQUIRE(c2.examples.size() == 2);
    CHECK(c2.examples[0].src == c.examples[0].src);
    CHECK(c2.examples[1].tgt == c.examples[1].tgt);
    std::filesystem::remove(path);
    std::filesystem::remove(out);
}

TEST_CASE("debruijn_standardize renames single capitals in first-use order") {
    std::vector<std::string> in{"lambda", "B", "exists", "A", "pred", "(", "B", ",", "A", ")"};
    std::vector<std::string> out = debruijn_standardize(in);
    CHECK(out == std::vector<std::string>{"lambda", "v0", "exists", "v1", "pred", "(",
                                          "v0", ",", "v1", ")"});
    // multi-letter and lowercase tokens pass through
    std::vector<std::string> keep{"AB", "a", "X1"};
    CHECK(debruijn_standardize(keep) == keep);
}

TEST_CASE("debruijn_standardize makes alphabetic variants identical") {
    std::vector<std::string> a{"p", "(", "A", ")", "q", "(", "A", ",", "B", ")"};
    std::vector<std::string> b{"p", "(", "C", ")", "q", "(", "C", ",", "D", ")"};
    CHECK(debruijn_standardize(a) == debruijn_standardize(b));
}

TEST_CASE("strip_logic_tokens maps, strips and drops per the table") {
    std::map<std::string, std::string> mapping{{"_loc", "location"}};
    std::vector<std::string> in{"_loc", "_unmapped_pred", "plain", "___"};
    std::vector<std::string> out = strip_logic_tokens(in, mapping);
    // mapped word; unmapped loses underscores; plain untouched; all-underscore dropped
    CHECK(out == std::vector<std::string>{"location", "unmappedpred", "plain"});
}

TEST_CASE("load_token_mapping reads tab tables and skips comments") {
    auto path = write_temp("map", "# comment line\n_loc\tlocation\n_next_to\tadjacent\n");
    auto mapping = load_token_mapping(path.string());
    CHECK(mapping.size() == 2);
    CHECK(mapping.at("_loc") == "location");
    CHECK(mapping.at("_next_to") == "adjacent");
    std::filesystem::remove(path);
}

TEST_CASE("annotate_copies brute force: every cell equals surface equality") {
    Example e;
    e.src = {"how", "big", "is", "texas"};
    e.tgt = {"size", "(", "texas", ")"};
    annotate_copies(e);
    REQUIRE(e.copy_matrix.size() == e.tgt.size() + 1);
    for (std::size_t j = 0; j < e.tgt.size(); ++j) {
        REQUIRE(e.copy_matrix[j].size() == e.src.size());
        for (std::size_t i = 0; i < e.src.size(); ++i)
            CHECK(e.copy_matrix[j][i] == (e.tgt[j] == e.src[i]));
    }
    for (std::size_t i = 0; i < e.src.size(); ++i)
        CHECK(!e.copy_matrix.back()[i]);  // EOS row copies nothing
    // spot check the real match
    CHECK(e.copy_matrix[2][3]);
    CHECK(!e.copy_matrix[2][0]);
}

TEST_CASE("preprocess strip keeps copyable surfaces aligned") {
    auto path = write_temp("prep", "where is springfield\t_loc ( springfield )\n");
    Corpus c = load_corpus(path.string());
    PreprocessOptions opt;
    opt.strip = true;
    opt.mapping = {{"_loc", "location"}};
    preprocess(c, opt);
    CHECK(c.examples[0].tgt ==
          std::vector<std::string>{"location", "(", "springfield", ")"});
    CHECK(c.target_vocab.contains("location"));
    CHECK(!c.target_vocab.contains("_loc"));
    // copy annotation was recomputed against the new target
    CHECK(c.examples[0].copy_matrix[2][2]);
    std::filesystem::remove(path);
}

TEST_CASE("reindex refreshes ids after a vocabulary swap") {
    auto path = write_temp("reidx", "a b\tc\nb b\td\n");
    Corpus c = load_corpus(path.string());
    // narrow the vocabularies to the first example only
    c.source_vocab = Vocabulary::build({c.examples[0].src});
    c.target_vocab = Vocabulary::build({c.examples[0].tgt});
    reindex(c);
    CHECK(c.examples[1].tgt_ids[0] == Vocabulary::kUnk);  // "d" unseen now
    CHECK(c.examples[1].src_ids[0] == c.source_vocab.index_of("b"));
    std::filesystem::remove(path);
}

TEST_CASE("split_corpus frac mode is seeded, disjoint and rebuilds vocabularies") {
    Corpus c = load_corpus(kDataDir + std::string("/geo_sample.tsv"), "geo");
    auto [train, test] = split_corpus(c, "frac:0.75,seed:3");
    CHECK(train.examples.size() == 15);
    CHECK(test.examples.size() == 5);

    auto [train2, test2] = split_corpus(c, "frac:0.75,seed:3");
    REQUIRE(train2.examples.size() == train.examples.size());
    for (std::size_t i = 0; i < train.examples.size(); ++i)
        CHECK(train.examples[i].id == train2.examples[i].id);

    // ids partition the corpus
    std::vector<bool> seen(c.examples.size(), false);
    for (const auto& e : train.examples) seen[static_cast<std::size_t>(e.id)] = true;
    for (const auto& e : test.examples) {
        CHECK(!seen[static_cast<std::size_t>(e.id)]);
        seen[static_cast<std::size_t>(e.id)] = true;
    }
    for (bool b : seen) CHECK(b);

    // train-only vocabularies: test tokens absent from train index to UNK,
    // but test surfaces are preserved
    bool found_unk_with_surface = false;
    for (const auto& e : test.examples) {
        for (std::size_t i = 0; i < e.src.size(); ++i) {
            if (e.src_ids[i] == Vocabulary::kUnk && !e.src[i].empty())
                found_unk_with_surface = true;
        }
    }
    (void)found_unk_with_surface;  // may legitimately be false on tiny fixtures
}

TEST_CASE("split_corpus standard:geoquery demands exactly 880 examples") {
    Corpus small = load_corpus(kDataDir + std::string("/geo_sample.tsv"));
    CHECK_THROWS(split_corpus(small, "standard:geoquery"));

    // synthesize 880 distinct pairs to exercise the happy path
    std::string text;
    for (int i = 0; i < 880; ++i)
        text += "q" + std::to_string(i) + " words\tanswer a" + std::to_string(i) + "\n";
    auto path = write_temp("std880", text);
    Corpus big = load_corpus(path.string());
    auto [train, test] = split_corpus(big, "standard:geoquery");
    CHECK(train.examples.size() == 680);
    CHECK(test.examples.size() == 200);
    CHECK(train.examples.front().id == 0);
    CHECK(test.examples.back().id == 879);
    std::filesystem::remove(path);
}

TEST_CASE("split_corpus rejects malformed specs") {
    Corpus c = load_corpus(kDataDir + std::string("/geo_sample.tsv"));
    CHECK_THROWS(split_corpus(c, "bogus"));
    CHECK_THROWS(split_corpus(c, "frac:1.5,seed:1"));
}
