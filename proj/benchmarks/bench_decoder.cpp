#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "seq2form/corpus.hpp"
#include "seq2form/model.hpp"
#include "seq2form/tape.hpp"
#include "seq2form/vocab.hpp"

namespace {

using namespace s2f;

// A synthetic example with `src_len` source tokens and `tgt_len` target
// tokens, half of which are copies of source surfaces.
struct BenchSetup {
    Vocabulary src_vocab;
    Vocabulary tgt_vocab;
    Example example;
    Model model;

    BenchSetup(int d, int src_len, int tgt_len)
        : src_vocab(build_vocab("s", 40)),
          tgt_vocab(build_vocab("t", 30)),
          model(make_config(d), src_vocab.size(), tgt_vocab.size()) {
        for (int i = 0; i < src_len; ++i) example.src.push_back("s" + std::to_string(i % 40));
        for (int j = 0; j < tgt_len; ++j) {
            example.tgt.push_back(j % 2 == 0 ? "t" + std::to_string(j % 30)
                                             : example.src[static_cast<std::size_t>(j) %
                                                           example.src.size()]);
        }
        for (const auto& t : example.src) example.src_ids.push_back(src_vocab.index_of(t));
        for (const auto& t : example.tgt) example.tgt_ids.push_back(tgt_vocab.index_of(t));
        example.tgt_ids.push_back(Vocabulary::kEos);
        annotate_copies(example);
        model.init_params(7, 0.08);
    }

    static Vocabulary build_vocab(const std::string& stem, int n) {
        std::vector<std::string> tokens;
        for (int i = 0; i < n; ++i) tokens.push_back(stem + std::to_string(i));
        return Vocabulary::build({tokens});
    }

    static ModelConfig make_config(int d) {
        ModelConfig mc;
        mc.d = d;
        mc.emb_dim = d / 2;
        mc.max_len = 64;
        return mc;
    }
};

void BM_TeacherForcedLoss(benchmark::State& state) {
    BenchSetup setup(static_cast<int>(state.range(0)), 12, 16);
    for (auto _ : state) {
        Tape tape;
        Var loss = setup.model.example_loss(tape, setup.example, setup.src_vocab);
        benchmark::DoNotOptimize(tape.scalar(loss));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TeacherForcedLoss)->RangeMultiplier(2)->Range(16, 128)->Complexity();

void BM_LossBackward(benchmark::State& state) {
    BenchSetup setup(static_cast<int>(state.range(0)), 12, 16);
    for (auto _ : state) {
        Tape tape;
        Var loss = setup.model.example_loss(tape, setup.example, setup.src_vocab);
        tape.backward_from(loss);
        benchmark::DoNotOptimize(setup.model.params().grad_norm());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LossBackward)->RangeMultiplier(2)->Range(16, 128)->Complexity();

void BM_GreedyDecode(benchmark::State& state) {
    BenchSetup setup(64, static_cast<int>(state.range(0)), 16);
    for (auto _ : state) {
        DecodeResult out = setup.model.greedy_decode(setup.example.src_ids, setup.example.src,
                                                     setup.src_vocab, setup.tgt_vocab);
        benchmark::DoNotOptimize(out.tokens.size());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GreedyDecode)->RangeMultiplier(2)->Range(4, 32)->Complexity();

}  // namespace

BENCHMARK_MAIN();
