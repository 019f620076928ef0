#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seq2form/corpus.hpp"
#include "seq2form/model.hpp"

namespace s2f {

struct TrainConfig {
    int d = 200;
    int emb_dim = 100;
    int epochs = 30;
    double lr0 = 0.5;
    // Halve the learning rate every this many epochs; 0 keeps it constant.
    int lr_halve_every = 1;
    double init_range = 1.0;  // uniform [-range, range]
    std::uint64_t seed = 13;
    std::string cache_fn = "f1";  // f1..f6 | off
    bool use_cache_segment = true;
    bool double_gate_f6 = true;
    // Global gradient-norm clip; 0 disables. On by default: uniform [-1,1]
    // init at lr 0.5 diverges on long sequences without it.
    double clip = 5.0;
    int max_len = 100;
    std::string run_dir;  // checkpoints land here when nonempty

    void validate() const;  // throws std::invalid_argument
};

struct TrainReport {
    std::vector<double> epoch_loss;  // mean per-example loss
    std::vector<double> epoch_lr;
    int unreachable_steps = 0;  // gold-unreachable positions seen in training
    double wall_seconds = 0.0;
    std::string final_checkpoint;
};

double learning_rate_at(const TrainConfig& config, int epoch);

Model make_model(const TrainConfig& config, int src_vocab_size, int tgt_vocab_size);

// Halving-schedule SGD: per-epoch seeded shuffle, per-example forward/backward
// (batch size 1), optional global-norm clipping, per-epoch checkpoints
// (epoch-NN.ckpt, final.ckpt) when run_dir is set.
// Throws std::runtime_error naming example and epoch on non-finite loss.
TrainReport train(Model& model, const Corpus& corpus, const TrainConfig& config);

// Convenience: build, init and train a model on `corpus`.
std::pair<Model, TrainReport> train_new(const Corpus& corpus, const TrainConfig& config);

}  // namespace s2f
