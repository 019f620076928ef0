#include "seq2form/train.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "seq2form/checkpoint.hpp"
#include "seq2form/rng.hpp"

namespace s2f {

void TrainConfig::validate() const {
    if (d <= 0) throw std::invalid_argument("TrainConfig: d must be positive");
    if (emb_dim <= 0) throw std::invalid_argument("TrainConfig: emb_dim must be positive");
    if (epochs <= 0) throw std::invalid_argument("TrainConfig: epochs must be positive");
    if (lr0 <= 0.0) throw std::invalid_argument("TrainConfig: lr0 must be positive");
    if (lr_halve_every < 0) throw std::invalid_argument("TrainConfig: lr_halve_every < 0");
    if (init_range <= 0.0) throw std::invalid_argument("TrainConfig: init_range must be positive");
    if (clip < 0.0) throw std::invalid_argument("TrainConfig: clip must be >= 0");
    if (max_len <= 0) throw std::invalid_argument("TrainConfig: max_len must be positive");
    parse_cache_fn(cache_fn);  // throws on bad name
}

double learning_rate_at(const TrainConfig& config, int epoch) {
    int halvings = config.lr_halve_every > 0 ? epoch / config.lr_halve_every : 0;
    return config.lr0 * std::ldexp(1.0, -halvings);
}

Model make_model(const TrainConfig& config, int src_vocab_size, int tgt_vocab_size) {
    config.validate();
    ModelConfig mc;
    mc.d = config.d;
    mc.emb_dim = config.emb_dim;
    mc.cache_fn = parse_cache_fn(config.cache_fn);
    mc.use_cache_segment = config.use_cache_segment;
    mc.double_gate_f6 = config.double_gate_f6;
    mc.max_len = config.max_len;
    return Model(mc, src_vocab_size, tgt_vocab_size);
}

TrainReport train(Model& model, const Corpus& corpus, const TrainConfig& config) {
    config.validate();
    if (corpus.examples.empty()) throw std::invalid_argument("train: empty corpus");

    auto t0 = std::chrono::steady_clock::now();
    TrainReport report;
    if (!config.run_dir.empty()) {
        std::filesystem::create_directories(config.run_dir);
    }

    std::vector<std::size_t> order(corpus.examples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        double lr = learning_rate_at(config, epoch);
        SeededRng shuffle_rng(config.seed, fnv1a64("train.shuffle.epoch-" + std::to_string(epoch)));
        shuffle_rng.shuffle(order);

        double epoch_loss = 0.0;
        for (std::size_t k = 0; k < order.size(); ++k) {
            const Example& example = corpus.examples[order[k]];
            Tape tape;
            StepLossStats stats;
            Var loss;
            double loss_value = 0.0;
            // Non-finite values may surface either as a NaN loss or as a
            // validation error deep in the forward pass; both abort with the
            // offending example and epoch attached.
            auto blame = [&](const std::string& what) {
                return std::runtime_error("train: " + what + " on example " +
                                          std::to_string(example.id) + " (epoch " +
                                          std::to_string(epoch) + ")");
            };
            try {
                loss = model.example_loss(tape, example, corpus.source_vocab, &stats);
                loss_value = tape.scalar(loss);
            } catch (const std::invalid_argument& err) {
                throw blame(err.what());
            }
            if (!std::isfinite(loss_value)) throw blame("non-finite loss");
            epoch_loss += loss_value;
            report.unreachable_steps += stats.unreachable;

            tape.backward_from(loss);
            if (config.clip > 0.0) {
                double norm = model.params().grad_norm();
                if (norm > config.clip) model.params().scale_grads(config.clip / norm);
            }
            model.params().sgd_step(lr);
        }
        report.epoch_loss.push_back(epoch_loss / static_cast<double>(order.size()));
        report.epoch_lr.push_back(lr);

        if (!config.run_dir.empty()) {
            char name[32];
            std::snprintf(name, sizeof(name), "epoch-%02d.ckpt", epoch);
            save_checkpoint(model.params(), config.run_dir + "/" + name);
        }
    }

    if (!config.run_dir.empty()) {
        report.final_checkpoint = config.run_dir + "/final.ckpt";
        save_checkpoint(model.params(), report.final_checkpoint);
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

std::pair<Model, TrainReport> train_new(const Corpus& corpus, const TrainConfig& config) {
    Model model = make_model(config, corpus.source_vocab.size(), corpus.target_vocab.size());
    model.init_params(config.seed, config.init_range);
    TrainReport report = train(model, corpus, config);
    return {std::move(model), std::move(report)};
}

}  // namespace s2f
