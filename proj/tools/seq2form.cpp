// Command-line front end for the full pipeline: preprocess, train, eval,
// decode, gradcheck, influence, sweep. Every run writes its outputs under a
// fresh run directory (timestamp + seed) below $SEQ2FORM_RUN_ROOT (default
// ./runs) and logs the resolved configuration and build stamp.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seq2form/checkpoint.hpp"
#include "seq2form/configfile.hpp"
#include "seq2form/corpus.hpp"
#include "seq2form/gradcheck.hpp"
#include "seq2form/influence.hpp"
#include "seq2form/metrics.hpp"
#include "seq2form/model.hpp"
#include "seq2form/train.hpp"
#include "seq2form/version.hpp"

namespace {

namespace fs = std::filesystem;

std::string utc_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%S", &tm);
    return buf;
}

std::string make_run_dir(std::uint64_t seed) {
    const char* root = std::getenv("SEQ2FORM_RUN_ROOT");
    fs::path base = root && *root ? root : "runs";
    fs::path dir = base / (utc_timestamp() + "-seed" + std::to_string(seed));
    // Timestamps have second granularity; suffix on collision.
    int n = 1;
    fs::path candidate = dir;
    while (fs::exists(candidate)) {
        candidate = dir;
        candidate += "-" + std::to_string(n++);
    }
    fs::create_directories(candidate);
    return candidate.string();
}

void log_run_header(const std::string& run_dir, const s2f::TrainConfig& config) {
    std::string resolved = s2f::dump_config(config);
    std::ostringstream header;
    header << "seq2form " << s2f::kVersion << " (" << s2f::kGitHash << ")\n"
           << "run_dir = " << run_dir << "\n"
           << resolved;
    std::cout << header.str();
    std::ofstream os(run_dir + "/config.txt");
    os << header.str();
}

// Shared training-config flags; config file first, CLI overrides on top.
struct ConfigArgs {
    std::string config_path;
    std::vector<std::string> overrides;  // key=value
};

void add_config_flags(CLI::App* cmd, ConfigArgs& args) {
    cmd->add_option("--config", args.config_path, "key = value config file");
    cmd->add_option("--set", args.overrides,
                    "config override key=value (repeatable, wins over --config)");
}

s2f::TrainConfig resolve_config(const ConfigArgs& args) {
    s2f::TrainConfig config;
    if (!args.config_path.empty()) {
        s2f::apply_config(config, s2f::load_config(args.config_path));
    }
    for (const auto& kv : args.overrides) {
        s2f::apply_config(config, s2f::parse_config_text(kv));
    }
    return config;
}

s2f::Corpus load_and_maybe_split(const std::string& path, const std::string& split,
                                 s2f::Corpus* test_out) {
    s2f::Corpus corpus = s2f::load_corpus(path);
    if (split.empty()) return corpus;
    auto [train, test] = s2f::split_corpus(corpus, split);
    if (test_out) *test_out = std::move(test);
    return std::move(train);
}

int cmd_preprocess(const std::string& in, const std::string& out, bool debruijn, bool strip,
                   const std::string& mapping_path, bool strip_first) {
    s2f::Corpus corpus = s2f::load_corpus(in);
    s2f::PreprocessOptions options;
    options.debruijn = debruijn;
    options.strip = strip;
    options.debruijn_first = !strip_first;
    if (!mapping_path.empty()) options.mapping = s2f::load_token_mapping(mapping_path);
    s2f::preprocess(corpus, options);
    s2f::save_corpus(corpus, out);
    std::cout << "wrote " << corpus.examples.size() << " examples to " << out << "\n";
    return 0;
}

int cmd_train(const ConfigArgs& config_args, const std::string& data, const std::string& split) {
    s2f::TrainConfig config = resolve_config(config_args);
    config.run_dir = make_run_dir(config.seed);
    log_run_header(config.run_dir, config);

    s2f::Corpus test;
    s2f::Corpus train_corpus = load_and_maybe_split(data, split, &test);
    auto [model, report] = s2f::train_new(train_corpus, config);
    for (std::size_t e = 0; e < report.epoch_loss.size(); ++e) {
        std::printf("epoch %zu lr %.6g loss %.17g\n", e, report.epoch_lr[e],
                    report.epoch_loss[e]);
    }
    std::cout << "final checkpoint: " << report.final_checkpoint << "\n";

    if (!split.empty()) {
        s2f::MetricReport metrics = s2f::evaluate(model, test, train_corpus.source_vocab,
                                                  train_corpus.target_vocab);
        metrics.config_hash = s2f::config_hash(config);
        s2f::emit_report(metrics, config.run_dir + "/eval");
        std::printf("test seq %.4f tok %.4f (n=%d)\n", metrics.seq_accuracy,
                    metrics.tok_accuracy, metrics.n);
    }
    return 0;
}

int cmd_eval(const ConfigArgs& config_args, const std::string& data, const std::string& split,
             const std::string& ckpt, int threads) {
    s2f::TrainConfig config = resolve_config(config_args);
    std::string run_dir = make_run_dir(config.seed);
    log_run_header(run_dir, config);

    s2f::Corpus test;
    s2f::Corpus train_corpus = load_and_maybe_split(data, split, &test);
    const s2f::Corpus& eval_corpus = split.empty() ? train_corpus : test;

    s2f::Model model = s2f::make_model(config, train_corpus.source_vocab.size(),
                                       train_corpus.target_vocab.size());
    s2f::load_checkpoint(model.params(), ckpt);
    s2f::MetricReport metrics = s2f::evaluate(model, eval_corpus, train_corpus.source_vocab,
                                              train_corpus.target_vocab, threads);
    metrics.config_hash = s2f::config_hash(config);
    s2f::emit_report(metrics, run_dir);
    std::printf("seq %.4f tok %.4f (n=%d)\n", metrics.seq_accuracy, metrics.tok_accuracy,
                metrics.n);
    std::cout << "report: " << run_dir << "/metrics.json\n";
    return 0;
}

int cmd_decode(const ConfigArgs& config_args, const std::string& data, const std::string& split,
               const std::string& ckpt) {
    s2f::TrainConfig config = resolve_config(config_args);
    std::string run_dir = make_run_dir(config.seed);
    log_run_header(run_dir, config);

    // The model is sized by the vocabularies it was trained on: the whole
    // file, or the train half when the checkpoint came from a split run.
    s2f::Corpus test;
    s2f::Corpus train_corpus = load_and_maybe_split(data, split, &test);
    const s2f::Corpus& corpus = split.empty() ? train_corpus : test;
    s2f::Model model = s2f::make_model(config, train_corpus.source_vocab.size(),
                                       train_corpus.target_vocab.size());
    s2f::load_checkpoint(model.params(), ckpt);

    std::ofstream os(run_dir + "/decodes.tsv");
    for (const auto& e : corpus.examples) {
        s2f::DecodeResult out = model.greedy_decode(e.src_ids, e.src, train_corpus.source_vocab,
                                                    train_corpus.target_vocab);
        std::string joined;
        for (std::size_t i = 0; i < out.tokens.size(); ++i) {
            if (i) joined += ' ';
            joined += out.tokens[i];
        }
        std::cout << joined << "\n";
        os << joined << "\n";
    }
    return 0;
}

int cmd_gradcheck(int d, int emb_dim, const std::string& cache_fn, std::uint64_t seed) {
    // Toy model over a miniature vocabulary; one short example whose gold
    // tokens hit the write, copy and cache segments at once, so every
    // parameter group sees gradient.
    s2f::Vocabulary source_vocab = s2f::Vocabulary::build({{"a", "b", "c", "x"}});
    s2f::Vocabulary target_vocab = s2f::Vocabulary::build({{"b", "d"}});
    s2f::ModelConfig mc;
    mc.d = d;
    mc.emb_dim = emb_dim;
    mc.cache_fn = s2f::parse_cache_fn(cache_fn);
    s2f::Model model(mc, source_vocab.size(), target_vocab.size());
    model.init_params(seed, 0.5);

    s2f::Example example;
    example.src = {"a", "b", "c"};
    example.tgt = {"b", "d"};
    for (const auto& t : example.src) example.src_ids.push_back(source_vocab.index_of(t));
    for (const auto& t : example.tgt) example.tgt_ids.push_back(target_vocab.index_of(t));
    example.tgt_ids.push_back(s2f::Vocabulary::kEos);
    s2f::annotate_copies(example);

    auto params = model.params().named();
    auto f = [&]() {
        s2f::Tape tape;
        s2f::Var loss = model.example_loss(tape, example, source_vocab);
        double value = tape.scalar(loss);
        tape.backward_from(loss);
        return value;
    };
    s2f::GradCheckReport report = s2f::finite_diff_check(f, params, 1e-5, 1e-3);
    std::cout << report.to_string();
    return report.pass ? 0 : 1;
}

int cmd_influence(const std::string& source_path, const std::string& target_path,
                  s2f::HvpConfig hvp, const std::string& hvp_mode, const std::string& out) {
    hvp.exact = hvp_mode == "exact";
    std::string run_dir = make_run_dir(hvp.seed);
    std::cout << "seq2form " << s2f::kVersion << " (" << s2f::kGitHash << ")\n"
              << "run_dir = " << run_dir << "\n";

    s2f::Corpus source = s2f::load_corpus(source_path);
    s2f::Corpus target = s2f::load_corpus(target_path);
    s2f::SelectionResult result = s2f::select_influential(source, target, hvp);

    std::string out_path = out.empty() ? run_dir + "/influence.jsonl" : out;
    s2f::write_selection_jsonl(result, out_path);
    std::cout << "sampled " << result.sampled_ids.size() << " examples -> " << out_path << "\n";
    return 0;
}

int cmd_sweep(const ConfigArgs& config_args, const std::string& source_path,
              const std::string& target_path, const std::string& split,
              const std::string& steps_text, const std::string& selection, s2f::HvpConfig hvp,
              const std::string& hvp_mode) {
    s2f::TrainConfig config = resolve_config(config_args);
    std::string run_dir = make_run_dir(config.seed);
    log_run_header(run_dir, config);

    s2f::Corpus source = s2f::load_corpus(source_path);
    s2f::Corpus target_test;
    s2f::Corpus target_train = load_and_maybe_split(target_path, split, &target_test);
    if (split.empty()) {
        throw std::runtime_error("sweep: --split is required (the target needs a test half)");
    }

    std::vector<int> steps;
    std::stringstream ss(steps_text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) steps.push_back(std::stoi(item));
    }
    if (steps.empty()) throw std::runtime_error("sweep: no step sizes given");

    std::vector<int> selected;
    if (selection == "influence") {
        hvp.exact = hvp_mode == "exact";
        s2f::SelectionResult result = s2f::select_influential(source, target_train, hvp);
        s2f::write_selection_jsonl(result, run_dir + "/influence.jsonl");
        selected = result.sampled_ids;
    } else if (selection == "random") {
        selected = s2f::select_random(source, hvp.sample_size, hvp.seed);
    } else {
        throw std::runtime_error("sweep: --selection must be influence or random");
    }

    auto curve = s2f::augment_and_sweep(target_train, target_test, source, selected, steps,
                                        config);
    std::string csv_path = run_dir + "/sweep.csv";
    s2f::write_sweep_csv(curve, csv_path);
    for (const auto& p : curve) {
        std::printf("n=%d seq %.4f tok %.4f\n", p.n, p.seq, p.tok);
    }
    std::cout << "curve: " << csv_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sequence-to-logical-form toolkit"};
    app.require_subcommand(1);

    // preprocess
    std::string pp_in, pp_out, pp_mapping;
    bool pp_debruijn = false, pp_strip = false, pp_strip_first = false;
    auto* preprocess = app.add_subcommand("preprocess", "standardize and rewrite a corpus");
    preprocess->add_option("--in", pp_in, "input TSV")->required();
    preprocess->add_option("--out", pp_out, "output TSV")->required();
    preprocess->add_flag("--debruijn", pp_debruijn, "canonical variable renaming");
    preprocess->add_flag("--strip", pp_strip, "strip logic tokens / apply mapping");
    preprocess->add_option("--mapping", pp_mapping, "predicate<TAB>word table");
    preprocess->add_flag("--strip-first", pp_strip_first, "strip before variable renaming");

    // train
    ConfigArgs train_cfg;
    std::string train_data, train_split;
    auto* train = app.add_subcommand("train", "train a parser");
    train->add_option("--data", train_data, "training TSV")->required();
    train->add_option("--split", train_split,
                      "standard:geoquery | frac:<p>,seed:<s> (train on the first half, "
                      "eval on the second)");
    add_config_flags(train, train_cfg);

    // eval
    ConfigArgs eval_cfg;
    std::string eval_data, eval_split, eval_ckpt;
    int eval_threads = 1;
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
    eval->add_option("--data", eval_data, "corpus TSV")->required();
    eval->add_option("--split", eval_split, "evaluate the test half of this split");
    eval->add_option("--ckpt", eval_ckpt, "checkpoint path")->required();
    eval->add_option("--threads", eval_threads, "decode worker count");
    add_config_flags(eval, eval_cfg);

    // decode
    ConfigArgs decode_cfg;
    std::string decode_data, decode_split, decode_ckpt;
    auto* decode = app.add_subcommand("decode", "print greedy decodes");
    decode->add_option("--data", decode_data, "corpus TSV")->required();
    decode->add_option("--split", decode_split,
                       "decode the test half of this split (vocabularies from the train half, "
                       "matching a checkpoint trained with the same split)");
    decode->add_option("--ckpt", decode_ckpt, "checkpoint path")->required();
    add_config_flags(decode, decode_cfg);

    // gradcheck
    int gc_d = 4, gc_emb = 3;
    std::string gc_cache = "f1";
    std::uint64_t gc_seed = 13;
    auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient audit");
    gradcheck->add_option("--d", gc_d, "hidden size (default 4)");
    gradcheck->add_option("--emb-dim", gc_emb, "embedding size (default 3)");
    gradcheck->add_option("--cache-fn", gc_cache, "f1..f6|off");
    gradcheck->add_option("--seed", gc_seed, "parameter seed");

    // influence
    std::string inf_source, inf_target, inf_out, inf_mode = "stochastic";
    s2f::HvpConfig inf_hvp;
    auto* influence = app.add_subcommand("influence", "select influential source examples");
    influence->add_option("--source", inf_source, "source-domain TSV")->required();
    influence->add_option("--target", inf_target, "target-domain TSV")->required();
    influence->add_option("--reps", inf_hvp.repetitions, "HVP repetitions (default 1000)");
    influence->add_option("--sample", inf_hvp.sample_size, "examples to sample (default 100)");
    influence->add_option("--top-k", inf_hvp.top_k, "top-k per repetition (default 100)");
    influence->add_option("--depth", inf_hvp.depth, "recursion depth (default 5000)");
    influence->add_option("--damping", inf_hvp.damping, "Hessian damping");
    influence->add_option("--scale", inf_hvp.scale, "recursion scale (0 = auto)");
    influence->add_option("--lambda", inf_hvp.lambda, "classifier L2 strength");
    influence->add_option("--seed", inf_hvp.seed, "sampling seed");
    influence->add_option("--hvp", inf_mode, "exact | stochastic")
        ->check(CLI::IsMember({"exact", "stochastic"}));
    influence->add_option("--out", inf_out, "JSONL output path (default in run dir)");

    // sweep
    ConfigArgs sweep_cfg;
    std::string sweep_source, sweep_target, sweep_split, sweep_steps = "0,10,20,50,100";
    std::string sweep_selection = "influence", sweep_mode = "stochastic";
    s2f::HvpConfig sweep_hvp;
    auto* sweep = app.add_subcommand("sweep", "augmentation-size metric curves");
    sweep->add_option("--source", sweep_source, "source-domain TSV")->required();
    sweep->add_option("--target", sweep_target, "target-domain TSV")->required();
    sweep->add_option("--split", sweep_split, "target train/test split (required)");
    sweep->add_option("--steps", sweep_steps, "comma-separated augmentation sizes");
    sweep->add_option("--selection", sweep_selection, "influence | random");
    sweep->add_option("--reps", sweep_hvp.repetitions, "HVP repetitions");
    sweep->add_option("--sample", sweep_hvp.sample_size, "examples to sample");
    sweep->add_option("--top-k", sweep_hvp.top_k, "top-k per repetition");
    sweep->add_option("--depth", sweep_hvp.depth, "recursion depth");
    sweep->add_option("--damping", sweep_hvp.damping, "Hessian damping");
    sweep->add_option("--scale", sweep_hvp.scale, "recursion scale (0 = auto)");
    sweep->add_option("--lambda", sweep_hvp.lambda, "classifier L2 strength");
    sweep->add_option("--hvp", sweep_mode, "exact | stochastic")
        ->check(CLI::IsMember({"exact", "stochastic"}));
    add_config_flags(sweep, sweep_cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // usage error
    }

    try {
        if (*preprocess) {
            return cmd_preprocess(pp_in, pp_out, pp_debruijn, pp_strip, pp_mapping,
                                  pp_strip_first);
        }
        if (*train) return cmd_train(train_cfg, train_data, train_split);
        if (*eval) return cmd_eval(eval_cfg, eval_data, eval_split, eval_ckpt, eval_threads);
        if (*decode) return cmd_decode(decode_cfg, decode_data, decode_split, decode_ckpt);
        if (*gradcheck) return cmd_gradcheck(gc_d, gc_emb, gc_cache, gc_seed);
        if (*influence) return cmd_influence(inf_source, inf_target, inf_hvp, inf_mode, inf_out);
        if (*sweep) {
            return cmd_sweep(sweep_cfg, sweep_source, sweep_target, sweep_split, sweep_steps,
                             sweep_selection, sweep_hvp, sweep_mode);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;  // no subcommand dispatched
}
