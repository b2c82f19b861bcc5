#include "lndp/error.hpp"
#include "lndp/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace lndp;

int main(int argc, char** argv) {
    CLI::App app{"Lifelong neural developmental programs: training, evaluation and inspection"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "run";
    std::uint64_t seed = 0;
    int threads = -1;
    int generations = -1;
    auto* train_cmd = app.add_subcommand("train", "Run CMA-ES over the agent parameters");
    train_cmd->add_option("--config", config_path, "Flat TOML experiment config")->required();
    auto* train_seed = train_cmd->add_option("--seed", seed, "Override the config seed");
    train_cmd->add_option("--out", out_dir, "Artifact directory")->capture_default_str();
    train_cmd->add_option("--threads", threads, "Override the worker count (0 = all cores)");
    train_cmd->add_option("--generations", generations, "Override the generation count");

    std::string ckpt_path;
    std::string env_name;
    int trials = 3;
    int episodes = 0;
    bool ndp_ablation = false;
    std::string eval_out;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint and print JSONL");
    eval_cmd->add_option("--checkpoint", ckpt_path)->required();
    eval_cmd->add_option("--env", env_name)->required();
    eval_cmd->add_option("--trials", trials)->capture_default_str();
    eval_cmd->add_option("--episodes", episodes, "0 keeps the training episode count")->capture_default_str();
    eval_cmd->add_option("--seed", seed)->capture_default_str();
    eval_cmd->add_flag("--ndp-ablation", ndp_ablation, "Freeze the graph after development");
    eval_cmd->add_option("--out", eval_out, "Write JSONL here instead of stdout");

    std::string csv_path;
    std::string snapshots_path;
    std::string trace_path;
    auto* inspect_cmd = app.add_subcommand("inspect", "Export a per-step trajectory of one trial");
    inspect_cmd->add_option("--checkpoint", ckpt_path)->required();
    inspect_cmd->add_option("--env", env_name)->required();
    inspect_cmd->add_option("--seed", seed)->capture_default_str();
    inspect_cmd->add_option("--out", csv_path, "CSV, one row per step")->required();
    inspect_cmd->add_option("--snapshots", snapshots_path, "JSONL graph snapshot per row");
    inspect_cmd->add_option("--trace", trace_path, "JSONL environment trace");

    auto* baseline_cmd = app.add_subcommand("baseline", "Mean return of a uniformly random policy");
    baseline_cmd->add_option("--env", env_name)->required();
    baseline_cmd->add_option("--trials", trials)->capture_default_str();
    baseline_cmd->add_option("--seed", seed)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train_cmd) {
            ExperimentConfig cfg = load_config(config_path);
            if (*train_seed) cfg.seed = seed;
            if (threads >= 0) cfg.threads = threads;
            if (generations >= 0) cfg.generations = generations;
            cfg.validate();
            const TrainResult result = train(cfg, out_dir, &std::cerr);
            std::cout << "best_fitness " << format_double(result.best.fitness) << " generation "
                      << result.best.generation << " seed " << result.best.seed << "\n";
        } else if (*eval_cmd) {
            const Checkpoint ckpt = load_checkpoint(ckpt_path);
            EvalOptions options;
            options.trials = trials;
            options.episodes = episodes;
            options.seed = seed;
            options.ndp_ablation = ndp_ablation;
            const EvalReport report = evaluate(ckpt, parse_env_kind(env_name), options);
            if (eval_out.empty()) {
                write_eval_jsonl(report, options, std::cout);
            } else {
                std::ofstream out(eval_out);
                if (!out) throw Error(ErrorKind::Io, "cannot write " + eval_out);
                write_eval_jsonl(report, options, out);
            }
        } else if (*inspect_cmd) {
            const Checkpoint ckpt = load_checkpoint(ckpt_path);
            InspectOptions options;
            options.seed = seed;
            options.csv = csv_path;
            options.snapshots = snapshots_path;
            options.trace = trace_path;
            const std::size_t rows = inspect(ckpt, parse_env_kind(env_name), options);
            std::cerr << rows << " rows written to " << csv_path << "\n";
        } else if (*baseline_cmd) {
            const EnvKind kind = parse_env_kind(env_name);
            std::cout << format_double(random_policy_baseline(kind, trials, seed)) << "\n";
        }
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        return 2;
    }
    return 0;
}
