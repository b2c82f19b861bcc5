#pragma once

#include "lndp/agent.hpp"
#include "lndp/cmaes.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace lndp {

/// Everything a training run depends on. Defaults are the desk-scale settings
/// (300 generations × 64 individuals); see configs/ for the full-scale ones.
struct ExperimentConfig {
    std::string env = "foraging";
    int n_total = 32;
    float mu_conn = 0.5f;
    float sigma_conn = 0.0f;
    bool self_loops = true;
    ModelSizes sizes;
    bool sp_enabled = true;
    bool ndp_ablation = false;
    int t_sa = 0;
    int popsize = 64;
    int generations = 300;
    int mc_trials = 3;
    int episodes = 0;  // 0 selects the environment default
    double sigma0 = 0.065;
    double p_switch = 0.5;
    int foraging_steps = 200;
    std::uint64_t seed = 0;
    int threads = 0;  // 0 uses every hardware thread
    bool record_wallclock = true;

    EnvKind env_kind() const { return parse_env_kind(env); }
    int resolved_episodes() const;
    EnvOptions env_options() const;
    AgentConfig agent_config() const;
    void validate() const;
};

/// Flat TOML: `key = value` lines, `#` comments, strings, booleans and numbers.
/// Unknown keys are rejected.
ExperimentConfig parse_config(const std::string& toml_text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});
std::string to_toml(const ExperimentConfig& cfg);

inline constexpr const char* kCheckpointVersion = "lndp-checkpoint-1";

struct Checkpoint {
    std::string spec_version = kCheckpointVersion;
    ExperimentConfig config;
    std::string normalization_version;
    std::vector<double> params;
    std::size_t param_count = 0;
    std::uint64_t seed = 0;      // rollout seed that produced `fitness`
    double fitness = 0.0;
    long generation = 0;
};

nlohmann::json to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const nlohmann::json& j);
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Snapshot export: {adjacency, node_states, edge_states, activations, weights, node_kind}.
nlohmann::json graph_snapshot(const GraphState& g);

struct GenerationRecord {
    long generation = 0;
    double best_fitness = 0.0;  // best so far, in environment return units
    double mean_fitness = 0.0;
    double median_fitness = 0.0;
    double sigma = 0.0;
    double mean_density = 0.0;
    long wallclock_ms = 0;
};

inline constexpr const char* kGenerationsHeader =
    "generation,best_fitness,mean_fitness,median_fitness,sigma,mean_density,wallclock_ms";

std::string format_record(const GenerationRecord& r);

/// Rollout seed shared by every individual of a generation.
std::uint64_t generation_seed(std::uint64_t run_seed, long generation);

/// Runs `fn(i)` for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

struct TrainResult {
    Checkpoint best;
    std::vector<GenerationRecord> records;
    std::size_t param_count = 0;
};

/// Ask → parallel rollouts → tell, for cfg.generations generations. Writes
/// generations.csv, best_checkpoint.json and config.toml into `out_dir`.
TrainResult train(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, std::ostream* log = nullptr);

struct EvalOptions {
    int trials = 3;
    int episodes = 0;  // 0 keeps the checkpoint's episode count
    std::uint64_t seed = 0;
    bool ndp_ablation = false;
};

struct EvalReport {
    FitnessReport fitness;
    std::vector<double> episode_mean;
    std::vector<double> episode_std;
};

EvalReport evaluate(const Checkpoint& ckpt, EnvKind env, const EvalOptions& options);
/// One JSON line per trial, then one summary line.
void write_eval_jsonl(const EvalReport& report, const EvalOptions& options, std::ostream& out);

struct InspectOptions {
    std::uint64_t seed = 0;
    std::filesystem::path csv;
    std::filesystem::path snapshots;  // optional JSONL of graph snapshots, one per row
    std::filesystem::path trace;      // optional JSONL of environment steps
};

/// Column order of the inspect CSV for a network with `n_out` outputs and `n` nodes.
std::vector<std::string> inspect_columns(int n_out, int n);

/// Single-trial rollout with per-step export. Returns the number of rows written.
std::size_t inspect(const Checkpoint& ckpt, EnvKind env, const InspectOptions& options);

/// Shortest decimal text that round-trips the value.
std::string format_double(double v);
std::string format_float(float v);

}  // namespace lndp
