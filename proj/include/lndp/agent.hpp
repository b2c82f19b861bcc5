#pragma once

#include "lndp/dynamics.hpp"
#include "lndp/edge_model.hpp"
#include "lndp/environments.hpp"
#include "lndp/graph_state.hpp"
#include "lndp/node_model.hpp"
#include "lndp/spontaneous_activity.hpp"
#include "lndp/structural_plasticity.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace lndp {

struct ModelSizes {
    int node_dim = 8;
    int edge_dim = 4;
    int n_heads = 2;
    int d_head = 8;
    int d_out = 16;
    int mlp_hidden = 8;
};

struct AgentConfig {
    TopologyConfig topology;
    ModelSizes sizes;
    ActionSpaceSpec action;
    bool sp_enabled = true;
    bool ndp_ablation = false;
    int t_sa = 0;

    GtShape gt_shape() const;
    void validate() const;
};

/// Topology and action space taken from the environment; everything else from the arguments.
AgentConfig make_agent_config(EnvKind env, int n_total, float mu_conn, float sigma_conn, const ModelSizes& sizes = {},
                              bool sp_enabled = true, int t_sa = 0);

/// Every evolvable parameter. The OU block exists only when t_sa > 0 and the
/// structural-plasticity heads only when sp_enabled.
struct AgentParams {
    AgentConfig cfg;
    GtParams gt;
    NodeGruParams node_gru;
    EdgeGruParams edge_gru;
    SpParams sp;
    OuParams ou;

    static AgentParams zeros(const AgentConfig& cfg);
};

/// Flat layout, in order: per GT head (query, key, value, edge) row-major, W_o, b_o;
/// node GRU (z, r, candidate; each input, recurrent, bias); edge GRU likewise;
/// genesis MLP (W1, b1, w2, b2); pruning MLP; OU (mu, raw alpha, lower-triangular
/// Cholesky rows).
std::size_t param_count(const AgentConfig& cfg);
std::vector<double> flatten(const AgentParams& params);
AgentParams unflatten(std::span<const double> flat, const AgentConfig& cfg);

struct AgentState {
    GraphState graph;
    Vec ou_state;
    std::uint64_t step_index = 0;
    float last_reward = 0.0f;
};

AgentState init_agent(const AgentParams& params, RngStream rng);

/// Names of the pipeline stages executed by one step, in order.
using StepTrace = std::vector<std::string_view>;

/// One step of the canonical pipeline: activations, action, then (unless ablated)
/// node states, edge states, weights and, when enabled, structural plasticity.
/// `reward` is the reward received on the previous environment step.
Action advance(AgentState& state, const AgentParams& params, std::span<const float> obs, float reward,
               const RngStream& rng, StepTrace* trace = nullptr);

struct StepOutput {
    Action action;
    AgentState state;
};

StepOutput agent_step(AgentState state, const AgentParams& params, std::span<const float> obs, float reward,
                      const RngStream& rng, StepTrace* trace = nullptr);

enum class Phase { SpontaneousActivity, Environment };

struct StepEvent {
    Phase phase;
    int trial = 0;
    int episode = 0;
    int t = 0;  // step within the phase or episode
    const AgentState* agent = nullptr;
    std::span<const float> obs;
    const Action* action = nullptr;
    double reward = 0.0;
    bool done = false;
    const EnvState* env = nullptr;
};

using StepObserver = std::function<void(const StepEvent&)>;

/// T^SA steps of the ordinary pipeline driven by OU input and zero reward.
/// o_SA starts at mu. Draws OU noise from rng.split(0) and step streams from rng.split(1).
void run_sa_phase(AgentState& state, const AgentParams& params, const RngStream& rng, StepTrace* trace = nullptr,
                  const StepObserver& observer = {}, int trial = 0);

struct RolloutOptions {
    int episodes = 1;
    int trials = 1;
    std::uint64_t seed = 0;
    bool sa_enabled = true;
    EnvOptions env;
    StepObserver observer;
};

struct FitnessReport {
    double fitness = 0.0;
    std::vector<double> per_episode_returns;             // mean over trials, one per episode
    std::vector<std::vector<double>> per_trial_returns;  // trials × episodes
    std::vector<double> density_trajectory;              // end of each episode, mean over trials
    std::vector<double> weight_mean_trajectory;
    std::vector<double> weight_var_trajectory;
    bool numeric_failure = false;
};

/// K independent lifetimes of E episodes each. The environment resets between
/// episodes; the agent does not. Trial k uses root.split(k) with sub-streams
/// 0 graph init, 1 SA phase, 2 agent steps, 3 environment.
FitnessReport rollout(const AgentParams& params, EnvKind env, const RolloutOptions& options);

}  // namespace lndp
