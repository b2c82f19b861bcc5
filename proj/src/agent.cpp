#include "lndp/agent.hpp"

#include "lndp/error.hpp"

#include <cmath>

namespace lndp {

GtShape AgentConfig::gt_shape() const {
    GtShape s;
    s.n_heads = sizes.n_heads;
    s.d_head = sizes.d_head;
    s.d_node_in = 1 + sizes.node_dim + 6;
    s.d_edge_in = sizes.edge_dim + 3;
    s.d_out = sizes.d_out;
    return s;
}

void AgentConfig::validate() const {
    topology.validate();
    if (sizes.node_dim < 1 || sizes.edge_dim < 1 || sizes.n_heads < 1 || sizes.d_head < 1 || sizes.d_out < 1 ||
        sizes.mlp_hidden < 1) {
        throw Error(ErrorKind::Config, "model sizes must be positive");
    }
    if (action.size != topology.n_out) throw Error(ErrorKind::Config, "action size must equal the output node count");
    if (action.kind == ActionSpaceSpec::Kind::Continuous &&
        (static_cast<int>(action.lo.size()) != action.size || static_cast<int>(action.hi.size()) != action.size)) {
        throw Error(ErrorKind::Config, "continuous action bounds missing");
    }
    if (t_sa < 0) throw Error(ErrorKind::Config, "t_sa must be non-negative");
}

AgentConfig make_agent_config(EnvKind env, int n_total, float mu_conn, float sigma_conn, const ModelSizes& sizes,
                              bool sp_enabled, int t_sa) {
    const EnvSpec spec = env_spec(env);
    AgentConfig cfg;
    cfg.topology.n_total = n_total;
    cfg.topology.n_in = spec.obs_dim;
    cfg.topology.n_out = spec.action.size;
    cfg.topology.mu_conn = mu_conn;
    cfg.topology.sigma_conn = sigma_conn;
    cfg.sizes = sizes;
    cfg.action = spec.action;
    cfg.sp_enabled = sp_enabled;
    cfg.t_sa = t_sa;
    cfg.validate();
    return cfg;
}

AgentParams AgentParams::zeros(const AgentConfig& cfg) {
    cfg.validate();
    AgentParams p;
    p.cfg = cfg;
    p.gt = GtParams::zeros(cfg.gt_shape());
    p.node_gru = GruCell::zeros(cfg.sizes.d_out, cfg.sizes.node_dim);
    p.edge_gru = GruCell::zeros(edge_gru_input_dim(cfg.sizes.node_dim), cfg.sizes.edge_dim);
    p.sp = SpParams::zeros(cfg.sizes.node_dim, cfg.sizes.edge_dim, cfg.sizes.mlp_hidden);
    p.sp.enabled = cfg.sp_enabled;
    p.ou = OuParams::zeros(cfg.topology.n_in, cfg.t_sa);
    return p;
}

namespace {

template <class M, class F>
void visit_matrix(M& m, F& f) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) f(m(r, c));
    }
}

template <class G, class F>
void visit_gru(G& g, F& f) {
    visit_matrix(g.wz, f);
    visit_matrix(g.uz, f);
    visit_matrix(g.bz, f);
    visit_matrix(g.wr, f);
    visit_matrix(g.ur, f);
    visit_matrix(g.br, f);
    visit_matrix(g.wh, f);
    visit_matrix(g.uh, f);
    visit_matrix(g.bh, f);
}

template <class M, class F>
void visit_mlp(M& m, F& f) {
    visit_matrix(m.w1, f);
    visit_matrix(m.b1, f);
    visit_matrix(m.w2, f);
    f(m.b2);
}

// Single source of truth for the flat layout.
template <class P, class F>
void visit_params(P& p, F&& f) {
    for (auto& head : p.gt.heads) {
        visit_matrix(head.query, f);
        visit_matrix(head.key, f);
        visit_matrix(head.value, f);
        visit_matrix(head.edge, f);
    }
    visit_matrix(p.gt.out_proj, f);
    visit_matrix(p.gt.out_bias, f);
    visit_gru(p.node_gru, f);
    visit_gru(p.edge_gru, f);
    if (p.cfg.sp_enabled) {
        visit_mlp(p.sp.genesis, f);
        visit_mlp(p.sp.pruning, f);
    }
    if (p.cfg.t_sa > 0) {
        visit_matrix(p.ou.mu, f);
        visit_matrix(p.ou.alpha_raw, f);
        const Eigen::Index dim = p.ou.chol.dim();
        for (Eigen::Index r = 0; r < dim; ++r) {
            for (Eigen::Index c = 0; c <= r; ++c) {
                if constexpr (std::is_const_v<P>) {
                    f(p.ou.chol.matrix()(r, c));
                } else {
                    f(p.ou.chol.at(r, c));
                }
            }
        }
    }
}

}  // namespace

std::size_t param_count(const AgentConfig& cfg) {
    const AgentParams zero = AgentParams::zeros(cfg);
    std::size_t count = 0;
    visit_params(zero, [&](const float&) { ++count; });
    return count;
}

std::vector<double> flatten(const AgentParams& params) {
    std::vector<double> flat;
    flat.reserve(param_count(params.cfg));
    visit_params(params, [&](const float& x) { flat.push_back(static_cast<double>(x)); });
    return flat;
}

AgentParams unflatten(std::span<const double> flat, const AgentConfig& cfg) {
    AgentParams p = AgentParams::zeros(cfg);
    const std::size_t expected = param_count(cfg);
    if (flat.size() != expected) {
        throw Error(ErrorKind::Shape, "parameter vector has " + std::to_string(flat.size()) + " entries, expected " +
                                          std::to_string(expected));
    }
    std::size_t k = 0;
    visit_params(p, [&](float& x) { x = static_cast<float>(flat[k++]); });
    return p;
}

AgentState init_agent(const AgentParams& params, RngStream rng) {
    AgentState s;
    s.graph = init_graph(params.cfg.topology, params.cfg.sizes.node_dim, params.cfg.sizes.edge_dim, rng);
    s.ou_state = params.ou.mu;
    return s;
}

Action advance(AgentState& state, const AgentParams& params, std::span<const float> obs, float reward,
               const RngStream& rng, StepTrace* trace) {
    auto mark = [trace](std::string_view stage) {
        if (trace != nullptr) trace->push_back(stage);
    };
    GraphState& g = state.graph;

    g.activations = step_activations(g.activations, g.weights, obs);
    mark("step_activations");
    Action action = decode_action(g.activations, params.cfg.action);
    mark("decode_action");

    state.step_index += 1;
    state.last_reward = reward;
    if (params.cfg.ndp_ablation) return action;

    RowMat h_new = node_update(params.gt, params.node_gru, g);
    mark("node_update");
    g.edge_states = edge_update(params.edge_gru, g, h_new, reward);
    g.node_states = std::move(h_new);
    mark("edge_update");
    g.weights = weights_matrix(g);
    mark("weights_matrix");
    if (params.cfg.sp_enabled) {
        apply_structural_step_inplace(params.sp, g, rng);
        mark("apply_structural_step");
    }
    return action;
}

StepOutput agent_step(AgentState state, const AgentParams& params, std::span<const float> obs, float reward,
                      const RngStream& rng, StepTrace* trace) {
    Action a = advance(state, params, obs, reward, rng, trace);
    return {std::move(a), std::move(state)};
}

void run_sa_phase(AgentState& state, const AgentParams& params, const RngStream& rng, StepTrace* trace,
                  const StepObserver& observer, int trial) {
    const int steps = params.cfg.t_sa;
    if (steps <= 0) return;
    RngStream noise = rng.split(0);
    const RngStream step_streams = rng.split(1);
    state.ou_state = params.ou.mu;
    for (int t = 0; t < steps; ++t) {
        state.ou_state = ou_step(params.ou, state.ou_state, noise);
        const std::span<const float> obs(state.ou_state.data(), static_cast<std::size_t>(state.ou_state.size()));
        const Action action = advance(state, params, obs, 0.0f, step_streams.split(static_cast<std::uint64_t>(t)), trace);
        if (observer) {
            StepEvent ev{Phase::SpontaneousActivity, trial, 0, t, &state, obs, &action, 0.0, false, nullptr};
            observer(ev);
        }
    }
}

FitnessReport rollout(const AgentParams& params, EnvKind env, const RolloutOptions& options) {
    if (options.episodes < 1 || options.trials < 1) throw Error(ErrorKind::Config, "rollout needs episodes and trials >= 1");
    const EnvSpec spec = env_spec(env, options.env);
    if (spec.obs_dim != params.cfg.topology.n_in || spec.action.size != params.cfg.topology.n_out) {
        throw Error(ErrorKind::Config, "agent topology does not match environment " + std::string(to_string(env)));
    }

    const auto episodes = static_cast<std::size_t>(options.episodes);
    FitnessReport report;
    report.per_trial_returns.assign(static_cast<std::size_t>(options.trials), std::vector<double>(episodes, 0.0));
    report.density_trajectory.assign(episodes, 0.0);
    report.weight_mean_trajectory.assign(episodes, 0.0);
    report.weight_var_trajectory.assign(episodes, 0.0);

    const RngStream root = make_rng(options.seed);
    try {
        for (int k = 0; k < options.trials; ++k) {
            const RngStream trial = root.split(static_cast<std::uint64_t>(k));
            AgentState state = init_agent(params, trial.split(0));
            if (options.sa_enabled) run_sa_phase(state, params, trial.split(1), nullptr, options.observer, k);
            const RngStream agent_streams = trial.split(2);
            RngStream env_rng = trial.split(3);

            float reward = 0.0f;
            std::uint64_t step = 0;
            for (std::size_t e = 0; e < episodes; ++e) {
                ResetResult reset = env_reset(env, env_rng, options.env);
                EnvState env_state = std::move(reset.state);
                std::vector<double> raw = std::move(reset.obs);
                double ret = 0.0;
                for (int t = 0;; ++t) {
                    const std::vector<float> obs = normalize_obs(env, raw);
                    const Action action = advance(state, params, obs, reward, agent_streams.split(step++));
                    StepResult result = env_step(env, env_state, action, env_rng);
                    ret += result.reward;
                    reward = static_cast<float>(result.reward);
                    env_state = std::move(result.state);
                    raw = std::move(result.obs);
                    if (options.observer) {
                        StepEvent ev{Phase::Environment, k,           static_cast<int>(e), t, &state, obs, &action,
                                     result.reward,      result.done, &env_state};
                        options.observer(ev);
                    }
                    if (result.done) break;
                }
                report.per_trial_returns[static_cast<std::size_t>(k)][e] = ret;
                const WeightMoments wm = weight_moments(state.graph);
                report.density_trajectory[e] += density(state.graph) / options.trials;
                report.weight_mean_trajectory[e] += wm.mean / options.trials;
                report.weight_var_trajectory[e] += wm.variance / options.trials;
            }
        }
    } catch (const Error& err) {
        if (err.kind() != ErrorKind::NumericInput) throw;
        report.numeric_failure = true;
        const double worst = worst_episode_return(env, options.env);
        for (auto& row : report.per_trial_returns) std::fill(row.begin(), row.end(), worst);
    }

    report.per_episode_returns.assign(episodes, 0.0);
    double total = 0.0;
    for (const auto& row : report.per_trial_returns) {
        double trial_sum = 0.0;
        for (std::size_t e = 0; e < episodes; ++e) {
            report.per_episode_returns[e] += row[e] / options.trials;
            trial_sum += row[e];
        }
        total += trial_sum / static_cast<double>(episodes);
    }
    report.fitness = total / options.trials;
    return report;
}

}  // namespace lndp
