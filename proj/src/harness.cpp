#include "lndp/harness.hpp"

#include "lndp/error.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace lndp {

using nlohmann::json;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_float(float v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

json config_to_json(const ExperimentConfig& c) {
    return json{{"env", c.env},
                {"n_total", c.n_total},
                {"mu_conn", c.mu_conn},
                {"sigma_conn", c.sigma_conn},
                {"self_loops", c.self_loops},
                {"node_dim", c.sizes.node_dim},
                {"edge_dim", c.sizes.edge_dim},
                {"n_heads", c.sizes.n_heads},
                {"d_head", c.sizes.d_head},
                {"d_out", c.sizes.d_out},
                {"mlp_hidden", c.sizes.mlp_hidden},
                {"sp_enabled", c.sp_enabled},
                {"ndp_ablation", c.ndp_ablation},
                {"t_sa", c.t_sa},
                {"popsize", c.popsize},
                {"generations", c.generations},
                {"mc_trials", c.mc_trials},
                {"episodes", c.episodes},
                {"sigma0", c.sigma0},
                {"p_switch", c.p_switch},
                {"foraging_steps", c.foraging_steps},
                {"seed", c.seed},
                {"threads", c.threads},
                {"record_wallclock", c.record_wallclock}};
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    c.env = j.at("env").get<std::string>();
    c.n_total = j.at("n_total").get<int>();
    c.mu_conn = j.at("mu_conn").get<float>();
    c.sigma_conn = j.at("sigma_conn").get<float>();
    c.self_loops = j.at("self_loops").get<bool>();
    c.sizes.node_dim = j.at("node_dim").get<int>();
    c.sizes.edge_dim = j.at("edge_dim").get<int>();
    c.sizes.n_heads = j.at("n_heads").get<int>();
    c.sizes.d_head = j.at("d_head").get<int>();
    c.sizes.d_out = j.at("d_out").get<int>();
    c.sizes.mlp_hidden = j.at("mlp_hidden").get<int>();
    c.sp_enabled = j.at("sp_enabled").get<bool>();
    c.ndp_ablation = j.at("ndp_ablation").get<bool>();
    c.t_sa = j.at("t_sa").get<int>();
    c.popsize = j.at("popsize").get<int>();
    c.generations = j.at("generations").get<int>();
    c.mc_trials = j.at("mc_trials").get<int>();
    c.episodes = j.at("episodes").get<int>();
    c.sigma0 = j.at("sigma0").get<double>();
    c.p_switch = j.at("p_switch").get<double>();
    c.foraging_steps = j.at("foraging_steps").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.threads = j.at("threads").get<int>();
    c.record_wallclock = j.at("record_wallclock").get<bool>();
    c.validate();
    return c;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

template <class M>
json matrix_rows(const M& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

json to_json(const Checkpoint& ckpt) {
    return json{{"spec_version", ckpt.spec_version},
                {"config", config_to_json(ckpt.config)},
                {"normalization_version", ckpt.normalization_version},
                {"param_count", ckpt.param_count},
                {"seed", ckpt.seed},
                {"fitness", ckpt.fitness},
                {"generation", ckpt.generation},
                {"params", ckpt.params}};
}

Checkpoint checkpoint_from_json(const json& j) {
    Checkpoint c;
    try {
        c.spec_version = j.at("spec_version").get<std::string>();
        if (c.spec_version != kCheckpointVersion) {
            throw Error(ErrorKind::Compatibility,
                        "checkpoint version '" + c.spec_version + "' is not '" + kCheckpointVersion + "'");
        }
        c.normalization_version = j.at("normalization_version").get<std::string>();
        if (c.normalization_version != kNormalizationVersion) {
            throw Error(ErrorKind::Compatibility, "checkpoint was written with observation normalization '" +
                                                      c.normalization_version + "'");
        }
        c.config = config_from_json(j.at("config"));
        c.param_count = j.at("param_count").get<std::size_t>();
        c.seed = j.at("seed").get<std::uint64_t>();
        c.fitness = j.at("fitness").get<double>();
        c.generation = j.at("generation").get<long>();
        c.params = j.at("params").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Io, std::string("malformed checkpoint: ") + e.what());
    }
    if (c.params.size() != c.param_count || c.param_count != param_count(c.config.agent_config())) {
        throw Error(ErrorKind::Shape, "checkpoint parameter count does not match its config");
    }
    return c;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    write_text(path, to_json(ckpt).dump(1) + "\n");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot read checkpoint " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Io, "cannot parse " + path.string() + ": " + e.what());
    }
    return checkpoint_from_json(j);
}

json graph_snapshot(const GraphState& g) {
    const int n = g.size();
    json adjacency = json::array();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) adjacency.push_back(g.adjacency(i, j) ? 1 : 0);
    }
    json kinds = json::array();
    for (NodeKind k : g.node_kind) kinds.push_back(to_string(k));
    json activations = json::array();
    for (Eigen::Index i = 0; i < g.activations.size(); ++i) activations.push_back(g.activations[i]);
    return json{{"n", n},
                {"adjacency", std::move(adjacency)},
                {"node_states", matrix_rows(g.node_states)},
                {"edge_states", matrix_rows(g.edge_states)},
                {"activations", std::move(activations)},
                {"weights", matrix_rows(g.weights)},
                {"node_kind", std::move(kinds)}};
}

std::string format_record(const GenerationRecord& r) {
    std::string s = std::to_string(r.generation);
    for (double v : {r.best_fitness, r.mean_fitness, r.median_fitness, r.sigma, r.mean_density}) {
        s += ',';
        s += format_double(v);
    }
    s += ',';
    s += std::to_string(r.wallclock_ms);
    return s;
}

std::uint64_t generation_seed(std::uint64_t run_seed, long generation) {
    RngStream s = make_rng(run_seed).split(1).split(static_cast<std::uint64_t>(generation));
    return s.next_u64();
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::thread::hardware_concurrency();
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(count);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

namespace {

RolloutOptions rollout_options(const ExperimentConfig& cfg, int trials, int episodes, std::uint64_t seed) {
    RolloutOptions o;
    o.trials = trials;
    o.episodes = episodes;
    o.seed = seed;
    o.env = cfg.env_options();
    return o;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TrainResult train(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, std::ostream* log) {
    cfg.validate();
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + out_dir.string() + ": " + ec.message());

    const AgentConfig agent_cfg = cfg.agent_config();
    const EnvKind env = cfg.env_kind();
    const int episodes = cfg.resolved_episodes();
    const auto dim = static_cast<int>(param_count(agent_cfg));

    write_text(out_dir / "config.toml", to_toml(cfg));
    std::ofstream csv(out_dir / "generations.csv", std::ios::binary | std::ios::trunc);
    if (!csv) throw Error(ErrorKind::Io, "cannot write generations.csv in " + out_dir.string());
    csv << kGenerationsHeader << '\n';

    if (log != nullptr) {
        AgentConfig no_sp = agent_cfg;
        no_sp.sp_enabled = false;
        *log << "param_count " << dim << " (without structural plasticity " << param_count(no_sp) << ")\n";
    }

    TrainResult result;
    result.param_count = static_cast<std::size_t>(dim);
    Checkpoint& best = result.best;
    best.config = cfg;
    best.normalization_version = kNormalizationVersion;
    best.param_count = result.param_count;

    CmaState cma = cma_init(dim, cfg.sigma0, cfg.popsize);
    const RngStream ask_streams = make_rng(cfg.seed).split(0);
    const auto start = std::chrono::steady_clock::now();

    if (cfg.generations == 0) {
        best.params.assign(static_cast<std::size_t>(dim), 0.0);
        best.seed = generation_seed(cfg.seed, 0);
        const AgentParams params = unflatten(best.params, agent_cfg);
        best.fitness = rollout(params, env, rollout_options(cfg, cfg.mc_trials, episodes, best.seed)).fitness;
        best.generation = 0;
    }

    bool have_best = false;
    for (long gen = 0; gen < cfg.generations; ++gen) {
        RngStream ask_rng = ask_streams.split(static_cast<std::uint64_t>(gen));
        const MatD pop = cma_ask(cma, ask_rng);
        const std::uint64_t seed = generation_seed(cfg.seed, gen);
        const RolloutOptions options = rollout_options(cfg, cfg.mc_trials, episodes, seed);

        std::vector<double> fitness(static_cast<std::size_t>(cfg.popsize));
        std::vector<double> dens(fitness.size());
        parallel_for(fitness.size(), cfg.threads, [&](std::size_t i) {
            std::vector<double> theta(pop.cols());
            for (Eigen::Index c = 0; c < pop.cols(); ++c) theta[c] = pop(static_cast<Eigen::Index>(i), c);
            const FitnessReport rep = rollout(unflatten(theta, agent_cfg), env, options);
            fitness[i] = rep.fitness;
            dens[i] = rep.density_trajectory.back();
        });

        if (std::none_of(fitness.begin(), fitness.end(), [](double f) { return std::isfinite(f); })) {
            throw Error(ErrorKind::NumericInput, "every individual of generation " + std::to_string(gen) +
                                                     " produced a non-finite fitness");
        }

        VecD neg(cfg.popsize);
        for (int i = 0; i < cfg.popsize; ++i) neg[i] = std::isnan(fitness[i]) ? fitness[i] : -fitness[i];

        const auto top = std::max_element(fitness.begin(), fitness.end(), [](double a, double b) {
            return std::isnan(a) || (!std::isnan(b) && a < b);
        });
        if (!have_best || *top > best.fitness) {
            const auto row = static_cast<Eigen::Index>(top - fitness.begin());
            best.params.resize(static_cast<std::size_t>(dim));
            for (int c = 0; c < dim; ++c) {
                // Round through float so the stored vector is exactly what the agent ran.
                best.params[c] = static_cast<double>(static_cast<float>(pop(row, c)));
            }
            best.fitness = *top;
            best.seed = seed;
            best.generation = gen;
            have_best = true;
            save_checkpoint(best, out_dir / "best_checkpoint.json");
        }

        cma = cma_tell(std::move(cma), pop, neg);

        GenerationRecord rec;
        rec.generation = gen;
        rec.best_fitness = best.fitness;
        double sum = 0.0;
        for (double f : fitness) sum += f;
        rec.mean_fitness = sum / cfg.popsize;
        rec.median_fitness = median(fitness);
        rec.sigma = cma.sigma;
        double dsum = 0.0;
        for (double d : dens) dsum += d;
        rec.mean_density = dsum / cfg.popsize;
        if (cfg.record_wallclock) {
            rec.wallclock_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                   std::chrono::steady_clock::now() - start)
                                   .count();
        }
        csv << format_record(rec) << '\n';
        csv.flush();
        if (log != nullptr) {
            *log << "gen " << gen << " best " << format_double(rec.best_fitness) << " mean "
                 << format_double(rec.mean_fitness) << " sigma " << format_double(rec.sigma) << " density "
                 << format_double(rec.mean_density) << '\n';
            log->flush();
        }
        result.records.push_back(rec);
    }

    if (!csv) throw Error(ErrorKind::Io, "write failed for generations.csv");
    save_checkpoint(best, out_dir / "best_checkpoint.json");
    return result;
}

EvalReport evaluate(const Checkpoint& ckpt, EnvKind env, const EvalOptions& options) {
    if (ckpt.spec_version != kCheckpointVersion) {
        throw Error(ErrorKind::Compatibility, "checkpoint version '" + ckpt.spec_version + "' is not supported");
    }
    if (ckpt.normalization_version != kNormalizationVersion) {
        throw Error(ErrorKind::Compatibility, "observation normalization '" + ckpt.normalization_version +
                                                  "' does not match '" + std::string(kNormalizationVersion) + "'");
    }
    AgentConfig cfg = ckpt.config.agent_config();
    if (options.ndp_ablation) cfg.ndp_ablation = true;
    const AgentParams params = unflatten(ckpt.params, cfg);
    const int episodes = options.episodes > 0 ? options.episodes : ckpt.config.resolved_episodes();

    EvalReport report;
    report.fitness = rollout(params, env, rollout_options(ckpt.config, options.trials, episodes, options.seed));
    const auto& rows = report.fitness.per_trial_returns;
    for (int e = 0; e < episodes; ++e) {
        double mean = 0.0;
        for (const auto& row : rows) mean += row[e];
        mean /= static_cast<double>(rows.size());
        double var = 0.0;
        for (const auto& row : rows) var += (row[e] - mean) * (row[e] - mean);
        var /= static_cast<double>(rows.size());
        report.episode_mean.push_back(mean);
        report.episode_std.push_back(std::sqrt(var));
    }
    return report;
}

void write_eval_jsonl(const EvalReport& report, const EvalOptions& options, std::ostream& out) {
    const auto& rows = report.fitness.per_trial_returns;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out << json{{"trial", k}, {"returns", rows[k]}}.dump() << '\n';
    }
    out << json{{"summary", true},
                {"trials", options.trials},
                {"episodes", report.episode_mean.size()},
                {"seed", options.seed},
                {"ndp_ablation", options.ndp_ablation},
                {"fitness", report.fitness.fitness},
                {"episode_mean", report.episode_mean},
                {"episode_std", report.episode_std},
                {"numeric_failure", report.fitness.numeric_failure}}
               .dump()
        << '\n';
}

std::vector<std::string> inspect_columns(int n_out, int n) {
    std::vector<std::string> cols{"phase", "trial", "episode", "t", "density", "weight_mean", "weight_var", "n_edges"};
    for (int k = 0; k < n_out; ++k) cols.push_back("out_indeg_" + std::to_string(k));
    cols.insert(cols.end(), {"food_side", "reward", "action"});
    for (int i = 0; i < n; ++i) cols.push_back("act_" + std::to_string(i));
    return cols;
}

namespace {

std::string action_text(const Action& a) {
    if (const int* d = std::get_if<int>(&a)) return std::to_string(*d);
    std::string s;
    for (float x : std::get<std::vector<float>>(a)) {
        if (!s.empty()) s += ';';
        s += format_float(x);
    }
    return s;
}

json action_json(const Action& a) {
    if (const int* d = std::get_if<int>(&a)) return *d;
    return std::get<std::vector<float>>(a);
}

}  // namespace

std::size_t inspect(const Checkpoint& ckpt, EnvKind env, const InspectOptions& options) {
    if (ckpt.spec_version != kCheckpointVersion || ckpt.normalization_version != kNormalizationVersion) {
        throw Error(ErrorKind::Compatibility, "checkpoint is not compatible with this build");
    }
    const AgentConfig cfg = ckpt.config.agent_config();
    const AgentParams params = unflatten(ckpt.params, cfg);
    const int n = cfg.topology.n_total;
    const int n_out = cfg.topology.n_out;
    const int first_out = cfg.topology.first_output();

    std::ofstream csv(options.csv, std::ios::binary | std::ios::trunc);
    if (!csv) throw Error(ErrorKind::Io, "cannot write " + options.csv.string());
    std::ofstream snapshots, trace;
    if (!options.snapshots.empty()) {
        snapshots.open(options.snapshots, std::ios::binary | std::ios::trunc);
        if (!snapshots) throw Error(ErrorKind::Io, "cannot write " + options.snapshots.string());
    }
    if (!options.trace.empty()) {
        trace.open(options.trace, std::ios::binary | std::ios::trunc);
        if (!trace) throw Error(ErrorKind::Io, "cannot write " + options.trace.string());
    }

    const auto cols = inspect_columns(n_out, n);
    for (std::size_t c = 0; c < cols.size(); ++c) csv << (c ? "," : "") << cols[c];
    csv << '\n';

    std::size_t rows = 0;
    RolloutOptions ro = rollout_options(ckpt.config, 1, ckpt.config.resolved_episodes(), options.seed);
    ro.observer = [&](const StepEvent& ev) {
        const GraphState& g = ev.agent->graph;
        const WeightMoments wm = weight_moments(g);
        const std::vector<int> indeg = in_degrees(g);
        const bool sa = ev.phase == Phase::SpontaneousActivity;

        std::string food;
        if (ev.env != nullptr) {
            if (const auto* f = std::get_if<ForagingState>(ev.env)) food = f->food_side == FoodSide::Left ? "left" : "right";
        }
        csv << (sa ? "sa" : "env") << ',' << ev.trial << ',' << ev.episode << ',' << ev.t << ','
            << format_double(density(g)) << ',' << format_double(wm.mean) << ',' << format_double(wm.variance) << ','
            << g.adjacency.count();
        for (int k = 0; k < n_out; ++k) csv << ',' << indeg[static_cast<std::size_t>(first_out + k)];
        csv << ',' << food << ',' << format_double(ev.reward) << ',' << action_text(*ev.action);
        for (int i = 0; i < n; ++i) csv << ',' << format_float(g.activations[i]);
        csv << '\n';

        if (snapshots.is_open()) {
            json snap = graph_snapshot(g);
            snap["row"] = rows;
            snapshots << snap.dump() << '\n';
        }
        if (trace.is_open() && !sa) {
            trace << json{{"t", ev.t},
                          {"episode", ev.episode},
                          {"obs", std::vector<float>(ev.obs.begin(), ev.obs.end())},
                          {"action", action_json(*ev.action)},
                          {"reward", ev.reward},
                          {"done", ev.done},
                          {"env_kind", std::string(to_string(env))}}
                         .dump()
                  << '\n';
        }
        ++rows;
    };
    rollout(params, env, ro);
    if (!csv) throw Error(ErrorKind::Io, "write failed for " + options.csv.string());
    return rows;
}

}  // namespace lndp
