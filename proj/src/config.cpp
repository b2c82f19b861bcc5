#include "lndp/error.hpp"
#include "lndp/harness.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace lndp {

int ExperimentConfig::resolved_episodes() const {
    return episodes > 0 ? episodes : env_spec(env_kind(), env_options()).default_episodes;
}

EnvOptions ExperimentConfig::env_options() const {
    EnvOptions o;
    o.p_switch = p_switch;
    o.foraging_steps = foraging_steps;
    return o;
}

AgentConfig ExperimentConfig::agent_config() const {
    AgentConfig cfg = make_agent_config(env_kind(), n_total, mu_conn, sigma_conn, sizes, sp_enabled, t_sa);
    cfg.topology.self_loops_allowed = self_loops;
    cfg.ndp_ablation = ndp_ablation;
    return cfg;
}

void ExperimentConfig::validate() const {
    (void)env_kind();
    (void)agent_config();
    if (popsize < 4) throw Error(ErrorKind::Config, "popsize must be at least 4");
    if (generations < 0) throw Error(ErrorKind::Config, "generations must be non-negative");
    if (mc_trials < 1) throw Error(ErrorKind::Config, "mc_trials must be at least 1");
    if (episodes < 0) throw Error(ErrorKind::Config, "episodes must be non-negative");
    if (!(sigma0 > 0.0)) throw Error(ErrorKind::Config, "sigma0 must be positive");
    if (!(p_switch >= 0.0 && p_switch <= 1.0)) throw Error(ErrorKind::Config, "p_switch must lie in [0, 1]");
    if (foraging_steps < 1) throw Error(ErrorKind::Config, "foraging_steps must be positive");
    if (threads < 0) throw Error(ErrorKind::Config, "threads must be non-negative");
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// Drops a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

struct Value {
    std::string text;
    bool quoted = false;
    int line = 0;
};

[[noreturn]] void bad(const std::string& key, const Value& v, const char* expected) {
    throw Error(ErrorKind::Config,
                "line " + std::to_string(v.line) + ": '" + key + "' expects " + expected + ", got '" + v.text + "'");
}

template <class T>
T number(const std::string& key, const Value& v) {
    if (v.quoted) bad(key, v, "a number");
    T out{};
    const char* begin = v.text.data();
    const char* end = begin + v.text.size();
    if (!v.text.empty() && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end) bad(key, v, "a number");
    return out;
}

bool boolean(const std::string& key, const Value& v) {
    if (!v.quoted && v.text == "true") return true;
    if (!v.quoted && v.text == "false") return false;
    bad(key, v, "true or false");
}

std::string string(const std::string& key, const Value& v) {
    if (!v.quoted) bad(key, v, "a quoted string");
    return v.text;
}

}  // namespace

ExperimentConfig parse_config(const std::string& toml_text, ExperimentConfig cfg) {
    std::map<std::string, Value> values;
    std::istringstream in(toml_text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') throw Error(ErrorKind::Config, "line " + std::to_string(line_no) + ": tables are not supported");
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::Config, "line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        Value v{value, false, line_no};
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            v.text = value.substr(1, value.size() - 2);
            v.quoted = true;
        }
        if (key.empty() || !values.emplace(key, v).second) {
            throw Error(ErrorKind::Config, "line " + std::to_string(line_no) + ": empty or duplicate key '" + key + "'");
        }
    }

    for (const auto& [key, v] : values) {
        if (key == "env") cfg.env = string(key, v);
        else if (key == "n_total") cfg.n_total = number<int>(key, v);
        else if (key == "mu_conn") cfg.mu_conn = number<float>(key, v);
        else if (key == "sigma_conn") cfg.sigma_conn = number<float>(key, v);
        else if (key == "self_loops") cfg.self_loops = boolean(key, v);
        else if (key == "node_dim") cfg.sizes.node_dim = number<int>(key, v);
        else if (key == "edge_dim") cfg.sizes.edge_dim = number<int>(key, v);
        else if (key == "n_heads") cfg.sizes.n_heads = number<int>(key, v);
        else if (key == "d_head") cfg.sizes.d_head = number<int>(key, v);
        else if (key == "d_out") cfg.sizes.d_out = number<int>(key, v);
        else if (key == "mlp_hidden") cfg.sizes.mlp_hidden = number<int>(key, v);
        else if (key == "sp_enabled") cfg.sp_enabled = boolean(key, v);
        else if (key == "ndp_ablation") cfg.ndp_ablation = boolean(key, v);
        else if (key == "t_sa") cfg.t_sa = number<int>(key, v);
        else if (key == "popsize") cfg.popsize = number<int>(key, v);
        else if (key == "generations") cfg.generations = number<int>(key, v);
        else if (key == "mc_trials") cfg.mc_trials = number<int>(key, v);
        else if (key == "episodes") cfg.episodes = number<int>(key, v);
        else if (key == "sigma0") cfg.sigma0 = number<double>(key, v);
        else if (key == "p_switch") cfg.p_switch = number<double>(key, v);
        else if (key == "foraging_steps") cfg.foraging_steps = number<int>(key, v);
        else if (key == "seed") cfg.seed = number<std::uint64_t>(key, v);
        else if (key == "threads") cfg.threads = number<int>(key, v);
        else if (key == "record_wallclock") cfg.record_wallclock = boolean(key, v);
        else throw Error(ErrorKind::Config, "line " + std::to_string(v.line) + ": unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot read config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), std::move(base));
}

std::string to_toml(const ExperimentConfig& c) {
    auto b = [](bool v) { return v ? "true" : "false"; };
    std::ostringstream o;
    o << "env = \"" << c.env << "\"\n"
      << "n_total = " << c.n_total << "\n"
      << "mu_conn = " << format_float(c.mu_conn) << "\n"
      << "sigma_conn = " << format_float(c.sigma_conn) << "\n"
      << "self_loops = " << b(c.self_loops) << "\n"
      << "node_dim = " << c.sizes.node_dim << "\n"
      << "edge_dim = " << c.sizes.edge_dim << "\n"
      << "n_heads = " << c.sizes.n_heads << "\n"
      << "d_head = " << c.sizes.d_head << "\n"
      << "d_out = " << c.sizes.d_out << "\n"
      << "mlp_hidden = " << c.sizes.mlp_hidden << "\n"
      << "sp_enabled = " << b(c.sp_enabled) << "\n"
      << "ndp_ablation = " << b(c.ndp_ablation) << "\n"
      << "t_sa = " << c.t_sa << "\n"
      << "popsize = " << c.popsize << "\n"
      << "generations = " << c.generations << "\n"
      << "mc_trials = " << c.mc_trials << "\n"
      << "episodes = " << c.episodes << "\n"
      << "sigma0 = " << format_double(c.sigma0) << "\n"
      << "p_switch = " << format_double(c.p_switch) << "\n"
      << "foraging_steps = " << c.foraging_steps << "\n"
      << "seed = " << c.seed << "\n"
      << "threads = " << c.threads << "\n"
      << "record_wallclock = " << b(c.record_wallclock) << "\n";
    return o.str();
}

}  // namespace lndp
