#include "lndp/graph_state.hpp"

#include "lndp/error.hpp"

#include <algorithm>
#include <numeric>

namespace lndp {

const char* to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::Input: return "input";
        case NodeKind::Hidden: return "hidden";
        case NodeKind::Output: return "output";
    }
    return "unknown";
}

NodeKind TopologyConfig::kind(int node) const {
    if (node < n_in) return NodeKind::Input;
    if (node >= first_output()) return NodeKind::Output;
    return NodeKind::Hidden;
}

void TopologyConfig::validate() const {
    if (n_in < 1 || n_out < 1) throw Error(ErrorKind::Config, "topology needs at least one input and one output");
    if (n_in + n_out > n_total) throw Error(ErrorKind::Config, "n_in + n_out exceeds n_total");
    if (!(mu_conn >= 0.0f && mu_conn <= 1.0f)) throw Error(ErrorKind::Config, "mu_conn must lie in [0, 1]");
    if (!(sigma_conn >= 0.0f)) throw Error(ErrorKind::Config, "sigma_conn must be non-negative");
}

std::size_t BitMatrix::count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

bool BitMatrix::subset_of(const BitMatrix& other) const {
    if (other.n_ != n_) return false;
    for (std::size_t k = 0; k < bits_.size(); ++k) {
        if (bits_[k] && !other.bits_[k]) return false;
    }
    return true;
}

BitMatrix allowed_mask(const TopologyConfig& cfg) {
    cfg.validate();
    BitMatrix mask(cfg.n_total);
    for (int i = 0; i < cfg.n_total; ++i) {
        const NodeKind src = cfg.kind(i);
        for (int j = 0; j < cfg.n_total; ++j) {
            const NodeKind dst = cfg.kind(j);
            const bool ok = (src == NodeKind::Input && dst == NodeKind::Hidden) ||
                            (src == NodeKind::Hidden && dst == NodeKind::Hidden &&
                             (i != j || cfg.self_loops_allowed)) ||
                            (src == NodeKind::Hidden && dst == NodeKind::Output);
            mask.set(i, j, ok);
        }
    }
    return mask;
}

GraphState init_graph(const TopologyConfig& cfg, int node_dim, int edge_dim, RngStream rng) {
    if (node_dim < 1 || edge_dim < 1) throw Error(ErrorKind::Config, "state dimensions must be positive");
    const int n = cfg.n_total;

    GraphState g;
    g.allowed = allowed_mask(cfg);
    g.node_kind.resize(n);
    for (int i = 0; i < n; ++i) g.node_kind[i] = cfg.kind(i);

    RngStream prob_rng = rng.split(0);
    const double p = sample_truncated_normal(cfg.mu_conn, cfg.sigma_conn, 0.0, 1.0, prob_rng);

    RngStream edge_rng = rng.split(1);
    g.adjacency = BitMatrix(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (g.allowed(i, j)) g.adjacency.set(i, j, edge_rng.bernoulli(p));
        }
    }

    RngStream node_rng = rng.split(2);
    g.node_states.resize(n, node_dim);
    for (Eigen::Index k = 0; k < g.node_states.size(); ++k) g.node_states.data()[k] = node_rng.uniform(-1.0f, 1.0f);

    RngStream state_rng = rng.split(3);
    g.edge_states.resize(static_cast<Eigen::Index>(n) * n, edge_dim);
    for (Eigen::Index k = 0; k < g.edge_states.size(); ++k) g.edge_states.data()[k] = state_rng.uniform(-1.0f, 1.0f);

    g.activations = Vec::Zero(n);
    g.weights = Mat::Zero(n, n);
    apply_edge_mask(g);
    return g;
}

void apply_edge_mask(GraphState& g) {
    const int n = g.size();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (g.adjacency(i, j)) {
                g.weights(i, j) = g.edge_states(g.pair(i, j), 0);
            } else {
                g.edge_states.row(g.pair(i, j)).setZero();
                g.weights(i, j) = 0.0f;
            }
        }
    }
}

std::vector<int> in_degrees(const GraphState& g) {
    const int n = g.size();
    std::vector<int> deg(n, 0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) deg[j] += g.adjacency(i, j) ? 1 : 0;
    }
    return deg;
}

RowMat node_structural_features(const GraphState& g) {
    const int n = g.size();
    RowMat f = RowMat::Zero(n, 6);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (g.adjacency(i, j)) {
                f(i, 1) += 1.0f;
                f(j, 0) += 1.0f;
            }
        }
    }
    const float inv_n = 1.0f / static_cast<float>(n);
    for (int i = 0; i < n; ++i) {
        f(i, 2) = f(i, 0) + f(i, 1);
        f(i, 0) *= inv_n;
        f(i, 1) *= inv_n;
        f(i, 2) *= inv_n;
        f(i, 3 + static_cast<int>(g.node_kind[i])) = 1.0f;
    }
    return f;
}

RowMat edge_structural_features(const GraphState& g) {
    const int n = g.size();
    RowMat f(static_cast<Eigen::Index>(n) * n, 3);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Eigen::Index r = g.pair(i, j);
            f(r, 0) = g.adjacency(i, j) ? 1.0f : 0.0f;
            f(r, 1) = g.adjacency(j, i) ? 1.0f : 0.0f;
            f(r, 2) = i == j ? 1.0f : 0.0f;
        }
    }
    return f;
}

double density(const GraphState& g) {
    const std::size_t allowed = g.allowed.count();
    if (allowed == 0) return 0.0;
    return static_cast<double>(g.adjacency.count()) / static_cast<double>(allowed);
}

WeightMoments weight_moments(const GraphState& g) {
    const int n = g.size();
    std::vector<double> present;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (g.adjacency(i, j)) present.push_back(g.weights(i, j));
        }
    }
    if (present.empty()) return {};
    const double count = static_cast<double>(present.size());
    const double mean = std::accumulate(present.begin(), present.end(), 0.0) / count;
    double var = 0.0;
    for (double w : present) var += (w - mean) * (w - mean);
    return {mean, var / count};
}

}  // namespace lndp
