#pragma once

#include "lndp/agent.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace lndp::testing {

inline AgentParams random_params(const AgentConfig& cfg, std::mt19937_64& gen, double scale = 0.5) {
    std::normal_distribution<double> n(0.0, scale);
    std::vector<double> flat(param_count(cfg));
    for (double& x : flat) x = n(gen);
    return unflatten(flat, cfg);
}

inline Mat random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& gen, double scale = 1.0) {
    std::normal_distribution<float> n(0.0f, static_cast<float>(scale));
    Mat m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = n(gen);
    }
    return m;
}

inline GruCell random_gru(int in, int hid, std::mt19937_64& gen, double scale = 0.5) {
    GruCell c = GruCell::zeros(in, hid);
    for (Mat* w : {&c.wz, &c.wr, &c.wh}) *w = random_matrix(hid, in, gen, scale);
    for (Mat* u : {&c.uz, &c.ur, &c.uh}) *u = random_matrix(hid, hid, gen, scale);
    for (Vec* b : {&c.bz, &c.br, &c.bh}) *b = random_matrix(hid, 1, gen, scale);
    return c;
}

/// Graph over `cfg` where each allowed edge is present with probability `p`.
/// States are random on present edges and zero elsewhere.
inline GraphState random_graph(const TopologyConfig& cfg, int dh, int de, double p, std::mt19937_64& gen) {
    TopologyConfig empty = cfg;
    empty.mu_conn = 0.0f;
    empty.sigma_conn = 0.0f;
    GraphState g = init_graph(empty, dh, de, make_rng(gen()));
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    std::bernoulli_distribution coin(p);
    const int n = g.size();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (g.allowed(i, j) && coin(gen)) {
                g.adjacency.set(i, j, true);
                for (int d = 0; d < de; ++d) g.edge_states(g.pair(i, j), d) = u(gen);
                g.weights(i, j) = g.edge_states(g.pair(i, j), 0);
            }
        }
        for (int d = 0; d < dh; ++d) g.node_states(i, d) = u(gen);
        g.activations[i] = u(gen);
    }
    return g;
}

inline GtParams random_gt(const GtShape& s, std::mt19937_64& gen, double scale = 0.5) {
    GtParams p = GtParams::zeros(s);
    for (auto& h : p.heads) {
        h.query = random_matrix(s.d_head, s.d_node_in, gen, scale);
        h.key = random_matrix(s.d_head, s.d_node_in, gen, scale);
        h.value = random_matrix(s.d_head, s.d_node_in, gen, scale);
        h.edge = random_matrix(s.d_head, s.d_edge_in, gen, scale);
    }
    p.out_proj = random_matrix(s.d_out, s.n_heads * s.d_head, gen, scale);
    p.out_bias = random_matrix(s.d_out, 1, gen, scale);
    return p;
}

// Every logit materialized one by one, in double precision.
inline std::vector<std::vector<double>> naive_gt(const GtParams& p, const RowMat& node_in, const RowMat& edge_in) {
    const auto n = static_cast<int>(node_in.rows());
    const int heads = static_cast<int>(p.heads.size());
    const int dk = static_cast<int>(p.heads[0].query.rows());
    auto project = [](const Mat& w, const auto& x) {
        std::vector<double> out(static_cast<std::size_t>(w.rows()), 0.0);
        for (int r = 0; r < w.rows(); ++r) {
            for (int c = 0; c < w.cols(); ++c) out[r] += static_cast<double>(w(r, c)) * x(c);
        }
        return out;
    };
    std::vector<std::vector<double>> concat(n, std::vector<double>(heads * dk, 0.0));
    for (int k = 0; k < heads; ++k) {
        const GtHead& h = p.heads[k];
        for (int i = 0; i < n; ++i) {
            const auto q = project(h.query, node_in.row(i));
            std::vector<double> logits(n);
            for (int j = 0; j < n; ++j) {
                const auto key = project(h.key, node_in.row(j));
                const auto g = project(h.edge, edge_in.row(i * n + j));
                double s = 0;
                for (int d = 0; d < dk; ++d) s += q[d] * key[d] * g[d];
                logits[j] = s / std::sqrt(static_cast<double>(dk));
            }
            const double m = *std::max_element(logits.begin(), logits.end());
            double z = 0;
            for (double& l : logits) z += (l = std::exp(l - m));
            for (int j = 0; j < n; ++j) {
                const auto v = project(h.value, node_in.row(j));
                for (int d = 0; d < dk; ++d) concat[i][k * dk + d] += logits[j] / z * v[d];
            }
        }
    }
    std::vector<std::vector<double>> out(n, std::vector<double>(p.out_proj.rows()));
    for (int i = 0; i < n; ++i) {
        for (int r = 0; r < p.out_proj.rows(); ++r) {
            double s = p.out_bias[r];
            for (int c = 0; c < p.out_proj.cols(); ++c) s += p.out_proj(r, c) * concat[i][c];
            out[i][r] = std::tanh(s);
        }
    }
    return out;
}

inline double sigmoid_ref(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Expected return of uniformly random actions on the 5-cell foraging task,
/// by exact forward propagation of the state distribution.
inline double foraging_random_expected_return(int steps, double p_switch) {
    // state: position (5) × food side (2) × steps since reset (10)
    constexpr int kPos = 5, kSide = 2, kCount = 10;
    auto idx = [](int pos, int side, int c) { return (pos * kSide + side) * kCount + c; };
    std::vector<double> dist(kPos * kSide * kCount, 0.0);
    dist[idx(2, 0, 0)] = 0.5;
    dist[idx(2, 1, 0)] = 0.5;
    double expected = 0.0;
    for (int t = 0; t < steps; ++t) {
        std::vector<double> next(dist.size(), 0.0);
        for (int pos = 0; pos < kPos; ++pos) {
            for (int side = 0; side < kSide; ++side) {
                for (int c = 0; c < kCount; ++c) {
                    const double mass = dist[idx(pos, side, c)];
                    if (mass == 0.0) continue;
                    for (int move : {+1, -1, 0}) {
                        const double m = mass / 3.0;
                        const int np = std::clamp(pos + move, 0, kPos - 1);
                        const int food = side == 0 ? 0 : kPos - 1;
                        const bool eaten = np == food;
                        if (eaten) expected += 10.0 * m;
                        if (eaten || c + 1 >= kCount) {
                            next[idx(2, side, 0)] += m * (1.0 - p_switch);
                            next[idx(2, 1 - side, 0)] += m * p_switch;
                        } else {
                            next[idx(np, side, c + 1)] += m;
                        }
                    }
                }
            }
        }
        dist = std::move(next);
    }
    return expected;
}

}  // namespace lndp::testing
