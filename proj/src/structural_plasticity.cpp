#include "lndp/structural_plasticity.hpp"

#include "lndp/error.hpp"

namespace lndp {

ProbabilityMlp ProbabilityMlp::zeros(int input_dim, int hidden_dim) {
    ProbabilityMlp m;
    m.w1 = Mat::Zero(hidden_dim, input_dim);
    m.b1 = Vec::Zero(hidden_dim);
    m.w2 = Vec::Zero(hidden_dim);
    m.b2 = 0.0f;
    return m;
}

float ProbabilityMlp::logit(const Eigen::Ref<const Vec>& x) const {
    if (x.size() != input_dim()) throw Error(ErrorKind::Shape, "MLP input dimension mismatch");
    const Vec hidden = (w1 * x + b1).cwiseMax(0.0f);
    return w2.dot(hidden) + b2;
}

SpParams SpParams::zeros(int node_dim, int edge_dim, int hidden_dim) {
    SpParams p;
    p.genesis = ProbabilityMlp::zeros(2 * node_dim, hidden_dim);
    p.pruning = ProbabilityMlp::zeros(edge_dim, hidden_dim);
    return p;
}

float synaptogenesis_prob(const SpParams& p, const Eigen::Ref<const Vec>& h_pre, const Eigen::Ref<const Vec>& h_post) {
    Vec x(h_pre.size() + h_post.size());
    x << h_pre, h_post;
    return sigmoid(p.genesis.logit(x));
}

float pruning_prob(const SpParams& p, const Eigen::Ref<const Vec>& edge_state) {
    return sigmoid(p.pruning.logit(edge_state));
}

void apply_structural_step_inplace(const SpParams& p, GraphState& g, const RngStream& rng) {
    if (!p.enabled) return;
    const int n = g.size();
    const int dh = g.node_dim();
    const int de = g.edge_dim();
    if (p.genesis.input_dim() != 2 * dh || p.pruning.input_dim() != de) {
        throw Error(ErrorKind::Shape, "structural plasticity dimension mismatch");
    }

    // The genesis first layer splits into a presynaptic and a postsynaptic half.
    const RowMat pre = (g.node_states * p.genesis.w1.leftCols(dh).transpose()).rowwise() + p.genesis.b1.transpose();
    const RowMat post = g.node_states * p.genesis.w1.rightCols(dh).transpose();
    const int hidden = p.genesis.hidden_dim();
    const int prune_hidden = p.pruning.hidden_dim();

    const BitMatrix before = g.adjacency;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (!g.allowed(i, j)) continue;
            const Eigen::Index row = g.pair(i, j);
            RngStream pair_rng = rng.split(static_cast<std::uint64_t>(row));
            const double u = pair_rng.uniform();
            if (before(i, j)) {
                const float* e = g.edge_states.data() + row * de;
                float logit = p.pruning.b2;
                for (int k = 0; k < prune_hidden; ++k) {
                    float a = p.pruning.b1[k];
                    for (int d = 0; d < de; ++d) a += p.pruning.w1(k, d) * e[d];
                    if (a > 0.0f) logit += p.pruning.w2[k] * a;
                }
                if (u < sigmoid(logit)) {
                    g.adjacency.set(i, j, false);
                    g.edge_states.row(row).setZero();
                    g.weights(i, j) = 0.0f;
                }
            } else {
                float logit = p.genesis.b2;
                for (int k = 0; k < hidden; ++k) {
                    const float a = pre(i, k) + post(j, k);
                    if (a > 0.0f) logit += p.genesis.w2[k] * a;
                }
                if (u < sigmoid(logit)) {
                    g.adjacency.set(i, j, true);
                    for (int d = 0; d < de; ++d) g.edge_states(row, d) = pair_rng.uniform(-1.0f, 1.0f);
                    g.weights(i, j) = g.edge_states(row, 0);
                }
            }
        }
    }
}

GraphState apply_structural_step(const SpParams& p, GraphState g, const RngStream& rng) {
    apply_structural_step_inplace(p, g, rng);
    return g;
}

}  // namespace lndp
