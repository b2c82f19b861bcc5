#include "lndp/edge_model.hpp"

#include "lndp/error.hpp"

#include <algorithm>
#include <cmath>

namespace lndp {

RowMat edge_update(const EdgeGruParams& p, const GraphState& g, const RowMat& h_new, float reward) {
    const int n = g.size();
    const int dh = static_cast<int>(h_new.cols());
    const int de = g.edge_dim();
    if (h_new.rows() != n || p.input_dim() != edge_gru_input_dim(dh) || p.hidden_dim() != de) {
        throw Error(ErrorKind::Shape, "edge update dimension mismatch");
    }
    if (!std::isfinite(reward)) throw Error(ErrorKind::NumericInput, "reward is not finite");
    require_finite(std::span<const float>(h_new.data(), static_cast<std::size_t>(h_new.size())), "node state");
    const float r = std::clamp(reward, -kRewardClip, kRewardClip);

    std::vector<Eigen::Index> rows;
    rows.reserve(g.adjacency.count());
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (g.adjacency(i, j)) rows.push_back(g.pair(i, j));
        }
    }

    RowMat out = RowMat::Zero(g.edge_states.rows(), de);
    if (rows.empty()) return out;

    const auto count = static_cast<Eigen::Index>(rows.size());
    RowMat x(count, edge_gru_input_dim(dh));
    RowMat h(count, de);
    for (Eigen::Index k = 0; k < count; ++k) {
        const int i = static_cast<int>(rows[k] / n);
        const int j = static_cast<int>(rows[k] % n);
        x.row(k).segment(0, dh) = h_new.row(i);
        x.row(k).segment(dh, dh) = h_new.row(j);
        x(k, 2 * dh) = g.activations[i];
        x(k, 2 * dh + 1) = g.activations[j];
        x(k, 2 * dh + 2) = r;
        h.row(k) = g.edge_states.row(rows[k]);
    }

    const RowMat updated = gru_rows(p, h, x);
    for (Eigen::Index k = 0; k < count; ++k) out.row(rows[k]) = updated.row(k);
    return out;
}

Mat weights_matrix(const GraphState& g) {
    const int n = g.size();
    Mat w = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (g.adjacency(i, j)) w(i, j) = weight_of(g.edge_states.row(g.pair(i, j)).transpose());
        }
    }
    return w;
}

}  // namespace lndp
