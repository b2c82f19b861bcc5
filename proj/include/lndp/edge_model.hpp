#pragma once

#include "lndp/graph_state.hpp"
#include "lndp/node_model.hpp"

namespace lndp {

/// Edge GRU input: [h_pre | h_post | v_pre | v_post | reward], hidden size de.
using EdgeGruParams = GruCell;

inline int edge_gru_input_dim(int node_dim) { return 2 * node_dim + 3; }

/// Rewards entering the edge GRU are clipped to this magnitude.
inline constexpr float kRewardClip = 10.0f;

/// Updates every present edge with the shared GRU; non-edges come back as zero rows.
/// `h_new` is the freshly updated node state.
RowMat edge_update(const EdgeGruParams& p, const GraphState& g, const RowMat& h_new, float reward);

inline float weight_of(const Eigen::Ref<const Vec>& edge_state) {
    return edge_state.size() == 0 ? 0.0f : edge_state[0];
}

Mat weights_matrix(const GraphState& g);

}  // namespace lndp
