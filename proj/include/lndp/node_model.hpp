#pragma once

#include "lndp/graph_state.hpp"
#include "lndp/numerics.hpp"

#include <vector>

namespace lndp {

/// Graph-transformer layer sizes. Node inputs are [activation, state, 6 structural
/// features]; edge inputs are [edge state, 3 structural bits].
struct GtShape {
    int n_heads = 2;
    int d_head = 8;
    int d_node_in = 15;
    int d_edge_in = 7;
    int d_out = 16;
};

struct GtHead {
    Mat query;  // d_head × d_node_in
    Mat key;
    Mat value;
    Mat edge;   // d_head × d_edge_in
};

struct GtParams {
    std::vector<GtHead> heads;
    Mat out_proj;  // d_out × (n_heads · d_head)
    Vec out_bias;  // d_out

    static GtParams zeros(const GtShape& shape);
    GtShape shape() const;
};

/// Gated recurrent unit, shared by every node (or every edge).
///   z = σ(Wz x + Uz h + bz)
///   r = σ(Wr x + Ur h + br)
///   ĥ = tanh(Wh x + Uh (r∘h) + bh)
///   h' = (1 − z)∘h + z∘ĥ
struct GruCell {
    Mat wz, uz;
    Vec bz;
    Mat wr, ur;
    Vec br;
    Mat wh, uh;
    Vec bh;

    static GruCell zeros(int input_dim, int hidden_dim);
    int input_dim() const { return static_cast<int>(wz.cols()); }
    int hidden_dim() const { return static_cast<int>(wz.rows()); }
};

using NodeGruParams = GruCell;

Vec gru_step(const GruCell& cell, const Vec& h, const Vec& x);
/// Batched step, one unit per row.
RowMat gru_rows(const GruCell& cell, const RowMat& h, const RowMat& x);

struct GtResult {
    RowMat output;                   // N × d_out
    std::vector<RowMat> attention;   // per head, N × N, row i = weights of node i over all j
};

/// Full (all-pairs) attention with multiplicative edge modulation of the logits:
/// l_ij = Σ_d q_id k_jd g_ijd / √d_head, g_ij = W_E ε_ij. Output is tanh(W_o [heads] + b_o).
RowMat gt_forward(const GtParams& p, const RowMat& node_in, const RowMat& edge_in);
GtResult gt_forward_with_attention(const GtParams& p, const RowMat& node_in, const RowMat& edge_in);

/// [v | h | structural features], one row per node.
RowMat node_inputs(const GraphState& g);
/// [e | structural bits], one row per ordered pair.
RowMat edge_inputs(const GraphState& g);

/// New node states; the caller stores them into the graph.
RowMat node_update(const GtParams& gt, const NodeGruParams& gru, const GraphState& g);

}  // namespace lndp
