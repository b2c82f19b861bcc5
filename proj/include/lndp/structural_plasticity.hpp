#pragma once

#include "lndp/graph_state.hpp"
#include "lndp/numerics.hpp"

namespace lndp {

/// One-hidden-layer perceptron: sigmoid(w2 · relu(W1 x + b1) + b2).
struct ProbabilityMlp {
    Mat w1;   // hidden × in
    Vec b1;   // hidden
    Vec w2;   // hidden
    float b2 = 0.0f;

    static ProbabilityMlp zeros(int input_dim, int hidden_dim);
    int input_dim() const { return static_cast<int>(w1.cols()); }
    int hidden_dim() const { return static_cast<int>(w1.rows()); }
    float logit(const Eigen::Ref<const Vec>& x) const;
};

struct SpParams {
    ProbabilityMlp genesis;  // input [h_i | h_j]
    ProbabilityMlp pruning;  // input e_ij
    bool enabled = true;

    static SpParams zeros(int node_dim, int edge_dim, int hidden_dim = 8);
};

float synaptogenesis_prob(const SpParams& p, const Eigen::Ref<const Vec>& h_pre, const Eigen::Ref<const Vec>& h_post);
float pruning_prob(const SpParams& p, const Eigen::Ref<const Vec>& edge_state);

/// One round of synaptogenesis and pruning. Every decision reads the pre-step
/// adjacency, so an edge is never added and removed in the same step. Pair (i, j)
/// draws from rng.split(i*N + j). New edges start from Uniform(-1, 1) states.
/// A disabled SpParams leaves the graph untouched.
void apply_structural_step_inplace(const SpParams& p, GraphState& g, const RngStream& rng);
GraphState apply_structural_step(const SpParams& p, GraphState g, const RngStream& rng);

}  // namespace lndp
