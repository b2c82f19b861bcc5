#pragma once

#include "lndp/numerics.hpp"

#include <cstdint>
#include <vector>

namespace lndp {

enum class NodeKind : std::uint8_t { Input, Hidden, Output };

const char* to_string(NodeKind kind);

/// Fixed node layout: inputs occupy [0, n_in), hidden nodes follow, outputs are last.
struct TopologyConfig {
    int n_total = 32;
    int n_in = 1;
    int n_out = 1;
    float mu_conn = 0.5f;
    float sigma_conn = 0.0f;
    bool self_loops_allowed = true;

    int n_hidden() const { return n_total - n_in - n_out; }
    NodeKind kind(int node) const;
    int first_output() const { return n_total - n_out; }
    void validate() const;
};

/// Dense N×N boolean matrix, row-major. Entry (i, j) is the directed edge i→j.
class BitMatrix {
public:
    BitMatrix() = default;
    explicit BitMatrix(int n) : n_(n), bits_(static_cast<std::size_t>(n) * n, 0) {}

    int size() const { return n_; }
    bool operator()(int i, int j) const { return bits_[index(i, j)] != 0; }
    void set(int i, int j, bool value) { bits_[index(i, j)] = value ? 1 : 0; }
    std::size_t count() const;
    bool subset_of(const BitMatrix& other) const;

    bool operator==(const BitMatrix&) const = default;

private:
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n_ + j; }

    int n_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// The network tuple: adjacency, node/edge states, activations and weights.
/// Edge states are stored one row per ordered pair, row i*N + j.
struct GraphState {
    BitMatrix adjacency;
    BitMatrix allowed;
    RowMat node_states;   // N × dh
    RowMat edge_states;   // N² × de
    Vec activations;      // N
    Mat weights;          // N × N
    std::vector<NodeKind> node_kind;

    int size() const { return static_cast<int>(node_kind.size()); }
    int node_dim() const { return static_cast<int>(node_states.cols()); }
    int edge_dim() const { return static_cast<int>(edge_states.cols()); }
    Eigen::Index pair(int i, int j) const { return static_cast<Eigen::Index>(i) * size() + j; }
};

BitMatrix allowed_mask(const TopologyConfig& cfg);

/// Samples one connection probability from TruncNormal(mu_conn, sigma_conn, 0, 1),
/// then each allowed edge independently. States are Uniform(-1, 1), activations zero.
GraphState init_graph(const TopologyConfig& cfg, int node_dim, int edge_dim, RngStream rng);

/// Per node: [in_deg/N, out_deg/N, tot_deg/N, is_input, is_hidden, is_output].
RowMat node_structural_features(const GraphState& g);

/// Per ordered pair (row i*N + j): [A(i,j), A(j,i), i == j].
RowMat edge_structural_features(const GraphState& g);

/// Present edges over allowed edges (0 when nothing is allowed).
double density(const GraphState& g);

/// Zeroes edge states and weights wherever the adjacency has no edge.
void apply_edge_mask(GraphState& g);

/// Mean and population variance of weights over present edges; (0, 0) when empty.
struct WeightMoments {
    double mean = 0.0;
    double variance = 0.0;
};
WeightMoments weight_moments(const GraphState& g);

std::vector<int> in_degrees(const GraphState& g);

}  // namespace lndp
