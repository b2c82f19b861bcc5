#include "lndp/graph_state.hpp"

#include "lndp/error.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace lndp;

namespace {

TopologyConfig topo(int n, int n_in, int n_out, float mu = 0.5f, float sigma = 0.0f) {
    TopologyConfig c;
    c.n_total = n;
    c.n_in = n_in;
    c.n_out = n_out;
    c.mu_conn = mu;
    c.sigma_conn = sigma;
    return c;
}

}  // namespace

TEST_CASE("allowed mask of the three-node example") {
    const BitMatrix m = allowed_mask(topo(3, 1, 1));
    CHECK(m.count() == 3);
    CHECK(m(0, 1));
    CHECK(m(1, 1));
    CHECK(m(1, 2));
}

TEST_CASE("allowed mask without self loops") {
    TopologyConfig c = topo(3, 1, 1);
    c.self_loops_allowed = false;
    const BitMatrix m = allowed_mask(c);
    CHECK(m.count() == 2);
    CHECK_FALSE(m(1, 1));
}

TEST_CASE("inputs receive nothing and outputs send nothing") {
    for (auto [n, in, out] : {std::tuple{8, 2, 2}, std::tuple{32, 5, 3}, std::tuple{10, 4, 1}}) {
        const TopologyConfig c = topo(n, in, out);
        const BitMatrix m = allowed_mask(c);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (c.kind(j) == NodeKind::Input) CHECK_FALSE(m(i, j));
                if (c.kind(i) == NodeKind::Output) CHECK_FALSE(m(i, j));
            }
        }
        // input→hidden, hidden→hidden, hidden→output
        const int h = n - in - out;
        CHECK(m.count() == static_cast<std::size_t>(in * h + h * h + h * out));
    }
}

TEST_CASE("topology validation") {
    CHECK_THROWS_AS(topo(3, 2, 2).validate(), Error);
    CHECK_THROWS_AS(topo(4, 1, 1, 1.5f).validate(), Error);
    CHECK_THROWS_AS(topo(4, 1, 1, 0.5f, -0.1f).validate(), Error);
    CHECK_NOTHROW(topo(4, 1, 1).validate());
}

TEST_CASE("certain connection fills the mask") {
    const TopologyConfig c = topo(16, 3, 2, 1.0f);
    const GraphState g = init_graph(c, 8, 4, make_rng(0));
    CHECK(g.adjacency == g.allowed);
    CHECK(density(g) == 1.0);
    for (int i = 0; i < 16; ++i) {
        for (int j = 0; j < 16; ++j) CHECK(g.weights(i, j) == g.edge_states(g.pair(i, j), 0));
    }
    CHECK(g.activations.isZero(0.0f));
}

TEST_CASE("zero connection gives an empty graph") {
    const GraphState g = init_graph(topo(16, 3, 2, 0.0f), 8, 4, make_rng(0));
    CHECK(g.adjacency.count() == 0);
    CHECK(g.edge_states.isZero(0.0f));
    CHECK(g.weights.isZero(0.0f));
    CHECK(density(g) == 0.0);
}

TEST_CASE("mean density matches the connection probability") {
    const TopologyConfig c = topo(64, 4, 2, 0.5f);
    double sum = 0;
    const int n = 10000;
    const RngStream root = make_rng(1);
    for (int k = 0; k < n; ++k) sum += density(init_graph(c, 1, 1, root.split(k)));
    CHECK(std::abs(sum / n - 0.5) < 0.02);
}

TEST_CASE("init is deterministic and states are masked") {
    const TopologyConfig c = topo(12, 2, 2, 0.4f, 0.1f);
    const GraphState a = init_graph(c, 8, 4, make_rng(3));
    const GraphState b = init_graph(c, 8, 4, make_rng(3));
    CHECK(a.adjacency == b.adjacency);
    CHECK(a.edge_states == b.edge_states);
    CHECK(a.node_states == b.node_states);
    CHECK(a.adjacency.subset_of(a.allowed));
    for (int i = 0; i < 12; ++i) {
        for (int j = 0; j < 12; ++j) {
            if (!a.adjacency(i, j)) {
                CHECK(a.edge_states.row(a.pair(i, j)).isZero(0.0f));
                CHECK(a.weights(i, j) == 0.0f);
            }
        }
    }
    CHECK(a.node_states.maxCoeff() <= 1.0f);
    CHECK(a.node_states.minCoeff() >= -1.0f);
}

TEST_CASE("node features of an empty graph") {
    const GraphState g = init_graph(topo(5, 2, 1, 0.0f), 2, 2, make_rng(0));
    const RowMat f = node_structural_features(g);
    CHECK(f.leftCols(3).isZero(0.0f));
    for (int i = 0; i < 5; ++i) {
        const int k = i < 2 ? 3 : (i < 4 ? 4 : 5);
        for (int c = 3; c < 6; ++c) CHECK(f(i, c) == (c == k ? 1.0f : 0.0f));
    }
}

TEST_CASE("node features of a chain") {
    GraphState g = init_graph(topo(3, 1, 1, 0.0f), 2, 2, make_rng(0));
    g.adjacency.set(0, 1, true);
    g.adjacency.set(1, 2, true);
    const RowMat f = node_structural_features(g) * 3.0f;
    const float in[] = {0, 1, 1}, out[] = {1, 1, 0}, tot[] = {1, 2, 1};
    for (int i = 0; i < 3; ++i) {
        CHECK(f(i, 0) == doctest::Approx(in[i]));
        CHECK(f(i, 1) == doctest::Approx(out[i]));
        CHECK(f(i, 2) == doctest::Approx(tot[i]));
    }
}

TEST_CASE("handshake identity and transpose symmetry on random graphs") {
    std::mt19937_64 gen(17);
    for (int k = 0; k < 1000; ++k) {
        const int n = 4 + static_cast<int>(gen() % 12);
        const GraphState g = testing::random_graph(topo(n, 1 + static_cast<int>(gen() % 2), 1), 2, 2,
                                                   std::uniform_real_distribution<>(0, 1)(gen), gen);
        const RowMat f = node_structural_features(g) * static_cast<float>(n);
        CHECK(f.col(0).sum() == doctest::Approx(static_cast<double>(g.adjacency.count())));
        CHECK(f.col(1).sum() == doctest::Approx(static_cast<double>(g.adjacency.count())));
        const RowMat e = edge_structural_features(g);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) REQUIRE(e(g.pair(i, j), 0) == e(g.pair(j, i), 1));
        }
    }
}

TEST_CASE("edge features") {
    GraphState g = init_graph(topo(3, 1, 1, 0.0f), 2, 2, make_rng(0));
    RowMat e = edge_structural_features(g);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            CHECK(e(g.pair(i, j), 0) == 0.0f);
            CHECK(e(g.pair(i, j), 1) == 0.0f);
            CHECK(e(g.pair(i, j), 2) == (i == j ? 1.0f : 0.0f));
        }
    }
    g.adjacency.set(0, 1, true);
    e = edge_structural_features(g);
    CHECK(e.row(g.pair(0, 1)) == Eigen::RowVector3f(1, 0, 0));
    CHECK(e.row(g.pair(1, 0)) == Eigen::RowVector3f(0, 1, 0));
}

TEST_CASE("edge mask zeroes absent edges") {
    std::mt19937_64 gen(2);
    GraphState g = testing::random_graph(topo(8, 2, 2), 4, 4, 0.5, gen);
    g.edge_states.setOnes();
    g.weights.setOnes();
    apply_edge_mask(g);
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
            const bool on = g.adjacency(i, j);
            CHECK(g.weights(i, j) == (on ? 1.0f : 0.0f));
            CHECK(g.edge_states.row(g.pair(i, j)).isZero(0.0f) == !on);
        }
    }
}

TEST_CASE("weight moments and in-degrees") {
    GraphState g = init_graph(topo(4, 1, 1, 0.0f), 2, 1, make_rng(0));
    CHECK(weight_moments(g).mean == 0.0);
    CHECK(weight_moments(g).variance == 0.0);
    g.adjacency.set(0, 1, true);
    g.adjacency.set(1, 3, true);
    g.adjacency.set(2, 3, true);
    g.weights(0, 1) = 1.0f;
    g.weights(1, 3) = 2.0f;
    g.weights(2, 3) = 6.0f;
    const WeightMoments m = weight_moments(g);
    CHECK(m.mean == doctest::Approx(3.0));
    CHECK(m.variance == doctest::Approx((4.0 + 1.0 + 9.0) / 3.0));
    CHECK(in_degrees(g) == std::vector<int>{0, 1, 0, 2});
}
