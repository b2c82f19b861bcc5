#include "lndp/edge_model.hpp"

#include "lndp/agent.hpp"
#include "lndp/error.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace lndp;

namespace {

TopologyConfig topo(int n) {
    TopologyConfig c;
    c.n_total = n;
    c.n_in = 2;
    c.n_out = 2;
    return c;
}

}  // namespace

TEST_CASE("empty adjacency gives zero edge states") {
    std::mt19937_64 gen(1);
    const GraphState g = testing::random_graph(topo(8), 8, 4, 0.0, gen);
    const RowMat out = edge_update(testing::random_gru(19, 4, gen), g, g.node_states, 1.0f);
    CHECK(out.isZero(0.0f));
}

TEST_CASE("zero GRU halves present edges") {
    std::mt19937_64 gen(2);
    const GraphState g = testing::random_graph(topo(10), 8, 4, 0.5, gen);
    const RowMat out = edge_update(GruCell::zeros(19, 4), g, g.node_states, 3.0f);
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            for (int d = 0; d < 4; ++d) {
                const float expected = g.adjacency(i, j) ? 0.5f * g.edge_states(g.pair(i, j), d) : 0.0f;
                CHECK(out(g.pair(i, j), d) == expected);
            }
        }
    }
}

TEST_CASE("edges with identical context update identically") {
    std::mt19937_64 gen(3);
    GraphState g = testing::random_graph(topo(8), 8, 4, 0.0, gen);
    // Hidden nodes 2..5. Edges 2→4 and 3→5 see the same endpoint states.
    g.node_states.row(3) = g.node_states.row(2);
    g.node_states.row(5) = g.node_states.row(4);
    g.activations[3] = g.activations[2];
    g.activations[5] = g.activations[4];
    for (auto [i, j] : {std::pair{2, 4}, std::pair{3, 5}}) {
        g.adjacency.set(i, j, true);
        g.edge_states.row(g.pair(i, j)) << 0.1f, -0.2f, 0.3f, 0.4f;
    }
    const RowMat out = edge_update(testing::random_gru(19, 4, gen), g, g.node_states, 1.0f);
    for (int d = 0; d < 4; ++d) CHECK(std::abs(out(g.pair(2, 4), d) - out(g.pair(3, 5), d)) <= 1e-6f);
}

TEST_CASE("edge GRU input layout and reward clipping") {
    std::mt19937_64 gen(4);
    GraphState g = testing::random_graph(topo(6), 2, 1, 0.0, gen);
    g.adjacency.set(2, 3, true);
    g.edge_states(g.pair(2, 3), 0) = 0.25f;
    // Only the reward column feeds the update gate: z = σ(w·r).
    GruCell c = GruCell::zeros(7, 1);
    c.wz(0, 6) = 1.0f;
    const float e = 0.25f;
    for (float reward : {0.0f, 3.0f, 50.0f, -50.0f}) {
        const RowMat out = edge_update(c, g, g.node_states, reward);
        const double r = std::clamp(reward, -10.0f, 10.0f);
        const double z = testing::sigmoid_ref(r);
        CHECK(out(g.pair(2, 3), 0) == doctest::Approx((1 - z) * e).epsilon(1e-6));
    }
    // Candidate driven by the presynaptic activation alone.
    GruCell v = GruCell::zeros(7, 1);
    v.wh(0, 4) = 1.0f;
    const RowMat out = edge_update(v, g, g.node_states, 0.0f);
    CHECK(out(g.pair(2, 3), 0) == doctest::Approx(0.5 * e + 0.5 * std::tanh(g.activations[2])).epsilon(1e-6));
    GruCell w = GruCell::zeros(7, 1);
    w.wh(0, 0) = 1.0f;  // first component of h_pre
    const RowMat out2 = edge_update(w, g, g.node_states, 0.0f);
    CHECK(out2(g.pair(2, 3), 0) == doctest::Approx(0.5 * e + 0.5 * std::tanh(g.node_states(2, 0))).epsilon(1e-6));
    GruCell x = GruCell::zeros(7, 1);
    x.wh(0, 2) = 1.0f;  // first component of h_post
    const RowMat out3 = edge_update(x, g, g.node_states, 0.0f);
    CHECK(out3(g.pair(2, 3), 0) == doctest::Approx(0.5 * e + 0.5 * std::tanh(g.node_states(3, 0))).epsilon(1e-6));
}

TEST_CASE("edge update rejects non-finite input") {
    std::mt19937_64 gen(5);
    GraphState g = testing::random_graph(topo(6), 8, 4, 0.5, gen);
    const GruCell c = GruCell::zeros(19, 4);
    try {
        edge_update(c, g, g.node_states, NAN);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NumericInput);
    }
    RowMat h = g.node_states;
    h(0, 0) = INFINITY;
    CHECK_THROWS_AS(edge_update(c, g, h, 0.0f), Error);
    CHECK_THROWS_AS(edge_update(GruCell::zeros(18, 4), g, g.node_states, 0.0f), Error);
}

TEST_CASE("weight is the first edge-state component") {
    Vec e(4);
    e << 0.3f, -1.0f, 2.0f, 0.0f;
    CHECK(weight_of(e) == 0.3f);
    CHECK(weight_of(Vec::Zero(4)) == 0.0f);
}

TEST_CASE("weights matrix") {
    std::mt19937_64 gen(6);
    GraphState g = testing::random_graph(topo(6), 2, 4, 0.0, gen);
    CHECK(weights_matrix(g).isZero(0.0f));
    g.adjacency.set(0, 2, true);
    g.edge_states.row(g.pair(0, 2)) << -0.7f, 0.1f, 0.2f, 0.3f;
    const Mat w = weights_matrix(g);
    CHECK(w(0, 2) == -0.7f);
    CHECK(w.cwiseAbs().sum() == doctest::Approx(0.7));
}

TEST_CASE("weights agree with edge states after updates and stay masked") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 1000; ++trial) {
        GraphState g = testing::random_graph(topo(6 + static_cast<int>(gen() % 10)), 8, 4, 0.5, gen);
        g.edge_states = edge_update(testing::random_gru(19, 4, gen), g, g.node_states, 1.0f);
        const Mat w = weights_matrix(g);
        for (int i = 0; i < g.size(); ++i) {
            for (int j = 0; j < g.size(); ++j) {
                if (g.adjacency(i, j)) {
                    REQUIRE(w(i, j) == weight_of(g.edge_states.row(g.pair(i, j)).transpose()));
                } else {
                    REQUIRE(w(i, j) == 0.0f);
                    REQUIRE(g.edge_states.row(g.pair(i, j)).isZero(0.0f));
                }
            }
        }
    }
}
