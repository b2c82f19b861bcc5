#include "lndp/spontaneous_activity.hpp"

#include "lndp/agent.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace lndp;

TEST_CASE("frozen process") {
    OuParams p = OuParams::zeros(3);
    p.alpha_raw.setConstant(-100.0f);
    Vec o(3);
    o << 0.2f, -0.3f, 0.9f;
    RngStream r = make_rng(0);
    CHECK(ou_step(p, o, r) == o);
}

TEST_CASE("full reversion lands on the mean") {
    OuParams p = OuParams::zeros(3);
    p.alpha_raw.setConstant(100.0f);
    p.mu << 0.1f, 0.5f, -0.7f;
    const Vec o = Vec::Constant(3, 0.9f);
    RngStream r = make_rng(0);
    const Vec next = ou_step(p, o, r);
    for (int i = 0; i < 3; ++i) CHECK(next[i] == doctest::Approx(p.mu[i]));
}

TEST_CASE("stationary variance matches the discrete closed form") {
    const int dim = 3;
    const double alpha = 0.1, sigma = 0.05;
    OuParams p = OuParams::zeros(dim);
    p.alpha_raw.setConstant(static_cast<float>(std::log(alpha / (1 - alpha))));
    p.chol = CholeskyFactor::identity(dim, static_cast<float>(sigma));
    const double expected = sigma * sigma / (alpha * (2 - alpha));

    RngStream r = make_rng(42);
    Vec o = Vec::Zero(dim);
    for (int t = 0; t < 1000; ++t) o = ou_step_unclamped(p, o, r);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim), sq = Eigen::VectorXd::Zero(dim);
    const int steps = 100000;
    for (int t = 0; t < steps; ++t) {
        o = ou_step_unclamped(p, o, r);
        sum += o.cast<double>();
        sq += o.cast<double>().cwiseAbs2();
    }
    for (int i = 0; i < dim; ++i) {
        const double mean = sum[i] / steps;
        const double var = sq[i] / steps - mean * mean;
        CHECK(std::abs(var / expected - 1.0) <= 0.05);
    }
}

TEST_CASE("clamped step stays in range") {
    OuParams p = OuParams::zeros(2);
    p.chol = CholeskyFactor::identity(2, 3.0f);
    RngStream r = make_rng(1);
    Vec o = Vec::Zero(2);
    for (int t = 0; t < 1000; ++t) {
        o = ou_step(p, o, r);
        REQUIRE(o.cwiseAbs().maxCoeff() <= 1.0f);
    }
}

namespace {

AgentParams sa_params(bool sp, int t_sa, std::mt19937_64& gen) {
    const AgentConfig cfg = make_agent_config(EnvKind::CartPole, 16, 0.5f, 0.0f, {}, sp, t_sa);
    return testing::random_params(cfg, gen, 0.3);
}

}  // namespace

TEST_CASE("zero-length phase leaves the agent untouched") {
    std::mt19937_64 gen(2);
    const AgentParams p = sa_params(true, 0, gen);
    AgentState s = init_agent(p, make_rng(1));
    const AgentState before = s;
    run_sa_phase(s, p, make_rng(2));
    CHECK(s.graph.adjacency == before.graph.adjacency);
    CHECK(s.graph.node_states == before.graph.node_states);
    CHECK(s.graph.edge_states == before.graph.edge_states);
    CHECK(s.graph.activations == before.graph.activations);
    CHECK(s.step_index == 0);
}

TEST_CASE("activity without plasticity changes states but not structure") {
    std::mt19937_64 gen(3);
    for (int k = 0; k < 20; ++k) {
        const AgentParams p = sa_params(false, 100, gen);
        AgentState s = init_agent(p, make_rng(k));
        const GraphState before = s.graph;
        run_sa_phase(s, p, make_rng(100 + k));
        CHECK(s.graph.adjacency == before.adjacency);
        CHECK((s.graph.node_states - before.node_states).norm() > 0.0f);
        CHECK((s.graph.edge_states - before.edge_states).norm() > 0.0f);
        CHECK(s.step_index == 100);
    }
}

TEST_CASE("phase is deterministic") {
    std::mt19937_64 gen(4);
    const AgentParams p = sa_params(true, 100, gen);
    AgentState a = init_agent(p, make_rng(1));
    AgentState b = init_agent(p, make_rng(1));
    run_sa_phase(a, p, make_rng(7));
    run_sa_phase(b, p, make_rng(7));
    CHECK(a.graph.adjacency == b.graph.adjacency);
    CHECK(a.graph.node_states == b.graph.node_states);
    CHECK(a.graph.edge_states == b.graph.edge_states);
    CHECK(a.graph.activations == b.graph.activations);
    CHECK(a.ou_state == b.ou_state);
}

TEST_CASE("phase drives inputs with the clamped process") {
    std::mt19937_64 gen(5);
    const AgentParams p = sa_params(false, 30, gen);
    AgentState s = init_agent(p, make_rng(1));
    int rows = 0;
    run_sa_phase(s, p, make_rng(2), nullptr, [&](const StepEvent& ev) {
        CHECK(ev.phase == Phase::SpontaneousActivity);
        CHECK(ev.reward == 0.0);
        REQUIRE(ev.obs.size() == 4);
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(std::abs(ev.obs[i]) <= 1.0f);
            CHECK(ev.agent->graph.activations[static_cast<Eigen::Index>(i)] == ev.obs[i]);
        }
        ++rows;
    });
    CHECK(rows == 30);
}
