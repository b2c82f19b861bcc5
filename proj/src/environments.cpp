#include "lndp/environments.hpp"

#include "lndp/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>

namespace lndp {

namespace {

constexpr double kPi = std::numbers::pi;

namespace cartpole {
constexpr double kGravity = 9.8;
constexpr double kMassCart = 1.0;
constexpr double kMassPole = 0.1;
constexpr double kTotalMass = kMassCart + kMassPole;
constexpr double kHalfLength = 0.5;
constexpr double kPoleMassLength = kMassPole * kHalfLength;
constexpr double kForce = 10.0;
constexpr double kTau = 0.02;
constexpr double kThetaLimit = 12.0 * 2.0 * kPi / 360.0;
constexpr double kXLimit = 2.4;
constexpr int kMaxSteps = 500;
}  // namespace cartpole

namespace acrobot {
constexpr double kDt = 0.2;
constexpr double kLink1 = 1.0;
constexpr double kMass1 = 1.0;
constexpr double kMass2 = 1.0;
constexpr double kCom1 = 0.5;
constexpr double kCom2 = 0.5;
constexpr double kMoi = 1.0;
constexpr double kGravity = 9.8;
constexpr double kMaxVel1 = 4.0 * kPi;
constexpr double kMaxVel2 = 9.0 * kPi;
constexpr int kMaxSteps = 500;
}  // namespace acrobot

namespace pendulum {
constexpr double kMaxSpeed = 8.0;
constexpr double kMaxTorque = 2.0;
constexpr double kDt = 0.05;
constexpr double kGravity = 10.0;
constexpr double kMass = 1.0;
constexpr double kLength = 1.0;
constexpr int kMaxSteps = 200;
}  // namespace pendulum

double wrap(double x, double lo, double hi) {
    const double span = hi - lo;
    while (x > hi) x -= span;
    while (x < lo) x += span;
    return x;
}

double angle_normalize(double x) {
    double r = std::fmod(x + kPi, 2.0 * kPi);
    if (r < 0.0) r += 2.0 * kPi;
    return r - kPi;
}

using AcrobotVec = std::array<double, 4>;

// Book dynamics of the two-link pendulum under torque on the second joint.
AcrobotVec acrobot_derivs(const AcrobotVec& s, double torque) {
    using namespace acrobot;
    const double theta1 = s[0], theta2 = s[1], dtheta1 = s[2], dtheta2 = s[3];
    const double d1 = kMass1 * kCom1 * kCom1 +
                      kMass2 * (kLink1 * kLink1 + kCom2 * kCom2 + 2.0 * kLink1 * kCom2 * std::cos(theta2)) + kMoi + kMoi;
    const double d2 = kMass2 * (kCom2 * kCom2 + kLink1 * kCom2 * std::cos(theta2)) + kMoi;
    const double phi2 = kMass2 * kCom2 * kGravity * std::cos(theta1 + theta2 - kPi / 2.0);
    const double phi1 = -kMass2 * kLink1 * kCom2 * dtheta2 * dtheta2 * std::sin(theta2) -
                        2.0 * kMass2 * kLink1 * kCom2 * dtheta2 * dtheta1 * std::sin(theta2) +
                        (kMass1 * kCom1 + kMass2 * kLink1) * kGravity * std::cos(theta1 - kPi / 2.0) + phi2;
    const double ddtheta2 =
        (torque + d2 / d1 * phi1 - kMass2 * kLink1 * kCom2 * dtheta1 * dtheta1 * std::sin(theta2) - phi2) /
        (kMass2 * kCom2 * kCom2 + kMoi - d2 * d2 / d1);
    const double ddtheta1 = -(d2 * ddtheta2 + phi1) / d1;
    return {dtheta1, dtheta2, ddtheta1, ddtheta2};
}

AcrobotVec rk4(const AcrobotVec& y, double torque, double dt) {
    auto axpy = [](const AcrobotVec& a, const AcrobotVec& k, double h) {
        AcrobotVec out;
        for (std::size_t i = 0; i < 4; ++i) out[i] = a[i] + h * k[i];
        return out;
    };
    const AcrobotVec k1 = acrobot_derivs(y, torque);
    const AcrobotVec k2 = acrobot_derivs(axpy(y, k1, dt / 2.0), torque);
    const AcrobotVec k3 = acrobot_derivs(axpy(y, k2, dt / 2.0), torque);
    const AcrobotVec k4 = acrobot_derivs(axpy(y, k3, dt), torque);
    AcrobotVec out;
    for (std::size_t i = 0; i < 4; ++i) out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

int discrete_action(const Action& action, int cardinality) {
    const int* idx = std::get_if<int>(&action);
    if (idx == nullptr || *idx < 0 || *idx >= cardinality) {
        throw Error(ErrorKind::Contract, "invalid discrete action");
    }
    return *idx;
}

double continuous_action(const Action& action) {
    const auto* values = std::get_if<std::vector<float>>(&action);
    if (values == nullptr || values->size() != 1 || !std::isfinite((*values)[0])) {
        throw Error(ErrorKind::Contract, "invalid continuous action");
    }
    return (*values)[0];
}

void foraging_internal_reset(ForagingState& s, RngStream& rng) {
    s.position = foraging::kCenter;
    s.steps_since_reset = 0;
    if (rng.bernoulli(s.p_switch)) {
        s.food_side = s.food_side == FoodSide::Left ? FoodSide::Right : FoodSide::Left;
    }
}

}  // namespace

std::string_view to_string(EnvKind kind) {
    switch (kind) {
        case EnvKind::CartPole: return "cartpole";
        case EnvKind::Acrobot: return "acrobot";
        case EnvKind::Pendulum: return "pendulum";
        case EnvKind::Foraging: return "foraging";
    }
    return "unknown";
}

EnvKind parse_env_kind(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    for (EnvKind k : {EnvKind::CartPole, EnvKind::Acrobot, EnvKind::Pendulum, EnvKind::Foraging}) {
        if (lower == to_string(k)) return k;
    }
    throw Error(ErrorKind::Config, "unknown environment '" + std::string(name) + "'");
}

EnvSpec env_spec(EnvKind kind, const EnvOptions& options) {
    EnvSpec s;
    switch (kind) {
        case EnvKind::CartPole:
            s.obs_dim = 4;
            s.action = {ActionSpaceSpec::Kind::Discrete, 2, {}, {}};
            s.max_steps = cartpole::kMaxSteps;
            s.min_step_reward = 1.0;
            s.max_step_reward = 1.0;
            s.default_episodes = 5;
            break;
        case EnvKind::Acrobot:
            s.obs_dim = 6;
            s.action = {ActionSpaceSpec::Kind::Discrete, 3, {}, {}};
            s.max_steps = acrobot::kMaxSteps;
            s.min_step_reward = -1.0;
            s.max_step_reward = 0.0;
            s.default_episodes = 2;
            break;
        case EnvKind::Pendulum:
            s.obs_dim = 3;
            s.action = {ActionSpaceSpec::Kind::Continuous, 1, {-2.0f}, {2.0f}};
            s.max_steps = pendulum::kMaxSteps;
            s.min_step_reward = -(kPi * kPi + 0.1 * 64.0 + 0.001 * 4.0);
            s.max_step_reward = 0.0;
            s.default_episodes = 2;
            break;
        case EnvKind::Foraging:
            s.obs_dim = foraging::kCells;
            s.action = {ActionSpaceSpec::Kind::Discrete, 3, {}, {}};
            s.max_steps = options.foraging_steps;
            s.min_step_reward = 0.0;
            s.max_step_reward = foraging::kFoodReward;
            s.default_episodes = 1;
            break;
    }
    return s;
}

std::vector<double> observe(const EnvState& state) {
    return std::visit(
        [](const auto& s) -> std::vector<double> {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CartPoleState>) {
                return {s.x, s.x_dot, s.theta, s.theta_dot};
            } else if constexpr (std::is_same_v<T, AcrobotState>) {
                return {std::cos(s.theta1), std::sin(s.theta1), std::cos(s.theta2),
                        std::sin(s.theta2), s.omega1,           s.omega2};
            } else if constexpr (std::is_same_v<T, PendulumState>) {
                return {std::cos(s.theta), std::sin(s.theta), s.theta_dot};
            } else {
                std::vector<double> onehot(foraging::kCells, 0.0);
                onehot[static_cast<std::size_t>(s.position)] = 1.0;
                return onehot;
            }
        },
        state);
}

ResetResult env_reset(EnvKind kind, RngStream& rng, const EnvOptions& options) {
    EnvState state;
    switch (kind) {
        case EnvKind::CartPole: {
            CartPoleState s;
            s.x = rng.uniform() * 0.1 - 0.05;
            s.x_dot = rng.uniform() * 0.1 - 0.05;
            s.theta = rng.uniform() * 0.1 - 0.05;
            s.theta_dot = rng.uniform() * 0.1 - 0.05;
            state = s;
            break;
        }
        case EnvKind::Acrobot: {
            AcrobotState s;
            s.theta1 = rng.uniform() * 0.2 - 0.1;
            s.theta2 = rng.uniform() * 0.2 - 0.1;
            s.omega1 = rng.uniform() * 0.2 - 0.1;
            s.omega2 = rng.uniform() * 0.2 - 0.1;
            state = s;
            break;
        }
        case EnvKind::Pendulum: {
            PendulumState s;
            s.theta = rng.uniform() * 2.0 * kPi - kPi;
            s.theta_dot = rng.uniform() * 2.0 - 1.0;
            state = s;
            break;
        }
        case EnvKind::Foraging: {
            if (!(options.p_switch >= 0.0 && options.p_switch <= 1.0)) {
                throw Error(ErrorKind::Config, "p_switch must lie in [0, 1]");
            }
            if (options.foraging_steps < 1) throw Error(ErrorKind::Config, "foraging_steps must be positive");
            ForagingState s;
            s.food_side = rng.bernoulli(0.5) ? FoodSide::Left : FoodSide::Right;
            s.p_switch = options.p_switch;
            s.trial_steps = options.foraging_steps;
            state = s;
            break;
        }
    }
    return {state, observe(state)};
}

StepResult env_step(EnvKind kind, const EnvState& state, const Action& action, RngStream& rng) {
    StepResult out;
    switch (kind) {
        case EnvKind::CartPole: {
            using namespace cartpole;
            CartPoleState s = std::get<CartPoleState>(state);
            const double force = discrete_action(action, 2) == 1 ? kForce : -kForce;
            const double cos_t = std::cos(s.theta);
            const double sin_t = std::sin(s.theta);
            const double temp = (force + kPoleMassLength * s.theta_dot * s.theta_dot * sin_t) / kTotalMass;
            const double theta_acc = (kGravity * sin_t - cos_t * temp) /
                                     (kHalfLength * (4.0 / 3.0 - kMassPole * cos_t * cos_t / kTotalMass));
            const double x_acc = temp - kPoleMassLength * theta_acc * cos_t / kTotalMass;
            s.x += kTau * s.x_dot;
            s.x_dot += kTau * x_acc;
            s.theta += kTau * s.theta_dot;
            s.theta_dot += kTau * theta_acc;
            s.steps += 1;
            const bool failed = s.x < -kXLimit || s.x > kXLimit || s.theta < -kThetaLimit || s.theta > kThetaLimit;
            out.reward = 1.0;
            out.done = failed || s.steps >= kMaxSteps;
            out.state = s;
            break;
        }
        case EnvKind::Acrobot: {
            using namespace acrobot;
            AcrobotState s = std::get<AcrobotState>(state);
            const double torque = static_cast<double>(discrete_action(action, 3) - 1);
            const AcrobotVec next = rk4({s.theta1, s.theta2, s.omega1, s.omega2}, torque, kDt);
            s.theta1 = wrap(next[0], -kPi, kPi);
            s.theta2 = wrap(next[1], -kPi, kPi);
            s.omega1 = std::clamp(next[2], -kMaxVel1, kMaxVel1);
            s.omega2 = std::clamp(next[3], -kMaxVel2, kMaxVel2);
            s.steps += 1;
            const bool terminal = -std::cos(s.theta1) - std::cos(s.theta2 + s.theta1) > 1.0;
            out.reward = terminal ? 0.0 : -1.0;
            out.done = terminal || s.steps >= kMaxSteps;
            out.state = s;
            break;
        }
        case EnvKind::Pendulum: {
            using namespace pendulum;
            PendulumState s = std::get<PendulumState>(state);
            const double u = std::clamp(continuous_action(action), -kMaxTorque, kMaxTorque);
            const double th = angle_normalize(s.theta);
            const double cost = th * th + 0.1 * s.theta_dot * s.theta_dot + 0.001 * u * u;
            double thdot = s.theta_dot + (3.0 * kGravity / (2.0 * kLength) * std::sin(s.theta) +
                                          3.0 / (kMass * kLength * kLength) * u) *
                                             kDt;
            thdot = std::clamp(thdot, -kMaxSpeed, kMaxSpeed);
            s.theta += thdot * kDt;
            s.theta_dot = thdot;
            s.steps += 1;
            out.reward = -cost;
            out.done = s.steps >= kMaxSteps;
            out.state = s;
            break;
        }
        case EnvKind::Foraging: {
            using namespace foraging;
            ForagingState s = std::get<ForagingState>(state);
            const int move = discrete_action(action, 3);
            if (move == Right) s.position = std::min(s.position + 1, kCells - 1);
            if (move == Left) s.position = std::max(s.position - 1, 0);
            s.steps += 1;
            s.steps_since_reset += 1;
            if (s.position == food_cell(s.food_side)) {
                out.reward = kFoodReward;
                foraging_internal_reset(s, rng);
            } else if (s.steps_since_reset >= kTimeout) {
                foraging_internal_reset(s, rng);
            }
            out.done = s.steps >= s.trial_steps;
            out.state = s;
            break;
        }
    }
    out.obs = observe(out.state);
    return out;
}

double random_policy_baseline(EnvKind kind, int trials, std::uint64_t seed, const EnvOptions& options) {
    if (trials < 1) throw Error(ErrorKind::Config, "baseline needs at least one trial");
    const EnvSpec spec = env_spec(kind, options);
    const RngStream root = make_rng(seed);
    double total = 0.0;
    for (int t = 0; t < trials; ++t) {
        RngStream env_rng = root.split(static_cast<std::uint64_t>(t)).split(0);
        RngStream act_rng = root.split(static_cast<std::uint64_t>(t)).split(1);
        ResetResult reset = env_reset(kind, env_rng, options);
        EnvState state = std::move(reset.state);
        double ret = 0.0;
        for (;;) {
            Action a;
            if (spec.action.kind == ActionSpaceSpec::Kind::Discrete) {
                a = static_cast<int>(act_rng.below(static_cast<std::uint64_t>(spec.action.size)));
            } else {
                std::vector<float> u(static_cast<std::size_t>(spec.action.size));
                for (std::size_t d = 0; d < u.size(); ++d) u[d] = act_rng.uniform(spec.action.lo[d], spec.action.hi[d]);
                a = u;
            }
            StepResult step = env_step(kind, state, a, env_rng);
            ret += step.reward;
            state = std::move(step.state);
            if (step.done) break;
        }
        total += ret;
    }
    return total / trials;
}

double worst_episode_return(EnvKind kind, const EnvOptions& options) {
    const EnvSpec spec = env_spec(kind, options);
    switch (kind) {
        case EnvKind::CartPole:
        case EnvKind::Foraging: return 0.0;
        case EnvKind::Acrobot:
        case EnvKind::Pendulum: return spec.min_step_reward * spec.max_steps;
    }
    return 0.0;
}

}  // namespace lndp
