#pragma once

#include "lndp/numerics.hpp"

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace lndp {

enum class EnvKind { CartPole, Acrobot, Pendulum, Foraging };

std::string_view to_string(EnvKind kind);
/// Accepts "cartpole", "acrobot", "pendulum", "foraging" (case-insensitive).
EnvKind parse_env_kind(std::string_view name);

struct ActionSpaceSpec {
    enum class Kind { Discrete, Continuous } kind = Kind::Discrete;
    int size = 1;                // cardinality (discrete) or dimension (continuous)
    std::vector<float> lo, hi;   // continuous bounds, one pair per dimension
};

/// Discrete index or continuous vector.
using Action = std::variant<int, std::vector<float>>;

struct EnvSpec {
    int obs_dim = 0;
    ActionSpaceSpec action;
    int max_steps = 0;
    double min_step_reward = 0.0;
    double max_step_reward = 0.0;
    int default_episodes = 1;
};

struct EnvOptions {
    double p_switch = 0.5;
    int foraging_steps = 200;
};

EnvSpec env_spec(EnvKind kind, const EnvOptions& options = {});

struct CartPoleState {
    double x = 0, x_dot = 0, theta = 0, theta_dot = 0;
    int steps = 0;
};

struct AcrobotState {
    double theta1 = 0, theta2 = 0, omega1 = 0, omega2 = 0;
    int steps = 0;
};

struct PendulumState {
    double theta = 0, theta_dot = 0;
    int steps = 0;
};

enum class FoodSide { Left, Right };

/// Cells 0..4; food sits at cell 0 (left) or 4 (right).
struct ForagingState {
    int position = 2;
    FoodSide food_side = FoodSide::Left;
    int steps_since_reset = 0;
    int steps = 0;
    double p_switch = 0.5;
    int trial_steps = 200;
};

namespace foraging {
inline constexpr int kCells = 5;
inline constexpr int kCenter = 2;
inline constexpr int kTimeout = 10;
inline constexpr double kFoodReward = 10.0;
enum Move : int { Right = 0, Left = 1, Stay = 2 };
inline int food_cell(FoodSide side) { return side == FoodSide::Left ? 0 : kCells - 1; }
}  // namespace foraging

using EnvState = std::variant<CartPoleState, AcrobotState, PendulumState, ForagingState>;

struct ResetResult {
    EnvState state;
    std::vector<double> obs;
};

struct StepResult {
    EnvState state;
    std::vector<double> obs;
    double reward = 0.0;
    bool done = false;
};

ResetResult env_reset(EnvKind kind, RngStream& rng, const EnvOptions& options = {});
/// Classic-control transitions are deterministic; only Foraging reads `rng`.
StepResult env_step(EnvKind kind, const EnvState& state, const Action& action, RngStream& rng);

std::vector<double> observe(const EnvState& state);

/// Monte-Carlo mean episodic return of uniformly random actions.
double random_policy_baseline(EnvKind kind, int trials, std::uint64_t seed, const EnvOptions& options = {});

/// Lowest return one episode can produce; used as the numeric-failure sentinel.
double worst_episode_return(EnvKind kind, const EnvOptions& options = {});

}  // namespace lndp
