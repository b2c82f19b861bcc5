#pragma once

#include "lndp/environments.hpp"
#include "lndp/numerics.hpp"

#include <span>
#include <string_view>

namespace lndp {

/// Version tag of the observation normalization tables. Checkpoints record it;
/// any change to `normalize_obs` must bump it.
inline constexpr std::string_view kNormalizationVersion = "obs-norm-v1";

/// tanh(v̂ · w) where v̂ is `v` with the first n_in entries replaced by `obs`.
/// Input entries of the result hold `obs` again.
Vec step_activations(const Vec& v, const Mat& w, std::span<const float> obs);

/// Per-environment clamp-then-scale into [-1, 1]:
///   CartPole  [x/4.8, clamp(ẋ, ±5)/5, θ/0.418, clamp(θ̇, ±5)/5]
///   Acrobot   [cos θ1, sin θ1, cos θ2, sin θ2, ω1/(4π), ω2/(9π)]
///   Pendulum  [cos θ, sin θ, θ̇/8]
///   Foraging  one-hot cell, unchanged
std::vector<float> normalize_obs(EnvKind kind, std::span<const double> raw);

/// Discrete: argmax over output activations, ties to the lowest index.
/// Continuous: maps each output activation linearly from [-1, 1] onto [lo, hi].
Action decode_action(const Vec& v, const ActionSpaceSpec& spec);

}  // namespace lndp
