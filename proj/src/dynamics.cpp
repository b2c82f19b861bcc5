#include "lndp/dynamics.hpp"

#include "lndp/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lndp {

Vec step_activations(const Vec& v, const Mat& w, std::span<const float> obs) {
    const Eigen::Index n = v.size();
    const auto n_in = static_cast<Eigen::Index>(obs.size());
    if (w.rows() != n || w.cols() != n || n_in > n) throw Error(ErrorKind::Shape, "activation step shape mismatch");
    require_finite(obs, "observation");
    require_finite(std::span<const float>(v.data(), static_cast<std::size_t>(n)), "activations");

    Vec clamped = v;
    for (Eigen::Index i = 0; i < n_in; ++i) clamped[i] = obs[static_cast<std::size_t>(i)];
    Vec next = (w.transpose() * clamped).array().tanh().matrix();
    if (!next.allFinite()) throw Error(ErrorKind::NumericInput, "activation update produced non-finite values");
    for (Eigen::Index i = 0; i < n_in; ++i) next[i] = obs[static_cast<std::size_t>(i)];
    return next;
}

std::vector<float> normalize_obs(EnvKind kind, std::span<const double> raw) {
    const EnvSpec spec = env_spec(kind);
    if (static_cast<int>(raw.size()) != spec.obs_dim) throw Error(ErrorKind::Shape, "observation size mismatch");
    auto unit = [](double x, double bound) {
        return static_cast<float>(std::clamp(x, -bound, bound) / bound);
    };
    constexpr double pi = std::numbers::pi;
    switch (kind) {
        case EnvKind::CartPole:
            return {unit(raw[0], 4.8), unit(raw[1], 5.0), unit(raw[2], 0.418), unit(raw[3], 5.0)};
        case EnvKind::Acrobot:
            return {unit(raw[0], 1.0), unit(raw[1], 1.0), unit(raw[2], 1.0),
                    unit(raw[3], 1.0), unit(raw[4], 4.0 * pi), unit(raw[5], 9.0 * pi)};
        case EnvKind::Pendulum:
            return {unit(raw[0], 1.0), unit(raw[1], 1.0), unit(raw[2], 8.0)};
        case EnvKind::Foraging: {
            std::vector<float> out(raw.size());
            std::transform(raw.begin(), raw.end(), out.begin(), [](double x) { return static_cast<float>(x); });
            return out;
        }
    }
    throw Error(ErrorKind::Config, "unknown environment kind");
}

Action decode_action(const Vec& v, const ActionSpaceSpec& spec) {
    const auto n_out = static_cast<Eigen::Index>(spec.size);
    if (n_out < 1 || n_out > v.size()) throw Error(ErrorKind::Shape, "action size exceeds node count");
    const auto outputs = v.tail(n_out);
    if (spec.kind == ActionSpaceSpec::Kind::Discrete) {
        Eigen::Index best = 0;
        for (Eigen::Index k = 1; k < n_out; ++k) {
            if (outputs[k] > outputs[best]) best = k;
        }
        return static_cast<int>(best);
    }
    std::vector<float> values(static_cast<std::size_t>(n_out));
    for (Eigen::Index k = 0; k < n_out; ++k) {
        const auto d = static_cast<std::size_t>(k);
        values[d] = spec.lo[d] + (outputs[k] + 1.0f) * 0.5f * (spec.hi[d] - spec.lo[d]);
    }
    return values;
}

}  // namespace lndp
