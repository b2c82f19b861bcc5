#pragma once

#include "lndp/numerics.hpp"

namespace lndp {

/// Learnable Ornstein-Uhlenbeck generator of input-node activity:
///   o' = o + α∘(μ − o) + W,  W ~ N(0, L·Lᵀ)
/// α is stored raw and squashed through a sigmoid; L is used as given.
struct OuParams {
    Vec mu;
    Vec alpha_raw;
    CholeskyFactor chol;
    int t_sa = 0;

    static OuParams zeros(int dim, int t_sa = 0);
    int dim() const { return static_cast<int>(mu.size()); }
    Vec alpha() const;
};

/// One OU step, clamped into [-1, 1].
Vec ou_step(const OuParams& p, const Vec& o, RngStream& rng);

/// Same update without the clamp; used to check the stationary law.
Vec ou_step_unclamped(const OuParams& p, const Vec& o, RngStream& rng);

}  // namespace lndp
