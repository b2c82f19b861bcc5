#include "lndp/spontaneous_activity.hpp"

#include "lndp/error.hpp"

namespace lndp {

OuParams OuParams::zeros(int dim, int t_sa) {
    OuParams p;
    p.mu = Vec::Zero(dim);
    p.alpha_raw = Vec::Zero(dim);
    p.chol = CholeskyFactor::zeros(dim);
    p.t_sa = t_sa;
    return p;
}

Vec OuParams::alpha() const { return alpha_raw.unaryExpr([](float x) { return sigmoid(x); }); }

Vec ou_step_unclamped(const OuParams& p, const Vec& o, RngStream& rng) {
    if (o.size() != p.dim() || p.chol.dim() != p.dim()) throw Error(ErrorKind::Shape, "OU dimension mismatch");
    const Vec a = p.alpha();
    return o + a.cwiseProduct(p.mu - o) + sample_mvn(p.chol, rng);
}

Vec ou_step(const OuParams& p, const Vec& o, RngStream& rng) {
    return ou_step_unclamped(p, o, rng).cwiseMax(-1.0f).cwiseMin(1.0f);
}

}  // namespace lndp
