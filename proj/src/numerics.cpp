#include "lndp/numerics.hpp"

#include "lndp/error.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lndp {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidBounds: return "invalid bounds";
        case ErrorKind::NumericInput: return "numeric input";
        case ErrorKind::Config: return "config";
        case ErrorKind::Shape: return "shape";
        case ErrorKind::Contract: return "contract";
        case ErrorKind::Compatibility: return "compatibility";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kSplitSalt = 0xD1B54A32D192ED03ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

RngStream::RngStream(std::uint64_t seed) : key_(mix64(seed + kGolden)) {}

RngStream make_rng(std::uint64_t seed) { return RngStream(seed); }

RngStream RngStream::split(std::uint64_t index) const {
    const std::uint64_t child = mix64(key_ ^ mix64((index + 1) * kSplitSalt));
    return RngStream(mix64(child + kGolden), depth_ + 1);
}

std::uint64_t RngStream::next_u64() {
    // Two rounds so that nearby keys and counters decorrelate.
    const std::uint64_t c = counter_++;
    return mix64(mix64(key_ + c * kGolden) ^ key_);
}

double RngStream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

float RngStream::uniform(float lo, float hi) {
    const float u = static_cast<float>(next_u64() >> 40) * 0x1.0p-24f;
    return lo + (hi - lo) * u;
}

double RngStream::normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

bool RngStream::bernoulli(double p) { return uniform() < p; }

std::uint64_t RngStream::below(std::uint64_t n) {
    if (n == 0) throw Error(ErrorKind::InvalidBounds, "below(0)");
    // Rejecting x < 2^64 mod n keeps the result unbiased.
    const std::uint64_t limit = (0 - n) % n;
    for (;;) {
        const std::uint64_t x = next_u64();
        if (x >= limit) return x % n;
    }
}

CholeskyFactor::CholeskyFactor(Mat lower) : lower_(std::move(lower)) {
    if (lower_.rows() != lower_.cols()) throw Error(ErrorKind::Shape, "Cholesky factor must be square");
    lower_.triangularView<Eigen::StrictlyUpper>().setZero();
}

float& CholeskyFactor::at(Eigen::Index row, Eigen::Index col) {
    if (col > row || row >= lower_.rows() || col < 0) throw Error(ErrorKind::Shape, "Cholesky entry outside the lower triangle");
    return lower_(row, col);
}

CholeskyFactor CholeskyFactor::zeros(Eigen::Index dim) { return CholeskyFactor(Mat::Zero(dim, dim)); }

CholeskyFactor CholeskyFactor::identity(Eigen::Index dim, float scale) {
    return CholeskyFactor(Mat::Identity(dim, dim) * scale);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
    if (p <= 0.0) return -HUGE_VAL;
    if (p >= 1.0) return HUGE_VAL;
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double sample_truncated_normal(double mu, double sigma, double lo, double hi, RngStream& rng) {
    if (!(lo <= hi)) throw Error(ErrorKind::InvalidBounds, "truncated normal requires lo <= hi");
    if (sigma < 0.0) throw Error(ErrorKind::InvalidBounds, "truncated normal requires sigma >= 0");
    if (sigma == 0.0 || lo == hi) return std::clamp(mu, lo, hi);

    const double a = (lo - mu) / sigma;
    const double b = (hi - mu) / sigma;
    const double mass = normal_cdf(b) - normal_cdf(a);

    if (mass >= 0.01) {
        // Expected number of tries is 1/mass <= 100; the cap only guards pathologies.
        for (int attempt = 0; attempt < 100000; ++attempt) {
            const double x = mu + sigma * rng.normal();
            if (x >= lo && x <= hi) return x;
        }
    }

    // Inverse CDF, evaluated on whichever tail keeps precision.
    const double u = rng.uniform();
    double z;
    if (a > 0.0) {
        const double qa = normal_cdf(-a);
        const double qb = normal_cdf(-b);
        z = -normal_quantile(qa - u * (qa - qb));
    } else {
        const double pa = normal_cdf(a);
        const double pb = normal_cdf(b);
        z = normal_quantile(pa + u * (pb - pa));
    }
    if (!std::isfinite(z)) return std::abs(lo - mu) < std::abs(hi - mu) ? lo : hi;
    return std::clamp(mu + sigma * z, lo, hi);
}

Vec sample_mvn(const CholeskyFactor& chol, RngStream& rng) {
    Vec z(chol.dim());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = static_cast<float>(rng.normal());
    return chol.matrix() * z;
}

Vec softmax(const Eigen::Ref<const Vec>& logits) {
    if (logits.size() == 0) throw Error(ErrorKind::Shape, "softmax of empty vector");
    if (!logits.allFinite()) throw Error(ErrorKind::NumericInput, "softmax input is not finite");
    const float m = logits.maxCoeff();
    Vec out = (logits.array() - m).exp().matrix();
    out /= out.sum();
    return out;
}

float sigmoid(float x) { return 1.0f / (1.0f + std::exp(-x)); }

void require_finite(std::span<const float> values, const char* what) {
    for (float v : values) {
        if (!std::isfinite(v)) throw Error(ErrorKind::NumericInput, std::string(what) + " is not finite");
    }
}

}  // namespace lndp
