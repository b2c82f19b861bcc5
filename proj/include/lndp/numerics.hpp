#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace lndp {

using Vec = Eigen::VectorXf;
using Mat = Eigen::MatrixXf;
using RowMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Counter-based splittable random stream.
///
/// Every draw is a pure hash of (key, counter), so a stream is a plain value:
/// copying it forks an identical sequence, and split(i) derives a child key
/// from the parent key alone. Children never observe draws made on the parent.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed);

    RngStream split(std::uint64_t index) const;

    std::uint64_t next_u64();
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    float uniform(float lo, float hi);
    /// Standard normal (Box-Muller, one value per call).
    double normal();
    bool bernoulli(double p);
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }
    /// Number of splits between the root seed and this stream.
    std::uint32_t depth() const { return depth_; }

private:
    RngStream(std::uint64_t key, std::uint32_t depth) : key_(key), depth_(depth) {}

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    std::uint32_t depth_ = 0;
};

RngStream make_rng(std::uint64_t seed);

/// Stateless 64-bit mixer (SplitMix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

/// Lower-triangular factor L of a covariance L·Lᵀ. Entries above the
/// diagonal are forced to zero on construction.
class CholeskyFactor {
public:
    CholeskyFactor() = default;
    explicit CholeskyFactor(Mat lower);

    static CholeskyFactor zeros(Eigen::Index dim);
    static CholeskyFactor identity(Eigen::Index dim, float scale = 1.0f);

    const Mat& matrix() const { return lower_; }
    /// Mutable access to an on-or-below-diagonal entry.
    float& at(Eigen::Index row, Eigen::Index col);
    Eigen::Index dim() const { return lower_.rows(); }
    Mat covariance() const { return lower_ * lower_.transpose(); }

private:
    Mat lower_;
};

/// Truncated normal on [lo, hi]. Rejection sampling, with an inverse-CDF
/// fallback when the acceptance mass is below 1%.
double sample_truncated_normal(double mu, double sigma, double lo, double hi, RngStream& rng);

/// L·z with z i.i.d. standard normal.
Vec sample_mvn(const CholeskyFactor& chol, RngStream& rng);

Vec softmax(const Eigen::Ref<const Vec>& logits);

float sigmoid(float x);

double normal_cdf(double x);
double normal_quantile(double p);

/// Throws NumericInput if any entry is NaN or infinite.
void require_finite(std::span<const float> values, const char* what);

}  // namespace lndp
