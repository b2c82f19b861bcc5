#pragma once

#include "lndp/numerics.hpp"

#include <Eigen/Dense>

#include <optional>

namespace lndp {

using VecD = Eigen::VectorXd;
using MatD = Eigen::MatrixXd;

/// Strategy constants from the standard CMA-ES parameterization.
struct CmaConstants {
    int lambda = 0;
    int mu = 0;
    VecD weights;  // μ positive, decreasing, summing to 1
    double mu_eff = 0;
    double c_sigma = 0;
    double d_sigma = 0;
    double c_c = 0;
    double c_1 = 0;
    double c_mu = 0;
    double chi_n = 0;
};

CmaConstants cma_constants(int dim, int lambda);

/// Full search state. Minimization convention: lower fitness is better.
struct CmaState {
    CmaConstants constants;
    VecD mean;
    double sigma = 0;
    MatD cov;
    MatD basis;       // eigenvectors of cov (columns)
    VecD axis;        // square roots of the eigenvalues
    VecD p_sigma;
    VecD p_c;
    long generation = 0;
    long evaluations = 0;
    long eigen_evaluations = 0;  // evaluation count at the last decomposition
    double best_fitness = std::numeric_limits<double>::infinity();
    VecD best_x;

    int dim() const { return static_cast<int>(mean.size()); }
};

inline constexpr double kEigenFloor = 1e-20;

/// Mean defaults to the origin.
CmaState cma_init(int dim, double sigma0, int lambda, std::optional<VecD> mean0 = std::nullopt);

/// λ samples, one per row: mean + σ·B·D·z.
MatD cma_ask(const CmaState& state, RngStream& rng);

/// Rank-based update from the population returned by cma_ask. Ties are broken by
/// sample index, so adding a constant to every fitness leaves the update unchanged.
/// The eigendecomposition is refreshed lazily, once more than λ/((c_1 + c_μ)·n·10)
/// evaluations have passed since the last one.
CmaState cma_tell(CmaState state, const MatD& population, const VecD& fitness);

/// Smallest eigenvalue of the current covariance, computed afresh.
double min_covariance_eigenvalue(const CmaState& state);

}  // namespace lndp
