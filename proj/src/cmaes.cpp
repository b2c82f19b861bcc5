#include "lndp/cmaes.hpp"

#include "lndp/error.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace lndp {

namespace {

// Symmetric eigendecomposition through LAPACK's divide-and-conquer driver.
void decompose(const MatD& cov, MatD& basis, VecD& eigenvalues) {
    const auto n = static_cast<lapack_int>(cov.rows());
    basis = cov;
    eigenvalues.resize(n);
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, basis.data(), n, eigenvalues.data());
    if (info != 0) throw Error(ErrorKind::NumericInput, "covariance eigendecomposition failed");
}

void refresh_eigensystem(CmaState& s) {
    s.cov = 0.5 * (s.cov + s.cov.transpose());
    VecD eigenvalues;
    decompose(s.cov, s.basis, eigenvalues);
    if (eigenvalues.minCoeff() < kEigenFloor) {
        eigenvalues = eigenvalues.cwiseMax(kEigenFloor);
        s.cov = s.basis * eigenvalues.asDiagonal() * s.basis.transpose();
    }
    s.axis = eigenvalues.cwiseSqrt();
    s.eigen_evaluations = s.evaluations;
}

}  // namespace

CmaConstants cma_constants(int dim, int lambda) {
    if (dim < 1) throw Error(ErrorKind::Config, "CMA-ES dimension must be positive");
    if (lambda < 4) throw Error(ErrorKind::Config, "CMA-ES population size must be at least 4");
    const double n = dim;
    CmaConstants c;
    c.lambda = lambda;
    c.mu = lambda / 2;
    c.weights.resize(c.mu);
    for (int i = 0; i < c.mu; ++i) c.weights[i] = std::log((lambda + 1) / 2.0) - std::log(i + 1.0);
    c.weights /= c.weights.sum();
    c.mu_eff = 1.0 / c.weights.squaredNorm();

    c.c_sigma = (c.mu_eff + 2.0) / (n + c.mu_eff + 5.0);
    c.d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((c.mu_eff - 1.0) / (n + 1.0)) - 1.0) + c.c_sigma;
    c.c_c = (4.0 + c.mu_eff / n) / (n + 4.0 + 2.0 * c.mu_eff / n);
    c.c_1 = 2.0 / ((n + 1.3) * (n + 1.3) + c.mu_eff);
    c.c_mu = std::min(1.0 - c.c_1, 2.0 * (c.mu_eff - 2.0 + 1.0 / c.mu_eff) / ((n + 2.0) * (n + 2.0) + c.mu_eff));
    c.chi_n = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));
    return c;
}

CmaState cma_init(int dim, double sigma0, int lambda, std::optional<VecD> mean0) {
    if (!(sigma0 > 0.0)) throw Error(ErrorKind::Config, "CMA-ES initial step size must be positive");
    CmaState s;
    s.constants = cma_constants(dim, lambda);
    s.mean = mean0.value_or(VecD::Zero(dim));
    if (s.mean.size() != dim) throw Error(ErrorKind::Shape, "initial mean has the wrong dimension");
    s.sigma = sigma0;
    s.cov = MatD::Identity(dim, dim);
    s.basis = MatD::Identity(dim, dim);
    s.axis = VecD::Ones(dim);
    s.p_sigma = VecD::Zero(dim);
    s.p_c = VecD::Zero(dim);
    s.best_x = s.mean;
    return s;
}

MatD cma_ask(const CmaState& s, RngStream& rng) {
    const int n = s.dim();
    const int lambda = s.constants.lambda;
    MatD z(n, lambda);
    for (int k = 0; k < lambda; ++k) {
        for (int i = 0; i < n; ++i) z(i, k) = rng.normal();
    }
    const MatD bd = s.basis * s.axis.asDiagonal();
    MatD samples = (s.sigma * (bd * z)).colwise() + s.mean;
    return samples.transpose();
}

CmaState cma_tell(CmaState s, const MatD& population, const VecD& fitness) {
    const CmaConstants& c = s.constants;
    const int n = s.dim();
    if (population.rows() != c.lambda || population.cols() != n || fitness.size() != c.lambda) {
        throw Error(ErrorKind::Shape, "population does not match the CMA-ES state");
    }

    std::vector<int> order(static_cast<std::size_t>(c.lambda));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const bool a_nan = std::isnan(fitness[a]);
        const bool b_nan = std::isnan(fitness[b]);
        if (a_nan || b_nan) return !a_nan && b_nan;
        return fitness[a] < fitness[b];
    });

    s.evaluations += c.lambda;
    s.generation += 1;
    const int best = order.front();
    if (fitness[best] < s.best_fitness) {
        s.best_fitness = fitness[best];
        s.best_x = population.row(best).transpose();
    }

    const VecD old_mean = s.mean;
    MatD steps(n, c.mu);  // (x_i:λ − m_old) / σ
    for (int i = 0; i < c.mu; ++i) steps.col(i) = (population.row(order[i]).transpose() - old_mean) / s.sigma;
    const VecD y_w = steps * c.weights;
    s.mean = old_mean + s.sigma * y_w;

    // C^{-1/2} y_w through the cached eigensystem.
    const VecD whitened = s.basis * (s.basis.transpose() * y_w).cwiseQuotient(s.axis);
    s.p_sigma = (1.0 - c.c_sigma) * s.p_sigma + std::sqrt(c.c_sigma * (2.0 - c.c_sigma) * c.mu_eff) * whitened;

    const double ps_norm = s.p_sigma.norm();
    const double decay = 1.0 - std::pow(1.0 - c.c_sigma, 2.0 * static_cast<double>(s.generation));
    const bool h_sigma = ps_norm / std::sqrt(decay) < (1.4 + 2.0 / (n + 1.0)) * c.chi_n;

    s.p_c = (1.0 - c.c_c) * s.p_c + (h_sigma ? std::sqrt(c.c_c * (2.0 - c.c_c) * c.mu_eff) : 0.0) * y_w;

    const double keep = 1.0 - c.c_1 - c.c_mu + (h_sigma ? 0.0 : c.c_1 * c.c_c * (2.0 - c.c_c));
    s.cov *= keep;
    s.cov.noalias() += c.c_1 * (s.p_c * s.p_c.transpose());
    const MatD weighted = steps * c.weights.asDiagonal();
    s.cov.noalias() += c.c_mu * (weighted * steps.transpose());

    s.sigma *= std::exp((c.c_sigma / c.d_sigma) * (ps_norm / c.chi_n - 1.0));

    const double gap = c.lambda / ((c.c_1 + c.c_mu) * n * 10.0);
    if (static_cast<double>(s.evaluations - s.eigen_evaluations) > gap) refresh_eigensystem(s);
    return s;
}

double min_covariance_eigenvalue(const CmaState& state) {
    MatD basis;
    VecD eigenvalues;
    decompose(0.5 * (state.cov + state.cov.transpose()), basis, eigenvalues);
    return eigenvalues.minCoeff();
}

}  // namespace lndp
