#pragma once

#include "otcc/core.hpp"

namespace otcc::sinkhorn {

enum class Stabilization { automatic, on, off };

struct SinkhornConfig {
    double lambda = 1.0;    ///< regularization sharpness (larger = sharper)
    int max_iter = 10000;
    double tol = 1e-9;      ///< L1 marginal-violation threshold, per marginal
    Stabilization log_domain = Stabilization::automatic;
    /// Divide the cost by its median positive entry before exponentiation so
    /// one lambda is meaningful across datasets; the scale is recorded in the
    /// returned Coupling. Disable to solve against the raw cost.
    bool normalize_cost = true;
};

/// Factored solution gamma = diag(alpha) * xi * diag(beta) of the
/// entropy-regularized transport problem.
struct Coupling {
    Matrix gamma;
    Vector alpha;
    Vector beta;
    Matrix xi;
    int iterations_used = 0;
    double marginal_violation = 0.0;
    bool converged = false;
    double cost_scale = 1.0;   ///< divisor applied to the cost before solving
    bool log_stabilized = false;
};

/// Element-wise exp(-lambda * M). Throws std::domain_error when a whole row
/// or column underflows to zero (use log-domain solving instead).
Matrix gibbs_kernel(const CostMatrix& M, double lambda);

/// Sinkhorn-Knopp scaling to the prescribed marginals. Non-convergence is
/// reported through Coupling::converged, not thrown.
Coupling solve(const CostMatrix& M, const EmpiricalMeasure& mu_r,
               const EmpiricalMeasure& mu_c, const SinkhornConfig& cfg);

/// Frobenius inner product <M, gamma>.
double transport_cost(const Coupling& c, const CostMatrix& M);
double transport_cost(const Matrix& gamma, const Matrix& M);

/// E(gamma) = -sum gamma_ij log gamma_ij, with 0 log 0 = 0.
double entropy(const Coupling& c);
double entropy(const Matrix& gamma);

/// Median of the strictly positive entries (lower median); 1 when none.
double median_positive(const Matrix& M);

}  // namespace otcc::sinkhorn
