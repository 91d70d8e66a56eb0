#pragma once

#include <optional>

#include "otcc/core.hpp"
#include "otcc/sinkhorn.hpp"

namespace otcc::gromov {

/// Square symmetric matrix of pairwise similarities (or distances).
struct SimilarityMatrix {
    Matrix values;

    Index size() const { return values.rows(); }

    /// Validates squareness, symmetry (1e-10) and finiteness.
    static SimilarityMatrix create(Matrix values);
};

enum class Loss { squared, kullback_leibler };

struct GwConfig {
    double lambda = 10.0;
    Loss loss = Loss::squared;
    double eps_r = 0.5;            ///< weight of the row-space alignment
    double eps_c = 0.5;            ///< weight of the column-space alignment
    Index barycenter_size = 0;     ///< N; 0 = min(n, d)
    /// Block-coordinate sweep cap. Two sweeps extract partitions reliably;
    /// longer runs keep refining K while entropic smoothing gradually washes
    /// the couplings' block structure out.
    int outer_iter = 2;
    sinkhorn::SinkhornConfig inner; ///< lambda/normalize_cost are overridden
    std::uint64_t seed = 0;
    int fixed_point_iter = 30;      ///< cap on coupling fixed-point iterations
};

struct BarycenterResult {
    SimilarityMatrix K;            ///< N x N barycenter
    sinkhorn::Coupling gamma_r;    ///< N x n, aligns K with Kr
    sinkhorn::Coupling gamma_c;    ///< N x d, aligns K with Kc
    Vector beta_r;                 ///< right scaling of the final row solve
    Vector beta_c;                 ///< right scaling of the final column solve
    std::vector<double> objective_trace;
};

/// The quartic GW contraction evaluated through the loss decomposition
/// L(a,b) = f1(a) + f2(b) - h1(a) h2(b), reduced to three matrix products.
double gw_cost(const SimilarityMatrix& Ka, const SimilarityMatrix& Kb,
               const Matrix& gamma, Loss loss);

/// Entropic GW coupling by fixed-point iteration over linearized transport
/// problems. `init` warm-starts the iteration (defaults to the independent
/// coupling); `cost_scale` pins the pseudo-cost normalization (defaults to
/// the median positive entry of the initial shifted pseudo-cost). Returns
/// the iterate with the best regularized objective.
sinkhorn::Coupling entropic_gw_coupling(const SimilarityMatrix& Ka,
                                        const SimilarityMatrix& Kb,
                                        const EmpiricalMeasure& mu_a,
                                        const EmpiricalMeasure& mu_b,
                                        const GwConfig& cfg,
                                        const Matrix* init = nullptr,
                                        double* cost_scale = nullptr);

/// Two-input entropic GW barycenter by block-coordinate descent.
BarycenterResult barycenter(const SimilarityMatrix& Kr,
                            const SimilarityMatrix& Kc, const GwConfig& cfg);

}  // namespace otcc::gromov
