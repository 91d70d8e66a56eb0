#pragma once

#include <optional>

#include "otcc/core.hpp"
#include "otcc/gromov.hpp"
#include "otcc/jumps.hpp"
#include "otcc/sinkhorn.hpp"

namespace otcc::coclust {

struct CcotConfig {
    double lambda = 0.0;        ///< 0 = pick from the default grid (see docs)
    int n_samples = 500;
    std::uint64_t seed = 0;
    sinkhorn::SinkhornConfig sinkhorn;  ///< lambda is overridden
    int max_extra_samples = 1000;       ///< extra draws allowed for coverage
};

enum class KernelKind { gaussian, precomputed };

struct KernelConfig {
    KernelKind kind = KernelKind::gaussian;
    double sigma = 0.0;  ///< 0 = auto (mean pairwise Euclidean distance)
    /// Required when kind == precomputed.
    std::optional<gromov::SimilarityMatrix> Kr;
    std::optional<gromov::SimilarityMatrix> Kc;
};

struct Diagnostics {
    Vector row_trace;                   ///< sorted row scaling vector
    Vector col_trace;                   ///< sorted column scaling vector
    std::vector<std::pair<int, int>> per_sample_gm;
    std::vector<bool> converged;
    std::vector<int> row_coverage;      ///< times each row was sampled
    double lambda_used = 0.0;
    double cost_scale = 1.0;
    int samples_run = 0;
    int barycenter_sweeps = 0;          ///< ccot_gw: sweeps of the single run
    std::vector<double> objective_trace;
};

struct CoClusterResult {
    jumps::Partition row_partition;
    jumps::Partition col_partition;
    int g = 1;
    int m = 1;
    Diagnostics diagnostics;
};

/// One axis's vote input: a partition of the sampled indices.
struct SampleVote {
    std::vector<Index> indices;  ///< original indices, aligned with labels
    jumps::Partition partition;
};

/// Per-index majority vote over samples whose cluster count equals the modal
/// count. Ties break toward the smaller label (and smaller modal count).
/// Throws std::runtime_error when an index is covered by no retained sample.
jumps::Partition majority_vote(const std::vector<SampleVote>& per_sample,
                               Index axis_size);

/// K[i][j] = exp(-|vi-vj|^2 / (2 sigma^2)); rows of V are the vectors.
/// sigma <= 0 selects the mean pairwise Euclidean distance; throws
/// std::domain_error when that mean is zero (identical points).
gromov::SimilarityMatrix gaussian_kernel_matrix(const Matrix& V, double sigma);

/// Sampling pipeline: square subsamples, per-sample transport, jump
/// detection on the scaling vectors, majority vote.
CoClusterResult ccot(const DataMatrix& A, const CcotConfig& cfg);

/// Kernel pipeline: row/column kernels, GW barycenter, jump detection on the
/// right scaling vectors. No sampling.
CoClusterResult ccot_gw(const DataMatrix& A, const gromov::GwConfig& gw,
                        const KernelConfig& kernel);

/// The lambda grid probed when CcotConfig.lambda == 0, sharpest first.
inline constexpr double kLambdaGrid[] = {50.0, 10.0, 5.0, 1.0, 0.5};

}  // namespace otcc::coclust
