#pragma once

#include "otcc/core.hpp"

namespace otcc::simulate {

enum class Separation { well, ill };

struct LbmConfig {
    Index n = 0, d = 0;
    int g = 0, m = 0;
    std::vector<double> row_props;  ///< size g, sums to 1
    std::vector<double> col_props;  ///< size m, sums to 1
    Separation separation = Separation::well;
    double noise_sd = 1.0;
    std::uint64_t seed = 0;
};

struct GroundTruth {
    std::vector<int> row_labels;  ///< in {1..g}
    std::vector<int> col_labels;  ///< in {1..m}
    Matrix block_means;           ///< g x m
};

/// Gaussian latent block model draw. Cluster sizes are exact
/// largest-remainder rounds of the proportions; block means are a seeded
/// shuffle of {0, delta, ..., (g*m-1)*delta} with delta = 4*noise_sd
/// (well-separated) or 1.5*noise_sd (ill-separated).
std::pair<DataMatrix, GroundTruth> generate_lbm(const LbmConfig& cfg);

/// Proportion of misclassified items under the best one-to-one cluster
/// matching (rectangular assignment on the confusion matrix).
double error_rate(const std::vector<int>& truth, const std::vector<int>& est);

/// e_r + e_c - e_r * e_c over the two axes' error rates.
double cce(const std::vector<int>& truth_rows, const std::vector<int>& est_rows,
           const std::vector<int>& truth_cols, const std::vector<int>& est_cols);

/// Mutual information normalized by the mean of the two label entropies;
/// 1 when both partitions are single-cluster (identical), else 0 with any
/// degenerate entropy.
double nmi(const std::vector<int>& a, const std::vector<int>& b);

/// Exact cluster sizes by largest-remainder rounding of k * props.
/// Throws std::invalid_argument if any cluster rounds to zero.
std::vector<Index> proportional_counts(Index k, const std::vector<double>& props);

}  // namespace otcc::simulate
