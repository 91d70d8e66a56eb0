#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace otcc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Dense n x d data matrix with row and column identifiers.
struct DataMatrix {
    Matrix values;
    std::vector<std::string> row_ids;
    std::vector<std::string> col_ids;

    Index rows() const { return values.rows(); }
    Index cols() const { return values.cols(); }

    /// Validates and builds a DataMatrix. Throws std::invalid_argument on
    /// size < 2x2, non-finite entries, or mismatched/duplicate identifiers.
    static DataMatrix create(Matrix values, std::vector<std::string> row_ids,
                             std::vector<std::string> col_ids);

    /// Convenience: identifiers r0..r{n-1} / c0..c{d-1}.
    static DataMatrix from_values(Matrix values);

    DataMatrix transposed() const;
};

/// Probability weights over a finite set, summing to one.
struct EmpiricalMeasure {
    Vector weights;

    Index size() const { return weights.size(); }

    static EmpiricalMeasure uniform(Index k);
    static EmpiricalMeasure create(Vector weights);
};

/// Nonnegative pairwise cost matrix (squared-distance units).
struct CostMatrix {
    Matrix values;

    Index rows() const { return values.rows(); }
    Index cols() const { return values.cols(); }
};

/// order[k] is the original index of the k-th smallest element.
struct SortPermutation {
    std::vector<Index> order;

    Index size() const { return static_cast<Index>(order.size()); }
};

// ---------------------------------------------------------------------------
// Deterministic random generation.
//
// All randomness in the toolkit flows through Rng: a std::mt19937_64 engine
// (bit-exact across platforms per the C++ standard) combined with fixed
// rejection sampling for bounded integers and Box-Muller for normals, so that
// seeded runs reproduce bit-identically everywhere. Standard-library
// distributions are avoided because their output is implementation-defined.
// ---------------------------------------------------------------------------
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::uint64_t next_below(std::uint64_t n);

    /// Uniform double in [0, 1) with 53-bit resolution.
    double uniform01();

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller.
    double normal();

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// k distinct indices drawn uniformly from {0..n-1}, in draw order.
    std::vector<Index> sample_without_replacement(Index n, Index k);

  private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// M[i][j] = squared Euclidean distance between row i of A and row j of B.
/// When A and B are the same object the diagonal is exactly zero and the
/// result exactly symmetric.
CostMatrix pairwise_sq_dist(const Matrix& A, const Matrix& B);

/// Stable ascending sort; the permutation maps sorted rank to original index.
/// Throws std::invalid_argument on NaN entries.
std::pair<Vector, SortPermutation> sort_with_permutation(const Vector& v);

/// k distinct rows drawn uniformly without replacement, seeded.
std::pair<DataMatrix, std::vector<Index>> sample_rows(const DataMatrix& A,
                                                      Index k,
                                                      std::uint64_t seed);

/// Same draw but advancing a caller-owned generator.
std::pair<DataMatrix, std::vector<Index>> sample_rows(const DataMatrix& A,
                                                      Index k, Rng& rng);

}  // namespace otcc
