#include "otcc/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_set>

namespace otcc {

namespace {

void check_unique(const std::vector<std::string>& ids, const char* axis) {
    std::unordered_set<std::string> seen;
    for (const auto& id : ids) {
        if (!seen.insert(id).second)
            throw std::invalid_argument(std::string("duplicate ") + axis +
                                        " identifier: " + id);
    }
}

}  // namespace

DataMatrix DataMatrix::create(Matrix values, std::vector<std::string> row_ids,
                              std::vector<std::string> col_ids) {
    const Index n = values.rows(), d = values.cols();
    if (n < 2 || d < 2)
        throw std::invalid_argument("data matrix must be at least 2x2");
    if (!values.allFinite())
        throw std::invalid_argument("data matrix contains non-finite entries");
    if (static_cast<Index>(row_ids.size()) != n)
        throw std::invalid_argument("row identifier count does not match rows");
    if (static_cast<Index>(col_ids.size()) != d)
        throw std::invalid_argument("column identifier count does not match columns");
    check_unique(row_ids, "row");
    check_unique(col_ids, "column");
    return DataMatrix{std::move(values), std::move(row_ids), std::move(col_ids)};
}

DataMatrix DataMatrix::from_values(Matrix values) {
    std::vector<std::string> rid, cid;
    rid.reserve(values.rows());
    cid.reserve(values.cols());
    for (Index i = 0; i < values.rows(); ++i) rid.push_back("r" + std::to_string(i));
    for (Index j = 0; j < values.cols(); ++j) cid.push_back("c" + std::to_string(j));
    return create(std::move(values), std::move(rid), std::move(cid));
}

DataMatrix DataMatrix::transposed() const {
    return DataMatrix{values.transpose(), col_ids, row_ids};
}

EmpiricalMeasure EmpiricalMeasure::uniform(Index k) {
    if (k < 1) throw std::invalid_argument("measure needs at least one atom");
    return EmpiricalMeasure{Vector::Constant(k, 1.0 / static_cast<double>(k))};
}

EmpiricalMeasure EmpiricalMeasure::create(Vector weights) {
    if (weights.size() < 1)
        throw std::invalid_argument("measure needs at least one atom");
    if (!(weights.array() >= 0.0).all())
        throw std::invalid_argument("measure weights must be nonnegative");
    if (std::abs(weights.sum() - 1.0) > 1e-12)
        throw std::invalid_argument("measure weights must sum to one");
    return EmpiricalMeasure{std::move(weights)};
}

std::uint64_t Rng::next_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("next_below(0)");
    const std::uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
    for (;;) {
        std::uint64_t x = engine_();
        if (x >= threshold) return x % n;
    }
}

double Rng::uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform01() - 1.0;
        v = 2.0 * uniform01() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

std::vector<Index> Rng::sample_without_replacement(Index n, Index k) {
    if (k < 0 || k > n) throw std::invalid_argument("sample size out of range");
    std::vector<Index> pool(n);
    std::iota(pool.begin(), pool.end(), Index{0});
    // partial Fisher-Yates: first k entries are the sample, in draw order
    for (Index i = 0; i < k; ++i) {
        Index j = i + static_cast<Index>(next_below(static_cast<std::uint64_t>(n - i)));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

CostMatrix pairwise_sq_dist(const Matrix& A, const Matrix& B) {
    if (A.cols() != B.cols())
        throw std::invalid_argument("pairwise_sq_dist: dimension mismatch");
    if (A.cols() < 1)
        throw std::invalid_argument("pairwise_sq_dist: empty vectors");
    const Vector sqA = A.rowwise().squaredNorm();
    const Vector sqB = B.rowwise().squaredNorm();
    Matrix M = (-2.0 * A * B.transpose());
    M.colwise() += sqA;
    M.rowwise() += sqB.transpose();
    M = M.cwiseMax(0.0);  // round-off can push true zeros slightly negative
    if (&A == &B) {
        M.diagonal().setZero();
        M = ((M + M.transpose()) * 0.5).eval();
    }
    return CostMatrix{std::move(M)};
}

std::pair<Vector, SortPermutation> sort_with_permutation(const Vector& v) {
    if (v.hasNaN())
        throw std::invalid_argument("sort_with_permutation: NaN entry");
    SortPermutation perm;
    perm.order.resize(v.size());
    std::iota(perm.order.begin(), perm.order.end(), Index{0});
    std::stable_sort(perm.order.begin(), perm.order.end(),
                     [&](Index a, Index b) { return v[a] < v[b]; });
    Vector sorted(v.size());
    for (Index r = 0; r < v.size(); ++r) sorted[r] = v[perm.order[r]];
    return {std::move(sorted), std::move(perm)};
}

std::pair<DataMatrix, std::vector<Index>> sample_rows(const DataMatrix& A,
                                                      Index k, Rng& rng) {
    if (k < 2 || k > A.rows())
        throw std::invalid_argument("sample_rows: k out of range [2, n]");
    std::vector<Index> idx = rng.sample_without_replacement(A.rows(), k);
    Matrix values(k, A.cols());
    std::vector<std::string> rid(k);
    for (Index i = 0; i < k; ++i) {
        values.row(i) = A.values.row(idx[i]);
        rid[i] = A.row_ids[idx[i]];
    }
    return {DataMatrix{std::move(values), std::move(rid), A.col_ids}, std::move(idx)};
}

std::pair<DataMatrix, std::vector<Index>> sample_rows(const DataMatrix& A,
                                                      Index k,
                                                      std::uint64_t seed) {
    Rng rng(seed);
    return sample_rows(A, k, rng);
}

}  // namespace otcc
