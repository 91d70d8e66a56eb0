#include "otcc/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace otcc::simulate {

namespace {

// O(k^3) shortest-augmenting-path assignment; returns the minimum total cost
// of a perfect matching on a square cost matrix.
double hungarian_min_cost(const Matrix& cost) {
    const Index k = cost.rows();
    const double INF = std::numeric_limits<double>::infinity();
    std::vector<double> u(k + 1, 0.0), v(k + 1, 0.0);
    std::vector<Index> match(k + 1, 0);   // column -> row (1-based)
    std::vector<Index> way(k + 1, 0);
    for (Index i = 1; i <= k; ++i) {
        match[0] = i;
        Index j0 = 0;
        std::vector<double> minv(k + 1, INF);
        std::vector<bool> used(k + 1, false);
        do {
            used[j0] = true;
            const Index i0 = match[j0];
            double delta = INF;
            Index j1 = 0;
            for (Index j = 1; j <= k; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (Index j = 0; j <= k; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const Index j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    double total = 0.0;
    for (Index j = 1; j <= k; ++j)
        if (match[j] != 0) total += cost(match[j] - 1, j - 1);
    return total;
}

int max_label(const std::vector<int>& v) {
    int m = 0;
    for (int x : v) {
        if (x < 1) throw std::invalid_argument("labels must be >= 1");
        m = std::max(m, x);
    }
    return m;
}

double label_entropy(const std::vector<int>& v, int k) {
    std::vector<double> p(k, 0.0);
    for (int x : v) p[x - 1] += 1.0;
    double h = 0.0;
    for (double c : p)
        if (c > 0.0) {
            const double q = c / static_cast<double>(v.size());
            h -= q * std::log(q);
        }
    return h;
}

}  // namespace

std::vector<Index> proportional_counts(Index k, const std::vector<double>& props) {
    if (props.empty()) throw std::invalid_argument("empty proportion vector");
    double sum = std::accumulate(props.begin(), props.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("proportions must sum to one");
    std::vector<Index> counts(props.size());
    std::vector<std::pair<double, std::size_t>> frac;
    Index assigned = 0;
    for (std::size_t i = 0; i < props.size(); ++i) {
        if (props[i] < 0.0) throw std::invalid_argument("negative proportion");
        const double exact = props[i] * static_cast<double>(k);
        counts[i] = static_cast<Index>(std::floor(exact));
        assigned += counts[i];
        frac.emplace_back(exact - std::floor(exact), i);
    }
    std::stable_sort(frac.begin(), frac.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (Index r = 0; r < k - assigned; ++r)
        ++counts[frac[static_cast<std::size_t>(r) % frac.size()].second];
    for (Index c : counts)
        if (c == 0)
            throw std::invalid_argument(
                "a cluster rounds to zero members; adjust sizes or proportions");
    return counts;
}

std::pair<DataMatrix, GroundTruth> generate_lbm(const LbmConfig& cfg) {
    if (cfg.n < 2 || cfg.d < 2 || cfg.g < 1 || cfg.m < 1)
        throw std::invalid_argument("generate_lbm: invalid sizes");
    if (static_cast<int>(cfg.row_props.size()) != cfg.g ||
        static_cast<int>(cfg.col_props.size()) != cfg.m)
        throw std::invalid_argument("generate_lbm: proportion vector sizes");
    if (cfg.noise_sd <= 0.0)
        throw std::invalid_argument("generate_lbm: noise_sd must be positive");
    if (cfg.n < cfg.g || cfg.d < cfg.m)
        throw std::invalid_argument("generate_lbm: fewer items than clusters");

    const double delta =
        (cfg.separation == Separation::well ? 4.0 : 1.5) * cfg.noise_sd;

    Rng rng(cfg.seed);
    const std::vector<Index> rc = proportional_counts(cfg.n, cfg.row_props);
    const std::vector<Index> cc = proportional_counts(cfg.d, cfg.col_props);

    GroundTruth gt;
    for (int c = 0; c < cfg.g; ++c)
        gt.row_labels.insert(gt.row_labels.end(), rc[c], c + 1);
    for (int c = 0; c < cfg.m; ++c)
        gt.col_labels.insert(gt.col_labels.end(), cc[c], c + 1);
    rng.shuffle(gt.row_labels);
    rng.shuffle(gt.col_labels);

    std::vector<double> grid(static_cast<std::size_t>(cfg.g) * cfg.m);
    for (std::size_t v = 0; v < grid.size(); ++v)
        grid[v] = static_cast<double>(v) * delta;
    rng.shuffle(grid);
    gt.block_means.resize(cfg.g, cfg.m);
    for (int a = 0; a < cfg.g; ++a)
        for (int b = 0; b < cfg.m; ++b)
            gt.block_means(a, b) = grid[static_cast<std::size_t>(a) * cfg.m + b];

    Matrix values(cfg.n, cfg.d);
    for (Index i = 0; i < cfg.n; ++i)
        for (Index j = 0; j < cfg.d; ++j)
            values(i, j) = gt.block_means(gt.row_labels[i] - 1,
                                          gt.col_labels[j] - 1) +
                           cfg.noise_sd * rng.normal();
    return {DataMatrix::from_values(std::move(values)), std::move(gt)};
}

double error_rate(const std::vector<int>& truth, const std::vector<int>& est) {
    if (truth.size() != est.size())
        throw std::invalid_argument("error_rate: length mismatch");
    if (truth.empty()) throw std::invalid_argument("error_rate: empty labels");
    const int gt = max_label(truth), ge = max_label(est);
    const int K = std::max(gt, ge);
    Matrix confusion = Matrix::Zero(K, K);
    for (std::size_t i = 0; i < truth.size(); ++i)
        confusion(truth[i] - 1, est[i] - 1) += 1.0;
    // maximize agreement == minimize (max - C)
    const double top = confusion.maxCoeff();
    Matrix cost = (top - confusion.array()).matrix();
    const double best_agree = top * K - hungarian_min_cost(cost);
    return 1.0 - best_agree / static_cast<double>(truth.size());
}

double cce(const std::vector<int>& truth_rows, const std::vector<int>& est_rows,
           const std::vector<int>& truth_cols, const std::vector<int>& est_cols) {
    const double er = error_rate(truth_rows, est_rows);
    const double ec = error_rate(truth_cols, est_cols);
    return er + ec - er * ec;
}

double nmi(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("nmi: length mismatch");
    if (a.empty()) throw std::invalid_argument("nmi: empty labels");
    const int ka = max_label(a), kb = max_label(b);
    const double ha = label_entropy(a, ka);
    const double hb = label_entropy(b, kb);
    if (ha + hb == 0.0) return 1.0;  // both single-cluster: identical
    Matrix joint = Matrix::Zero(ka, kb);
    for (std::size_t i = 0; i < a.size(); ++i)
        joint(a[i] - 1, b[i] - 1) += 1.0;
    joint /= static_cast<double>(a.size());
    const Vector pa = joint.rowwise().sum();
    const Vector pb = joint.colwise().sum();
    double mi = 0.0;
    for (int i = 0; i < ka; ++i)
        for (int j = 0; j < kb; ++j) {
            const double p = joint(i, j);
            if (p > 0.0) mi += p * std::log(p / (pa[i] * pb[j]));
        }
    return mi / (0.5 * (ha + hb));
}

}  // namespace otcc::simulate
