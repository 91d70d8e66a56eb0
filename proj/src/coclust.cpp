#include "otcc/coclust.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace otcc::coclust {

namespace {

Vector safe_log(const Vector& v) {
    return v.cwiseMax(1e-300).array().log();
}

struct AxisDetection {
    jumps::Partition partition;
    Vector sorted_values;
};

// Sort the scaling vector, detect steps on its log, label by rank band.
AxisDetection detect_axis(const Vector& scaling) {
    auto [sorted, perm] = sort_with_permutation(scaling);
    jumps::JumpList jl = jumps::detect(safe_log(scaling));
    AxisDetection out;
    out.partition = jumps::partition_from_jumps(perm, jl);
    out.sorted_values = std::move(sorted);
    return out;
}

double probe_lambda(const CostMatrix& M, const EmpiricalMeasure& mu,
                    const EmpiricalMeasure& nu,
                    const sinkhorn::SinkhornConfig& base) {
    sinkhorn::SinkhornConfig probe = base;
    probe.max_iter = std::max(500, base.max_iter / 20);
    double fallback = kLambdaGrid[std::size(kLambdaGrid) - 1];
    double fallback_viol = std::numeric_limits<double>::infinity();
    for (double lam : kLambdaGrid) {
        probe.lambda = lam;
        sinkhorn::Coupling c = sinkhorn::solve(M, mu, nu, probe);
        if (c.converged) return lam;
        if (c.marginal_violation < fallback_viol) {
            fallback_viol = c.marginal_violation;
            fallback = lam;
        }
    }
    return fallback;
}

CoClusterResult swap_axes(CoClusterResult r) {
    std::swap(r.row_partition, r.col_partition);
    std::swap(r.g, r.m);
    std::swap(r.diagnostics.row_trace, r.diagnostics.col_trace);
    for (auto& gm : r.diagnostics.per_sample_gm) std::swap(gm.first, gm.second);
    return r;
}

}  // namespace

jumps::Partition majority_vote(const std::vector<SampleVote>& per_sample,
                               Index axis_size) {
    if (per_sample.empty())
        throw std::invalid_argument("majority_vote: no samples");
    std::map<int, int> count_hist;
    for (const auto& s : per_sample) ++count_hist[s.partition.g];
    int modal_g = 0, modal_n = -1;
    for (const auto& [g, c] : count_hist)
        if (c > modal_n) {  // map iterates ascending: ties keep the smaller g
            modal_g = g;
            modal_n = c;
        }

    std::vector<std::map<int, int>> votes(axis_size);
    for (const auto& s : per_sample) {
        if (s.partition.g != modal_g) continue;
        if (s.indices.size() != s.partition.labels.size())
            throw std::invalid_argument("majority_vote: index/label size mismatch");
        for (std::size_t k = 0; k < s.indices.size(); ++k) {
            const Index i = s.indices[k];
            if (i < 0 || i >= axis_size)
                throw std::invalid_argument("majority_vote: index out of range");
            ++votes[i][s.partition.labels[k]];
        }
    }

    std::vector<int> raw(axis_size);
    std::vector<Index> uncovered;
    for (Index i = 0; i < axis_size; ++i) {
        if (votes[i].empty()) {
            uncovered.push_back(i);
            continue;
        }
        int best_label = 0, best_count = -1;
        for (const auto& [label, c] : votes[i])
            if (c > best_count) {  // ascending iteration: ties -> smaller label
                best_label = label;
                best_count = c;
            }
        raw[i] = best_label;
    }
    if (!uncovered.empty()) {
        std::ostringstream os;
        os << "majority_vote: " << uncovered.size()
           << " indices appear in no retained sample (first: " << uncovered[0] << ")";
        throw std::runtime_error(os.str());
    }

    // compact labels, preserving their order
    std::map<int, int> remap;
    for (int l : raw) remap.emplace(l, 0);
    int next = 1;
    for (auto& [l, to] : remap) to = next++;
    jumps::Partition part;
    part.labels.resize(axis_size);
    for (Index i = 0; i < axis_size; ++i) part.labels[i] = remap[raw[i]];
    part.g = next - 1;
    return part;
}

gromov::SimilarityMatrix gaussian_kernel_matrix(const Matrix& V, double sigma) {
    const Index k = V.rows();
    if (k < 2) throw std::invalid_argument("gaussian_kernel_matrix: need >= 2 vectors");
    const CostMatrix M = pairwise_sq_dist(V, V);
    if (sigma <= 0.0) {
        double sum = 0.0;
        for (Index i = 0; i < k; ++i)
            for (Index j = i + 1; j < k; ++j) sum += std::sqrt(M.values(i, j));
        sigma = sum / (static_cast<double>(k) * (k - 1) / 2.0);
        if (sigma == 0.0)
            throw std::domain_error(
                "gaussian_kernel_matrix: all points identical; pass an explicit sigma");
    }
    Matrix K = (-M.values.array() / (2.0 * sigma * sigma)).exp();
    return gromov::SimilarityMatrix{std::move(K)};
}

CoClusterResult ccot(const DataMatrix& A, const CcotConfig& cfg) {
    if (cfg.n_samples < 1)
        throw std::invalid_argument("ccot: n_samples must be >= 1");
    const Index n = A.rows(), d = A.cols();
    if (d > n) return swap_axes(ccot(A.transposed(), cfg));

    Rng rng(cfg.seed);
    const bool square = (n == d);

    // sample index lists; extend past n_samples until every row is covered
    std::vector<std::vector<Index>> sample_idx;
    std::vector<int> coverage(n, 0);
    auto covered = [&] {
        return std::all_of(coverage.begin(), coverage.end(),
                           [](int c) { return c > 0; });
    };
    if (square) {
        std::vector<Index> all(n);
        std::iota(all.begin(), all.end(), Index{0});
        sample_idx.push_back(std::move(all));
        coverage.assign(n, 1);
    } else {
        for (int s = 0; s < cfg.n_samples; ++s) {
            sample_idx.push_back(rng.sample_without_replacement(n, d));
            for (Index i : sample_idx.back()) ++coverage[i];
        }
        int extra = 0;
        while (!covered() && extra < cfg.max_extra_samples) {
            sample_idx.push_back(rng.sample_without_replacement(n, d));
            for (Index i : sample_idx.back()) ++coverage[i];
            ++extra;
        }
        if (!covered()) {
            std::ostringstream os;
            os << "ccot: rows never sampled within the extra-sample cap:";
            for (Index i = 0; i < n; ++i)
                if (coverage[i] == 0) os << ' ' << A.row_ids[i];
            throw std::runtime_error(os.str());
        }
    }

    const EmpiricalMeasure mu = EmpiricalMeasure::uniform(d);

    auto sample_cost = [&](const std::vector<Index>& idx) {
        Matrix D(d, d);
        for (Index i = 0; i < d; ++i) D.row(i) = A.values.row(idx[i]);
        const Matrix Dt = D.transpose();
        return pairwise_sq_dist(D, Dt);
    };

    sinkhorn::SinkhornConfig scfg = cfg.sinkhorn;
    scfg.lambda = cfg.lambda;
    if (scfg.lambda <= 0.0)
        scfg.lambda = probe_lambda(sample_cost(sample_idx.front()), mu, mu,
                                   cfg.sinkhorn);

    CoClusterResult out;
    out.diagnostics.lambda_used = scfg.lambda;
    out.diagnostics.row_coverage = coverage;
    out.diagnostics.samples_run = static_cast<int>(sample_idx.size());

    std::vector<SampleVote> row_votes, col_votes;
    std::vector<Vector> row_traces, col_traces;
    bool any_converged = false;
    std::vector<Index> cols_all(d);
    std::iota(cols_all.begin(), cols_all.end(), Index{0});

    for (const auto& idx : sample_idx) {
        const CostMatrix M = sample_cost(idx);
        sinkhorn::Coupling c = sinkhorn::solve(M, mu, mu, scfg);
        any_converged = any_converged || c.converged;
        if (out.diagnostics.per_sample_gm.empty())
            out.diagnostics.cost_scale = c.cost_scale;

        AxisDetection rows = detect_axis(c.alpha);
        AxisDetection cols = detect_axis(c.beta);
        out.diagnostics.per_sample_gm.emplace_back(rows.partition.g,
                                                   cols.partition.g);
        out.diagnostics.converged.push_back(c.converged);
        row_traces.push_back(std::move(rows.sorted_values));
        col_traces.push_back(std::move(cols.sorted_values));
        row_votes.push_back(SampleVote{idx, std::move(rows.partition)});
        col_votes.push_back(SampleVote{cols_all, std::move(cols.partition)});
    }
    if (!any_converged)
        throw std::runtime_error("ccot: no sample's transport solve converged");

    out.row_partition = majority_vote(row_votes, n);
    out.col_partition = majority_vote(col_votes, d);
    out.g = out.row_partition.g;
    out.m = out.col_partition.g;

    // trace from the first sample matching the modal counts
    std::size_t pick = 0;
    for (std::size_t s = 0; s < out.diagnostics.per_sample_gm.size(); ++s) {
        if (out.diagnostics.per_sample_gm[s] == std::make_pair(out.g, out.m)) {
            pick = s;
            break;
        }
    }
    out.diagnostics.row_trace = row_traces[pick];
    out.diagnostics.col_trace = col_traces[pick];
    return out;
}

CoClusterResult ccot_gw(const DataMatrix& A, const gromov::GwConfig& gw,
                        const KernelConfig& kernel) {
    const Index n = A.rows(), d = A.cols();
    gromov::SimilarityMatrix Kr, Kc;
    if (kernel.kind == KernelKind::precomputed) {
        if (!kernel.Kr || !kernel.Kc)
            throw std::invalid_argument("ccot_gw: precomputed kernels not provided");
        if (kernel.Kr->size() != n || kernel.Kc->size() != d)
            throw std::invalid_argument("ccot_gw: precomputed kernel sizes mismatch");
        Kr = *kernel.Kr;
        Kc = *kernel.Kc;
    } else {
        Kr = gaussian_kernel_matrix(A.values, kernel.sigma);
        Kc = gaussian_kernel_matrix(A.values.transpose(), kernel.sigma);
    }

    gromov::BarycenterResult bary = gromov::barycenter(Kr, Kc, gw);

    AxisDetection rows = detect_axis(bary.beta_r);
    AxisDetection cols = detect_axis(bary.beta_c);

    CoClusterResult out;
    out.row_partition = std::move(rows.partition);
    out.col_partition = std::move(cols.partition);
    out.g = out.row_partition.g;
    out.m = out.col_partition.g;
    out.diagnostics.row_trace = std::move(rows.sorted_values);
    out.diagnostics.col_trace = std::move(cols.sorted_values);
    out.diagnostics.per_sample_gm.emplace_back(out.g, out.m);
    out.diagnostics.converged.push_back(bary.gamma_r.converged &&
                                        bary.gamma_c.converged);
    out.diagnostics.lambda_used = gw.lambda;
    out.diagnostics.samples_run = 1;
    out.diagnostics.barycenter_sweeps =
        static_cast<int>(bary.objective_trace.size());
    out.diagnostics.objective_trace = bary.objective_trace;
    return out;
}

}  // namespace otcc::coclust
