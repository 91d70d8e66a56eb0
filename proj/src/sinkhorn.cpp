#include "otcc/sinkhorn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace otcc::sinkhorn {

namespace {

// log-sum-exp over each row of X
Vector lse_rows(const Matrix& X) {
    Vector m = X.rowwise().maxCoeff();
    Vector out(X.rows());
    for (Index i = 0; i < X.rows(); ++i) {
        if (!std::isfinite(m[i])) {  // all -inf row
            out[i] = m[i];
            continue;
        }
        out[i] = m[i] + std::log((X.row(i).array() - m[i]).exp().sum());
    }
    return out;
}

double lse_all(const Matrix& X) {
    const double m = X.maxCoeff();
    if (!std::isfinite(m)) return m;
    return m + std::log((X.array() - m).exp().sum());
}

struct NormalResult {
    Vector a, b;
    int iters = 0;
    double viol = 0.0;
    bool converged = false;
    bool degenerate = false;
};

NormalResult run_normal(const Matrix& K, const Vector& mu, const Vector& nu,
                        const SinkhornConfig& cfg) {
    NormalResult r;
    r.a = Vector::Ones(mu.size());
    r.b = Vector::Ones(nu.size());
    r.viol = std::numeric_limits<double>::infinity();
    while (r.iters < cfg.max_iter) {
        Vector Kb = K * r.b;
        if (!(Kb.array() > 0.0).all() || !Kb.allFinite()) {
            r.degenerate = true;
            return r;
        }
        r.a = mu.array() / Kb.array();
        Vector Ka = K.transpose() * r.a;
        if (!(Ka.array() > 0.0).all() || !Ka.allFinite()) {
            r.degenerate = true;
            return r;
        }
        r.b = nu.array() / Ka.array();
        ++r.iters;
        if (r.iters % 10 == 0 || r.iters == cfg.max_iter) {
            Vector row = r.a.array() * (K * r.b).array();
            Vector col = r.b.array() * (K.transpose() * r.a).array();
            r.viol = std::max((row - mu).cwiseAbs().sum(),
                              (col - nu).cwiseAbs().sum());
            if (r.viol <= cfg.tol) {
                r.converged = true;
                break;
            }
        }
    }
    return r;
}

struct LogResult {
    Vector f, g;
    int iters = 0;
    double viol = 0.0;
    bool converged = false;
};

LogResult run_log(const Matrix& lK, const Vector& mu, const Vector& nu,
                  const SinkhornConfig& cfg) {
    LogResult r;
    r.f = Vector::Zero(mu.size());
    r.g = Vector::Zero(nu.size());
    r.viol = std::numeric_limits<double>::infinity();
    const Vector lmu = mu.array().log();
    const Vector lnu = nu.array().log();
    while (r.iters < cfg.max_iter) {
        r.f = lmu - lse_rows(lK.rowwise() + r.g.transpose());
        r.g = lnu - lse_rows((lK.colwise() + r.f).transpose());
        ++r.iters;
        if (r.iters % 10 == 0 || r.iters == cfg.max_iter) {
            Vector row = (r.f + lse_rows(lK.rowwise() + r.g.transpose())).array().exp();
            Vector col = (r.g + lse_rows((lK.colwise() + r.f).transpose())).array().exp();
            r.viol = std::max((row - mu).cwiseAbs().sum(),
                              (col - nu).cwiseAbs().sum());
            if (r.viol <= cfg.tol) {
                r.converged = true;
                break;
            }
        }
    }
    return r;
}

}  // namespace

double median_positive(const Matrix& M) {
    std::vector<double> pos;
    pos.reserve(static_cast<std::size_t>(M.size()));
    for (Index j = 0; j < M.cols(); ++j)
        for (Index i = 0; i < M.rows(); ++i)
            if (M(i, j) > 0.0) pos.push_back(M(i, j));
    if (pos.empty()) return 1.0;
    const std::size_t mid = (pos.size() - 1) / 2;
    std::nth_element(pos.begin(), pos.begin() + mid, pos.end());
    return pos[mid];
}

Matrix gibbs_kernel(const CostMatrix& M, double lambda) {
    if (lambda <= 0.0) throw std::invalid_argument("gibbs_kernel: lambda <= 0");
    if (!M.values.allFinite())
        throw std::invalid_argument("gibbs_kernel: non-finite cost");
    Matrix K = (-lambda * M.values.array()).exp();
    for (Index i = 0; i < K.rows(); ++i)
        if ((K.row(i).array() == 0.0).all())
            throw std::domain_error(
                "gibbs_kernel: a full row underflowed to zero; use log-domain mode");
    for (Index j = 0; j < K.cols(); ++j)
        if ((K.col(j).array() == 0.0).all())
            throw std::domain_error(
                "gibbs_kernel: a full column underflowed to zero; use log-domain mode");
    return K;
}

Coupling solve(const CostMatrix& M, const EmpiricalMeasure& mu_r,
               const EmpiricalMeasure& mu_c, const SinkhornConfig& cfg) {
    if (M.rows() != mu_r.size() || M.cols() != mu_c.size())
        throw std::invalid_argument("sinkhorn::solve: shape mismatch");
    if (cfg.lambda <= 0.0 || cfg.tol <= 0.0 || cfg.max_iter < 1)
        throw std::invalid_argument("sinkhorn::solve: invalid config");
    if (!(mu_r.weights.array() > 0.0).all() || !(mu_c.weights.array() > 0.0).all())
        throw std::invalid_argument("sinkhorn::solve: measures must be strictly positive");

    Coupling out;
    out.cost_scale = cfg.normalize_cost ? median_positive(M.values) : 1.0;
    const Matrix Mh = M.values / out.cost_scale;
    const Vector& mu = mu_r.weights;
    const Vector& nu = mu_c.weights;

    bool use_log = cfg.log_domain == Stabilization::on;
    if (cfg.log_domain == Stabilization::automatic)
        use_log = cfg.lambda * Mh.maxCoeff() > 200.0;

    if (!use_log) {
        Matrix K = (-cfg.lambda * Mh.array()).exp();
        NormalResult r = run_normal(K, mu, nu, cfg);
        if (r.degenerate) {
            if (cfg.log_domain == Stabilization::off)
                throw std::domain_error(
                    "sinkhorn::solve: degenerate kernel in fixed normal mode; "
                    "enable log-domain stabilization");
            use_log = true;
        } else {
            // gauge: ||alpha||_1 = ||beta||_1, then total mass exactly one
            const double c = std::sqrt(r.b.sum() / r.a.sum());
            r.a *= c;
            r.b /= c;
            const double t = r.a.dot(K * r.b);
            r.a /= std::sqrt(t);
            r.b /= std::sqrt(t);
            out.alpha = r.a;
            out.beta = r.b;
            out.xi = std::move(K);
            out.gamma = out.alpha.asDiagonal() * out.xi * out.beta.asDiagonal();
            out.iterations_used = r.iters;
            out.marginal_violation = r.viol;
            out.converged = r.converged;
            out.log_stabilized = false;
            return out;
        }
    }

    const Matrix lK = -cfg.lambda * Mh;
    LogResult r = run_log(lK, mu, nu, cfg);
    // gauge fixing in log space
    const double sf = lse_all(r.f.transpose());
    const double sg = lse_all(r.g.transpose());
    r.f.array() += (sg - sf) / 2.0;
    r.g.array() += (sf - sg) / 2.0;
    Matrix lg = (lK.colwise() + r.f).rowwise() + r.g.transpose();
    const double lt = lse_all(lg);
    r.f.array() -= lt / 2.0;
    r.g.array() -= lt / 2.0;
    lg.array() -= lt;
    out.alpha = r.f.array().exp();
    out.beta = r.g.array().exp();
    out.xi = lK.array().exp();
    out.gamma = lg.array().exp();
    out.iterations_used = r.iters;
    out.marginal_violation = r.viol;
    out.converged = r.converged;
    out.log_stabilized = true;
    return out;
}

double transport_cost(const Matrix& gamma, const Matrix& M) {
    if (gamma.rows() != M.rows() || gamma.cols() != M.cols())
        throw std::invalid_argument("transport_cost: shape mismatch");
    return (gamma.array() * M.array()).sum();
}

double transport_cost(const Coupling& c, const CostMatrix& M) {
    return transport_cost(c.gamma, M.values);
}

double entropy(const Matrix& gamma) {
    double e = 0.0;
    for (Index j = 0; j < gamma.cols(); ++j)
        for (Index i = 0; i < gamma.rows(); ++i) {
            const double g = gamma(i, j);
            if (g > 0.0) e -= g * std::log(g);
        }
    return e;
}

double entropy(const Coupling& c) { return entropy(c.gamma); }

}  // namespace otcc::sinkhorn
