#include "otcc/gromov.hpp"

#include <cmath>
#include <stdexcept>

namespace otcc::gromov {

namespace {

void check_kl_domain(const Matrix& K, const char* which) {
    if (!(K.array() > 0.0).all())
        throw std::invalid_argument(
            std::string("kullback_leibler loss requires strictly positive ") + which);
}

Matrix f1_of(const Matrix& K, Loss loss) {
    if (loss == Loss::squared) return K.array().square();
    return K.array() * K.array().log() - K.array();
}

Matrix f2_of(const Matrix& K, Loss loss) {
    if (loss == Loss::squared) return K.array().square();
    return K;
}

Matrix h1_of(const Matrix& K, Loss loss) {
    return K;  // same for both losses
}

Matrix h2_of(const Matrix& K, Loss loss) {
    if (loss == Loss::squared) return 2.0 * K;
    return K.array().log();
}

Matrix pseudo_cost(const Matrix& f1Ka, const Matrix& f2Kb, const Matrix& h1Ka,
                   const Matrix& h2Kb, const Vector& mu_a, const Vector& mu_b,
                   const Matrix& gamma) {
    Matrix C = -(h1Ka * gamma * h2Kb.transpose());
    C.colwise() += (f1Ka * mu_a).eval();
    C.rowwise() += (f2Kb * mu_b).transpose().eval();
    return C;
}

}  // namespace

SimilarityMatrix SimilarityMatrix::create(Matrix values) {
    if (values.rows() != values.cols())
        throw std::invalid_argument("similarity matrix must be square");
    if (!values.allFinite())
        throw std::invalid_argument("similarity matrix has non-finite entries");
    if ((values - values.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("similarity matrix must be symmetric");
    return SimilarityMatrix{std::move(values)};
}

double gw_cost(const SimilarityMatrix& Ka, const SimilarityMatrix& Kb,
               const Matrix& gamma, Loss loss) {
    if (gamma.rows() != Ka.size() || gamma.cols() != Kb.size())
        throw std::invalid_argument("gw_cost: coupling shape mismatch");
    if (loss == Loss::kullback_leibler) {
        check_kl_domain(Ka.values, "Ka");
        check_kl_domain(Kb.values, "Kb");
    }
    const Vector p = gamma.rowwise().sum();
    const Vector q = gamma.colwise().sum();
    const double c1 = p.dot(f1_of(Ka.values, loss) * p);
    const double c2 = q.dot(f2_of(Kb.values, loss) * q);
    const double cross =
        (gamma.array() *
         (h1_of(Ka.values, loss) * gamma * h2_of(Kb.values, loss).transpose()).array())
            .sum();
    return c1 + c2 - cross;
}

sinkhorn::Coupling entropic_gw_coupling(const SimilarityMatrix& Ka,
                                        const SimilarityMatrix& Kb,
                                        const EmpiricalMeasure& mu_a,
                                        const EmpiricalMeasure& mu_b,
                                        const GwConfig& cfg, const Matrix* init,
                                        double* cost_scale) {
    if (Ka.size() != mu_a.size() || Kb.size() != mu_b.size())
        throw std::invalid_argument("entropic_gw_coupling: size mismatch");
    if (cfg.lambda <= 0.0)
        throw std::invalid_argument("entropic_gw_coupling: lambda <= 0");
    if (cfg.loss == Loss::kullback_leibler) {
        check_kl_domain(Ka.values, "Ka");
        check_kl_domain(Kb.values, "Kb");
    }

    const Matrix f1Ka = f1_of(Ka.values, cfg.loss);
    const Matrix f2Kb = f2_of(Kb.values, cfg.loss);
    const Matrix h1Ka = h1_of(Ka.values, cfg.loss);
    const Matrix h2Kb = h2_of(Kb.values, cfg.loss);

    Matrix gamma = init ? *init : Matrix(mu_a.weights * mu_b.weights.transpose());

    double scale = cost_scale ? *cost_scale : 0.0;
    if (scale <= 0.0) {
        Matrix C0 = pseudo_cost(f1Ka, f2Kb, h1Ka, h2Kb, mu_a.weights,
                                mu_b.weights, gamma);
        C0.array() -= C0.minCoeff();
        scale = sinkhorn::median_positive(C0);
    }
    if (cost_scale) *cost_scale = scale;

    sinkhorn::SinkhornConfig inner = cfg.inner;
    inner.lambda = cfg.lambda;
    inner.normalize_cost = false;

    auto objective = [&](const Matrix& g) {
        return gw_cost(Ka, Kb, g, cfg.loss) -
               (scale / cfg.lambda) * sinkhorn::entropy(g);
    };

    sinkhorn::Coupling best;
    double best_obj = objective(gamma);
    bool have_best = false;

    for (int it = 0; it < cfg.fixed_point_iter; ++it) {
        Matrix C = pseudo_cost(f1Ka, f2Kb, h1Ka, h2Kb, mu_a.weights,
                               mu_b.weights, gamma);
        C.array() -= C.minCoeff();
        C /= scale;
        sinkhorn::Coupling sol =
            sinkhorn::solve(CostMatrix{std::move(C)}, mu_a, mu_b, inner);
        const double obj = objective(sol.gamma);
        const double change = (sol.gamma - gamma).cwiseAbs().sum();
        gamma = sol.gamma;
        if (!have_best || obj < best_obj) {
            best = std::move(sol);
            best_obj = obj;
            have_best = true;
        }
        if (change <= cfg.inner.tol) break;
    }
    if (!have_best) {
        // iteration cap of zero or the warm start already optimal; solve once
        // at the warm start to expose the factored form
        Matrix C = pseudo_cost(f1Ka, f2Kb, h1Ka, h2Kb, mu_a.weights,
                               mu_b.weights, gamma);
        C.array() -= C.minCoeff();
        C /= scale;
        best = sinkhorn::solve(CostMatrix{std::move(C)}, mu_a, mu_b, inner);
    }
    return best;
}

BarycenterResult barycenter(const SimilarityMatrix& Kr,
                            const SimilarityMatrix& Kc, const GwConfig& cfg) {
    if (std::abs(cfg.eps_r + cfg.eps_c - 1.0) > 1e-12 || cfg.eps_r < 0.0 ||
        cfg.eps_c < 0.0)
        throw std::invalid_argument("barycenter: eps weights must be >= 0 and sum to 1");
    const Index n = Kr.size(), d = Kc.size();
    const Index N = cfg.barycenter_size > 0 ? cfg.barycenter_size : std::min(n, d);
    if (N < 2) throw std::invalid_argument("barycenter: size must be >= 2");
    if (cfg.outer_iter < 1)
        throw std::invalid_argument("barycenter: outer_iter must be >= 1");

    const EmpiricalMeasure mu = EmpiricalMeasure::uniform(N);
    const EmpiricalMeasure mu_r = EmpiricalMeasure::uniform(n);
    const EmpiricalMeasure mu_c = EmpiricalMeasure::uniform(d);

    // Seed K with the row-kernel geometry restricted to N sampled points.
    // A structureless random K tends to trap the descent in couplings that
    // never recover the data's block structure.
    Rng rng(cfg.seed);
    Matrix K;
    if (N <= n) {
        std::vector<Index> idx = rng.sample_without_replacement(n, N);
        K.resize(N, N);
        for (Index i = 0; i < N; ++i)
            for (Index j = 0; j < N; ++j) K(i, j) = Kr.values(idx[i], idx[j]);
    } else {
        const double lo = std::min(Kr.values.minCoeff(), Kc.values.minCoeff());
        const double hi = std::max(Kr.values.maxCoeff(), Kc.values.maxCoeff());
        K.resize(N, N);
        for (Index i = 0; i < N; ++i)
            for (Index j = 0; j <= i; ++j)
                K(i, j) = K(j, i) = rng.uniform(lo, hi);
    }

    const Matrix mumuT = mu.weights * mu.weights.transpose();
    BarycenterResult out;
    sinkhorn::Coupling cr, cc;
    bool warm = false;
    double scale_r = 0.0, scale_c = 0.0;  // frozen after the first sweep
    double prev_obj = 0.0;

    for (int sweep = 0; sweep < cfg.outer_iter; ++sweep) {
        SimilarityMatrix Kbar{K};
        cr = entropic_gw_coupling(Kbar, Kr, mu, mu_r, cfg,
                                  warm ? &cr.gamma : nullptr, &scale_r);
        cc = entropic_gw_coupling(Kbar, Kc, mu, mu_c, cfg,
                                  warm ? &cc.gamma : nullptr, &scale_c);
        warm = true;

        if (cfg.loss == Loss::squared) {
            K = (cfg.eps_r * (cr.gamma * Kr.values * cr.gamma.transpose()) +
                 cfg.eps_c * (cc.gamma * Kc.values * cc.gamma.transpose()))
                    .cwiseQuotient(mumuT);
        } else {
            Matrix logK =
                (cfg.eps_r * (cr.gamma * Kr.values.array().log().matrix() *
                              cr.gamma.transpose()) +
                 cfg.eps_c * (cc.gamma * Kc.values.array().log().matrix() *
                              cc.gamma.transpose()))
                    .cwiseQuotient(mumuT);
            K = logK.array().exp();
        }
        K = ((K + K.transpose()) * 0.5).eval();

        SimilarityMatrix Knew{K};
        const double obj =
            cfg.eps_r * (gw_cost(Knew, Kr, cr.gamma, cfg.loss) -
                         (scale_r / cfg.lambda) * sinkhorn::entropy(cr.gamma)) +
            cfg.eps_c * (gw_cost(Knew, Kc, cc.gamma, cfg.loss) -
                         (scale_c / cfg.lambda) * sinkhorn::entropy(cc.gamma));
        out.objective_trace.push_back(obj);
        if (sweep > 0 &&
            std::abs(prev_obj - obj) <= 1e-8 * std::max(1.0, std::abs(prev_obj)))
            break;
        prev_obj = obj;
    }

    out.K = SimilarityMatrix{std::move(K)};
    out.beta_r = cr.beta;
    out.beta_c = cc.beta;
    out.gamma_r = std::move(cr);
    out.gamma_c = std::move(cc);
    return out;
}

}  // namespace otcc::gromov
