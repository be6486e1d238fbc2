#include "polewarp/dtengine.hpp"

#include <memory>

#include "polewarp/linalg.hpp"

namespace polewarp {

namespace dt {

void advance_sincos(const TaylorSeries& angle, TaylorSeries& sin_s, TaylorSeries& cos_s, int k) {
    const Precision prec = angle.precision();
    HPReal s_acc(prec), c_acc(prec);
    mpfr_t t, prod;
    mpfr_init2(t, prec.bits());
    mpfr_init2(prod, prec.bits());
    for (int j = 1; j <= k; ++j) {
        mpfr_mul_si(t, angle[j].raw(), j, MPFR_RNDN);
        mpfr_mul(prod, t, cos_s[k - j].raw(), MPFR_RNDN);
        mpfr_add(s_acc.raw(), s_acc.raw(), prod, MPFR_RNDN);
        mpfr_mul(prod, t, sin_s[k - j].raw(), MPFR_RNDN);
        mpfr_add(c_acc.raw(), c_acc.raw(), prod, MPFR_RNDN);
    }
    mpfr_clear(t);
    mpfr_clear(prod);
    const HPReal kk(static_cast<long>(k), prec);
    sin_s.append(s_acc / kk);
    cos_s.append(-(c_acc / kk));
}

}  // namespace dt

CoefficientTable propagate_coefficients(const DynamicalModel& model,
                                        const TaylorSeries& theta,
                                        std::span<const HPReal> x0,
                                        std::span<const HPReal> v0,
                                        int order,
                                        const PropagationOptions& opts) {
    const int n = model.state_dim();
    const int m = model.alg_dim();
    if (static_cast<int>(x0.size()) != n || static_cast<int>(v0.size()) != m)
        throw ConfigError("propagate_coefficients: initial condition dimensions mismatch");
    if (order < 1) throw ConfigError("propagate_coefficients: order must be >= 1");
    if (theta.order() < order - 1)
        throw ConfigError("propagate_coefficients: theta series too short for requested order");

    const Precision prec = x0.front().precision();

    if (m > 0) {
        std::vector<HPReal> g(static_cast<size_t>(m), HPReal(prec));
        model.eval_g(x0, v0, g);
        if (norm2(g) > HPReal(opts.consistency_tol, prec))
            throw NumericalError("propagation", "initial condition violates the algebraic constraints");
    }

    CoefficientTable table;
    table.prec = prec;
    table.X.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        TaylorSeries s;
        s.append(x0[static_cast<size_t>(i)]);
        table.X.push_back(std::move(s));
    }
    table.V.reserve(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) {
        TaylorSeries s;
        s.append(v0[static_cast<size_t>(j)]);
        table.V.push_back(std::move(s));
    }
    table.F.assign(static_cast<size_t>(n), TaylorSeries());
    model.dt_init(table);

    // The algebraic Jacobian at the expansion point is fixed across
    // orders: for g at most quadratic in v, the unknown-order terms of
    // the convolution are exactly g_v(x0,v0) * V(k).
    std::unique_ptr<LUDecomposition<HPReal>> alg_lu;
    if (m > 0) {
        Matrix<HPReal> f_x(n, n, HPReal(prec)), f_v(n, m, HPReal(prec));
        Matrix<HPReal> g_x(m, n, HPReal(prec)), g_v(m, m, HPReal(prec));
        model.jacobians(x0, v0, f_x, f_v, g_x, g_v);
        try {
            alg_lu = std::make_unique<LUDecomposition<HPReal>>(std::move(g_v));
        } catch (const SingularMatrixError&) {
            throw NumericalError("propagation", "singular algebraic Jacobian g_v at the initial condition");
        }
    }

    std::vector<HPReal> fk(static_cast<size_t>(n), HPReal(prec));
    std::vector<HPReal> gk(static_cast<size_t>(m), HPReal(prec));
    for (int k = 0; k < order; ++k) {
        model.dt_f(table, k, fk);
        for (int i = 0; i < n; ++i) table.F[static_cast<size_t>(i)].append(fk[static_cast<size_t>(i)]);

        const HPReal divisor(static_cast<long>(k + 1), prec);
        for (int i = 0; i < n; ++i) {
            const HPReal conv = convolve_at(theta, table.F[static_cast<size_t>(i)], k);
            table.X[static_cast<size_t>(i)].append(conv / divisor);
        }

        model.dt_advance_aux(table, k + 1);

        if (m > 0) {
            model.dt_g_known(table, k + 1, gk);
            for (auto& c : gk) c = -c;
            std::vector<HPReal> vk = alg_lu->solve(gk);
            for (int j = 0; j < m; ++j) table.V[static_cast<size_t>(j)].append(std::move(vk[static_cast<size_t>(j)]));
        }
        table.filled = k + 1;
    }
    return table;
}

CoefficientTable propagate_coefficients(const DynamicalModel& model,
                                        const TimeContractionMap& map,
                                        std::span<const HPReal> x0,
                                        std::span<const HPReal> v0,
                                        int order,
                                        const PropagationOptions& opts) {
    return propagate_coefficients(model, map.theta_series(order), x0, v0, order, opts);
}

IndicatorSeries indicator_coefficients(const CoefficientTable& table,
                                       std::span<const HPReal> x_star,
                                       int order) {
    if (table.X.empty()) throw ConfigError("indicator_coefficients: empty table");
    if (static_cast<int>(x_star.size()) != static_cast<int>(table.X.size()))
        throw ConfigError("indicator_coefficients: x_star dimension mismatch");
    if (table.filled < order)
        throw ConfigError("indicator_coefficients: table not filled to requested order");

    const Precision prec = table.prec;
    TaylorSeries d(order, prec);
    for (size_t i = 0; i < table.X.size(); ++i) {
        TaylorSeries e = table.X[i].truncated(order);
        e[0] = e[0] - x_star[i];
        for (int k = 0; k <= order; ++k) d[k] += convolve_at(e, e, k);
    }
    if (d[0] <= pow10(-20, prec))
        throw DegenerateStateError("initial state coincides with the target equilibrium (trivially stable)");

    IndicatorSeries ind;
    ind.h = series_scale(series_reciprocal(d, order), HPReal(-1L, prec));
    ind.d = std::move(d);
    ind.x_star.assign(x_star.begin(), x_star.end());
    return ind;
}

}  // namespace polewarp
