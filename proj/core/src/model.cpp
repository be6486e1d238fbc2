#include "polewarp/model.hpp"

#include <cmath>

namespace polewarp {

void DynamicalModel::eval_g(std::span<const double>, std::span<const double>,
                            std::span<double>) const {}

void DynamicalModel::jac_g_v(std::span<const double>, std::span<const double>,
                             Matrix<double>&) const {}

void DynamicalModel::eval_g(std::span<const HPReal>, std::span<const HPReal>,
                            std::span<HPReal>) const {}

void DynamicalModel::dt_g_known(const CoefficientTable&, int, std::span<HPReal>) const {}

HPReal norm2(std::span<const HPReal> v) {
    if (v.empty()) return HPReal();
    HPReal acc(v.front().precision());
    for (const auto& c : v) acc += c * c;
    return sqrt(acc);
}

double norm2(std::span<const double> v) {
    double acc = 0.0;
    for (double c : v) acc += c * c;
    return std::sqrt(acc);
}

EquilibriumPoint find_sep(const DynamicalModel& model,
                          std::span<const HPReal> x_guess,
                          std::span<const HPReal> v_guess,
                          const NewtonOptions& opts) {
    const int n = model.state_dim();
    const int m = model.alg_dim();
    if (static_cast<int>(x_guess.size()) != n || static_cast<int>(v_guess.size()) != m)
        throw ConfigError("find_sep: guess dimensions do not match the model");

    const Precision prec = x_guess.empty() ? Precision(Precision::kMinDigits)
                                           : x_guess.front().precision();
    const HPReal tol = opts.tolerance_override > 0.0
                           ? HPReal(opts.tolerance_override, prec)
                           : pow10(-(prec.digits() / 2), prec);

    std::vector<HPReal> x(x_guess.begin(), x_guess.end());
    std::vector<HPReal> v(v_guess.begin(), v_guess.end());
    std::vector<HPReal> res(static_cast<size_t>(n + m), HPReal(prec));

    Matrix<HPReal> f_x(n, n, HPReal(prec)), f_v(n, m, HPReal(prec));
    Matrix<HPReal> g_x(m, n, HPReal(prec)), g_v(m, m, HPReal(prec));

    for (int it = 0; it < opts.max_iterations; ++it) {
        model.eval_f(x, v, std::span<HPReal>(res.data(), static_cast<size_t>(n)));
        if (m > 0) model.eval_g(x, v, std::span<HPReal>(res.data() + n, static_cast<size_t>(m)));
        const HPReal rnorm = norm2(res);
        if (rnorm <= tol)
            return EquilibriumPoint{std::move(x), std::move(v), rnorm, it};

        model.jacobians(x, v, f_x, f_v, g_x, g_v);
        Matrix<HPReal> jac(n + m, n + m, HPReal(prec));
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) jac(r, c) = f_x(r, c);
            for (int c = 0; c < m; ++c) jac(r, n + c) = f_v(r, c);
        }
        for (int r = 0; r < m; ++r) {
            for (int c = 0; c < n; ++c) jac(n + r, c) = g_x(r, c);
            for (int c = 0; c < m; ++c) jac(n + r, n + c) = g_v(r, c);
        }
        std::vector<HPReal> step;
        bool regularize = false;
        try {
            step = lu_solve(jac, std::span<const HPReal>(res));
        } catch (const SingularMatrixError&) {
            regularize = true;
        }
        if (!regularize) {
            HPReal scale(1L, prec);
            for (const auto& c : x) scale += abs(c);
            for (const auto& c : v) scale += abs(c);
            if (norm2(step) > HPReal(1e6, prec) * scale) regularize = true;
        }
        if (regularize) {
            // Models with a continuous symmetry (the multi-machine network is
            // invariant under a uniform rotor-angle rotation) have a
            // structurally rank-deficient Jacobian, so the plain Newton step
            // blows up along the null direction. Take a damped least-squares
            // step instead: it reproduces the Newton step on the regular
            // subspace and leaves the symmetry direction untouched, pinning
            // the gauge at the supplied guess.
            const int nm = n + m;
            Matrix<HPReal> ata(nm, nm, HPReal(prec));
            std::vector<HPReal> atb(static_cast<size_t>(nm), HPReal(prec));
            for (int i = 0; i < nm; ++i) {
                for (int j = 0; j <= i; ++j) {
                    HPReal acc(prec);
                    for (int k = 0; k < nm; ++k) acc += jac(k, i) * jac(k, j);
                    ata(i, j) = acc;
                    ata(j, i) = acc;
                }
                HPReal acc(prec);
                for (int k = 0; k < nm; ++k) acc += jac(k, i) * res[static_cast<size_t>(k)];
                atb[static_cast<size_t>(i)] = acc;
            }
            HPReal maxdiag(prec);
            for (int i = 0; i < nm; ++i)
                if (ata(i, i) > maxdiag) maxdiag = ata(i, i);
            // Damping proportional to the residual reproduces the plain
            // Newton step on the regular subspace as the iteration
            // converges; the additive floor keeps the normal equations
            // solvable at working precision once the residual is tiny.
            const HPReal mu = (HPReal(10, prec) * rnorm + pow10(10 - prec.digits(), prec)) *
                              (maxdiag + HPReal(1L, prec));
            for (int i = 0; i < nm; ++i) ata(i, i) += mu;
            try {
                step = lu_solve(std::move(ata), std::span<const HPReal>(atb));
            } catch (const SingularMatrixError&) {
                throw ConvergenceError("sep-solve",
                                       "singular Jacobian at Newton iterate " + std::to_string(it));
            }
        }
        for (int i = 0; i < n; ++i) x[static_cast<size_t>(i)] -= step[static_cast<size_t>(i)];
        for (int i = 0; i < m; ++i) v[static_cast<size_t>(i)] -= step[static_cast<size_t>(n + i)];
    }
    throw ConvergenceError("sep-solve",
                           "Newton did not reach tolerance 10^-" + std::to_string(prec.digits() / 2) +
                               " in " + std::to_string(opts.max_iterations) + " iterations");
}

}  // namespace polewarp
