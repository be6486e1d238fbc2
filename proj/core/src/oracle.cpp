#include "polewarp/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace polewarp {

namespace {

// Newton on g(x, .) = 0, warm-started at v. Linear-in-v networks land
// in one iteration.
void solve_algebraic(const DynamicalModel& model, std::span<const double> x,
                     std::vector<double>& v, const Rk4Options& opts) {
    const int m = model.alg_dim();
    if (m == 0) return;
    std::vector<double> g(static_cast<size_t>(m));
    Matrix<double> jac(m, m);
    for (int it = 0; it < opts.algebraic_max_iter; ++it) {
        model.eval_g(x, v, g);
        if (norm2(g) <= opts.algebraic_tol) return;
        model.jac_g_v(x, v, jac);
        std::vector<double> step;
        try {
            step = lu_solve(jac, std::span<const double>(g));
        } catch (const SingularMatrixError&) {
            throw NumericalError("oracle", "singular network matrix during algebraic solve");
        }
        for (int i = 0; i < m; ++i) v[static_cast<size_t>(i)] -= step[static_cast<size_t>(i)];
    }
    model.eval_g(x, v, g);
    if (norm2(g) > opts.algebraic_tol)
        throw ConvergenceError("oracle", "algebraic solve failed mid-trajectory");
}

void deriv(const DynamicalModel& model, std::span<const double> x,
           std::vector<double>& v_work, std::span<double> dx, const Rk4Options& opts) {
    solve_algebraic(model, x, v_work, opts);
    model.eval_f(x, v_work, dx);
}

}  // namespace

Trajectory rk4_integrate(const DynamicalModel& model,
                         std::span<const double> x0,
                         std::span<const double> v0,
                         double dt,
                         double horizon,
                         const Rk4Options& opts) {
    if (!(dt > 0.0)) throw ConfigError("rk4: dt must be positive");
    const int n = model.state_dim();
    const size_t nn = static_cast<size_t>(n);

    Trajectory traj;
    const auto steps = static_cast<long>(std::llround(horizon / dt));
    traj.times.reserve(static_cast<size_t>(steps) + 1);
    traj.states.reserve(static_cast<size_t>(steps) + 1);

    std::vector<double> x(x0.begin(), x0.end());
    std::vector<double> v(v0.begin(), v0.end());
    solve_algebraic(model, x, v, opts);

    std::vector<double> k1(nn), k2(nn), k3(nn), k4(nn), xs(nn);

    auto record = [&](double t) {
        traj.times.push_back(t);
        traj.states.push_back(x);
        if (model.alg_dim() > 0) traj.algebraics.push_back(v);
    };
    record(0.0);

    for (long s = 0; s < steps; ++s) {
        deriv(model, x, v, k1, opts);
        for (size_t i = 0; i < nn; ++i) xs[i] = x[i] + 0.5 * dt * k1[i];
        deriv(model, xs, v, k2, opts);
        for (size_t i = 0; i < nn; ++i) xs[i] = x[i] + 0.5 * dt * k2[i];
        deriv(model, xs, v, k3, opts);
        for (size_t i = 0; i < nn; ++i) xs[i] = x[i] + dt * k3[i];
        deriv(model, xs, v, k4, opts);
        for (size_t i = 0; i < nn; ++i)
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        solve_algebraic(model, x, v, opts);
        record(dt * static_cast<double>(s + 1));
        if (norm2(x) > opts.blowup_norm || !std::all_of(x.begin(), x.end(), [](double c) { return std::isfinite(c); })) {
            traj.terminated = Trajectory::Termination::Blowup;
            break;
        }
    }
    return traj;
}

const char* to_string(OracleVerdict v) {
    switch (v) {
        case OracleVerdict::Stable: return "Stable";
        case OracleVerdict::UnstableOtherSEP: return "UnstableOtherSEP";
        case OracleVerdict::UnstableDivergent: return "UnstableDivergent";
        case OracleVerdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

OracleVerdict truth_classify(const Trajectory& traj,
                             const DynamicalModel& model,
                             std::span<const double> x_star,
                             const TruthOptions& opts) {
    if (traj.size() == 0) throw ConfigError("truth_classify: empty trajectory");
    if (traj.terminated == Trajectory::Termination::Blowup) return OracleVerdict::UnstableDivergent;

    const size_t count = traj.size();
    const size_t tail_start =
        count - std::max<size_t>(1, static_cast<size_t>(std::ceil(opts.horizon_fraction * static_cast<double>(count))));

    auto dist = [&](size_t idx) {
        double acc = 0.0;
        for (size_t i = 0; i < x_star.size(); ++i) {
            const double d = traj.states[idx][i] - x_star[i];
            acc += d * d;
        }
        return std::sqrt(acc);
    };

    double tail_max_dist = 0.0;
    for (size_t s = tail_start; s < count; ++s) tail_max_dist = std::max(tail_max_dist, dist(s));
    if (tail_max_dist <= opts.conv_tol) return OracleVerdict::Stable;

    const int n = model.state_dim();
    std::vector<double> f(static_cast<size_t>(n));
    std::vector<double> empty;
    double tail_max_speed = 0.0;
    for (size_t s = tail_start; s < count; ++s) {
        std::span<const double> v = traj.algebraics.empty()
                                        ? std::span<const double>(empty)
                                        : std::span<const double>(traj.algebraics[s]);
        model.eval_f(traj.states[s], v, f);
        tail_max_speed = std::max(tail_max_speed, norm2(f));
    }
    if (tail_max_speed <= opts.settle_tol) return OracleVerdict::UnstableOtherSEP;

    const double d_first = dist(0);
    const double d_tail_start = dist(tail_start);
    const double d_end = dist(count - 1);
    if (d_end >= opts.escape_factor * std::max(d_first, 1.0) && d_end >= d_tail_start)
        return OracleVerdict::UnstableDivergent;

    return OracleVerdict::Inconclusive;
}

IndicatorSamples indicator_along_trajectory(const Trajectory& traj,
                                            std::span<const double> x_star,
                                            const TimeContractionMap& map,
                                            int stride) {
    if (stride < 1) stride = 1;
    IndicatorSamples out;
    out.points.reserve(traj.size() / static_cast<size_t>(stride) + 1);
    for (size_t s = 0; s < traj.size(); s += static_cast<size_t>(stride)) {
        double acc = 0.0;
        for (size_t i = 0; i < x_star.size(); ++i) {
            const double d = traj.states[s][i] - x_star[i];
            acc += d * d;
        }
        if (acc == 0.0) {
            ++out.skipped_at_equilibrium;
            continue;
        }
        out.points.emplace_back(map.map_time(traj.times[s]), -1.0 / acc);
    }
    return out;
}

std::vector<HPReal> rk4_state_at(const DynamicalModel& model,
                                 std::span<const HPReal> x0,
                                 const HPReal& t_target,
                                 int steps) {
    if (model.alg_dim() != 0)
        throw ConfigError("rk4_state_at supports ODE models only");
    if (steps < 1) throw ConfigError("rk4_state_at: steps must be >= 1");
    const Precision prec = x0.front().precision();
    const size_t nn = x0.size();
    const HPReal dt = t_target / HPReal(static_cast<long>(steps), prec);
    const HPReal half(0.5, prec), sixth = HPReal(1L, prec) / HPReal(6L, prec), two(2L, prec);

    std::vector<HPReal> x(x0.begin(), x0.end());
    std::vector<HPReal> k1(nn, HPReal(prec)), k2(nn, HPReal(prec)), k3(nn, HPReal(prec)),
        k4(nn, HPReal(prec)), xs(nn, HPReal(prec));
    std::vector<HPReal> none;

    for (int s = 0; s < steps; ++s) {
        model.eval_f(x, none, k1);
        for (size_t i = 0; i < nn; ++i) xs[i] = x[i] + half * dt * k1[i];
        model.eval_f(xs, none, k2);
        for (size_t i = 0; i < nn; ++i) xs[i] = x[i] + half * dt * k2[i];
        model.eval_f(xs, none, k3);
        for (size_t i = 0; i < nn; ++i) xs[i] = x[i] + dt * k3[i];
        model.eval_f(xs, none, k4);
        for (size_t i = 0; i < nn; ++i)
            x[i] += dt * sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
    }
    return x;
}

}  // namespace polewarp
