#pragma once

#include <utility>
#include <vector>

#include "polewarp/model.hpp"
#include "polewarp/timewarp.hpp"

namespace polewarp {

/// Fixed-step integration record. States are stored at every accepted
/// step; `terminated` says whether the horizon was reached or the
/// trajectory left the blowup bound early.
struct Trajectory {
    enum class Termination { Horizon, Blowup };

    std::vector<double> times;
    std::vector<std::vector<double>> states;
    std::vector<std::vector<double>> algebraics;
    Termination terminated = Termination::Horizon;

    size_t size() const noexcept { return times.size(); }
};

struct Rk4Options {
    double blowup_norm = 1e6;
    /// ||g|| target for the per-stage algebraic solve.
    double algebraic_tol = 1e-11;
    int algebraic_max_iter = 25;
};

/// Classic RK4 on x' = f(x, v(x)) with g(x, v) = 0 resolved at every
/// stage evaluation (Newton, warm-started from the previous stage).
Trajectory rk4_integrate(const DynamicalModel& model,
                         std::span<const double> x0,
                         std::span<const double> v0,
                         double dt,
                         double horizon,
                         const Rk4Options& opts = {});

enum class OracleVerdict { Stable, UnstableOtherSEP, UnstableDivergent, Inconclusive };

const char* to_string(OracleVerdict v);

struct TruthOptions {
    double conv_tol = 1e-4;
    double horizon_fraction = 0.1;
    /// ||f|| bound under which the tail counts as settled.
    double settle_tol = 1e-3;
    /// Distance growth factor that marks a drifting trajectory divergent.
    double escape_factor = 4.0;
};

/// Ground-truth classification of a finished trajectory against the
/// designated equilibrium.
OracleVerdict truth_classify(const Trajectory& traj,
                             const DynamicalModel& model,
                             std::span<const double> x_star,
                             const TruthOptions& opts = {});

struct IndicatorSamples {
    std::vector<std::pair<double, double>> points;  // (tau, h)
    int skipped_at_equilibrium = 0;
};

/// Benchmark curve (tau, h) = (map(t), -1/||x - x*||^2) sampled along a
/// trajectory every `stride` steps.
IndicatorSamples indicator_along_trajectory(const Trajectory& traj,
                                            std::span<const double> x_star,
                                            const TimeContractionMap& map,
                                            int stride = 1);

/// High-precision RK4 endpoint for ODE models (m = 0): integrates from
/// x0 to t_target in `steps` equal steps. Negative targets integrate
/// backwards. Used by validation paths that need trajectory values well
/// beyond double accuracy.
std::vector<HPReal> rk4_state_at(const DynamicalModel& model,
                                 std::span<const HPReal> x0,
                                 const HPReal& t_target,
                                 int steps);

}  // namespace polewarp
