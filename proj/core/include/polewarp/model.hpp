#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "polewarp/linalg.hpp"
#include "polewarp/precision.hpp"
#include "polewarp/series.hpp"

namespace polewarp {

struct CoefficientTable;

/// A semi-explicit DAE  x' = f(x, v), 0 = g(x, v)  (m = 0 collapses it
/// to an ODE). Concrete systems provide residuals and Jacobians in both
/// double and high precision, plus the per-order recurrence hooks the
/// coefficient engine drives.
///
/// Model descriptors are immutable after construction; every method is
/// const and reentrant.
class DynamicalModel {
public:
    virtual ~DynamicalModel() = default;

    virtual int state_dim() const = 0;
    virtual int alg_dim() const { return 0; }
    virtual std::vector<std::string> state_names() const = 0;
    virtual std::vector<std::string> alg_names() const { return {}; }

    // -- double path (oracle integration, initialization) --
    virtual void eval_f(std::span<const double> x, std::span<const double> v,
                        std::span<double> out) const = 0;
    virtual void eval_g(std::span<const double> x, std::span<const double> v,
                        std::span<double> out) const;
    virtual void jac_g_v(std::span<const double> x, std::span<const double> v,
                         Matrix<double>& out) const;

    // -- high-precision path (equilibrium solve, coefficient engine) --
    virtual void eval_f(std::span<const HPReal> x, std::span<const HPReal> v,
                        std::span<HPReal> out) const = 0;
    virtual void eval_g(std::span<const HPReal> x, std::span<const HPReal> v,
                        std::span<HPReal> out) const;
    /// All four blocks of the DAE Jacobian at (x, v). For ODEs only
    /// f_x is filled.
    virtual void jacobians(std::span<const HPReal> x, std::span<const HPReal> v,
                           Matrix<HPReal>& f_x, Matrix<HPReal>& f_v,
                           Matrix<HPReal>& g_x, Matrix<HPReal>& g_v) const = 0;

    // -- differential-transformation hooks --
    /// Create any auxiliary series (trig pairs, products) at order 0.
    virtual void dt_init(CoefficientTable&) const {}
    /// Order-k coefficient of f along the stored series; reads orders
    /// <= k of X, V and aux.
    virtual void dt_f(const CoefficientTable& table, int k, std::span<HPReal> out) const = 0;
    /// Extend auxiliary series to order k (X is filled through k).
    virtual void dt_advance_aux(CoefficientTable&, int) const {}
    /// Known part of the order-k coefficient of g, i.e. everything
    /// except the g_v * V(k) contribution the engine solves for.
    virtual void dt_g_known(const CoefficientTable& table, int k, std::span<HPReal> out) const;
};

/// A root of the stacked residual [f; g] together with how well it was
/// satisfied.
struct EquilibriumPoint {
    std::vector<HPReal> x_star;
    std::vector<HPReal> v_star;
    HPReal residual_norm;
    int newton_iterations = 0;
};

struct NewtonOptions {
    int max_iterations = 50;
    /// Residual target as decimal exponent relative to the working
    /// precision: tol = 10^(-digits/2) unless overridden.
    double tolerance_override = 0.0;
};

/// Newton iteration on [f; g] = 0 from the supplied guess. Converges to
/// whatever root the basin contains; the caller is responsible for
/// supplying a guess near the designated equilibrium.
EquilibriumPoint find_sep(const DynamicalModel& model,
                          std::span<const HPReal> x_guess,
                          std::span<const HPReal> v_guess,
                          const NewtonOptions& opts = {});

/// Euclidean norm helpers shared by solvers and classifiers.
HPReal norm2(std::span<const HPReal> v);
double norm2(std::span<const double> v);

}  // namespace polewarp
