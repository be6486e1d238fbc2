#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polewarp/model.hpp"
#include "polewarp/series.hpp"
#include "polewarp/timewarp.hpp"

namespace polewarp {

/// Taylor coefficients of the transformed trajectory about tau = 0.
/// X holds one series per state, V one per algebraic variable, F the
/// coefficients of f along the trajectory, and aux whatever a model
/// registered (sine/cosine pairs and the like). Everything is filled
/// jointly order by order; `filled` is the highest complete order.
struct CoefficientTable {
    std::vector<TaylorSeries> X;
    std::vector<TaylorSeries> V;
    std::vector<TaylorSeries> F;
    std::map<std::string, TaylorSeries> aux;
    int filled = 0;
    Precision prec = Precision(Precision::kMinDigits);

    int order() const { return X.empty() ? -1 : X.front().order(); }
};

/// Squared-distance series d and indicator series h = -1/d for a
/// trajectory measured against the target equilibrium.
struct IndicatorSeries {
    TaylorSeries h;
    TaylorSeries d;
    std::vector<HPReal> x_star;
};

struct PropagationOptions {
    /// ||g(x0,v0)|| consistency gate on the initial condition.
    double consistency_tol = 1e-8;
};

/// Runs the order-by-order recurrence of the contracted DAE: for each k,
/// X(k+1) = [theta (*) F](k) / (k+1) with F the DT coefficients of f,
/// then the model's auxiliary series are advanced and V(k+1) recovered
/// from the linearized algebraic solve g_v V(k+1) = -known(k+1).
CoefficientTable propagate_coefficients(const DynamicalModel& model,
                                        const TaylorSeries& theta,
                                        std::span<const HPReal> x0,
                                        std::span<const HPReal> v0,
                                        int order,
                                        const PropagationOptions& opts = {});

CoefficientTable propagate_coefficients(const DynamicalModel& model,
                                        const TimeContractionMap& map,
                                        std::span<const HPReal> x0,
                                        std::span<const HPReal> v0,
                                        int order,
                                        const PropagationOptions& opts = {});

/// d = sum_i (X_i - x*_i) (*) (X_i - x*_i), h = -1/d. Throws
/// DegenerateStateError when the initial state sits on the equilibrium
/// (d_0 below 1e-20): the indicator recurrence has nothing to say there.
IndicatorSeries indicator_coefficients(const CoefficientTable& table,
                                       std::span<const HPReal> x_star,
                                       int order);

namespace dt {

/// Given the angle series `angle` filled through order k and its
/// sine/cosine companion series filled through k-1, append the order-k
/// sine and cosine coefficients:
///   S(k) = (1/k) sum_{j=1..k} j A(j) C(k-j)
///   C(k) = -(1/k) sum_{j=1..k} j A(j) S(k-j)
void advance_sincos(const TaylorSeries& angle, TaylorSeries& sin_s, TaylorSeries& cos_s, int k);

}  // namespace dt

}  // namespace polewarp
