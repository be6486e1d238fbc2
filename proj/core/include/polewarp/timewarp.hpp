#pragma once

#include "polewarp/precision.hpp"
#include "polewarp/series.hpp"

namespace polewarp {

/// Time contraction mapping tau = 1 - (K t + 1)^(-p). Maps t in
/// [0, inf) monotonically onto tau in [0, 1): the infinite-time horizon
/// becomes the finite point tau = 1.
class TimeContractionMap {
public:
    TimeContractionMap(double rate, int exponent, Precision prec);

    const HPReal& rate() const noexcept { return rate_; }
    int exponent() const noexcept { return exponent_; }
    /// The finite upper bound that t -> inf maps to (1 for this family).
    const HPReal& horizon() const noexcept { return horizon_; }
    Precision precision() const { return rate_.precision(); }

    /// tau = 1 - (K t + 1)^(-p), t >= 0.
    HPReal map_time(const HPReal& t) const;
    double map_time(double t) const;

    /// t = ((1 - tau)^(-1/p) - 1) / K, 0 <= tau < 1.
    HPReal inverse_map(const HPReal& tau) const;
    double inverse_map(double tau) const;

    /// Taylor coefficients about tau = 0 of theta(tau) = dt/dtau =
    /// (1/(pK)) (1-tau)^(-(p+1)/p), generated by the ratio recurrence
    /// Theta(k+1) = Theta(k) (k + (p+1)/p) / (k+1).
    TaylorSeries theta_series(int order) const;

private:
    HPReal rate_;
    int exponent_;
    HPReal horizon_;
};

}  // namespace polewarp
