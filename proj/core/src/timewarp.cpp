#include "polewarp/timewarp.hpp"

#include <cmath>

namespace polewarp {

TimeContractionMap::TimeContractionMap(double rate, int exponent, Precision prec)
    : rate_(rate, prec), exponent_(exponent), horizon_(1L, prec) {
    if (!(rate > 0.0)) throw ConfigError("mapping.K must be positive");
    if (exponent < 1) throw ConfigError("mapping.p must be >= 1");
}

HPReal TimeContractionMap::map_time(const HPReal& t) const {
    if (t.is_negative()) throw ConfigError("map_time requires t >= 0");
    const HPReal one(1L, precision());
    return one - pow(rate_ * t + one, -static_cast<long>(exponent_));
}

double TimeContractionMap::map_time(double t) const {
    if (t < 0.0) throw ConfigError("map_time requires t >= 0");
    return 1.0 - std::pow(rate_.to_double() * t + 1.0, -static_cast<double>(exponent_));
}

HPReal TimeContractionMap::inverse_map(const HPReal& tau) const {
    const HPReal one(1L, precision());
    if (tau.is_negative() || tau >= one)
        throw ConfigError("inverse_map requires 0 <= tau < 1");
    return (nth_root(one / (one - tau), static_cast<unsigned long>(exponent_)) - one) / rate_;
}

double TimeContractionMap::inverse_map(double tau) const {
    if (tau < 0.0 || tau >= 1.0) throw ConfigError("inverse_map requires 0 <= tau < 1");
    return (std::pow(1.0 - tau, -1.0 / exponent_) - 1.0) / rate_.to_double();
}

TaylorSeries TimeContractionMap::theta_series(int order) const {
    const Precision prec = precision();
    TaylorSeries theta(order, prec);
    const HPReal p(static_cast<long>(exponent_), prec);
    const HPReal growth = (p + HPReal(1L, prec)) / p;  // (p+1)/p
    theta[0] = HPReal(1L, prec) / (p * rate_);
    for (int k = 0; k < order; ++k) {
        const HPReal kk(static_cast<long>(k), prec);
        theta[k + 1] = theta[k] * (kk + growth) / (kk + HPReal(1L, prec));
    }
    return theta;
}

}  // namespace polewarp
