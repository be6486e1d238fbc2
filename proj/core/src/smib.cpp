#include "polewarp/smib.hpp"

#include <cmath>

#include "polewarp/dtengine.hpp"

namespace polewarp {

namespace {
const char* kSin = "sin_delta";
const char* kCos = "cos_delta";
}  // namespace

SmibModel::SmibModel(Params params)
    : params_(std::move(params)),
      m_d_(params_.inertia.to_double()),
      d_d_(params_.damping.to_double()),
      pm_d_(params_.p_mech.to_double()),
      pmax_d_(params_.p_max.to_double()) {
    if (!(m_d_ > 0.0)) throw ConfigError("smib: inertia M must be positive");
    if (d_d_ < 0.0) throw ConfigError("smib: damping D must be nonnegative");
    if (!(pmax_d_ > 0.0)) throw ConfigError("smib: Pmax must be positive");
    if (params_.p_mech > params_.p_max)
        throw ConfigError("smib: Pm exceeds Pmax, no equilibrium exists");
}

void SmibModel::eval_f(std::span<const double> x, std::span<const double>,
                       std::span<double> out) const {
    out[0] = x[1];
    out[1] = (pm_d_ - pmax_d_ * std::sin(x[0]) - d_d_ * x[1]) / m_d_;
}

void SmibModel::eval_f(std::span<const HPReal> x, std::span<const HPReal>,
                       std::span<HPReal> out) const {
    out[0] = x[1];
    out[1] = (params_.p_mech - params_.p_max * sin(x[0]) - params_.damping * x[1]) / params_.inertia;
}

void SmibModel::jacobians(std::span<const HPReal> x, std::span<const HPReal>,
                          Matrix<HPReal>& f_x, Matrix<HPReal>&, Matrix<HPReal>&,
                          Matrix<HPReal>&) const {
    const Precision prec = x.front().precision();
    f_x(0, 0) = HPReal(prec);
    f_x(0, 1) = HPReal(1L, prec);
    f_x(1, 0) = -params_.p_max * cos(x[0]) / params_.inertia;
    f_x(1, 1) = -params_.damping / params_.inertia;
}

void SmibModel::dt_init(CoefficientTable& table) const {
    TaylorSeries s, c;
    s.append(sin(table.X[0][0]));
    c.append(cos(table.X[0][0]));
    table.aux[kSin] = std::move(s);
    table.aux[kCos] = std::move(c);
}

void SmibModel::dt_f(const CoefficientTable& t, int k, std::span<HPReal> out) const {
    const auto& sin_s = t.aux.at(kSin);
    out[0] = t.X[1][k];
    out[1] = (-params_.p_max * sin_s[k] - params_.damping * t.X[1][k]) / params_.inertia;
    if (k == 0) out[1] += params_.p_mech / params_.inertia;
}

void SmibModel::dt_advance_aux(CoefficientTable& t, int k) const {
    dt::advance_sincos(t.X[0], t.aux.at(kSin), t.aux.at(kCos), k);
}

std::vector<HPReal> SmibModel::stable_equilibrium() const {
    const Precision prec = params_.p_mech.precision();
    return {asin(params_.p_mech / params_.p_max), HPReal(prec)};
}

}  // namespace polewarp
