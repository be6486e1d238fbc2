#include "polewarp/lorenz.hpp"

#include "polewarp/dtengine.hpp"

namespace polewarp {

LorenzModel::LorenzModel(HPReal sigma, HPReal rho, HPReal beta)
    : sigma_(std::move(sigma)),
      rho_(std::move(rho)),
      beta_(std::move(beta)),
      sigma_d_(sigma_.to_double()),
      rho_d_(rho_.to_double()),
      beta_d_(beta_.to_double()) {
    if (!is_finite(sigma_) || !is_finite(rho_) || !is_finite(beta_))
        throw ConfigError("lorenz parameters must be finite");
}

void LorenzModel::eval_f(std::span<const double> x, std::span<const double>,
                         std::span<double> out) const {
    out[0] = sigma_d_ * (x[1] - x[0]);
    out[1] = x[0] * (rho_d_ - x[2]) - x[1];
    out[2] = x[0] * x[1] - beta_d_ * x[2];
}

void LorenzModel::eval_f(std::span<const HPReal> x, std::span<const HPReal>,
                         std::span<HPReal> out) const {
    out[0] = sigma_ * (x[1] - x[0]);
    out[1] = x[0] * (rho_ - x[2]) - x[1];
    out[2] = x[0] * x[1] - beta_ * x[2];
}

void LorenzModel::jacobians(std::span<const HPReal> x, std::span<const HPReal>,
                            Matrix<HPReal>& f_x, Matrix<HPReal>&, Matrix<HPReal>&,
                            Matrix<HPReal>&) const {
    const Precision prec = x.front().precision();
    const HPReal one(1L, prec);
    f_x(0, 0) = -sigma_;
    f_x(0, 1) = sigma_;
    f_x(0, 2) = HPReal(prec);
    f_x(1, 0) = rho_ - x[2];
    f_x(1, 1) = -one;
    f_x(1, 2) = -x[0];
    f_x(2, 0) = x[1];
    f_x(2, 1) = x[0];
    f_x(2, 2) = -beta_;
}

void LorenzModel::dt_f(const CoefficientTable& t, int k, std::span<HPReal> out) const {
    const auto& X = t.X[0];
    const auto& Y = t.X[1];
    const auto& Z = t.X[2];
    out[0] = sigma_ * (Y[k] - X[k]);
    out[1] = rho_ * X[k] - convolve_at(X, Z, k) - Y[k];
    out[2] = convolve_at(X, Y, k) - beta_ * Z[k];
}

std::vector<HPReal> LorenzModel::positive_equilibrium() const {
    const Precision prec = sigma_.precision();
    const HPReal one(1L, prec);
    if (rho_ <= one) return {HPReal(prec), HPReal(prec), HPReal(prec)};
    const HPReal s = sqrt(beta_ * (rho_ - one));
    return {s, s, rho_ - one};
}

}  // namespace polewarp
