#pragma once

#include "polewarp/model.hpp"

namespace polewarp {

/// Lorenz system  x' = sigma (y - x),  y' = x (rho - z) - y,
/// z' = x y - beta z.  For rho > 1 the nonzero equilibria sit at
/// (+-s, +-s, rho-1) with s = sqrt(beta (rho - 1)).
class LorenzModel : public DynamicalModel {
public:
    LorenzModel(HPReal sigma, HPReal rho, HPReal beta);

    int state_dim() const override { return 3; }
    std::vector<std::string> state_names() const override { return {"x", "y", "z"}; }

    void eval_f(std::span<const double> x, std::span<const double> v,
                std::span<double> out) const override;
    void eval_f(std::span<const HPReal> x, std::span<const HPReal> v,
                std::span<HPReal> out) const override;
    void jacobians(std::span<const HPReal> x, std::span<const HPReal> v,
                   Matrix<HPReal>& f_x, Matrix<HPReal>& f_v,
                   Matrix<HPReal>& g_x, Matrix<HPReal>& g_v) const override;

    void dt_f(const CoefficientTable& table, int k, std::span<HPReal> out) const override;

    /// The positive-branch equilibrium (s, s, rho-1), falling back to
    /// the origin when rho <= 1 has no off-origin equilibria.
    std::vector<HPReal> positive_equilibrium() const;

    const HPReal& sigma() const noexcept { return sigma_; }
    const HPReal& rho() const noexcept { return rho_; }
    const HPReal& beta() const noexcept { return beta_; }

private:
    HPReal sigma_, rho_, beta_;
    double sigma_d_, rho_d_, beta_d_;
};

}  // namespace polewarp
