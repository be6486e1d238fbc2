#pragma once

#include "polewarp/model.hpp"

namespace polewarp {

/// Single machine infinite bus, classical swing model:
///   delta' = omega
///   omega' = (Pm - Pmax sin(delta) - D omega) / M
/// The designated equilibrium is (asin(Pm/Pmax), 0).
class SmibModel : public DynamicalModel {
public:
    struct Params {
        HPReal inertia;   // M > 0
        HPReal damping;   // D >= 0
        HPReal p_mech;    // Pm
        HPReal p_max;     // Pmax > 0
    };

    explicit SmibModel(Params params);

    int state_dim() const override { return 2; }
    std::vector<std::string> state_names() const override { return {"delta", "omega"}; }

    void eval_f(std::span<const double> x, std::span<const double> v,
                std::span<double> out) const override;
    void eval_f(std::span<const HPReal> x, std::span<const HPReal> v,
                std::span<HPReal> out) const override;
    void jacobians(std::span<const HPReal> x, std::span<const HPReal> v,
                   Matrix<HPReal>& f_x, Matrix<HPReal>& f_v,
                   Matrix<HPReal>& g_x, Matrix<HPReal>& g_v) const override;

    void dt_init(CoefficientTable& table) const override;
    void dt_f(const CoefficientTable& table, int k, std::span<HPReal> out) const override;
    void dt_advance_aux(CoefficientTable& table, int k) const override;

    /// (asin(Pm/Pmax), 0).
    std::vector<HPReal> stable_equilibrium() const;

    const Params& params() const noexcept { return params_; }

private:
    Params params_;
    double m_d_, d_d_, pm_d_, pmax_d_;
};

}  // namespace polewarp
