#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "polewarp/model.hpp"
#include "polewarp/precision.hpp"

namespace polewarp {

/// Bus/branch/machine data for the three-machine nine-bus network,
/// loaded from JSON. All quantities are per-unit on the system base;
/// branch B is the total line-charging susceptance.
struct NetworkData {
    enum class BusType { Slack, PV, PQ };

    struct Bus {
        int id = 0;
        BusType type = BusType::PQ;
        double v_setpoint = 1.0;  // slack and PV buses
        double p_gen = 0.0;       // PV buses
    };
    struct Branch {
        int from = 0;
        int to = 0;
        double r = 0.0;
        double x = 0.0;
        double b = 0.0;
    };
    struct Load {
        int bus = 0;
        double p = 0.0;
        double q = 0.0;
    };
    struct Machine {
        int bus = 0;
        double h = 0.0;         // inertia constant, seconds
        double xd_prime = 0.0;  // transient reactance
        double damping = 0.0;   // p.u. power per rad/s of speed deviation
    };

    double base_mva = 100.0;
    double frequency_hz = 60.0;
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    std::vector<Load> loads;
    std::vector<Machine> machines;

    int bus_index(int id) const;  // external id -> 0-based position
};

NetworkData load_network_data(const std::string& path);

/// Operating point from the Newton-Raphson power flow: polar voltages
/// plus the net injections realized at every bus.
struct PowerFlowSolution {
    std::vector<std::complex<double>> v;
    std::vector<double> p_injection;
    std::vector<double> q_injection;
    int iterations = 0;
    double mismatch = 0.0;
};

PowerFlowSolution solve_power_flow(const NetworkData& net);

enum class NetworkState { Prefault, FaultOn, Postfault };

/// Three-phase fault applied at a bus through R + jX, cleared after
/// clearing_time seconds (no line trip: the post-fault network equals
/// the prefault one).
struct FaultSpec {
    int bus = 9;
    double r = 0.01;
    double x = 0.02;
    double clearing_time = 0.25;
};

class Wscc9Model;

/// Owns the network data, its solved operating point, and the derived
/// classical-machine internals (E, delta0, Pm); hands out immutable DAE
/// models per network state. Loads are folded into the admittance
/// matrix as constant impedances unless constant_power_loads is set, in
/// which case load buses carry quadratic power-balance rows instead.
class Wscc9System {
public:
    Wscc9System(NetworkData data, bool constant_power_loads, Precision prec);
    Wscc9System(const std::string& data_path, bool constant_power_loads, Precision prec);

    const NetworkData& data() const noexcept { return data_; }
    const PowerFlowSolution& operating_point() const noexcept { return pf_; }
    int n_bus() const noexcept { return static_cast<int>(data_.buses.size()); }
    int n_machines() const noexcept { return static_cast<int>(data_.machines.size()); }
    Precision precision() const noexcept { return prec_; }

    /// Internal EMF magnitude / initial rotor angle / mechanical power
    /// per machine, from the operating point.
    const std::vector<double>& emf() const noexcept { return emf_; }
    const std::vector<double>& delta0() const noexcept { return delta0_; }
    const std::vector<double>& p_mech() const noexcept { return pmech_; }

    std::shared_ptr<const Wscc9Model> model(NetworkState state,
                                            const std::optional<FaultSpec>& fault = {}) const;

    /// Consistent prefault DAE point in the model's machine-1 frame:
    /// relative rotor angles delta0_k - delta0_1, zero speed deviation,
    /// and the power-flow voltages rotated by -delta0_1 (rectangular).
    std::vector<double> prefault_state() const;
    std::vector<double> prefault_algebraic() const;

    /// Fault-on RK4 from the prefault point for clearing_time seconds,
    /// then the post-fault algebraic re-solve at the switching instant.
    void post_fault_initial_state(const FaultSpec& fault, double dt,
                                  std::vector<double>& x0, std::vector<double>& v0) const;

private:
    NetworkData data_;
    bool constant_power_;
    Precision prec_;
    PowerFlowSolution pf_;
    std::vector<double> emf_, delta0_, pmech_;
};

/// Classical multi-machine DAE in reference-machine coordinates. The
/// network is invariant under a uniform rotation of all rotor angles,
/// so absolute angles admit a continuum of equilibria (a circle); rotor
/// angles are therefore measured relative to machine 1, whose own angle
/// is pinned to zero. States are
///   [omega_1, delta_21, omega_2, delta_31, omega_3]
/// with delta_k1' = omega_k - omega_1 and the usual swing equation
///   omega_k' = (Pm_k - Pe_k - D_k omega_k) / M_k,
/// M = 2H/omega_s and Pe = (E/x'd)(e sin(delta) - f cos(delta)) at the
/// machine bus. The algebraic vector v holds rectangular bus voltages
/// (e_i, f_i interleaved) in the machine-1 frame, constrained by
/// current-balance rows against the augmented admittance matrix
/// (power-balance rows at load buses in constant-power mode). In these
/// coordinates the stable equilibrium is isolated, so Newton refinement
/// and the distance-based stability indicator are both well posed.
class Wscc9Model : public DynamicalModel {
public:
    struct MachineInternal {
        int bus = 0;  // 0-based
        double emf = 0.0;
        double xd_prime = 0.0;
        double m = 0.0;  // 2H/omega_s
        double damping = 0.0;
        double p_mech = 0.0;
    };

    Wscc9Model(std::vector<MachineInternal> machines,
               Matrix<std::complex<double>> y_aug,
               std::vector<NetworkData::Load> power_loads,
               Precision prec);

    int state_dim() const override { return 2 * static_cast<int>(machines_.size()) - 1; }
    int alg_dim() const override { return 2 * y_.rows(); }
    std::vector<std::string> state_names() const override;
    std::vector<std::string> alg_names() const override;

    void eval_f(std::span<const double> x, std::span<const double> v,
                std::span<double> out) const override;
    void eval_g(std::span<const double> x, std::span<const double> v,
                std::span<double> out) const override;
    void jac_g_v(std::span<const double> x, std::span<const double> v,
                 Matrix<double>& out) const override;

    void eval_f(std::span<const HPReal> x, std::span<const HPReal> v,
                std::span<HPReal> out) const override;
    void eval_g(std::span<const HPReal> x, std::span<const HPReal> v,
                std::span<HPReal> out) const override;
    void jacobians(std::span<const HPReal> x, std::span<const HPReal> v,
                   Matrix<HPReal>& f_x, Matrix<HPReal>& f_v,
                   Matrix<HPReal>& g_x, Matrix<HPReal>& g_v) const override;

    void dt_init(CoefficientTable& table) const override;
    void dt_f(const CoefficientTable& table, int k, std::span<HPReal> out) const override;
    void dt_advance_aux(CoefficientTable& table, int k) const override;
    void dt_g_known(const CoefficientTable& table, int k, std::span<HPReal> out) const override;

    const std::vector<MachineInternal>& machines() const noexcept { return machines_; }
    const Matrix<std::complex<double>>& y_aug() const noexcept { return y_; }

private:
    // State-vector layout: the reference machine (index 0) contributes
    // only its speed; every other machine contributes (angle, speed).
    static int delta_index(int machine) { return machine == 0 ? -1 : 2 * machine - 1; }
    static int omega_index(int machine) { return machine == 0 ? 0 : 2 * machine; }
    template <typename T>
    T angle_at(int machine, std::span<const T> x) const;

    double pe_at(int machine, std::span<const double> x, std::span<const double> v) const;
    HPReal pe_at(int machine, std::span<const HPReal> x, std::span<const HPReal> v) const;
    // Order-q coefficient of the injected network current (Y_aug v) at
    // one bus; reads only order q of the stored voltage series.
    void current_series_at(const CoefficientTable& table, int bus, int q,
                           HPReal& ire, HPReal& iim) const;

    std::vector<MachineInternal> machines_;
    Matrix<std::complex<double>> y_;
    std::vector<NetworkData::Load> power_loads_;  // empty in impedance mode
    Precision prec_;

    // high-precision mirrors of the constants
    Matrix<HPReal> g_hp_, b_hp_;
    std::vector<HPReal> emf_hp_, xdp_hp_, m_hp_, d_hp_, pm_hp_;
    std::vector<int> machine_at_bus_;  // -1 where none
    std::vector<int> power_row_;       // load index per bus, -1 where current-balance
};

}  // namespace polewarp
