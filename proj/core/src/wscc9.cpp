#include "polewarp/wscc9.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "polewarp/dtengine.hpp"
#include "polewarp/errors.hpp"
#include "polewarp/oracle.hpp"

namespace polewarp {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

Matrix<std::complex<double>> network_admittance(const NetworkData& net) {
    const int n = static_cast<int>(net.buses.size());
    Matrix<std::complex<double>> y(n, n, {0.0, 0.0});
    for (const auto& br : net.branches) {
        const int f = net.bus_index(br.from);
        const int t = net.bus_index(br.to);
        const std::complex<double> zs(br.r, br.x);
        if (std::abs(zs) == 0.0) throw ConfigError("branch with zero series impedance");
        const std::complex<double> ys = 1.0 / zs;
        const std::complex<double> shunt(0.0, br.b / 2.0);
        y(f, f) += ys + shunt;
        y(t, t) += ys + shunt;
        y(f, t) -= ys;
        y(t, f) -= ys;
    }
    return y;
}

}  // namespace

int NetworkData::bus_index(int id) const {
    for (size_t i = 0; i < buses.size(); ++i)
        if (buses[i].id == id) return static_cast<int>(i);
    throw ConfigError("unknown bus id " + std::to_string(id));
}

NetworkData load_network_data(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open network data file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("network data parse error in " + path + ": " + e.what());
    }

    NetworkData net;
    try {
        net.base_mva = j.value("base_MVA", 100.0);
        net.frequency_hz = j.value("frequency_hz", 60.0);
        for (const auto& jb : j.at("buses")) {
            NetworkData::Bus b;
            b.id = jb.at("id").get<int>();
            const std::string type = jb.value("type", "pq");
            if (type == "slack")
                b.type = NetworkData::BusType::Slack;
            else if (type == "pv")
                b.type = NetworkData::BusType::PV;
            else if (type == "pq")
                b.type = NetworkData::BusType::PQ;
            else
                throw ConfigError("bus " + std::to_string(b.id) + ": unknown type '" + type + "'");
            b.v_setpoint = jb.value("V", 1.0);
            b.p_gen = jb.value("P_gen", 0.0);
            net.buses.push_back(b);
        }
        for (const auto& jl : j.at("lines")) {
            NetworkData::Branch br;
            br.from = jl.at("from").get<int>();
            br.to = jl.at("to").get<int>();
            br.r = jl.value("R", 0.0);
            br.x = jl.at("X").get<double>();
            br.b = jl.value("B", 0.0);
            net.branches.push_back(br);
        }
        if (j.contains("loads")) {
            for (const auto& jl : j.at("loads")) {
                NetworkData::Load ld;
                ld.bus = jl.at("bus").get<int>();
                ld.p = jl.value("P", 0.0);
                ld.q = jl.value("Q", 0.0);
                net.loads.push_back(ld);
            }
        }
        for (const auto& jm : j.at("machines")) {
            NetworkData::Machine m;
            m.bus = jm.at("bus").get<int>();
            m.h = jm.at("H").get<double>();
            m.xd_prime = jm.at("xd_prime").get<double>();
            m.damping = jm.value("D", 0.0);
            net.machines.push_back(m);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("network data schema error in " + path + ": " + e.what());
    }

    // referential integrity up front, so later stages can index freely
    for (const auto& br : net.branches) {
        net.bus_index(br.from);
        net.bus_index(br.to);
    }
    for (const auto& ld : net.loads) net.bus_index(ld.bus);
    for (const auto& m : net.machines) {
        net.bus_index(m.bus);
        if (!(m.h > 0.0)) throw ConfigError("machine at bus " + std::to_string(m.bus) + ": H must be positive");
        if (!(m.xd_prime > 0.0)) throw ConfigError("machine at bus " + std::to_string(m.bus) + ": xd_prime must be positive");
        if (m.damping < 0.0) throw ConfigError("machine at bus " + std::to_string(m.bus) + ": D must be nonnegative");
    }
    int slack_count = 0;
    for (const auto& b : net.buses)
        if (b.type == NetworkData::BusType::Slack) ++slack_count;
    if (slack_count != 1) throw ConfigError("network needs exactly one slack bus");
    if (net.machines.empty()) throw ConfigError("network needs at least one machine");
    return net;
}

PowerFlowSolution solve_power_flow(const NetworkData& net) {
    const int n = static_cast<int>(net.buses.size());
    const Matrix<std::complex<double>> y = network_admittance(net);

    std::vector<double> p_load(static_cast<size_t>(n), 0.0), q_load(static_cast<size_t>(n), 0.0);
    for (const auto& ld : net.loads) {
        const int b = net.bus_index(ld.bus);
        p_load[static_cast<size_t>(b)] += ld.p;
        q_load[static_cast<size_t>(b)] += ld.q;
    }

    std::vector<double> th(static_cast<size_t>(n), 0.0), vm(static_cast<size_t>(n), 1.0);
    std::vector<int> th_idx(static_cast<size_t>(n), -1), vm_idx(static_cast<size_t>(n), -1);
    int n_th = 0, n_vm = 0;
    for (int i = 0; i < n; ++i) {
        const auto& b = net.buses[static_cast<size_t>(i)];
        if (b.type != NetworkData::BusType::PQ) vm[static_cast<size_t>(i)] = b.v_setpoint;
        if (b.type != NetworkData::BusType::Slack) th_idx[static_cast<size_t>(i)] = n_th++;
        if (b.type == NetworkData::BusType::PQ) vm_idx[static_cast<size_t>(i)] = n_vm++;
    }
    const int dim = n_th + n_vm;

    auto injections = [&](std::vector<double>& p, std::vector<double>& q) {
        for (int i = 0; i < n; ++i) {
            double pi = 0.0, qi = 0.0;
            for (int k = 0; k < n; ++k) {
                const double g = y(i, k).real(), b = y(i, k).imag();
                const double dth = th[static_cast<size_t>(i)] - th[static_cast<size_t>(k)];
                const double c = std::cos(dth), s = std::sin(dth);
                pi += vm[static_cast<size_t>(k)] * (g * c + b * s);
                qi += vm[static_cast<size_t>(k)] * (g * s - b * c);
            }
            p[static_cast<size_t>(i)] = vm[static_cast<size_t>(i)] * pi;
            q[static_cast<size_t>(i)] = vm[static_cast<size_t>(i)] * qi;
        }
    };

    std::vector<double> p(static_cast<size_t>(n)), q(static_cast<size_t>(n));
    PowerFlowSolution sol;
    double max_mismatch = 0.0;
    const int max_iter = 30;
    for (int it = 0;; ++it) {
        injections(p, q);
        std::vector<double> rhs(static_cast<size_t>(dim), 0.0);
        max_mismatch = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto& b = net.buses[static_cast<size_t>(i)];
            if (th_idx[static_cast<size_t>(i)] >= 0) {
                const double p_spec = b.p_gen - p_load[static_cast<size_t>(i)];
                const double dp = p[static_cast<size_t>(i)] - p_spec;
                rhs[static_cast<size_t>(th_idx[static_cast<size_t>(i)])] = dp;
                max_mismatch = std::max(max_mismatch, std::abs(dp));
            }
            if (vm_idx[static_cast<size_t>(i)] >= 0) {
                const double dq = q[static_cast<size_t>(i)] + q_load[static_cast<size_t>(i)];
                rhs[static_cast<size_t>(n_th + vm_idx[static_cast<size_t>(i)])] = dq;
                max_mismatch = std::max(max_mismatch, std::abs(dq));
            }
        }
        sol.iterations = it;
        sol.mismatch = max_mismatch;
        if (max_mismatch < 1e-12 || it >= max_iter) break;

        Matrix<double> jac(dim, dim, 0.0);
        for (int i = 0; i < n; ++i) {
            const double vi = vm[static_cast<size_t>(i)];
            for (int k = 0; k < n; ++k) {
                const double g = y(i, k).real(), bb = y(i, k).imag();
                const double dth = th[static_cast<size_t>(i)] - th[static_cast<size_t>(k)];
                const double c = std::cos(dth), s = std::sin(dth);
                const double vk = vm[static_cast<size_t>(k)];
                double dp_dth, dq_dth, dp_dv, dq_dv;
                if (i == k) {
                    dp_dth = -q[static_cast<size_t>(i)] - bb * vi * vi;
                    dq_dth = p[static_cast<size_t>(i)] - g * vi * vi;
                    dp_dv = p[static_cast<size_t>(i)] / vi + g * vi;
                    dq_dv = q[static_cast<size_t>(i)] / vi - bb * vi;
                } else {
                    dp_dth = vi * vk * (g * s - bb * c);
                    dq_dth = -vi * vk * (g * c + bb * s);
                    dp_dv = vi * (g * c + bb * s);
                    dq_dv = vi * (g * s - bb * c);
                }
                const int r_p = th_idx[static_cast<size_t>(i)];
                const int r_q = vm_idx[static_cast<size_t>(i)];
                if (r_p >= 0 && th_idx[static_cast<size_t>(k)] >= 0) jac(r_p, th_idx[static_cast<size_t>(k)]) += dp_dth;
                if (r_p >= 0 && vm_idx[static_cast<size_t>(k)] >= 0) jac(r_p, n_th + vm_idx[static_cast<size_t>(k)]) += dp_dv;
                if (r_q >= 0 && th_idx[static_cast<size_t>(k)] >= 0) jac(n_th + r_q, th_idx[static_cast<size_t>(k)]) += dq_dth;
                if (r_q >= 0 && vm_idx[static_cast<size_t>(k)] >= 0) jac(n_th + r_q, n_th + vm_idx[static_cast<size_t>(k)]) += dq_dv;
            }
        }
        std::vector<double> step;
        try {
            step = lu_solve(std::move(jac), std::span<const double>(rhs));
        } catch (const SingularMatrixError&) {
            throw NumericalError("power-flow", "singular power-flow Jacobian");
        }
        for (int i = 0; i < n; ++i) {
            if (th_idx[static_cast<size_t>(i)] >= 0) th[static_cast<size_t>(i)] -= step[static_cast<size_t>(th_idx[static_cast<size_t>(i)])];
            if (vm_idx[static_cast<size_t>(i)] >= 0) vm[static_cast<size_t>(i)] -= step[static_cast<size_t>(n_th + vm_idx[static_cast<size_t>(i)])];
        }
    }
    if (max_mismatch >= 1e-8)
        throw ConvergenceError("power-flow", "Newton power flow stalled at mismatch " + std::to_string(max_mismatch));

    sol.v.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        sol.v[static_cast<size_t>(i)] = std::polar(vm[static_cast<size_t>(i)], th[static_cast<size_t>(i)]);
    sol.p_injection = p;
    sol.q_injection = q;
    return sol;
}

Wscc9System::Wscc9System(NetworkData data, bool constant_power_loads, Precision prec)
    : data_(std::move(data)), constant_power_(constant_power_loads), prec_(prec), pf_(solve_power_flow(data_)) {
    std::vector<double> p_load(data_.buses.size(), 0.0), q_load(data_.buses.size(), 0.0);
    for (const auto& ld : data_.loads) {
        const int b = data_.bus_index(ld.bus);
        p_load[static_cast<size_t>(b)] += ld.p;
        q_load[static_cast<size_t>(b)] += ld.q;
    }
    for (const auto& mac : data_.machines) {
        const int b = data_.bus_index(mac.bus);
        const std::complex<double> v = pf_.v[static_cast<size_t>(b)];
        const std::complex<double> s_gen(pf_.p_injection[static_cast<size_t>(b)] + p_load[static_cast<size_t>(b)],
                                         pf_.q_injection[static_cast<size_t>(b)] + q_load[static_cast<size_t>(b)]);
        const std::complex<double> i_gen = std::conj(s_gen) / std::conj(v);
        const std::complex<double> e = v + std::complex<double>(0.0, mac.xd_prime) * i_gen;
        emf_.push_back(std::abs(e));
        delta0_.push_back(std::arg(e));
        pmech_.push_back(s_gen.real());  // x'd is lossless, so Pe(0) = Pgen
    }
}

Wscc9System::Wscc9System(const std::string& data_path, bool constant_power_loads, Precision prec)
    : Wscc9System(load_network_data(data_path), constant_power_loads, prec) {}

std::shared_ptr<const Wscc9Model> Wscc9System::model(NetworkState state,
                                                     const std::optional<FaultSpec>& fault) const {
    Matrix<std::complex<double>> y = network_admittance(data_);
    std::vector<NetworkData::Load> power_loads;
    for (const auto& ld : data_.loads) {
        const int b = data_.bus_index(ld.bus);
        if (constant_power_) {
            NetworkData::Load resolved = ld;
            resolved.bus = b;  // hand the model a 0-based position
            power_loads.push_back(resolved);
        } else {
            const double vmag2 = std::norm(pf_.v[static_cast<size_t>(b)]);
            y(b, b) += std::complex<double>(ld.p, -ld.q) / vmag2;
        }
    }
    const double omega_s = kTwoPi * data_.frequency_hz;
    std::vector<Wscc9Model::MachineInternal> internals;
    for (size_t k = 0; k < data_.machines.size(); ++k) {
        const auto& mac = data_.machines[k];
        const int b = data_.bus_index(mac.bus);
        y(b, b) += 1.0 / std::complex<double>(0.0, mac.xd_prime);
        Wscc9Model::MachineInternal mi;
        mi.bus = b;
        mi.emf = emf_[k];
        mi.xd_prime = mac.xd_prime;
        mi.m = 2.0 * mac.h / omega_s;
        mi.damping = mac.damping;
        mi.p_mech = pmech_[k];
        internals.push_back(mi);
    }
    if (state == NetworkState::FaultOn) {
        if (!fault) throw ConfigError("fault-on network requested without a fault description");
        if (fault->r == 0.0 && fault->x == 0.0) throw ConfigError("fault impedance must be nonzero");
        const int b = data_.bus_index(fault->bus);
        y(b, b) += 1.0 / std::complex<double>(fault->r, fault->x);
    }
    return std::make_shared<Wscc9Model>(std::move(internals), std::move(y), std::move(power_loads), prec_);
}

std::vector<double> Wscc9System::prefault_state() const {
    std::vector<double> x;
    x.push_back(0.0);  // omega_1
    for (size_t k = 1; k < data_.machines.size(); ++k) {
        x.push_back(delta0_[k] - delta0_[0]);
        x.push_back(0.0);
    }
    return x;
}

std::vector<double> Wscc9System::prefault_algebraic() const {
    // Rotate the power-flow voltages into the machine-1 frame so that
    // the reference machine's internal angle is exactly zero.
    const std::complex<double> rot = std::polar(1.0, -delta0_[0]);
    std::vector<double> v;
    for (const auto& vc : pf_.v) {
        const std::complex<double> w = vc * rot;
        v.push_back(w.real());
        v.push_back(w.imag());
    }
    return v;
}

void Wscc9System::post_fault_initial_state(const FaultSpec& fault, double dt,
                                           std::vector<double>& x0, std::vector<double>& v0) const {
    if (fault.clearing_time < 0.0) throw ConfigError("clearing time must be nonnegative");
    auto faulted = model(NetworkState::FaultOn, fault);
    auto post = model(NetworkState::Postfault);

    x0 = prefault_state();
    v0 = prefault_algebraic();
    if (fault.clearing_time > 0.0) {
        const Trajectory traj = rk4_integrate(*faulted, x0, v0, dt, fault.clearing_time);
        if (traj.terminated == Trajectory::Termination::Blowup)
            throw NumericalError("fault-on", "fault-on trajectory diverged before the clearing time");
        x0 = traj.states.back();
        v0 = traj.algebraics.back();
    }

    // switch networks: hold x, re-solve g = 0 for the post-fault voltages
    const int m = post->alg_dim();
    std::vector<double> g(static_cast<size_t>(m));
    Matrix<double> jac(m, m);
    for (int it = 0; it < 25; ++it) {
        post->eval_g(x0, v0, g);
        if (norm2(g) <= 1e-11) return;
        post->jac_g_v(x0, v0, jac);
        std::vector<double> step;
        try {
            step = lu_solve(std::move(jac), std::span<const double>(g));
        } catch (const SingularMatrixError&) {
            throw NumericalError("fault-on", "singular network matrix at the switching instant");
        }
        jac = Matrix<double>(m, m);
        for (int i = 0; i < m; ++i) v0[static_cast<size_t>(i)] -= step[static_cast<size_t>(i)];
    }
    post->eval_g(x0, v0, g);
    if (norm2(g) > 1e-11)
        throw ConvergenceError("fault-on", "post-fault algebraic solve did not converge at the switching instant");
}

// ---------------------------------------------------------------------------

Wscc9Model::Wscc9Model(std::vector<MachineInternal> machines,
                       Matrix<std::complex<double>> y_aug,
                       std::vector<NetworkData::Load> power_loads,
                       Precision prec)
    : machines_(std::move(machines)), y_(std::move(y_aug)), power_loads_(std::move(power_loads)), prec_(prec) {
    const int n = y_.rows();
    g_hp_ = Matrix<HPReal>(n, n, HPReal(prec_));
    b_hp_ = Matrix<HPReal>(n, n, HPReal(prec_));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            g_hp_(i, j) = HPReal(y_(i, j).real(), prec_);
            b_hp_(i, j) = HPReal(y_(i, j).imag(), prec_);
        }
    }
    machine_at_bus_.assign(static_cast<size_t>(n), -1);
    for (size_t k = 0; k < machines_.size(); ++k) {
        const auto& mi = machines_[k];
        machine_at_bus_[static_cast<size_t>(mi.bus)] = static_cast<int>(k);
        emf_hp_.emplace_back(mi.emf, prec_);
        xdp_hp_.emplace_back(mi.xd_prime, prec_);
        m_hp_.emplace_back(mi.m, prec_);
        d_hp_.emplace_back(mi.damping, prec_);
        pm_hp_.emplace_back(mi.p_mech, prec_);
    }
    // power_loads_ entries carry 0-based bus positions (the factory
    // resolves external ids before construction)
    power_row_.assign(static_cast<size_t>(n), -1);
    for (size_t l = 0; l < power_loads_.size(); ++l) {
        const int b = power_loads_[l].bus;
        if (b < 0 || b >= n) throw ConfigError("constant-power load bus index out of range");
        power_row_[static_cast<size_t>(b)] = static_cast<int>(l);
        if (machine_at_bus_[static_cast<size_t>(b)] >= 0)
            throw ConfigError("constant-power load and machine share a bus; unsupported");
    }
}

std::vector<std::string> Wscc9Model::state_names() const {
    std::vector<std::string> names;
    names.push_back("omega_1");
    for (size_t k = 1; k < machines_.size(); ++k) {
        names.push_back("delta_" + std::to_string(k + 1) + "1");
        names.push_back("omega_" + std::to_string(k + 1));
    }
    return names;
}

std::vector<std::string> Wscc9Model::alg_names() const {
    std::vector<std::string> names;
    for (int i = 0; i < y_.rows(); ++i) {
        names.push_back("e_" + std::to_string(i + 1));
        names.push_back("f_" + std::to_string(i + 1));
    }
    return names;
}

template <>
double Wscc9Model::angle_at<double>(int machine, std::span<const double> x) const {
    return machine == 0 ? 0.0 : x[static_cast<size_t>(delta_index(machine))];
}

template <>
HPReal Wscc9Model::angle_at<HPReal>(int machine, std::span<const HPReal> x) const {
    return machine == 0 ? HPReal(prec_) : x[static_cast<size_t>(delta_index(machine))];
}

double Wscc9Model::pe_at(int machine, std::span<const double> x, std::span<const double> v) const {
    const auto& mi = machines_[static_cast<size_t>(machine)];
    const double delta = angle_at<double>(machine, x);
    const double e = v[static_cast<size_t>(2 * mi.bus)];
    const double f = v[static_cast<size_t>(2 * mi.bus + 1)];
    return mi.emf / mi.xd_prime * (e * std::sin(delta) - f * std::cos(delta));
}

HPReal Wscc9Model::pe_at(int machine, std::span<const HPReal> x, std::span<const HPReal> v) const {
    const auto k = static_cast<size_t>(machine);
    const auto& mi = machines_[k];
    const HPReal delta = angle_at<HPReal>(machine, x);
    const HPReal& e = v[static_cast<size_t>(2 * mi.bus)];
    const HPReal& f = v[static_cast<size_t>(2 * mi.bus + 1)];
    return emf_hp_[k] / xdp_hp_[k] * (e * sin(delta) - f * cos(delta));
}

void Wscc9Model::eval_f(std::span<const double> x, std::span<const double> v,
                        std::span<double> out) const {
    const double omega_ref = x[0];
    for (size_t k = 0; k < machines_.size(); ++k) {
        const auto& mi = machines_[k];
        const int ki = static_cast<int>(k);
        const double omega = x[static_cast<size_t>(omega_index(ki))];
        if (ki != 0) out[static_cast<size_t>(delta_index(ki))] = omega - omega_ref;
        out[static_cast<size_t>(omega_index(ki))] =
            (mi.p_mech - pe_at(ki, x, v) - mi.damping * omega) / mi.m;
    }
}

void Wscc9Model::eval_f(std::span<const HPReal> x, std::span<const HPReal> v,
                        std::span<HPReal> out) const {
    const HPReal& omega_ref = x[0];
    for (size_t k = 0; k < machines_.size(); ++k) {
        const int ki = static_cast<int>(k);
        const HPReal& omega = x[static_cast<size_t>(omega_index(ki))];
        if (ki != 0) out[static_cast<size_t>(delta_index(ki))] = omega - omega_ref;
        out[static_cast<size_t>(omega_index(ki))] =
            (pm_hp_[k] - pe_at(ki, x, v) - d_hp_[k] * omega) / m_hp_[k];
    }
}

void Wscc9Model::eval_g(std::span<const double> x, std::span<const double> v,
                        std::span<double> out) const {
    const int n = y_.rows();
    for (int i = 0; i < n; ++i) {
        double ire = 0.0, iim = 0.0;
        for (int j = 0; j < n; ++j) {
            const double g = y_(i, j).real(), b = y_(i, j).imag();
            ire += g * v[static_cast<size_t>(2 * j)] - b * v[static_cast<size_t>(2 * j + 1)];
            iim += g * v[static_cast<size_t>(2 * j + 1)] + b * v[static_cast<size_t>(2 * j)];
        }
        const double e = v[static_cast<size_t>(2 * i)];
        const double f = v[static_cast<size_t>(2 * i + 1)];
        if (power_row_[static_cast<size_t>(i)] >= 0) {
            const auto& ld = power_loads_[static_cast<size_t>(power_row_[static_cast<size_t>(i)])];
            out[static_cast<size_t>(2 * i)] = e * ire + f * iim + ld.p;
            out[static_cast<size_t>(2 * i + 1)] = f * ire - e * iim + ld.q;
        } else {
            double src_re = 0.0, src_im = 0.0;
            const int mk = machine_at_bus_[static_cast<size_t>(i)];
            if (mk >= 0) {
                const auto& mi = machines_[static_cast<size_t>(mk)];
                const double delta = angle_at<double>(mk, x);
                src_re = mi.emf / mi.xd_prime * std::sin(delta);
                src_im = -mi.emf / mi.xd_prime * std::cos(delta);
            }
            out[static_cast<size_t>(2 * i)] = ire - src_re;
            out[static_cast<size_t>(2 * i + 1)] = iim - src_im;
        }
    }
}

void Wscc9Model::eval_g(std::span<const HPReal> x, std::span<const HPReal> v,
                        std::span<HPReal> out) const {
    const int n = y_.rows();
    for (int i = 0; i < n; ++i) {
        HPReal ire(prec_), iim(prec_);
        for (int j = 0; j < n; ++j) {
            ire += g_hp_(i, j) * v[static_cast<size_t>(2 * j)] - b_hp_(i, j) * v[static_cast<size_t>(2 * j + 1)];
            iim += g_hp_(i, j) * v[static_cast<size_t>(2 * j + 1)] + b_hp_(i, j) * v[static_cast<size_t>(2 * j)];
        }
        const HPReal& e = v[static_cast<size_t>(2 * i)];
        const HPReal& f = v[static_cast<size_t>(2 * i + 1)];
        if (power_row_[static_cast<size_t>(i)] >= 0) {
            const auto& ld = power_loads_[static_cast<size_t>(power_row_[static_cast<size_t>(i)])];
            out[static_cast<size_t>(2 * i)] = e * ire + f * iim + HPReal(ld.p, prec_);
            out[static_cast<size_t>(2 * i + 1)] = f * ire - e * iim + HPReal(ld.q, prec_);
        } else {
            const int mk = machine_at_bus_[static_cast<size_t>(i)];
            if (mk >= 0) {
                const auto mku = static_cast<size_t>(mk);
                const HPReal delta = angle_at<HPReal>(mk, x);
                const HPReal coef = emf_hp_[mku] / xdp_hp_[mku];
                ire -= coef * sin(delta);
                iim += coef * cos(delta);
            }
            out[static_cast<size_t>(2 * i)] = ire;
            out[static_cast<size_t>(2 * i + 1)] = iim;
        }
    }
}

void Wscc9Model::jac_g_v(std::span<const double>, std::span<const double> v,
                         Matrix<double>& out) const {
    const int n = y_.rows();
    for (int i = 0; i < n; ++i) {
        const bool power = power_row_[static_cast<size_t>(i)] >= 0;
        double ire = 0.0, iim = 0.0;
        if (power) {
            for (int j = 0; j < n; ++j) {
                ire += y_(i, j).real() * v[static_cast<size_t>(2 * j)] - y_(i, j).imag() * v[static_cast<size_t>(2 * j + 1)];
                iim += y_(i, j).real() * v[static_cast<size_t>(2 * j + 1)] + y_(i, j).imag() * v[static_cast<size_t>(2 * j)];
            }
        }
        const double e = v[static_cast<size_t>(2 * i)];
        const double f = v[static_cast<size_t>(2 * i + 1)];
        for (int j = 0; j < n; ++j) {
            const double g = y_(i, j).real(), b = y_(i, j).imag();
            if (power) {
                out(2 * i, 2 * j) = e * g + f * b + (i == j ? ire : 0.0);
                out(2 * i, 2 * j + 1) = -e * b + f * g + (i == j ? iim : 0.0);
                out(2 * i + 1, 2 * j) = f * g - e * b - (i == j ? iim : 0.0);
                out(2 * i + 1, 2 * j + 1) = -f * b - e * g + (i == j ? ire : 0.0);
            } else {
                out(2 * i, 2 * j) = g;
                out(2 * i, 2 * j + 1) = -b;
                out(2 * i + 1, 2 * j) = b;
                out(2 * i + 1, 2 * j + 1) = g;
            }
        }
    }
}

void Wscc9Model::jacobians(std::span<const HPReal> x, std::span<const HPReal> v,
                           Matrix<HPReal>& f_x, Matrix<HPReal>& f_v,
                           Matrix<HPReal>& g_x, Matrix<HPReal>& g_v) const {
    const int n = y_.rows();
    const int ns = state_dim();
    const int na = alg_dim();
    const HPReal zero(prec_);
    for (int r = 0; r < ns; ++r)
        for (int c = 0; c < ns; ++c) f_x(r, c) = zero;
    for (int r = 0; r < ns; ++r)
        for (int c = 0; c < na; ++c) f_v(r, c) = zero;
    for (int r = 0; r < na; ++r)
        for (int c = 0; c < ns; ++c) g_x(r, c) = zero;

    for (size_t k = 0; k < machines_.size(); ++k) {
        const auto& mi = machines_[k];
        const int ki = static_cast<int>(k);
        const int di = delta_index(ki);
        const int oi = omega_index(ki);
        const HPReal delta = angle_at<HPReal>(ki, x);
        const HPReal sd = sin(delta), cd = cos(delta);
        const HPReal coef = emf_hp_[k] / xdp_hp_[k];
        const HPReal& e = v[static_cast<size_t>(2 * mi.bus)];
        const HPReal& f = v[static_cast<size_t>(2 * mi.bus + 1)];

        if (ki != 0) {
            // delta_k1' = omega_k - omega_1
            f_x(di, oi) = HPReal(1, prec_);
            f_x(di, 0) = HPReal(-1, prec_);
            f_x(oi, di) = -(coef * (e * cd + f * sd)) / m_hp_[k];
            g_x(2 * mi.bus, di) = -(coef * cd);
            g_x(2 * mi.bus + 1, di) = -(coef * sd);
        }
        f_x(oi, oi) = -d_hp_[k] / m_hp_[k];
        f_v(oi, 2 * mi.bus) = -(coef * sd) / m_hp_[k];
        f_v(oi, 2 * mi.bus + 1) = (coef * cd) / m_hp_[k];
    }

    for (int i = 0; i < n; ++i) {
        const bool power = power_row_[static_cast<size_t>(i)] >= 0;
        HPReal ire(prec_), iim(prec_);
        if (power) {
            for (int j = 0; j < n; ++j) {
                ire += g_hp_(i, j) * v[static_cast<size_t>(2 * j)] - b_hp_(i, j) * v[static_cast<size_t>(2 * j + 1)];
                iim += g_hp_(i, j) * v[static_cast<size_t>(2 * j + 1)] + b_hp_(i, j) * v[static_cast<size_t>(2 * j)];
            }
        }
        const HPReal& e = v[static_cast<size_t>(2 * i)];
        const HPReal& f = v[static_cast<size_t>(2 * i + 1)];
        for (int j = 0; j < n; ++j) {
            const HPReal& g = g_hp_(i, j);
            const HPReal& b = b_hp_(i, j);
            if (power) {
                g_v(2 * i, 2 * j) = e * g + f * b + (i == j ? ire : HPReal(prec_));
                g_v(2 * i, 2 * j + 1) = -(e * b) + f * g + (i == j ? iim : HPReal(prec_));
                g_v(2 * i + 1, 2 * j) = f * g - e * b - (i == j ? iim : HPReal(prec_));
                g_v(2 * i + 1, 2 * j + 1) = -(f * b) - e * g + (i == j ? ire : HPReal(prec_));
            } else {
                g_v(2 * i, 2 * j) = g;
                g_v(2 * i, 2 * j + 1) = -b;
                g_v(2 * i + 1, 2 * j) = b;
                g_v(2 * i + 1, 2 * j + 1) = g;
            }
        }
    }
}

namespace {
std::string sin_key(size_t k) { return "msin_" + std::to_string(k); }
std::string cos_key(size_t k) { return "mcos_" + std::to_string(k); }
}  // namespace

void Wscc9Model::dt_init(CoefficientTable& table) const {
    // The reference machine's angle is pinned at zero (sin ≡ 0,
    // cos ≡ 1), so only the other machines carry sin/cos aux series.
    for (size_t k = 1; k < machines_.size(); ++k) {
        TaylorSeries s, c;
        s.append(sin(table.X[static_cast<size_t>(delta_index(static_cast<int>(k)))][0]));
        c.append(cos(table.X[static_cast<size_t>(delta_index(static_cast<int>(k)))][0]));
        table.aux[sin_key(k)] = std::move(s);
        table.aux[cos_key(k)] = std::move(c);
    }
}

void Wscc9Model::dt_f(const CoefficientTable& table, int k, std::span<HPReal> out) const {
    const HPReal& omega_ref_k = table.X[0][k];
    for (size_t mk = 0; mk < machines_.size(); ++mk) {
        const auto& mi = machines_[mk];
        const int ki = static_cast<int>(mk);
        const int oi = omega_index(ki);
        const HPReal& omega_k = table.X[static_cast<size_t>(oi)][k];
        HPReal pe(prec_);
        if (ki == 0) {
            // sin/cos of the pinned angle are the constants 0/1, so the
            // Pe convolution collapses to the bus voltage coefficient.
            pe = -(emf_hp_[mk] / xdp_hp_[mk] * table.V[static_cast<size_t>(2 * mi.bus + 1)][k]);
        } else {
            const auto& sin_s = table.aux.at(sin_key(mk));
            const auto& cos_s = table.aux.at(cos_key(mk));
            pe = emf_hp_[mk] / xdp_hp_[mk] *
                 (convolve_at(table.V[static_cast<size_t>(2 * mi.bus)], sin_s, k) -
                  convolve_at(table.V[static_cast<size_t>(2 * mi.bus + 1)], cos_s, k));
            out[static_cast<size_t>(delta_index(ki))] = omega_k - omega_ref_k;
        }
        HPReal acc = -pe - d_hp_[mk] * omega_k;
        if (k == 0) acc += pm_hp_[mk];
        out[static_cast<size_t>(oi)] = acc / m_hp_[mk];
    }
}

void Wscc9Model::dt_advance_aux(CoefficientTable& table, int k) const {
    for (size_t mk = 1; mk < machines_.size(); ++mk)
        dt::advance_sincos(table.X[static_cast<size_t>(delta_index(static_cast<int>(mk)))],
                           table.aux.at(sin_key(mk)), table.aux.at(cos_key(mk)), k);
}

void Wscc9Model::current_series_at(const CoefficientTable& table, int bus, int q,
                                   HPReal& ire, HPReal& iim) const {
    const int n = y_.rows();
    ire = HPReal(prec_);
    iim = HPReal(prec_);
    for (int j = 0; j < n; ++j) {
        const HPReal& ej = table.V[static_cast<size_t>(2 * j)][q];
        const HPReal& fj = table.V[static_cast<size_t>(2 * j + 1)][q];
        ire += g_hp_(bus, j) * ej - b_hp_(bus, j) * fj;
        iim += g_hp_(bus, j) * fj + b_hp_(bus, j) * ej;
    }
}

void Wscc9Model::dt_g_known(const CoefficientTable& table, int k, std::span<HPReal> out) const {
    const int n = y_.rows();
    for (int i = 0; i < n; ++i) {
        if (power_row_[static_cast<size_t>(i)] >= 0) {
            // quadratic rows: cross terms of orders 1..k-1; the terms
            // containing V(k) are exactly g_v(0) V(k) and stay with the
            // engine's linear solve
            HPReal p_acc(prec_), q_acc(prec_);
            HPReal ire(prec_), iim(prec_);
            for (int q = 1; q <= k - 1; ++q) {
                current_series_at(table, i, k - q, ire, iim);
                const HPReal& eq = table.V[static_cast<size_t>(2 * i)][q];
                const HPReal& fq = table.V[static_cast<size_t>(2 * i + 1)][q];
                p_acc += eq * ire + fq * iim;
                q_acc += fq * ire - eq * iim;
            }
            out[static_cast<size_t>(2 * i)] = p_acc;
            out[static_cast<size_t>(2 * i + 1)] = q_acc;
        } else {
            const int mk = machine_at_bus_[static_cast<size_t>(i)];
            if (mk == 0) {
                // pinned reference angle: source current is constant, so
                // its contribution to orders k >= 1 vanishes
                const HPReal coef = emf_hp_[0] / xdp_hp_[0];
                out[static_cast<size_t>(2 * i)] = HPReal(prec_);
                out[static_cast<size_t>(2 * i + 1)] = k == 0 ? coef : HPReal(prec_);
            } else if (mk > 0) {
                const auto mku = static_cast<size_t>(mk);
                const HPReal coef = emf_hp_[mku] / xdp_hp_[mku];
                out[static_cast<size_t>(2 * i)] = -(coef * table.aux.at(sin_key(mku))[k]);
                out[static_cast<size_t>(2 * i + 1)] = coef * table.aux.at(cos_key(mku))[k];
            } else {
                out[static_cast<size_t>(2 * i)] = HPReal(prec_);
                out[static_cast<size_t>(2 * i + 1)] = HPReal(prec_);
            }
        }
    }
}

}  // namespace polewarp
