// Command line front end: assess / simulate / compare / coeffs /
// pade-roots / cct-bisect over scenario JSON files. Exit codes: 0 for a
// Stable verdict (and for non-verdict commands), 10 for Unstable, 2 for
// configuration problems, 3 for numerical failures.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "polewarp/classifier.hpp"
#include "polewarp/errors.hpp"
#include "polewarp/oracle.hpp"
#include "polewarp/pade.hpp"
#include "polewarp/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace polewarp;

namespace {

constexpr int kExitStable = 0;
constexpr int kExitUnstable = 10;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

#ifndef POLEWARP_VERSION_STRING
#define POLEWARP_VERSION_STRING "0.0.0"
#endif

struct CommonOpts {
    std::vector<std::string> configs;
    bool json_out = false;
    int digits = 0;          // 0 = not given
    std::vector<int> order;  // L M when given
    double epsilon = -1.0;   // < 0 = not given
    std::string out_dir;
    int jobs = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool multi_config) {
    auto* cfg = cmd->add_option("--config", o.configs, "Scenario JSON file")->required();
    if (!multi_config) cfg->expected(1);
    cmd->add_flag("--json", o.json_out, "Emit machine-readable JSON on stdout");
    cmd->add_option("--digits", o.digits, "Working precision override (decimal digits)");
    cmd->add_option("--order", o.order, "Approximant order override: L M")->expected(2);
    cmd->add_option("--epsilon", o.epsilon, "Pole acceptance window override");
    cmd->add_option("--out-dir", o.out_dir, "Directory for artifact files and the run manifest");
    cmd->add_option("--jobs", o.jobs, "Worker threads for multi-config runs");
}

ScenarioConfig load_with_overrides(const std::string& path, const CommonOpts& o) {
    ScenarioConfig cfg = load_scenario(path);
    if (o.digits != 0) {
        if (o.digits < 1) throw ConfigError("--digits must be a positive integer");
        cfg.digits = o.digits;
    } else if (!cfg.digits) {
        if (const char* env = std::getenv("POLEWARP_DIGITS")) {
            char* end = nullptr;
            const long d = std::strtol(env, &end, 10);
            if (end == env || *end != '\0' || d < 1)
                throw ConfigError("POLEWARP_DIGITS must be a positive integer, got '" + std::string(env) + "'");
            cfg.digits = static_cast<int>(d);
        }
    }
    if (!o.order.empty()) {
        if (o.order[0] < 0 || o.order[1] < 1)
            throw ConfigError("--order needs L >= 0 and M >= 1");
        cfg.pade.L = o.order[0];
        cfg.pade.M = o.order[1];
    }
    if (o.epsilon >= 0.0) {
        if (!(o.epsilon > 0.0 && o.epsilon < 1.0))
            throw ConfigError("--epsilon must lie in (0, 1)");
        cfg.epsilon = o.epsilon;
    }
    return cfg;
}

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fixed3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string sanitize(const std::string& name) {
    std::string out = name.empty() ? std::string("scenario") : name;
    for (char& c : out)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') c = '_';
    return out;
}

std::vector<double> demote(std::span<const HPReal> v) {
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& c : v) out.push_back(c.to_double());
    return out;
}

// All artifacts land via rename so a crash can never leave a torn file.
void atomic_write(const fs::path& path, const std::string& content) {
    if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        out.flush();
        if (!out) throw NumericalError("io", "failed writing " + tmp.string());
    }
    fs::rename(tmp, path);
}

json timings_json(const std::map<std::string, double>& stages) {
    json t;
    double total = 0.0;
    for (const auto& [k, v] : stages) {
        t[k] = v;
        total += v;
    }
    t["total"] = total;
    return t;
}

json manifest_json(const ScenarioConfig& cfg, const std::map<std::string, double>& stages,
                   const std::vector<std::string>& outputs) {
    json j;
    j["tool"] = "polewarp";
    j["version"] = POLEWARP_VERSION_STRING;
    j["scenario"] = json::parse(serialize_scenario(cfg));
    j["digits"] = scenario_precision(cfg).digits();
    j["timings_seconds"] = timings_json(stages);
    j["outputs"] = outputs;
    return j;
}

std::map<std::string, double> stage_map(const StageTimings& t) {
    return {{"sep_solve", t.sep_solve}, {"propagation", t.propagation}, {"pade", t.pade}, {"roots", t.roots}};
}

json verdict_json(const StabilityVerdict& v) {
    auto opt = [](const std::optional<HPReal>& x) { return x ? json(x->str()) : json(); };
    json j;
    j["status"] = to_string(v.status);
    j["tau_pole"] = opt(v.tau_pole);
    j["pole_error"] = opt(v.pole_error);
    j["h_at_horizon"] = opt(v.h_at_horizon);
    j["h0"] = v.h0.str();
    j["epsilon"] = v.epsilon;
    j["degree_reductions"] = v.degree_reductions;
    j["filtered_doublets"] = v.filtered_doublets;
    j["real_candidates"] = v.real_candidates;
    j["root_residual_max"] = v.root_residual_max.str();
    j["sep_residual"] = v.sep_residual.str();
    j["sep_iterations"] = v.sep_iterations;
    j["timings_seconds"] = timings_json(stage_map(v.timings));
    return j;
}

void print_verdict(std::ostream& os, const std::string& name, const StabilityVerdict& v) {
    os << "scenario:        " << name << "\n";
    os << "status:          " << to_string(v.status) << "\n";
    if (v.tau_pole) {
        os << "tau_pole:        " << v.tau_pole->str(15) << "\n";
        os << "pole_error:      " << v.pole_error->str(3) << "  (epsilon " << v.epsilon << ")\n";
    } else {
        os << "tau_pole:        none  (epsilon " << v.epsilon << ")\n";
    }
    os << "h0:              " << v.h0.str(15) << "\n";
    if (v.h_at_horizon) os << "h(horizon-):     " << v.h_at_horizon->str(15) << "\n";
    os << "real candidates: " << v.real_candidates << "  (doublets filtered " << v.filtered_doublets
       << ", degree reductions " << v.degree_reductions << ")\n";
    os << "sep solve:       " << v.sep_iterations << " iterations, residual " << v.sep_residual.str(3) << "\n";
    os << "timings [s]:     sep " << fixed3(v.timings.sep_solve) << "  coeffs " << fixed3(v.timings.propagation)
       << "  pade " << fixed3(v.timings.pade) << "  roots " << fixed3(v.timings.roots) << "  total "
       << fixed3(v.timings.total()) << "\n";
}

// ---------------------------------------------------------------- assess

int run_assess(const CommonOpts& o) {
    struct Item {
        std::string text;
        std::string error;
        int code = kExitStable;
    };
    std::vector<Item> items(o.configs.size());

    auto work = [&](size_t i) {
        Item& it = items[i];
        try {
            const ScenarioConfig cfg = load_with_overrides(o.configs[i], o);
            const StabilityVerdict v = assess(cfg);
            std::ostringstream os;
            std::vector<std::string> outputs;
            if (!o.out_dir.empty()) {
                const fs::path dir(o.out_dir);
                const fs::path verdict_path = dir / ("assess_" + sanitize(cfg.name) + ".json");
                json report;
                report["scenario"] = json::parse(serialize_scenario(cfg));
                report["verdict"] = verdict_json(v);
                atomic_write(verdict_path, report.dump(2) + "\n");
                outputs.push_back(fs::absolute(verdict_path).string());
                const fs::path manifest_path = dir / ("assess_" + sanitize(cfg.name) + ".manifest.json");
                atomic_write(manifest_path, manifest_json(cfg, stage_map(v.timings), outputs).dump(2) + "\n");
            }
            if (o.json_out) {
                json j;
                j["scenario"] = json::parse(serialize_scenario(cfg));
                j["verdict"] = verdict_json(v);
                os << j.dump(2) << "\n";
            } else {
                print_verdict(os, cfg.name, v);
                for (const auto& p : outputs) os << "wrote " << p << "\n";
            }
            it.text = os.str();
            it.code = v.status == Status::Stable ? kExitStable : kExitUnstable;
        } catch (const ConfigError& e) {
            it.error = std::string("config error (") + o.configs[i] + "): " + e.what();
            it.code = kExitConfig;
        } catch (const NumericalError& e) {
            it.error = std::string("numerical failure (") + o.configs[i] + ") in stage '" + e.stage() +
                       "': " + e.what();
            it.code = kExitNumerical;
        }
    };

    const int jobs = std::max(1, std::min<int>(o.jobs, static_cast<int>(items.size())));
    if (jobs == 1) {
        for (size_t i = 0; i < items.size(); ++i) work(i);
    } else {
        std::atomic<size_t> next{0};
        auto worker = [&] {
            for (size_t i; (i = next.fetch_add(1)) < items.size();) work(i);
        };
        std::vector<std::thread> pool;
        for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
        worker();
        for (auto& th : pool) th.join();
    }

    int code = kExitStable;
    bool any_error = false;
    for (const auto& it : items) {
        if (!it.text.empty()) std::cout << it.text;
        if (!it.error.empty()) std::cerr << it.error << "\n";
        if (it.code == kExitConfig || it.code == kExitNumerical) {
            if (!any_error) {
                any_error = true;
                code = it.code;
            }
        } else if (!any_error && it.code == kExitUnstable) {
            code = kExitUnstable;
        }
    }
    return code;
}

// -------------------------------------------------------------- simulate

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int run_simulate(const CommonOpts& o) {
    const ScenarioConfig cfg = load_with_overrides(o.configs[0], o);
    const ScenarioRuntime rt = build_scenario(cfg);

    auto t0 = std::chrono::steady_clock::now();
    const EquilibriumPoint sep = find_sep(*rt.model, rt.sep_guess_x, rt.sep_guess_v);
    const std::vector<double> xs = demote(sep.x_star);
    const double t_sep = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const double horizon = *rt.resolved.oracle.horizon;
    const Trajectory traj =
        rk4_integrate(*rt.model, rt.x0_d(), rt.v0_d(), rt.resolved.oracle.dt, horizon);
    const double t_int = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const size_t stride = std::max<size_t>(1, traj.size() / 20000);
    std::ostringstream csv;
    csv << "t,tau";
    for (const auto& n : rt.model->state_names()) csv << "," << n;
    csv << ",h\n";
    size_t rows = 0, skipped = 0;
    auto emit = [&](size_t i) {
        double d = 0.0;
        for (size_t j = 0; j < xs.size(); ++j) {
            const double diff = traj.states[i][j] - xs[j];
            d += diff * diff;
        }
        if (d == 0.0) {
            ++skipped;  // exactly on the equilibrium; h is -infinity there
            return;
        }
        csv << g17(traj.times[i]) << "," << g17(rt.map.map_time(traj.times[i]));
        for (const double xj : traj.states[i]) csv << "," << g17(xj);
        csv << "," << g17(-1.0 / d) << "\n";
        ++rows;
    };
    for (size_t i = 0; i < traj.size(); i += stride) emit(i);
    if (traj.size() > 0 && (traj.size() - 1) % stride != 0) emit(traj.size() - 1);

    const fs::path dir(o.out_dir.empty() ? "." : o.out_dir);
    const std::string base = "simulate_" + sanitize(cfg.name);
    const fs::path csv_path = dir / (base + ".csv");
    atomic_write(csv_path, csv.str());
    std::vector<std::string> outputs{fs::absolute(csv_path).string()};
    const double t_io = seconds_since(t0);

    const std::map<std::string, double> stages{
        {"sep_solve", t_sep}, {"integration", t_int}, {"io", t_io}};
    const fs::path manifest_path = dir / (base + ".manifest.json");
    atomic_write(manifest_path, manifest_json(cfg, stages, outputs).dump(2) + "\n");

    if (o.json_out) {
        json j;
        j["csv"] = outputs[0];
        j["manifest"] = fs::absolute(manifest_path).string();
        j["rows"] = rows;
        j["steps"] = traj.size();
        j["terminated"] = traj.terminated == Trajectory::Termination::Horizon ? "horizon" : "blowup";
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "integrated " << traj.size() << " steps ("
                  << (traj.terminated == Trajectory::Termination::Horizon ? "reached horizon"
                                                                          : "norm blowup, stopped early")
                  << "), wrote " << rows << " rows";
        if (skipped > 0) std::cout << " (" << skipped << " on-equilibrium points skipped)";
        std::cout << "\n";
        std::cout << "wrote " << outputs[0] << "\n";
        std::cout << "wrote " << fs::absolute(manifest_path).string() << "\n";
    }
    return kExitStable;
}

// --------------------------------------------------------------- compare

int run_compare(const CommonOpts& o) {
    const ScenarioConfig cfg = load_with_overrides(o.configs[0], o);
    const ScenarioRuntime rt = build_scenario(cfg);
    const AssessArtifacts art = assess_with_artifacts(rt);

    auto t0 = std::chrono::steady_clock::now();
    const double horizon = *rt.resolved.oracle.horizon;
    const Trajectory traj =
        rk4_integrate(*rt.model, rt.x0_d(), rt.v0_d(), rt.resolved.oracle.dt, horizon);
    const std::vector<double> xs = demote(art.sep.x_star);
    const int stride = std::max<int>(1, static_cast<int>(traj.size() / 2000));
    const IndicatorSamples samples = indicator_along_trajectory(traj, xs, rt.map, stride);
    const double t_int = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    std::ostringstream csv;
    csv << "tau,h_oracle,h_pade,abs_diff\n";
    HPReal max_diff(rt.prec);
    size_t rows = 0, poles_hit = 0;
    for (const auto& [tau, h_o] : samples.points) {
        const HPReal tau_hp(tau, rt.prec);
        HPReal h_pade(rt.prec);
        try {
            h_pade = evaluate_pade(art.pade, tau_hp);
        } catch (const NumericalError&) {
            ++poles_hit;  // sample landed exactly on a denominator zero
            continue;
        }
        const HPReal diff = abs(h_pade - HPReal(h_o, rt.prec));
        if (diff > max_diff) max_diff = diff;
        csv << g17(tau) << "," << g17(h_o) << "," << h_pade.str() << "," << diff.str() << "\n";
        ++rows;
    }
    const fs::path dir(o.out_dir.empty() ? "." : o.out_dir);
    const std::string base = "compare_" + sanitize(cfg.name);
    const fs::path csv_path = dir / (base + ".csv");
    atomic_write(csv_path, csv.str());
    std::vector<std::string> outputs{fs::absolute(csv_path).string()};
    const double t_io = seconds_since(t0);

    std::map<std::string, double> stages = stage_map(art.verdict.timings);
    stages["integration"] = t_int;
    stages["io"] = t_io;
    const fs::path manifest_path = dir / (base + ".manifest.json");
    atomic_write(manifest_path, manifest_json(cfg, stages, outputs).dump(2) + "\n");

    if (o.json_out) {
        json j;
        j["csv"] = outputs[0];
        j["manifest"] = fs::absolute(manifest_path).string();
        j["rows"] = rows;
        j["max_abs_diff"] = max_diff.str();
        j["status"] = to_string(art.verdict.status);
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "status " << to_string(art.verdict.status) << ", " << rows
                  << " sample points, max |h_pade - h_oracle| = " << max_diff.str(3);
        if (poles_hit > 0) std::cout << " (" << poles_hit << " samples on poles skipped)";
        std::cout << "\n";
        std::cout << "wrote " << outputs[0] << "\n";
        std::cout << "wrote " << fs::absolute(manifest_path).string() << "\n";
    }
    return kExitStable;
}

// ---------------------------------------------------------------- coeffs

int run_coeffs(const CommonOpts& o) {
    const ScenarioConfig cfg = load_with_overrides(o.configs[0], o);
    const ScenarioRuntime rt = build_scenario(cfg);

    auto t0 = std::chrono::steady_clock::now();
    const EquilibriumPoint sep = find_sep(*rt.model, rt.sep_guess_x, rt.sep_guess_v);
    const double t_sep = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const int order = rt.resolved.pade.L + rt.resolved.pade.M;
    const CoefficientTable table = propagate_coefficients(*rt.model, rt.map, rt.x0, rt.v0, order);
    const IndicatorSeries ind = indicator_coefficients(table, sep.x_star, order);
    const double t_prop = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    std::ostringstream csv;
    csv << "k";
    for (const auto& n : rt.model->state_names()) csv << "," << n;
    for (const auto& n : rt.model->alg_names()) csv << "," << n;
    csv << ",h\n";
    for (int k = 0; k <= order; ++k) {
        csv << k;
        for (const auto& s : table.X) csv << "," << s[k].str();
        for (const auto& s : table.V) csv << "," << s[k].str();
        csv << "," << ind.h[k].str() << "\n";
    }
    const fs::path dir(o.out_dir.empty() ? "." : o.out_dir);
    const std::string base = "coeffs_" + sanitize(cfg.name);
    const fs::path csv_path = dir / (base + ".csv");
    atomic_write(csv_path, csv.str());
    std::vector<std::string> outputs{fs::absolute(csv_path).string()};
    const double t_io = seconds_since(t0);

    const std::map<std::string, double> stages{
        {"sep_solve", t_sep}, {"propagation", t_prop}, {"io", t_io}};
    const fs::path manifest_path = dir / (base + ".manifest.json");
    atomic_write(manifest_path, manifest_json(cfg, stages, outputs).dump(2) + "\n");

    if (o.json_out) {
        json j;
        j["csv"] = outputs[0];
        j["manifest"] = fs::absolute(manifest_path).string();
        j["order"] = order;
        j["digits"] = rt.prec.digits();
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "propagated " << (order + 1) << " coefficient rows at " << rt.prec.digits()
                  << " digits\n";
        std::cout << "wrote " << outputs[0] << "\n";
        std::cout << "wrote " << fs::absolute(manifest_path).string() << "\n";
    }
    return kExitStable;
}

// ------------------------------------------------------------ pade-roots

int run_pade_roots(const CommonOpts& o) {
    const ScenarioConfig cfg = load_with_overrides(o.configs[0], o);
    const ScenarioRuntime rt = build_scenario(cfg);
    const AssessArtifacts art = assess_with_artifacts(rt);

    PolePolicy policy;
    policy.horizon = rt.map.horizon().to_double();
    const std::vector<RootLabel> labels = label_roots(art.denominator, art.numerator, rt.prec, policy);

    // the selected pole is the candidate with the smallest real part
    std::optional<size_t> selected;
    for (size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != RootLabel::Candidate) continue;
        if (!selected || art.denominator.roots[i].re() < art.denominator.roots[*selected].re())
            selected = i;
    }

    json roots_j = json::array();
    for (size_t i = 0; i < art.denominator.roots.size(); ++i) {
        json r;
        r["re"] = art.denominator.roots[i].re().str();
        r["im"] = art.denominator.roots[i].im().str();
        r["residual"] = art.denominator.residuals[i].str();
        r["label"] = to_string(labels[i]);
        r["selected"] = selected && *selected == i;
        roots_j.push_back(std::move(r));
    }
    json zeros_j = json::array();
    for (size_t i = 0; i < art.numerator.roots.size(); ++i) {
        json r;
        r["re"] = art.numerator.roots[i].re().str();
        r["im"] = art.numerator.roots[i].im().str();
        r["residual"] = art.numerator.residuals[i].str();
        zeros_j.push_back(std::move(r));
    }
    json j;
    j["scenario"] = json::parse(serialize_scenario(cfg));
    j["status"] = to_string(art.verdict.status);
    j["tau_pole"] = art.verdict.tau_pole ? json(art.verdict.tau_pole->str()) : json();
    j["real_candidates"] = art.verdict.real_candidates;
    j["filtered_doublets"] = art.verdict.filtered_doublets;
    j["condition_hint"] = art.denominator.condition_hint.str();
    j["denominator_roots"] = std::move(roots_j);
    j["numerator_roots"] = std::move(zeros_j);

    std::vector<std::string> outputs;
    if (!o.out_dir.empty()) {
        const fs::path dir(o.out_dir);
        const std::string base = "pade_roots_" + sanitize(cfg.name);
        const fs::path json_path = dir / (base + ".json");
        atomic_write(json_path, j.dump(2) + "\n");
        outputs.push_back(fs::absolute(json_path).string());
        const fs::path manifest_path = dir / (base + ".manifest.json");
        atomic_write(manifest_path,
                     manifest_json(cfg, stage_map(art.verdict.timings), outputs).dump(2) + "\n");
    }

    if (o.json_out) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "denominator roots (" << art.denominator.roots.size() << "), status "
                  << to_string(art.verdict.status) << ":\n";
        std::printf("  %3s  %-26s %-26s %-12s %s\n", "#", "re", "im", "|Q(z)|", "label");
        for (size_t i = 0; i < art.denominator.roots.size(); ++i) {
            std::printf("  %3zu  %-26s %-26s %-12s %s%s\n", i,
                        art.denominator.roots[i].re().str(18).c_str(),
                        art.denominator.roots[i].im().str(18).c_str(),
                        art.denominator.residuals[i].str(3).c_str(), to_string(labels[i]),
                        selected && *selected == i ? "  <- pole" : "");
        }
        for (const auto& p : outputs) std::cout << "wrote " << p << "\n";
    }
    return kExitStable;
}

// ------------------------------------------------------------ cct-bisect

int run_cct(const CommonOpts& o, double lo, double hi, double step) {
    const ScenarioConfig cfg = load_with_overrides(o.configs[0], o);
    auto t0 = std::chrono::steady_clock::now();
    const CctBracket b = cct_bisect(cfg, lo, hi, step);
    const double t_bisect = seconds_since(t0);
    const bool agree = b.method_lo == b.oracle_lo && b.method_hi == b.oracle_hi;

    json j;
    j["method_lo"] = b.method_lo;
    j["method_hi"] = b.method_hi;
    j["oracle_lo"] = b.oracle_lo;
    j["oracle_hi"] = b.oracle_hi;
    j["method_runs"] = b.method_runs;
    j["oracle_runs"] = b.oracle_runs;
    j["step"] = step;
    j["agreement"] = agree;

    std::vector<std::string> outputs;
    if (!o.out_dir.empty()) {
        const fs::path dir(o.out_dir);
        const std::string base = "cct_" + sanitize(cfg.name);
        const fs::path json_path = dir / (base + ".json");
        json file_j = j;
        file_j["scenario"] = json::parse(serialize_scenario(cfg));
        atomic_write(json_path, file_j.dump(2) + "\n");
        outputs.push_back(fs::absolute(json_path).string());
        const fs::path manifest_path = dir / (base + ".manifest.json");
        atomic_write(manifest_path,
                     manifest_json(cfg, {{"bisection", t_bisect}}, outputs).dump(2) + "\n");
    }

    if (o.json_out) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "method bracket: [" << g17(b.method_lo) << ", " << g17(b.method_hi) << "]  ("
                  << b.method_runs << " runs)\n";
        std::cout << "oracle bracket: [" << g17(b.oracle_lo) << ", " << g17(b.oracle_hi) << "]  ("
                  << b.oracle_runs << " runs)\n";
        std::cout << "agreement:      " << (agree ? "yes" : "no") << "\n";
        for (const auto& p : outputs) std::cout << "wrote " << p << "\n";
    }
    return kExitStable;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transient stability assessment via contracted-time Taylor coefficients and Pade poles"};
    app.set_version_flag("--version", POLEWARP_VERSION_STRING);
    app.require_subcommand(1);

    CommonOpts assess_o, simulate_o, compare_o, coeffs_o, roots_o, cct_o;
    double cct_lo = 0.0, cct_hi = 0.0, cct_step = 0.01;

    auto* cmd_assess = app.add_subcommand("assess", "Classify scenarios with the pole test");
    add_common(cmd_assess, assess_o, true);
    auto* cmd_simulate = app.add_subcommand("simulate", "Dump the benchmark trajectory and indicator to CSV");
    add_common(cmd_simulate, simulate_o, false);
    auto* cmd_compare =
        app.add_subcommand("compare", "Tabulate approximant vs. benchmark indicator values");
    add_common(cmd_compare, compare_o, false);
    auto* cmd_coeffs = app.add_subcommand("coeffs", "Dump the propagated Taylor coefficients to CSV");
    add_common(cmd_coeffs, coeffs_o, false);
    auto* cmd_roots = app.add_subcommand("pade-roots", "List denominator roots with filtering labels");
    add_common(cmd_roots, roots_o, false);
    auto* cmd_cct =
        app.add_subcommand("cct-bisect", "Bracket the critical clearing time by bisection");
    add_common(cmd_cct, cct_o, false);
    cmd_cct->add_option("--lo", cct_lo, "Clearing time known to be stable")->required();
    cmd_cct->add_option("--hi", cct_hi, "Clearing time known to be unstable")->required();
    cmd_cct->add_option("--step", cct_step, "Bracket width to stop at");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (cmd_assess->parsed()) return run_assess(assess_o);
        if (cmd_simulate->parsed()) return run_simulate(simulate_o);
        if (cmd_compare->parsed()) return run_compare(compare_o);
        if (cmd_coeffs->parsed()) return run_coeffs(coeffs_o);
        if (cmd_roots->parsed()) return run_pade_roots(roots_o);
        if (cmd_cct->parsed()) return run_cct(cct_o, cct_lo, cct_hi, cct_step);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure in stage '" << e.stage() << "': " << e.what() << "\n";
        return kExitNumerical;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitConfig;
}
