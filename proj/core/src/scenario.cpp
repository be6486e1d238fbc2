#include "polewarp/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "polewarp/errors.hpp"
#include "polewarp/lorenz.hpp"
#include "polewarp/smib.hpp"

namespace polewarp {

using nlohmann::json;

namespace {

// Numbers are allowed anywhere a decimal string is; their shortest
// round-trip form becomes the string we later parse at high precision.
std::string value_as_decimal(const json& j, const std::string& key) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number()) return j.dump();
    throw ConfigError("config key '" + key + "' must be a number or decimal string");
}

std::vector<std::string> string_list(const json& j, const std::string& key) {
    std::vector<std::string> out;
    if (!j.is_array()) throw ConfigError("config key '" + key + "' must be an array");
    for (const auto& e : j) out.push_back(value_as_decimal(e, key));
    return out;
}

const std::string& require_param(const ScenarioConfig& cfg, const std::string& key) {
    auto it = cfg.params.find(key);
    if (it == cfg.params.end())
        throw ConfigError("model '" + cfg.model_type + "' requires parameter '" + key + "'");
    return it->second;
}

std::string param_or(const ScenarioConfig& cfg, const std::string& key, const std::string& fallback) {
    auto it = cfg.params.find(key);
    return it == cfg.params.end() ? fallback : it->second;
}

std::vector<HPReal> parse_vector(const std::vector<std::string>& texts, Precision prec,
                                 const std::string& key) {
    std::vector<HPReal> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
        try {
            out.push_back(parse_decimal(t, prec));
        } catch (const ConfigError& e) {
            throw ConfigError("config key '" + key + "': " + e.what());
        }
    }
    return out;
}

// Newton on g(x0, v) = 0 with x0 held fixed, at working precision.
std::vector<HPReal> solve_algebraic_hp(const DynamicalModel& model,
                                       std::span<const HPReal> x0,
                                       std::vector<HPReal> v,
                                       Precision prec) {
    const int n = model.state_dim();
    const int m = model.alg_dim();
    std::vector<HPReal> g(static_cast<size_t>(m), HPReal(prec));
    Matrix<HPReal> f_x(n, n, HPReal(prec)), f_v(n, m, HPReal(prec));
    Matrix<HPReal> g_x(m, n, HPReal(prec));
    const HPReal tol = pow10(-(prec.digits() / 2), prec);
    for (int it = 0; it < 50; ++it) {
        model.eval_g(x0, v, g);
        if (norm2(g) <= tol) return v;
        Matrix<HPReal> g_v(m, m, HPReal(prec));
        model.jacobians(x0, v, f_x, f_v, g_x, g_v);
        std::vector<HPReal> step;
        try {
            step = lu_solve(std::move(g_v), std::span<const HPReal>(g));
        } catch (const SingularMatrixError&) {
            throw NumericalError("scenario", "singular network matrix while completing the initial condition");
        }
        for (int i = 0; i < m; ++i) v[static_cast<size_t>(i)] -= step[static_cast<size_t>(i)];
    }
    throw ConvergenceError("scenario", "algebraic completion of the initial condition did not converge");
}

std::vector<HPReal> promote(const std::vector<double>& v, Precision prec) {
    std::vector<HPReal> out;
    out.reserve(v.size());
    for (double c : v) out.emplace_back(c, prec);
    return out;
}

}  // namespace

HPReal parse_decimal(const std::string& text, Precision prec) {
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const std::string num = text.substr(0, slash);
        const std::string den = text.substr(slash + 1);
        const HPReal d(den, prec);
        if (d.is_zero()) throw ConfigError("fraction '" + text + "' divides by zero");
        return HPReal(num, prec) / d;
    }
    return HPReal(text, prec);
}

double default_mapping_rate(const std::string& model_type) {
    return model_type == "lorenz" ? 1.0 : 5.0;
}

double default_oracle_horizon(const std::string& model_type) {
    return model_type == "lorenz" ? 20.0 : 10.0;
}

ScenarioConfig parse_scenario_text(const std::string& text, const std::string& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario parse error: ") + e.what());
    }

    ScenarioConfig cfg;
    cfg.base_dir = base_dir;
    try {
        cfg.schema_version = j.value("schema_version", 1);
        if (cfg.schema_version != 1)
            throw ConfigError("unsupported schema_version " + std::to_string(cfg.schema_version));
        cfg.name = j.value("name", "");

        if (!j.contains("model")) throw ConfigError("config key 'model' is missing");
        const json& jm = j.at("model");
        cfg.model_type = jm.value("type", "");
        if (cfg.model_type != "lorenz" && cfg.model_type != "smib" && cfg.model_type != "wscc9")
            throw ConfigError("config key 'model.type' must be lorenz, smib, or wscc9");
        if (jm.contains("params")) {
            for (const auto& [key, val] : jm.at("params").items())
                cfg.params[key] = value_as_decimal(val, "model.params." + key);
        }
        cfg.data_file = jm.value("data_file", "");
        cfg.constant_power_loads = jm.value("constant_power_loads", false);
        if (jm.contains("fault")) {
            const json& jf = jm.at("fault");
            FaultSpec f;
            f.bus = jf.value("bus", 9);
            f.r = jf.value("R", 0.01);
            f.x = jf.value("X", 0.02);
            f.clearing_time = jf.value("clearing_time", 0.25);
            cfg.fault = f;
        }

        if (j.contains("initial_state")) cfg.initial_state = string_list(j.at("initial_state"), "initial_state");
        if (j.contains("initial_algebraic"))
            cfg.initial_algebraic = string_list(j.at("initial_algebraic"), "initial_algebraic");
        if (j.contains("sep_guess")) cfg.sep_guess = string_list(j.at("sep_guess"), "sep_guess");
        cfg.ic_from_fault = j.value("ic_from_fault", false);

        if (j.contains("mapping")) {
            const json& jp = j.at("mapping");
            if (jp.contains("K")) cfg.mapping.rate = jp.at("K").get<double>();
            cfg.mapping.exponent = jp.value("p", 3);
        }
        if (j.contains("pade")) {
            cfg.pade.L = j.at("pade").value("L", 40);
            cfg.pade.M = j.at("pade").value("M", 40);
        }
        if (j.contains("digits") && !j.at("digits").is_null()) cfg.digits = j.at("digits").get<int>();
        cfg.epsilon = j.value("epsilon", 0.01);
        if (j.contains("oracle")) {
            const json& jo = j.at("oracle");
            cfg.oracle.dt = jo.value("dt", 1e-4);
            if (jo.contains("horizon")) cfg.oracle.horizon = jo.at("horizon").get<double>();
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario schema error: ") + e.what());
    }

    if (cfg.pade.L < 0 || cfg.pade.M < 1)
        throw ConfigError("config key 'pade' requires L >= 0 and M >= 1");
    if (cfg.mapping.exponent < 1) throw ConfigError("config key 'mapping.p' must be >= 1");
    if (cfg.mapping.rate && !(*cfg.mapping.rate > 0.0))
        throw ConfigError("config key 'mapping.K' must be positive");
    if (!(cfg.epsilon > 0.0) || !(cfg.epsilon < 1.0))
        throw ConfigError("config key 'epsilon' must lie in (0, 1)");
    if (!(cfg.oracle.dt > 0.0)) throw ConfigError("config key 'oracle.dt' must be positive");
    if (cfg.digits && *cfg.digits < 1) throw ConfigError("config key 'digits' must be positive");
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string base = std::filesystem::path(path).parent_path().string();
    if (base.empty()) base = ".";
    ScenarioConfig cfg = parse_scenario_text(buf.str(), base);
    if (cfg.name.empty()) cfg.name = std::filesystem::path(path).stem().string();
    return cfg;
}

std::string serialize_scenario(const ScenarioConfig& cfg) {
    json j;
    j["schema_version"] = cfg.schema_version;
    j["name"] = cfg.name;
    json jm;
    jm["type"] = cfg.model_type;
    if (!cfg.params.empty()) {
        json jp;
        for (const auto& [k, v] : cfg.params) jp[k] = v;
        jm["params"] = jp;
    }
    if (!cfg.data_file.empty()) jm["data_file"] = cfg.data_file;
    if (cfg.constant_power_loads) jm["constant_power_loads"] = true;
    if (cfg.fault) {
        jm["fault"] = {{"bus", cfg.fault->bus},
                       {"R", cfg.fault->r},
                       {"X", cfg.fault->x},
                       {"clearing_time", cfg.fault->clearing_time}};
    }
    j["model"] = jm;
    if (!cfg.initial_state.empty()) j["initial_state"] = cfg.initial_state;
    if (!cfg.initial_algebraic.empty()) j["initial_algebraic"] = cfg.initial_algebraic;
    if (!cfg.sep_guess.empty()) j["sep_guess"] = cfg.sep_guess;
    if (cfg.ic_from_fault) j["ic_from_fault"] = true;
    json jmap;
    if (cfg.mapping.rate) jmap["K"] = *cfg.mapping.rate;
    jmap["p"] = cfg.mapping.exponent;
    j["mapping"] = jmap;
    j["pade"] = {{"L", cfg.pade.L}, {"M", cfg.pade.M}};
    if (cfg.digits) j["digits"] = *cfg.digits;
    j["epsilon"] = cfg.epsilon;
    json jo;
    jo["dt"] = cfg.oracle.dt;
    if (cfg.oracle.horizon) jo["horizon"] = *cfg.oracle.horizon;
    j["oracle"] = jo;
    return j.dump(2);
}

Precision scenario_precision(const ScenarioConfig& cfg) {
    if (cfg.digits) return Precision(std::max(*cfg.digits, Precision::kMinDigits));
    return Precision::for_order(cfg.pade.L, cfg.pade.M);
}

std::vector<double> ScenarioRuntime::x0_d() const {
    std::vector<double> out;
    out.reserve(x0.size());
    for (const auto& c : x0) out.push_back(c.to_double());
    return out;
}

std::vector<double> ScenarioRuntime::v0_d() const {
    std::vector<double> out;
    out.reserve(v0.size());
    for (const auto& c : v0) out.push_back(c.to_double());
    return out;
}

ScenarioRuntime build_scenario(const ScenarioConfig& cfg) {
    ScenarioRuntime rt;
    rt.resolved = cfg;
    if (!rt.resolved.mapping.rate) rt.resolved.mapping.rate = default_mapping_rate(cfg.model_type);
    if (!rt.resolved.oracle.horizon) rt.resolved.oracle.horizon = default_oracle_horizon(cfg.model_type);
    if (!rt.resolved.digits) rt.resolved.digits = scenario_precision(cfg).digits();
    rt.prec = scenario_precision(rt.resolved);
    const Precision prec = rt.prec;

    if (cfg.model_type == "lorenz") {
        auto model = std::make_shared<LorenzModel>(parse_decimal(param_or(cfg, "sigma", "10"), prec),
                                                   parse_decimal(param_or(cfg, "rho", "28"), prec),
                                                   parse_decimal(param_or(cfg, "beta", "8/3"), prec));
        rt.sep_guess_x = model->positive_equilibrium();
        rt.model = model;
    } else if (cfg.model_type == "smib") {
        SmibModel::Params p{parse_decimal(require_param(cfg, "M"), prec),
                            parse_decimal(param_or(cfg, "D", "0"), prec),
                            parse_decimal(require_param(cfg, "Pm"), prec),
                            parse_decimal(require_param(cfg, "Pmax"), prec)};
        auto model = std::make_shared<SmibModel>(std::move(p));
        rt.sep_guess_x = model->stable_equilibrium();
        rt.model = model;
    } else if (cfg.model_type == "wscc9") {
        if (cfg.data_file.empty()) throw ConfigError("config key 'model.data_file' is required for wscc9");
        std::filesystem::path dp(cfg.data_file);
        if (dp.is_relative()) dp = std::filesystem::path(cfg.base_dir.empty() ? "." : cfg.base_dir) / dp;
        auto system = std::make_shared<Wscc9System>(dp.string(), cfg.constant_power_loads, prec);
        rt.model = system->model(NetworkState::Postfault);
        rt.sep_guess_x = promote(system->prefault_state(), prec);
        rt.sep_guess_v = promote(system->prefault_algebraic(), prec);
        rt.system = std::move(system);
    } else {
        throw ConfigError("unknown model type '" + cfg.model_type + "'");
    }

    const int n = rt.model->state_dim();
    const int m = rt.model->alg_dim();

    if (!cfg.sep_guess.empty()) {
        if (static_cast<int>(cfg.sep_guess.size()) != n + m && static_cast<int>(cfg.sep_guess.size()) != n)
            throw ConfigError("config key 'sep_guess' must list " + std::to_string(n) + " (or " +
                              std::to_string(n + m) + ") entries");
        auto parsed = parse_vector(cfg.sep_guess, prec, "sep_guess");
        rt.sep_guess_x.assign(parsed.begin(), parsed.begin() + n);
        if (static_cast<int>(parsed.size()) == n + m)
            rt.sep_guess_v.assign(parsed.begin() + n, parsed.end());
    }
    if (m > 0 && static_cast<int>(rt.sep_guess_v.size()) != m && rt.system)
        rt.sep_guess_v = promote(rt.system->prefault_algebraic(), prec);

    if (cfg.ic_from_fault) {
        if (cfg.model_type != "wscc9") throw ConfigError("'ic_from_fault' requires the wscc9 model");
        if (!cfg.fault) throw ConfigError("'ic_from_fault' requires a 'model.fault' description");
        std::vector<double> x0d, v0d;
        rt.system->post_fault_initial_state(*cfg.fault, cfg.oracle.dt, x0d, v0d);
        rt.x0 = promote(x0d, prec);
        rt.v0 = promote(v0d, prec);
    } else {
        if (static_cast<int>(cfg.initial_state.size()) != n)
            throw ConfigError("config key 'initial_state' must list " + std::to_string(n) + " entries");
        rt.x0 = parse_vector(cfg.initial_state, prec, "initial_state");
        if (!cfg.initial_algebraic.empty()) {
            if (static_cast<int>(cfg.initial_algebraic.size()) != m)
                throw ConfigError("config key 'initial_algebraic' must list " + std::to_string(m) + " entries");
            rt.v0 = parse_vector(cfg.initial_algebraic, prec, "initial_algebraic");
        } else if (m > 0) {
            rt.v0 = solve_algebraic_hp(*rt.model, rt.x0, rt.sep_guess_v, prec);
        }
    }

    rt.map = TimeContractionMap(*rt.resolved.mapping.rate, rt.resolved.mapping.exponent, prec);
    return rt;
}

}  // namespace polewarp
