#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "polewarp/model.hpp"
#include "polewarp/precision.hpp"
#include "polewarp/timewarp.hpp"
#include "polewarp/wscc9.hpp"

namespace polewarp {

/// Declarative description of one assessment run, loaded from a JSON
/// file. Numeric model parameters and initial conditions are kept as
/// decimal strings (with "a/b" fractions allowed) so they can be
/// realized exactly at whatever working precision the run resolves to.
struct ScenarioConfig {
    struct Mapping {
        std::optional<double> rate;  // K; defaults per model family
        int exponent = 3;            // p
    };
    struct Pade {
        int L = 40;
        int M = 40;
    };
    struct Oracle {
        double dt = 1e-4;
        std::optional<double> horizon;  // defaults per model family
    };

    int schema_version = 1;
    std::string name;
    std::string model_type;  // "lorenz" | "smib" | "wscc9"
    std::map<std::string, std::string> params;
    std::string data_file;  // wscc9 network data (relative to the config file)
    bool constant_power_loads = false;
    std::optional<FaultSpec> fault;
    bool ic_from_fault = false;
    std::vector<std::string> initial_state;
    std::vector<std::string> initial_algebraic;  // optional; solved when absent
    std::vector<std::string> sep_guess;          // optional; model default when absent
    Mapping mapping;
    Pade pade;
    std::optional<int> digits;  // default max(L+M+1, 34)
    double epsilon = 0.01;
    Oracle oracle;
    std::string base_dir;  // directory of the config file, for data_file resolution
};

ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario_text(const std::string& text, const std::string& base_dir);
std::string serialize_scenario(const ScenarioConfig& cfg);

/// Working precision the scenario resolves to: explicit digits if set,
/// otherwise the order rule L+M+1 (clamped at the 34-digit floor).
Precision scenario_precision(const ScenarioConfig& cfg);

/// Decimal string or "a/b" fraction at the given precision.
HPReal parse_decimal(const std::string& text, Precision prec);

/// Mapping rate and oracle horizon defaults differ between the Lorenz
/// benchmark (K=1, 20 s) and the power-system models (K=5, 10 s).
double default_mapping_rate(const std::string& model_type);
double default_oracle_horizon(const std::string& model_type);

/// A scenario realized at working precision: the model, a consistent
/// initial condition, the designated-SEP guess, and the time mapping.
struct ScenarioRuntime {
    ScenarioConfig resolved;  // defaults filled in
    Precision prec{Precision::kMinDigits};
    std::shared_ptr<const DynamicalModel> model;
    std::shared_ptr<const Wscc9System> system;  // wscc9 scenarios only
    std::vector<HPReal> x0, v0;
    std::vector<HPReal> sep_guess_x, sep_guess_v;
    TimeContractionMap map{1.0, 3, Precision(Precision::kMinDigits)};

    std::vector<double> x0_d() const;
    std::vector<double> v0_d() const;
};

ScenarioRuntime build_scenario(const ScenarioConfig& cfg);

}  // namespace polewarp
