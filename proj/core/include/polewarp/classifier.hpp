#pragma once

#include <optional>
#include <string>

#include "polewarp/dtengine.hpp"
#include "polewarp/oracle.hpp"
#include "polewarp/pade.hpp"
#include "polewarp/scenario.hpp"

namespace polewarp {

enum class Status { Stable, UnstableOtherSEP, UnstableDivergent, UnstableUnclassified };

const char* to_string(Status s);
Status status_from_string(const std::string& s);

struct StageTimings {
    double sep_solve = 0.0;
    double propagation = 0.0;
    double pade = 0.0;
    double roots = 0.0;
    double total() const { return sep_solve + propagation + pade + roots; }
};

/// Outcome of the pole test plus the diagnostics that motivated it.
/// Stable iff tau_pole is present and |tau_pole - horizon| <= epsilon;
/// the unstable subtype comes from the approximant's value near the
/// horizon relative to h_0 (h -> 0 divergent, finite negative plateau
/// for convergence to some other equilibrium).
struct StabilityVerdict {
    Status status = Status::UnstableUnclassified;
    std::optional<HPReal> tau_pole;
    std::optional<HPReal> pole_error;
    std::optional<HPReal> h_at_horizon;  // absent when the eval point hits a pole
    HPReal h0;
    double epsilon = 0.01;
    int degree_reductions = 0;
    int filtered_doublets = 0;
    int real_candidates = 0;
    HPReal root_residual_max;
    HPReal sep_residual;
    int sep_iterations = 0;
    StageTimings timings;
};

/// Verdict plus every intermediate the pipeline computed on the way:
/// the equilibrium, the coefficient table, the indicator series, the
/// approximant and both root sets. Tools that plot or dump the
/// internals use this; plain classification goes through assess().
struct AssessArtifacts {
    StabilityVerdict verdict;
    EquilibriumPoint sep;
    CoefficientTable table;
    IndicatorSeries indicator;
    PadeApproximant pade;
    RootSet denominator;
    RootSet numerator;
};

AssessArtifacts assess_with_artifacts(const ScenarioRuntime& rt);

/// Full pipeline on an assembled scenario: designated-SEP Newton solve,
/// coefficient propagation to order L+M, [L/M] approximant, denominator
/// roots, pole test, subtype diagnosis.
StabilityVerdict assess(const ScenarioRuntime& rt);
StabilityVerdict assess(const ScenarioConfig& cfg);

/// Benchmark verdict for the same scenario: RK4 at the configured step
/// against the Newton-solved equilibrium.
OracleVerdict oracle_verdict(const ScenarioRuntime& rt, double horizon, const TruthOptions& opts = {});

struct AgreementReport {
    StabilityVerdict verdict;
    OracleVerdict oracle = OracleVerdict::Inconclusive;
    bool oracle_conclusive = false;
    bool match = false;          // stable/unstable polarity agreement
    bool subtype_match = false;  // exact category agreement
};

AgreementReport classify_against_oracle(const ScenarioConfig& cfg,
                                        std::optional<double> oracle_horizon = {});

/// Critical-clearing-time brackets from bisection, one from the pole
/// test and one from the RK4 oracle, each narrowed to at most `step`.
struct CctBracket {
    double method_lo = 0.0;
    double method_hi = 0.0;
    double oracle_lo = 0.0;
    double oracle_hi = 0.0;
    int method_runs = 0;
    int oracle_runs = 0;
};

CctBracket cct_bisect(const ScenarioConfig& base, double fct_lo, double fct_hi, double step);

}  // namespace polewarp
