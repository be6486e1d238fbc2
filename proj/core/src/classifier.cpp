#include "polewarp/classifier.hpp"

#include <chrono>

#include "polewarp/errors.hpp"

namespace polewarp {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> demote(std::span<const HPReal> v) {
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& c : v) out.push_back(c.to_double());
    return out;
}

}  // namespace

const char* to_string(Status s) {
    switch (s) {
        case Status::Stable: return "Stable";
        case Status::UnstableOtherSEP: return "UnstableOtherSEP";
        case Status::UnstableDivergent: return "UnstableDivergent";
        case Status::UnstableUnclassified: return "UnstableUnclassified";
    }
    return "?";
}

Status status_from_string(const std::string& s) {
    if (s == "Stable") return Status::Stable;
    if (s == "UnstableOtherSEP") return Status::UnstableOtherSEP;
    if (s == "UnstableDivergent") return Status::UnstableDivergent;
    if (s == "UnstableUnclassified") return Status::UnstableUnclassified;
    throw ConfigError("unknown verdict status '" + s + "'");
}

AssessArtifacts assess_with_artifacts(const ScenarioRuntime& rt) {
    const Precision prec = rt.prec;
    AssessArtifacts art;
    StabilityVerdict& verdict = art.verdict;
    verdict.epsilon = rt.resolved.epsilon;

    auto t0 = std::chrono::steady_clock::now();
    art.sep = find_sep(*rt.model, rt.sep_guess_x, rt.sep_guess_v);
    verdict.sep_residual = art.sep.residual_norm;
    verdict.sep_iterations = art.sep.newton_iterations;
    verdict.timings.sep_solve = seconds_since(t0);

    const int order = rt.resolved.pade.L + rt.resolved.pade.M;
    t0 = std::chrono::steady_clock::now();
    art.table = propagate_coefficients(*rt.model, rt.map, rt.x0, rt.v0, order);
    art.indicator = indicator_coefficients(art.table, art.sep.x_star, order);
    verdict.timings.propagation = seconds_since(t0);
    verdict.h0 = art.indicator.h[0];

    t0 = std::chrono::steady_clock::now();
    art.pade = build_pade(art.indicator.h, rt.resolved.pade.L, rt.resolved.pade.M);
    verdict.degree_reductions = art.pade.degree_reductions;
    verdict.timings.pade = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    art.denominator = denominator_roots(art.pade);
    art.numerator = numerator_roots(art.pade);
    PolePolicy policy;
    policy.horizon = rt.map.horizon().to_double();
    const PoleSelection sel = smallest_positive_real_root(art.denominator, art.numerator, prec, policy);
    verdict.timings.roots = seconds_since(t0);
    verdict.filtered_doublets = sel.filtered_doublets;
    verdict.real_candidates = sel.real_candidates;
    verdict.root_residual_max = art.denominator.condition_hint;
    verdict.tau_pole = sel.tau_pole;

    const HPReal& horizon = rt.map.horizon();
    if (sel.tau_pole) verdict.pole_error = abs(*sel.tau_pole - horizon);

    // evaluation point just inside the horizon for the subtype diagnosis
    const HPReal tau_eval = horizon * (HPReal(1, prec) - pow10(-3, prec));
    try {
        verdict.h_at_horizon = evaluate_pade(art.pade, tau_eval);
    } catch (const NumericalError&) {
        verdict.h_at_horizon.reset();
    }

    if (verdict.pole_error && *verdict.pole_error <= HPReal(verdict.epsilon, prec)) {
        verdict.status = Status::Stable;
        return art;
    }

    // unstable subtype from the near-horizon plateau: h -> 0- means the
    // trajectory escapes, a finite negative plateau means it settled
    // somewhere else; anything else stays unclassified
    verdict.status = Status::UnstableUnclassified;
    if (verdict.h_at_horizon) {
        const HPReal mag = abs(*verdict.h_at_horizon);
        const HPReal h0_mag = abs(verdict.h0);
        if (mag <= HPReal(0.05, prec) * h0_mag) {
            verdict.status = Status::UnstableDivergent;
        } else if (verdict.h_at_horizon->is_negative() && mag <= HPReal(1000, prec) * h0_mag) {
            verdict.status = Status::UnstableOtherSEP;
        }
    }
    return art;
}

StabilityVerdict assess(const ScenarioRuntime& rt) { return assess_with_artifacts(rt).verdict; }

StabilityVerdict assess(const ScenarioConfig& cfg) { return assess(build_scenario(cfg)); }

OracleVerdict oracle_verdict(const ScenarioRuntime& rt, double horizon, const TruthOptions& opts) {
    const EquilibriumPoint sep = find_sep(*rt.model, rt.sep_guess_x, rt.sep_guess_v);
    const Trajectory traj = rk4_integrate(*rt.model, rt.x0_d(), rt.v0_d(), rt.resolved.oracle.dt, horizon);
    return truth_classify(traj, *rt.model, demote(sep.x_star), opts);
}

AgreementReport classify_against_oracle(const ScenarioConfig& cfg, std::optional<double> oracle_horizon) {
    const ScenarioRuntime rt = build_scenario(cfg);
    AgreementReport report;
    report.verdict = assess(rt);
    const double horizon = oracle_horizon ? *oracle_horizon : *rt.resolved.oracle.horizon;
    report.oracle = oracle_verdict(rt, horizon);
    report.oracle_conclusive = report.oracle != OracleVerdict::Inconclusive;
    if (report.oracle_conclusive) {
        const bool method_stable = report.verdict.status == Status::Stable;
        const bool oracle_stable = report.oracle == OracleVerdict::Stable;
        report.match = method_stable == oracle_stable;
        report.subtype_match =
            (report.verdict.status == Status::Stable && report.oracle == OracleVerdict::Stable) ||
            (report.verdict.status == Status::UnstableOtherSEP && report.oracle == OracleVerdict::UnstableOtherSEP) ||
            (report.verdict.status == Status::UnstableDivergent && report.oracle == OracleVerdict::UnstableDivergent);
    }
    return report;
}

CctBracket cct_bisect(const ScenarioConfig& base, double fct_lo, double fct_hi, double step) {
    if (!(step > 0.0)) throw ConfigError("cct-bisect: step must be positive");
    if (fct_lo > fct_hi) throw ConfigError("cct-bisect: lower clearing time exceeds upper");
    if (!base.fault) throw ConfigError("cct-bisect: scenario has no fault description");
    if (base.model_type != "wscc9") throw ConfigError("cct-bisect: requires a wscc9 fault scenario");

    CctBracket bracket;
    bracket.method_lo = bracket.oracle_lo = fct_lo;
    bracket.method_hi = bracket.oracle_hi = fct_hi;
    if (fct_lo == fct_hi) return bracket;

    auto scenario_at = [&](double fct) {
        ScenarioConfig cfg = base;
        cfg.fault->clearing_time = fct;
        cfg.ic_from_fault = true;
        cfg.initial_state.clear();
        cfg.initial_algebraic.clear();
        return cfg;
    };
    auto method_stable = [&](double fct) {
        ++bracket.method_runs;
        return assess(scenario_at(fct)).status == Status::Stable;
    };
    auto oracle_stable = [&](double fct) {
        ++bracket.oracle_runs;
        const ScenarioRuntime rt = build_scenario(scenario_at(fct));
        const OracleVerdict v = oracle_verdict(rt, *rt.resolved.oracle.horizon);
        if (v == OracleVerdict::Inconclusive)
            throw NumericalError("cct-bisect", "oracle inconclusive at clearing time " + std::to_string(fct));
        return v == OracleVerdict::Stable;
    };

    if (!method_stable(fct_lo) || method_stable(fct_hi))
        throw ConfigError("cct-bisect: method precondition failed (need Stable at the lower clearing time, Unstable at the upper)");
    if (!oracle_stable(fct_lo) || oracle_stable(fct_hi))
        throw ConfigError("cct-bisect: oracle precondition failed (need Stable at the lower clearing time, Unstable at the upper)");

    while (bracket.method_hi - bracket.method_lo > step * (1.0 + 1e-9)) {
        const double mid = 0.5 * (bracket.method_lo + bracket.method_hi);
        if (method_stable(mid))
            bracket.method_lo = mid;
        else
            bracket.method_hi = mid;
    }
    while (bracket.oracle_hi - bracket.oracle_lo > step * (1.0 + 1e-9)) {
        const double mid = 0.5 * (bracket.oracle_lo + bracket.oracle_hi);
        if (oracle_stable(mid))
            bracket.oracle_lo = mid;
        else
            bracket.oracle_hi = mid;
    }
    return bracket;
}

}  // namespace polewarp
