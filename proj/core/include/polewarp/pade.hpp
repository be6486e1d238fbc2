#pragma once

#include <optional>
#include <vector>

#include "polewarp/precision.hpp"
#include "polewarp/roots.hpp"
#include "polewarp/series.hpp"

namespace polewarp {

/// Rational approximant P/Q with the Maclaurin expansion of the input
/// series reproduced through order L + M_deg. Q is normalized to
/// q_0 = 1. If the defining Toeplitz system was (near-)singular the
/// denominator degree was lowered until it became solvable;
/// `degree_reductions` records how many steps that took.
struct PadeApproximant {
    TaylorSeries P;
    TaylorSeries Q;
    int degree_reductions = 0;

    int L() const noexcept { return P.order(); }
    int M_deg() const noexcept { return Q.order(); }
    Precision precision() const { return Q.precision(); }
};

/// Builds the [L/M] approximant of h at h's precision context (which
/// must provide at least L+M+1 digits by construction of the series).
/// Requires h.order() >= L + M_deg.
PadeApproximant build_pade(const TaylorSeries& h, int L, int M_deg);

/// P(tau)/Q(tau) by Horner. Throws NumericalError("pade-eval") when
/// Q(tau) is exactly zero (a pole hit); near-pole values are returned
/// as-is, large as they may be.
HPReal evaluate_pade(const PadeApproximant& a, const HPReal& tau);

/// Roots of a real polynomial together with the achieved residuals
/// |poly(root)|. `condition_hint` is the largest residual and gives a
/// quick read on how trustworthy the root set is.
struct RootSet {
    std::vector<HPComplex> roots;
    std::vector<HPReal> residuals;
    HPReal condition_hint;
};

RootSet polynomial_root_set(const TaylorSeries& poly, const RootFindOptions& opts = {});
RootSet denominator_roots(const PadeApproximant& a, const RootFindOptions& opts = {});
RootSet numerator_roots(const PadeApproximant& a, const RootFindOptions& opts = {});

/// Which denominator roots count as genuine positive real poles.
/// imag_tol is horizon-relative (the mapped infinite-time point sits at
/// tau = horizon); a root closer than 10^(-digits/4) to some numerator
/// root is a spurious pole-zero pair and is discarded.
struct PolePolicy {
    double imag_tol = 1e-6;
    double pos_tol = 1e-8;
    double horizon = 1.0;
};

struct PoleSelection {
    std::optional<HPReal> tau_pole;
    int filtered_doublets = 0;
    int real_candidates = 0;
};

/// Per-root classification under a PolePolicy. Candidate roots are the
/// ones eligible to be the pole; Doublet marks a real positive root
/// cancelled by a nearby numerator zero.
enum class RootLabel { Complex, NonPositive, Doublet, Candidate };

const char* to_string(RootLabel label);

std::vector<RootLabel> label_roots(const RootSet& denominator,
                                   const RootSet& numerator,
                                   Precision prec,
                                   const PolePolicy& policy = {});

PoleSelection smallest_positive_real_root(const RootSet& denominator,
                                          const RootSet& numerator,
                                          Precision prec,
                                          const PolePolicy& policy = {});

}  // namespace polewarp
