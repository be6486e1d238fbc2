#include "polewarp/pade.hpp"

#include <algorithm>
#include <span>

#include "polewarp/errors.hpp"
#include "polewarp/linalg.hpp"

namespace polewarp {

namespace {

// One attempt at the order-matching conditions for a fixed denominator
// degree. Rows m = 1..M of sum_{j=0..M} q_j h_{L+m-j} = 0 with q_0 = 1
// and h at negative indices taken as zero. Returns false when the
// Toeplitz matrix is singular or has collapsed pivots.
bool try_build(const TaylorSeries& h, int L, int M, Precision prec,
               TaylorSeries& P_out, TaylorSeries& Q_out) {
    const HPReal zero(prec);
    auto h_at = [&](int idx) -> const HPReal& {
        return idx < 0 ? zero : h[idx];
    };

    TaylorSeries Q(M, prec);
    Q[0] = HPReal(1, prec);
    if (M > 0) {
        Matrix<HPReal> A(M, M, HPReal(prec));
        std::vector<HPReal> b(static_cast<size_t>(M), HPReal(prec));
        HPReal max_entry(prec);
        for (int m = 1; m <= M; ++m) {
            for (int j = 1; j <= M; ++j) {
                const HPReal& e = h_at(L + m - j);
                A(m - 1, j - 1) = e;
                if (abs(e) > max_entry) max_entry = abs(e);
            }
            b[static_cast<size_t>(m - 1)] = -h_at(L + m);
        }
        if (max_entry.is_zero()) return false;
        std::vector<HPReal> q;
        try {
            LUDecomposition<HPReal> lu(std::move(A));
            if (lu.min_pivot() <= pow10(10 - prec.digits(), prec) * max_entry) return false;
            q = lu.solve(std::span<const HPReal>(b));
        } catch (const SingularMatrixError&) {
            return false;
        }
        for (int j = 1; j <= M; ++j) Q[j] = q[static_cast<size_t>(j - 1)];
    }

    TaylorSeries P(L, prec);
    for (int i = 0; i <= L; ++i) {
        HPReal acc(prec);
        for (int j = 0; j <= std::min(i, M); ++j) acc += Q[j] * h_at(i - j);
        P[i] = acc;
    }
    P_out = std::move(P);
    Q_out = std::move(Q);
    return true;
}

}  // namespace

PadeApproximant build_pade(const TaylorSeries& h, int L, int M_deg) {
    if (L < 0 || M_deg < 0) throw ConfigError("pade orders must be non-negative");
    if (h.empty() || h.order() < L + M_deg)
        throw ConfigError("series order " + std::to_string(h.empty() ? -1 : h.order()) +
                          " is too short for a [" + std::to_string(L) + "/" +
                          std::to_string(M_deg) + "] approximant");
    const Precision prec = h.precision();

    PadeApproximant out;
    for (int M = M_deg; M >= 0; --M) {
        if (try_build(h, L, M, prec, out.P, out.Q)) {
            out.degree_reductions = M_deg - M;
            return out;
        }
    }
    // M = 0 always succeeds (pure polynomial), so this is unreachable;
    // keep a hard failure rather than UB if that ever changes.
    throw NumericalError("pade", "denominator system singular at every degree");
}

HPReal evaluate_pade(const PadeApproximant& a, const HPReal& tau) {
    const HPReal den = a.Q.evaluate(tau);
    if (den.is_zero())
        throw NumericalError("pade-eval", "evaluation point is a pole (Q(tau) = 0 at tau = " + tau.str(6) + ")");
    return a.P.evaluate(tau) / den;
}

RootSet polynomial_root_set(const TaylorSeries& poly, const RootFindOptions& opts) {
    const Precision prec = poly.precision();
    RootSet out;
    out.roots = polynomial_roots(poly.coeffs(), opts);
    out.residuals.reserve(out.roots.size());
    out.condition_hint = HPReal(prec);
    for (const auto& r : out.roots) {
        HPReal res = abs(polynomial_eval(poly.coeffs(), r));
        if (res > out.condition_hint) out.condition_hint = res;
        out.residuals.push_back(std::move(res));
    }
    return out;
}

RootSet denominator_roots(const PadeApproximant& a, const RootFindOptions& opts) {
    if (a.M_deg() < 1) throw ConfigError("denominator is constant; no roots to find");
    return polynomial_root_set(a.Q, opts);
}

RootSet numerator_roots(const PadeApproximant& a, const RootFindOptions& opts) {
    return polynomial_root_set(a.P, opts);
}

const char* to_string(RootLabel label) {
    switch (label) {
        case RootLabel::Complex: return "complex";
        case RootLabel::NonPositive: return "non-positive";
        case RootLabel::Doublet: return "doublet";
        case RootLabel::Candidate: return "candidate";
    }
    return "?";
}

std::vector<RootLabel> label_roots(const RootSet& denominator,
                                   const RootSet& numerator,
                                   Precision prec,
                                   const PolePolicy& policy) {
    const HPReal imag_tol(policy.imag_tol * policy.horizon, prec);
    const HPReal pos_tol(policy.pos_tol, prec);
    const HPReal doublet_tol = pow10(-(prec.digits() / 4), prec);

    std::vector<RootLabel> labels;
    labels.reserve(denominator.roots.size());
    for (const auto& root : denominator.roots) {
        if (abs(root.im()) > imag_tol) {
            labels.push_back(RootLabel::Complex);
            continue;
        }
        if (root.re() <= pos_tol) {
            labels.push_back(RootLabel::NonPositive);
            continue;
        }
        bool spurious = false;
        for (const auto& zero : numerator.roots) {
            if (abs(root - zero) <= doublet_tol) {
                spurious = true;
                break;
            }
        }
        labels.push_back(spurious ? RootLabel::Doublet : RootLabel::Candidate);
    }
    return labels;
}

PoleSelection smallest_positive_real_root(const RootSet& denominator,
                                          const RootSet& numerator,
                                          Precision prec,
                                          const PolePolicy& policy) {
    const std::vector<RootLabel> labels = label_roots(denominator, numerator, prec, policy);
    PoleSelection sel;
    for (size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == RootLabel::Complex || labels[i] == RootLabel::NonPositive) continue;
        ++sel.real_candidates;
        if (labels[i] == RootLabel::Doublet) {
            ++sel.filtered_doublets;
            continue;
        }
        const HPReal re = denominator.roots[i].re();
        if (!sel.tau_pole || re < *sel.tau_pole) sel.tau_pole = re;
    }
    return sel;
}

}  // namespace polewarp
