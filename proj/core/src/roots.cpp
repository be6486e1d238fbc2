#include "polewarp/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "polewarp/errors.hpp"

namespace polewarp {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// (ar br - ai bi, ar bi + ai br); out must not alias the inputs.
void cmul(mpfr_ptr out_r, mpfr_ptr out_i, mpfr_srcptr ar, mpfr_srcptr ai,
          mpfr_srcptr br, mpfr_srcptr bi, mpfr_ptr t1, mpfr_ptr t2) {
    mpfr_mul(t1, ar, br, MPFR_RNDN);
    mpfr_mul(t2, ai, bi, MPFR_RNDN);
    mpfr_sub(out_r, t1, t2, MPFR_RNDN);
    mpfr_mul(t1, ar, bi, MPFR_RNDN);
    mpfr_mul(t2, ai, br, MPFR_RNDN);
    mpfr_add(out_i, t1, t2, MPFR_RNDN);
}

// Simultaneous Horner for p(z), p'(z) and the running magnitude bound
// B(|z|) = sum |c_j| |z|^j used as the attainable-residual floor.
class HornerEval {
public:
    HornerEval(std::span<const HPReal> coeffs, Precision prec) : coeffs_(coeffs) {
        const mpfr_prec_t bits = prec.bits();
        for (auto* m : all()) mpfr_init2(m, bits);
    }
    ~HornerEval() {
        for (auto* m : all()) mpfr_clear(m);
    }
    HornerEval(const HornerEval&) = delete;
    HornerEval& operator=(const HornerEval&) = delete;

    void eval(const HPComplex& z, HPComplex& p, HPComplex& dp, HPReal& p_mag, HPReal& floor_mag) {
        const int d = static_cast<int>(coeffs_.size()) - 1;
        mpfr_hypot(r_, z.re().raw(), z.im().raw(), MPFR_RNDN);
        mpfr_set(pr_, coeffs_[static_cast<size_t>(d)].raw(), MPFR_RNDN);
        mpfr_set_zero(pi_, 1);
        mpfr_set_zero(dpr_, 1);
        mpfr_set_zero(dpi_, 1);
        mpfr_abs(b_, coeffs_[static_cast<size_t>(d)].raw(), MPFR_RNDN);
        for (int j = d - 1; j >= 0; --j) {
            cmul(nr_, ni_, dpr_, dpi_, z.re().raw(), z.im().raw(), t1_, t2_);
            mpfr_add(dpr_, nr_, pr_, MPFR_RNDN);
            mpfr_add(dpi_, ni_, pi_, MPFR_RNDN);
            cmul(nr_, ni_, pr_, pi_, z.re().raw(), z.im().raw(), t1_, t2_);
            mpfr_add(pr_, nr_, coeffs_[static_cast<size_t>(j)].raw(), MPFR_RNDN);
            mpfr_set(pi_, ni_, MPFR_RNDN);
            mpfr_abs(t1_, coeffs_[static_cast<size_t>(j)].raw(), MPFR_RNDN);
            mpfr_fma(b_, b_, r_, t1_, MPFR_RNDN);
        }
        const Precision prec = coeffs_.front().precision();
        HPReal re(prec), im(prec);
        mpfr_set(re.raw(), pr_, MPFR_RNDN);
        mpfr_set(im.raw(), pi_, MPFR_RNDN);
        p = HPComplex(re, im);
        mpfr_set(re.raw(), dpr_, MPFR_RNDN);
        mpfr_set(im.raw(), dpi_, MPFR_RNDN);
        dp = HPComplex(re, im);
        p_mag = HPReal(prec);
        mpfr_hypot(p_mag.raw(), pr_, pi_, MPFR_RNDN);
        floor_mag = HPReal(prec);
        mpfr_set(floor_mag.raw(), b_, MPFR_RNDN);
    }

private:
    std::vector<mpfr_ptr> all() {
        return {pr_, pi_, dpr_, dpi_, nr_, ni_, t1_, t2_, r_, b_};
    }
    std::span<const HPReal> coeffs_;
    mpfr_t pr_, pi_, dpr_, dpi_, nr_, ni_, t1_, t2_, r_, b_;
};

// log |x| in double, safe for values far outside double range.
double log_mag(const HPReal& x) {
    if (x.is_zero()) return -std::numeric_limits<double>::infinity();
    long exp2 = 0;
    const double d = mpfr_get_d_2exp(&exp2, x.raw(), MPFR_RNDN);
    return std::log(std::abs(d)) + static_cast<double>(exp2) * 0.6931471805599453;
}

// Starting points on circles whose radii come from the upper convex
// hull of (j, log|c_j|) (the usual Newton-polygon estimates).
std::vector<HPComplex> initial_guesses(std::span<const HPReal> coeffs, Precision prec) {
    const int d = static_cast<int>(coeffs.size()) - 1;
    std::vector<double> lm(coeffs.size());
    for (size_t j = 0; j < coeffs.size(); ++j) lm[j] = log_mag(coeffs[j]);

    std::vector<int> hull;  // indices of upper-hull vertices, left to right
    for (int j = 0; j <= d; ++j) {
        if (std::isinf(lm[static_cast<size_t>(j)]) && j != 0 && j != d) continue;
        while (hull.size() >= 2) {
            const int a = hull[hull.size() - 2];
            const int b = hull[hull.size() - 1];
            // drop b if it lies below segment a-j
            const double slope_ab = (lm[static_cast<size_t>(b)] - lm[static_cast<size_t>(a)]) / (b - a);
            const double slope_aj = (lm[static_cast<size_t>(j)] - lm[static_cast<size_t>(a)]) / (j - a);
            if (slope_ab <= slope_aj)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(j);
    }

    std::vector<HPComplex> z;
    z.reserve(static_cast<size_t>(d));
    int produced = 0;
    for (size_t e = 0; e + 1 < hull.size(); ++e) {
        const int k1 = hull[e];
        const int k2 = hull[e + 1];
        const int group = k2 - k1;
        const double log_r = (lm[static_cast<size_t>(k1)] - lm[static_cast<size_t>(k2)]) / group;
        HPReal radius(log_r, prec);
        radius = exp(radius);
        for (int i = 0; i < group; ++i) {
            const double angle = kTwoPi * (static_cast<double>(i) / group + 0.26 * static_cast<double>(e + 1)) + 0.5;
            z.emplace_back(radius * HPComplex(std::cos(angle), std::sin(angle), prec));
            ++produced;
        }
    }
    // Degenerate hulls (all coefficients equal magnitude etc.) still
    // produce exactly d points; top up defensively on the unit circle.
    while (produced < d) {
        const double angle = kTwoPi * produced / d + 0.31;
        z.emplace_back(std::cos(angle), std::sin(angle), prec);
        ++produced;
    }
    return z;
}

}  // namespace

HPComplex polynomial_eval(std::span<const HPReal> coeffs, const HPComplex& z) {
    const Precision prec = z.precision();
    HPComplex acc(prec);
    for (int j = static_cast<int>(coeffs.size()) - 1; j >= 0; --j) {
        acc = acc * z + HPComplex(coeffs[static_cast<size_t>(j)], HPReal(prec));
    }
    return acc;
}

std::vector<HPComplex> polynomial_roots(std::span<const HPReal> coeffs,
                                        const RootFindOptions& opts) {
    if (coeffs.empty()) return {};
    const Precision prec = coeffs.front().precision();
    const int digits = prec.digits();

    // Effective degree: drop trailing coefficients that vanish relative
    // to the largest magnitude.
    HPReal max_mag(prec);
    for (const auto& c : coeffs)
        if (abs(c) > max_mag) max_mag = abs(c);
    if (max_mag.is_zero()) return {};
    const HPReal strip_tol = pow10(5 - digits, prec) * max_mag;

    int hi = static_cast<int>(coeffs.size()) - 1;
    while (hi > 0 && abs(coeffs[static_cast<size_t>(hi)]) <= strip_tol) --hi;
    int lo = 0;
    std::vector<HPComplex> roots;
    while (lo < hi && coeffs[static_cast<size_t>(lo)].is_zero()) {
        roots.emplace_back(prec);  // exact zero root
        ++lo;
    }
    std::span<const HPReal> work = coeffs.subspan(static_cast<size_t>(lo), static_cast<size_t>(hi - lo) + 1);
    const int d = static_cast<int>(work.size()) - 1;
    if (d == 0) return roots;
    if (d == 1) {
        roots.emplace_back(-(work[0] / work[1]), HPReal(prec));
        return roots;
    }

    std::vector<HPComplex> z = initial_guesses(work, prec);
    std::vector<bool> settled(static_cast<size_t>(d), false);

    HornerEval horner(work, prec);
    const HPReal res_floor_mu = HPReal(static_cast<long>(4 * d), prec) * pow10(1 - digits, prec);
    const HPReal step_tol = pow10(2 - digits, prec);
    const HPReal one(1L, prec);

    HPComplex p(prec), dp(prec);
    HPReal p_mag(prec), bound(prec);

    bool converged = false;
    for (int sweep = 0; sweep < opts.max_sweeps && !converged; ++sweep) {
        HPReal max_step(prec);
        for (int i = 0; i < d; ++i) {
            if (settled[static_cast<size_t>(i)]) continue;
            HPComplex& zi = z[static_cast<size_t>(i)];
            horner.eval(zi, p, dp, p_mag, bound);
            if (p_mag <= res_floor_mu * bound) {
                settled[static_cast<size_t>(i)] = true;
                continue;
            }
            if (abs(dp).is_zero()) {
                // saddle of the iteration; nudge off it
                zi += HPComplex(pow10(-digits / 2, prec), pow10(-digits / 2, prec));
                continue;
            }
            const HPComplex newton = p / dp;
            HPComplex repulsion(prec);
            for (int j = 0; j < d; ++j) {
                if (j == i) continue;
                const HPComplex diff = zi - z[static_cast<size_t>(j)];
                if (abs(diff).is_zero()) continue;
                repulsion += HPComplex(one, HPReal(prec)) / diff;
            }
            const HPComplex denom = HPComplex(one, HPReal(prec)) - newton * repulsion;
            const HPComplex w = abs(denom).is_zero() ? newton : newton / denom;
            zi -= w;
            const HPReal rel = abs(w) / (one + abs(zi));
            if (rel > max_step) max_step = rel;
        }
        converged = std::all_of(settled.begin(), settled.end(), [](bool s) { return s; }) ||
                    max_step <= step_tol;
    }
    if (!converged) {
        HPReal worst(prec);
        for (int i = 0; i < d; ++i) {
            horner.eval(z[static_cast<size_t>(i)], p, dp, p_mag, bound);
            if (p_mag > worst) worst = p_mag;
        }
        throw ConvergenceError("root-finding",
                               "Aberth did not converge in " + std::to_string(opts.max_sweeps) +
                                   " sweeps; worst residual " + worst.str(3));
    }

    for (int i = 0; i < d; ++i) {
        HPComplex& zi = z[static_cast<size_t>(i)];
        for (int it = 0; it < opts.polish_iterations; ++it) {
            horner.eval(zi, p, dp, p_mag, bound);
            if (p_mag <= res_floor_mu * bound) break;
            if (abs(dp).is_zero()) break;
            zi -= p / dp;
        }
    }

    roots.insert(roots.end(), z.begin(), z.end());
    return roots;
}

}  // namespace polewarp
