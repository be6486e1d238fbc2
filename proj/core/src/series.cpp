#include "polewarp/series.hpp"

#include <algorithm>

namespace polewarp {

TaylorSeries::TaylorSeries(int order, Precision prec) {
    if (order < 0) throw ConfigError("series order must be >= 0");
    coeffs_.assign(static_cast<size_t>(order) + 1, HPReal(prec));
}

TaylorSeries::TaylorSeries(std::vector<HPReal> coeffs) : coeffs_(std::move(coeffs)) {}

Precision TaylorSeries::precision() const {
    return coeffs_.empty() ? Precision(Precision::kMinDigits) : coeffs_.front().precision();
}

void TaylorSeries::resize(int order) {
    coeffs_.resize(static_cast<size_t>(order) + 1, HPReal(precision()));
}

TaylorSeries TaylorSeries::truncated(int order) const {
    TaylorSeries out;
    const int n = std::min(order, this->order());
    out.coeffs_.assign(coeffs_.begin(), coeffs_.begin() + n + 1);
    return out;
}

HPReal TaylorSeries::evaluate(const HPReal& tau) const {
    HPReal acc(precision());
    for (int k = order(); k >= 0; --k) {
        mpfr_fma(acc.raw(), acc.raw(), tau.raw(), coeffs_[static_cast<size_t>(k)].raw(), MPFR_RNDN);
    }
    return acc;
}

namespace {

void require_same_context(const TaylorSeries& a, const TaylorSeries& b) {
    if (!a.empty() && !b.empty() && !(a.precision() == b.precision()))
        throw ConfigError("series precision contexts differ");
}

}  // namespace

TaylorSeries series_add(const TaylorSeries& a, const TaylorSeries& b) {
    require_same_context(a, b);
    const int n = std::min(a.order(), b.order());
    TaylorSeries c(n, a.precision());
    for (int k = 0; k <= n; ++k) c[k] = a[k] + b[k];
    return c;
}

TaylorSeries series_sub(const TaylorSeries& a, const TaylorSeries& b) {
    require_same_context(a, b);
    const int n = std::min(a.order(), b.order());
    TaylorSeries c(n, a.precision());
    for (int k = 0; k <= n; ++k) c[k] = a[k] - b[k];
    return c;
}

TaylorSeries series_scale(const TaylorSeries& a, const HPReal& s) {
    TaylorSeries c(a.order(), a.precision());
    for (int k = 0; k <= a.order(); ++k) c[k] = a[k] * s;
    return c;
}

HPReal convolve_at(const TaylorSeries& a, const TaylorSeries& b, int k) {
    HPReal acc(a.precision());
    mpfr_t t;
    mpfr_init2(t, acc.precision().bits());
    for (int j = 0; j <= k; ++j) {
        mpfr_mul(t, a[j].raw(), b[k - j].raw(), MPFR_RNDN);
        mpfr_add(acc.raw(), acc.raw(), t, MPFR_RNDN);
    }
    mpfr_clear(t);
    return acc;
}

TaylorSeries series_mul(const TaylorSeries& a, const TaylorSeries& b, int order) {
    require_same_context(a, b);
    if (a.order() < order || b.order() < order)
        throw ConfigError("series_mul: input order below requested product order");
    TaylorSeries c(order, a.precision());
    for (int k = 0; k <= order; ++k) c[k] = convolve_at(a, b, k);
    return c;
}

TaylorSeries series_reciprocal(const TaylorSeries& a, int order) {
    if (a.empty() || a[0].is_zero())
        throw NumericalError("series-reciprocal", "leading coefficient is zero (singular at origin)");
    if (a.order() < order)
        throw ConfigError("series_reciprocal: input order below requested order");
    const Precision prec = a.precision();
    TaylorSeries r(order, prec);
    r[0] = HPReal(1L, prec) / a[0];
    mpfr_t t, acc;
    mpfr_init2(t, prec.bits());
    mpfr_init2(acc, prec.bits());
    for (int k = 1; k <= order; ++k) {
        // r_k = -(sum_{j=1..k} a_j r_{k-j}) / a_0
        mpfr_set_zero(acc, 1);
        for (int j = 1; j <= k; ++j) {
            mpfr_mul(t, a[j].raw(), r[k - j].raw(), MPFR_RNDN);
            mpfr_add(acc, acc, t, MPFR_RNDN);
        }
        mpfr_div(r[k].raw(), acc, a[0].raw(), MPFR_RNDN);
        mpfr_neg(r[k].raw(), r[k].raw(), MPFR_RNDN);
    }
    mpfr_clear(t);
    mpfr_clear(acc);
    return r;
}

}  // namespace polewarp
