#pragma once

#include <vector>

#include "polewarp/precision.hpp"

namespace polewarp {

/// Dense truncated power series in tau about tau = 0. Coefficient k is
/// the coefficient of tau^k; all coefficients share one precision
/// context.
class TaylorSeries {
public:
    TaylorSeries() = default;
    TaylorSeries(int order, Precision prec);
    explicit TaylorSeries(std::vector<HPReal> coeffs);

    int order() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    bool empty() const noexcept { return coeffs_.empty(); }
    Precision precision() const;

    const HPReal& operator[](int k) const { return coeffs_[static_cast<size_t>(k)]; }
    HPReal& operator[](int k) { return coeffs_[static_cast<size_t>(k)]; }

    const std::vector<HPReal>& coeffs() const noexcept { return coeffs_; }

    void append(HPReal coeff) { coeffs_.push_back(std::move(coeff)); }
    void resize(int order);
    TaylorSeries truncated(int order) const;

    /// Horner evaluation of the truncated polynomial at tau.
    HPReal evaluate(const HPReal& tau) const;

private:
    std::vector<HPReal> coeffs_;
};

/// Coefficient-wise sum up to min(order a, order b).
TaylorSeries series_add(const TaylorSeries& a, const TaylorSeries& b);
TaylorSeries series_sub(const TaylorSeries& a, const TaylorSeries& b);
TaylorSeries series_scale(const TaylorSeries& a, const HPReal& s);

/// Cauchy product c_k = sum_{j<=k} a_j b_{k-j} for k = 0..order.
TaylorSeries series_mul(const TaylorSeries& a, const TaylorSeries& b, int order);

/// r with series_mul(a, r) = 1 up to `order`; requires a_0 != 0.
TaylorSeries series_reciprocal(const TaylorSeries& a, int order);

/// Single Cauchy-product coefficient sum_{j=0..k} a_j b_{k-j}. This is
/// the DT product primitive; it reads only coefficients 0..k of either
/// series.
HPReal convolve_at(const TaylorSeries& a, const TaylorSeries& b, int k);

}  // namespace polewarp
