#pragma once

#include <mpfr.h>

#include <string>

#include "polewarp/errors.hpp"

namespace polewarp {

/// Decimal-digit working precision, passed explicitly wherever values are
/// created. The binary mantissa is sized so that the relative rounding
/// error of one operation stays below 10^(1-digits).
class Precision {
public:
    static constexpr int kMinDigits = 34;

    explicit Precision(int digits);

    /// The L+M+1 rule used throughout: precision grows with the
    /// approximant order, clamped from below at kMinDigits.
    static Precision for_order(int num_degree, int den_degree);

    int digits() const noexcept { return digits_; }
    mpfr_prec_t bits() const noexcept;

    friend bool operator==(const Precision&, const Precision&) = default;

private:
    int digits_;
};

/// Arbitrary-precision real scalar. Each value carries its own mantissa
/// width; binary operations produce results at the wider of the two
/// operand precisions, so a context established at construction time
/// propagates through a computation unchanged.
///
/// Values are immutable in spirit: nothing here mutates an operand, and
/// distinct HPReal objects are safe to use from different threads.
class HPReal {
public:
    HPReal();  // zero at kMinDigits
    explicit HPReal(Precision prec);
    HPReal(int value, Precision prec);
    HPReal(long value, Precision prec);
    HPReal(double value, Precision prec);
    HPReal(const std::string& decimal, Precision prec);

    HPReal(const HPReal& other);
    HPReal(HPReal&& other) noexcept;
    HPReal& operator=(const HPReal& other);
    HPReal& operator=(HPReal&& other) noexcept;
    ~HPReal();

    Precision precision() const { return Precision(digits_); }
    double to_double() const;
    long to_long() const;

    /// Full-precision decimal string ("%.{digits-1}Re"); round-trips
    /// through the string constructor at the same precision.
    std::string str() const;
    std::string str(int significant_digits) const;

    bool is_zero() const noexcept { return mpfr_zero_p(value_) != 0; }
    bool is_negative() const noexcept { return mpfr_sgn(value_) < 0; }
    int sign() const noexcept { return mpfr_sgn(value_); }

    HPReal& operator+=(const HPReal& rhs);
    HPReal& operator-=(const HPReal& rhs);
    HPReal& operator*=(const HPReal& rhs);
    HPReal& operator/=(const HPReal& rhs);

    friend HPReal operator+(const HPReal& a, const HPReal& b);
    friend HPReal operator-(const HPReal& a, const HPReal& b);
    friend HPReal operator*(const HPReal& a, const HPReal& b);
    friend HPReal operator/(const HPReal& a, const HPReal& b);
    friend HPReal operator-(const HPReal& a);

    friend bool operator==(const HPReal& a, const HPReal& b) { return mpfr_equal_p(a.value_, b.value_) != 0; }
    friend bool operator!=(const HPReal& a, const HPReal& b) { return !(a == b); }
    friend bool operator<(const HPReal& a, const HPReal& b) { return mpfr_less_p(a.value_, b.value_) != 0; }
    friend bool operator<=(const HPReal& a, const HPReal& b) { return mpfr_lessequal_p(a.value_, b.value_) != 0; }
    friend bool operator>(const HPReal& a, const HPReal& b) { return mpfr_greater_p(a.value_, b.value_) != 0; }
    friend bool operator>=(const HPReal& a, const HPReal& b) { return mpfr_greaterequal_p(a.value_, b.value_) != 0; }

    friend HPReal abs(const HPReal& x);
    friend HPReal sqrt(const HPReal& x);
    friend HPReal cbrt(const HPReal& x);
    friend HPReal exp(const HPReal& x);
    friend HPReal log(const HPReal& x);
    friend HPReal sin(const HPReal& x);
    friend HPReal cos(const HPReal& x);
    friend HPReal asin(const HPReal& x);
    friend HPReal atan2(const HPReal& y, const HPReal& x);
    friend HPReal pow(const HPReal& base, long exponent);
    friend HPReal pow(const HPReal& base, const HPReal& exponent);
    /// x^(1/n) for x > 0.
    friend HPReal nth_root(const HPReal& x, unsigned long n);
    friend HPReal hypot(const HPReal& x, const HPReal& y);
    friend bool is_finite(const HPReal& x) { return mpfr_number_p(x.value_) != 0; }

    mpfr_srcptr raw() const noexcept { return value_; }
    mpfr_ptr raw() noexcept { return value_; }

private:
    // Uninitialized-tag constructor for internal use by the friends above.
    struct Raw {};
    HPReal(Raw, mpfr_prec_t bits, int digits);

    mpfr_t value_;
    int digits_;
};

HPReal pi(Precision prec);

/// 10^e at the given precision (handy for tolerances like 10^(5-digits)).
HPReal pow10(long e, Precision prec);

/// Arbitrary-precision complex scalar on top of HPReal. Component
/// precisions always match.
class HPComplex {
public:
    HPComplex() = default;
    explicit HPComplex(Precision prec) : re_(prec), im_(prec) {}
    HPComplex(HPReal re, HPReal im);
    HPComplex(double re, double im, Precision prec)
        : re_(re, prec), im_(im, prec) {}

    const HPReal& re() const noexcept { return re_; }
    const HPReal& im() const noexcept { return im_; }
    Precision precision() const { return re_.precision(); }

    HPComplex& operator+=(const HPComplex& rhs);
    HPComplex& operator-=(const HPComplex& rhs);
    HPComplex& operator*=(const HPComplex& rhs);
    HPComplex& operator/=(const HPComplex& rhs);

    friend HPComplex operator+(const HPComplex& a, const HPComplex& b);
    friend HPComplex operator-(const HPComplex& a, const HPComplex& b);
    friend HPComplex operator*(const HPComplex& a, const HPComplex& b);
    friend HPComplex operator/(const HPComplex& a, const HPComplex& b);
    friend HPComplex operator-(const HPComplex& a);
    friend HPComplex operator*(const HPReal& a, const HPComplex& b);

    friend bool operator==(const HPComplex& a, const HPComplex& b) { return a.re_ == b.re_ && a.im_ == b.im_; }

    friend HPReal abs(const HPComplex& z) { return hypot(z.re_, z.im_); }
    friend HPComplex conj(const HPComplex& z) { return HPComplex(z.re_, -z.im_); }

private:
    HPReal re_;
    HPReal im_;
};

}  // namespace polewarp
