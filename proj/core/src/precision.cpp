#include "polewarp/precision.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

namespace polewarp {

namespace {

constexpr double kLog2Of10 = 3.321928094887362347870319429;

mpfr_prec_t bits_for_digits(int digits) {
    return static_cast<mpfr_prec_t>(std::ceil(digits * kLog2Of10)) + 1;
}

}  // namespace

Precision::Precision(int digits) : digits_(digits) {
    if (digits < 1) throw ConfigError("precision digits must be positive");
}

Precision Precision::for_order(int num_degree, int den_degree) {
    return Precision(std::max(num_degree + den_degree + 1, kMinDigits));
}

mpfr_prec_t Precision::bits() const noexcept { return bits_for_digits(digits_); }

HPReal::HPReal() : digits_(Precision::kMinDigits) {
    mpfr_init2(value_, bits_for_digits(digits_));
    mpfr_set_zero(value_, 1);
}

HPReal::HPReal(Precision prec) : digits_(prec.digits()) {
    mpfr_init2(value_, prec.bits());
    mpfr_set_zero(value_, 1);
}

HPReal::HPReal(int value, Precision prec) : HPReal(static_cast<long>(value), prec) {}

HPReal::HPReal(long value, Precision prec) : digits_(prec.digits()) {
    mpfr_init2(value_, prec.bits());
    mpfr_set_si(value_, value, MPFR_RNDN);
}

HPReal::HPReal(double value, Precision prec) : digits_(prec.digits()) {
    mpfr_init2(value_, prec.bits());
    mpfr_set_d(value_, value, MPFR_RNDN);
}

HPReal::HPReal(const std::string& decimal, Precision prec) : digits_(prec.digits()) {
    mpfr_init2(value_, prec.bits());
    if (mpfr_set_str(value_, decimal.c_str(), 10, MPFR_RNDN) != 0) {
        mpfr_clear(value_);
        throw ConfigError("not a decimal number: '" + decimal + "'");
    }
}

HPReal::HPReal(Raw, mpfr_prec_t bits, int digits) : digits_(digits) {
    mpfr_init2(value_, bits);
}

HPReal::HPReal(const HPReal& other) : digits_(other.digits_) {
    mpfr_init2(value_, mpfr_get_prec(other.value_));
    mpfr_set(value_, other.value_, MPFR_RNDN);
}

HPReal::HPReal(HPReal&& other) noexcept : digits_(other.digits_) {
    // Leave the source valid: swap in a freshly initialized minimal value.
    mpfr_init2(value_, MPFR_PREC_MIN);
    mpfr_swap(value_, other.value_);
}

HPReal& HPReal::operator=(const HPReal& other) {
    if (this != &other) {
        mpfr_set_prec(value_, mpfr_get_prec(other.value_));
        mpfr_set(value_, other.value_, MPFR_RNDN);
        digits_ = other.digits_;
    }
    return *this;
}

HPReal& HPReal::operator=(HPReal&& other) noexcept {
    if (this != &other) {
        mpfr_swap(value_, other.value_);
        digits_ = other.digits_;
    }
    return *this;
}

HPReal::~HPReal() { mpfr_clear(value_); }

double HPReal::to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }

long HPReal::to_long() const { return mpfr_get_si(value_, MPFR_RNDN); }

std::string HPReal::str() const { return str(digits_); }

std::string HPReal::str(int significant_digits) const {
    if (significant_digits < 2) significant_digits = 2;
    std::vector<char> buf(static_cast<size_t>(significant_digits) + 32);
    mpfr_snprintf(buf.data(), buf.size(), "%.*Re", significant_digits - 1, value_);
    return std::string(buf.data());
}

namespace {

// Result slot sized for the wider operand; keeps the established context.
inline std::pair<mpfr_prec_t, int> result_prec(const HPReal& a, const HPReal& b) {
    const mpfr_prec_t bits = std::max(mpfr_get_prec(a.raw()), mpfr_get_prec(b.raw()));
    const int digits = std::max(a.precision().digits(), b.precision().digits());
    return {bits, digits};
}

}  // namespace

HPReal operator+(const HPReal& a, const HPReal& b) {
    auto [bits, digits] = result_prec(a, b);
    HPReal r(HPReal::Raw{}, bits, digits);
    mpfr_add(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
    return r;
}
HPReal& HPReal::operator+=(const HPReal& rhs) { return *this = *this + rhs; }

HPReal operator-(const HPReal& a, const HPReal& b) {
    auto [bits, digits] = result_prec(a, b);
    HPReal r(HPReal::Raw{}, bits, digits);
    mpfr_sub(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
    return r;
}
HPReal& HPReal::operator-=(const HPReal& rhs) { return *this = *this - rhs; }

HPReal operator*(const HPReal& a, const HPReal& b) {
    auto [bits, digits] = result_prec(a, b);
    HPReal r(HPReal::Raw{}, bits, digits);
    mpfr_mul(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
    return r;
}
HPReal& HPReal::operator*=(const HPReal& rhs) { return *this = *this * rhs; }

HPReal operator/(const HPReal& a, const HPReal& b) {
    auto [bits, digits] = result_prec(a, b);
    HPReal r(HPReal::Raw{}, bits, digits);
    mpfr_div(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
    return r;
}
HPReal& HPReal::operator/=(const HPReal& rhs) { return *this = *this / rhs; }

HPReal operator-(const HPReal& a) {
    HPReal r(HPReal::Raw{}, mpfr_get_prec(a.value_), a.digits_);
    mpfr_neg(r.value_, a.value_, MPFR_RNDN);
    return r;
}

#define POLEWARP_UNARY(name, fn)                                         \
    HPReal name(const HPReal& x) {                                       \
        HPReal r(HPReal::Raw{}, mpfr_get_prec(x.value_), x.digits_);     \
        fn(r.value_, x.value_, MPFR_RNDN);                               \
        return r;                                                        \
    }

POLEWARP_UNARY(abs, mpfr_abs)
POLEWARP_UNARY(sqrt, mpfr_sqrt)
POLEWARP_UNARY(cbrt, mpfr_cbrt)
POLEWARP_UNARY(exp, mpfr_exp)
POLEWARP_UNARY(log, mpfr_log)
POLEWARP_UNARY(sin, mpfr_sin)
POLEWARP_UNARY(cos, mpfr_cos)
POLEWARP_UNARY(asin, mpfr_asin)

#undef POLEWARP_UNARY

HPReal atan2(const HPReal& y, const HPReal& x) {
    auto [bits, digits] = result_prec(y, x);
    HPReal r(HPReal::Raw{}, bits, digits);
    mpfr_atan2(r.raw(), y.raw(), x.raw(), MPFR_RNDN);
    return r;
}

HPReal pow(const HPReal& base, long exponent) {
    HPReal r(HPReal::Raw{}, mpfr_get_prec(base.value_), base.digits_);
    mpfr_pow_si(r.value_, base.value_, exponent, MPFR_RNDN);
    return r;
}

HPReal pow(const HPReal& base, const HPReal& exponent) {
    auto [bits, digits] = result_prec(base, exponent);
    HPReal r(HPReal::Raw{}, bits, digits);
    mpfr_pow(r.raw(), base.raw(), exponent.raw(), MPFR_RNDN);
    return r;
}

HPReal nth_root(const HPReal& x, unsigned long n) {
    HPReal r(HPReal::Raw{}, mpfr_get_prec(x.value_), x.digits_);
    mpfr_rootn_ui(r.value_, x.value_, n, MPFR_RNDN);
    return r;
}

HPReal hypot(const HPReal& x, const HPReal& y) {
    auto [bits, digits] = result_prec(x, y);
    HPReal r(HPReal::Raw{}, bits, digits);
    mpfr_hypot(r.raw(), x.raw(), y.raw(), MPFR_RNDN);
    return r;
}

HPReal pi(Precision prec) {
    HPReal r(prec);
    mpfr_const_pi(r.raw(), MPFR_RNDN);
    return r;
}

HPReal pow10(long e, Precision prec) {
    HPReal r(prec);
    mpfr_ui_pow_ui(r.raw(), 10u, static_cast<unsigned long>(e < 0 ? -e : e), MPFR_RNDN);
    if (e < 0) mpfr_si_div(r.raw(), 1, r.raw(), MPFR_RNDN);
    return r;
}

HPComplex::HPComplex(HPReal re, HPReal im) : re_(std::move(re)), im_(std::move(im)) {}

HPComplex& HPComplex::operator+=(const HPComplex& rhs) {
    re_ += rhs.re_;
    im_ += rhs.im_;
    return *this;
}

HPComplex& HPComplex::operator-=(const HPComplex& rhs) {
    re_ -= rhs.re_;
    im_ -= rhs.im_;
    return *this;
}

HPComplex& HPComplex::operator*=(const HPComplex& rhs) { return *this = *this * rhs; }

HPComplex& HPComplex::operator/=(const HPComplex& rhs) { return *this = *this / rhs; }

HPComplex operator+(const HPComplex& a, const HPComplex& b) {
    return HPComplex(a.re() + b.re(), a.im() + b.im());
}

HPComplex operator-(const HPComplex& a, const HPComplex& b) {
    return HPComplex(a.re() - b.re(), a.im() - b.im());
}

HPComplex operator*(const HPComplex& a, const HPComplex& b) {
    return HPComplex(a.re() * b.re() - a.im() * b.im(),
                     a.re() * b.im() + a.im() * b.re());
}

HPComplex operator/(const HPComplex& a, const HPComplex& b) {
    const HPReal d = b.re() * b.re() + b.im() * b.im();
    return HPComplex((a.re() * b.re() + a.im() * b.im()) / d,
                     (a.im() * b.re() - a.re() * b.im()) / d);
}

HPComplex operator-(const HPComplex& a) { return HPComplex(-a.re(), -a.im()); }

HPComplex operator*(const HPReal& a, const HPComplex& b) {
    return HPComplex(a * b.re(), a * b.im());
}

}  // namespace polewarp
