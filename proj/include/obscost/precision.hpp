#pragma once

#include <mpfr.h>

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace obscost {

class error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad inputs (rejected before any computation starts).
class validation_error : public error {
    using error::error;
};

// Computation signalled failure (degenerate Gramian, truncation not
// converged, bound violated, ...).
class numeric_error : public error {
    using error::error;
};

namespace detail {
inline long& default_bits_ref() {
    thread_local long bits = 256;
    return bits;
}
}  // namespace detail

// Runtime-selectable binary precision. Every Real created while a context is
// active carries ctx.bits mantissa bits and all mpfr operations round to
// nearest at the precision of their destination, so results are
// bit-reproducible for a fixed context and fixed inputs.
struct PrecisionContext {
    long bits = 256;

    PrecisionContext() = default;
    explicit PrecisionContext(long b) : bits(b) {
        if (b < 64) throw validation_error("PrecisionContext: mantissa_bits must be >= 64");
    }
};

// RAII guard installing ctx.bits as the creation precision on this thread.
class PrecisionScope {
  public:
    explicit PrecisionScope(PrecisionContext ctx) : saved_(detail::default_bits_ref()) {
        detail::default_bits_ref() = ctx.bits;
    }
    ~PrecisionScope() { detail::default_bits_ref() = saved_; }
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

  private:
    long saved_;
};

class Real {
  public:
    Real() {
        mpfr_init2(v_, detail::default_bits_ref());
        mpfr_set_zero(v_, 1);
    }
    Real(double d) {
        mpfr_init2(v_, detail::default_bits_ref());
        mpfr_set_d(v_, d, MPFR_RNDN);
    }
    Real(int n) {
        mpfr_init2(v_, detail::default_bits_ref());
        mpfr_set_si(v_, n, MPFR_RNDN);
    }
    Real(long n) {
        mpfr_init2(v_, detail::default_bits_ref());
        mpfr_set_si(v_, n, MPFR_RNDN);
    }
    Real(const Real& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    Real(Real&& o) noexcept {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_swap(v_, o.v_);
    }
    Real& operator=(const Real& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    Real& operator=(Real&& o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~Real() { mpfr_clear(v_); }

    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }
    long precision() const { return mpfr_get_prec(v_); }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }
    bool is_nan() const { return mpfr_nan_p(v_) != 0; }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    // Scientific decimal string with the given significant digits; used for
    // deterministic CSV output.
    std::string str(int digits = 24) const {
        char buf[512];
        mpfr_snprintf(buf, sizeof(buf), "%.*Re", digits - 1, v_);
        return std::string(buf);
    }

    static Real from_str(const std::string& s, long bits) {
        Real r = with_bits(bits);
        if (mpfr_set_str(r.v_, s.c_str(), 10, MPFR_RNDN) != 0)
            throw validation_error("Real::from_str: cannot parse '" + s + "'");
        return r;
    }

    static Real with_bits(long bits, double v = 0.0) {
        Real r(tag_bits{}, bits);
        mpfr_set_d(r.v_, v, MPFR_RNDN);
        return r;
    }

    static Real pi() {
        Real r;
        mpfr_const_pi(r.v_, MPFR_RNDN);
        return r;
    }

    Real& operator+=(const Real& o) {
        mpfr_add(v_, v_, o.v_, MPFR_RNDN);
        return *this;
    }
    Real& operator-=(const Real& o) {
        mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
        return *this;
    }
    Real& operator*=(const Real& o) {
        mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
        return *this;
    }
    Real& operator/=(const Real& o) {
        mpfr_div(v_, v_, o.v_, MPFR_RNDN);
        return *this;
    }

  private:
    struct tag_bits {};
    Real(tag_bits, long bits) { mpfr_init2(v_, bits < MPFR_PREC_MIN ? MPFR_PREC_MIN : bits); }

    mpfr_t v_;
};

namespace detail {
inline long res_prec(const Real& a, const Real& b) {
    return std::max(a.precision(), b.precision());
}
inline Real make_prec(long bits) {
    PrecisionScope scope{PrecisionContext{bits < 64 ? 64 : bits}};
    return Real();
}
}  // namespace detail

#define OBSCOST_REAL_BINOP(op, fn)                                   \
    inline Real operator op(const Real& a, const Real& b) {          \
        Real r = detail::make_prec(detail::res_prec(a, b));          \
        fn(r.raw(), a.raw(), b.raw(), MPFR_RNDN);                    \
        return r;                                                    \
    }

OBSCOST_REAL_BINOP(+, mpfr_add)
OBSCOST_REAL_BINOP(-, mpfr_sub)
OBSCOST_REAL_BINOP(*, mpfr_mul)
OBSCOST_REAL_BINOP(/, mpfr_div)
#undef OBSCOST_REAL_BINOP

inline Real operator-(const Real& a) {
    Real r = detail::make_prec(a.precision());
    mpfr_neg(r.raw(), a.raw(), MPFR_RNDN);
    return r;
}

inline bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.raw(), b.raw()) != 0; }
inline bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.raw(), b.raw()) != 0; }
inline bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.raw(), b.raw()) != 0; }
inline bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.raw(), b.raw()) != 0; }
inline bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.raw(), b.raw()) != 0; }
inline bool operator!=(const Real& a, const Real& b) { return !(a == b); }

#define OBSCOST_REAL_FN1(name, fn)              \
    inline Real name(const Real& a) {           \
        Real r = detail::make_prec(a.precision()); \
        fn(r.raw(), a.raw(), MPFR_RNDN);        \
        return r;                               \
    }

OBSCOST_REAL_FN1(abs, mpfr_abs)
OBSCOST_REAL_FN1(sqrt, mpfr_sqrt)
OBSCOST_REAL_FN1(exp, mpfr_exp)
OBSCOST_REAL_FN1(log, mpfr_log)
OBSCOST_REAL_FN1(sin, mpfr_sin)
OBSCOST_REAL_FN1(cos, mpfr_cos)
OBSCOST_REAL_FN1(tan, mpfr_tan)
OBSCOST_REAL_FN1(sinh, mpfr_sinh)
OBSCOST_REAL_FN1(cosh, mpfr_cosh)
OBSCOST_REAL_FN1(floor, mpfr_rint_floor)
OBSCOST_REAL_FN1(ceil, mpfr_rint_ceil)
#undef OBSCOST_REAL_FN1

inline Real atan2(const Real& y, const Real& x) {
    Real r = detail::make_prec(detail::res_prec(y, x));
    mpfr_atan2(r.raw(), y.raw(), x.raw(), MPFR_RNDN);
    return r;
}
inline Real hypot(const Real& x, const Real& y) {
    Real r = detail::make_prec(detail::res_prec(x, y));
    mpfr_hypot(r.raw(), x.raw(), y.raw(), MPFR_RNDN);
    return r;
}
inline Real pow(const Real& x, long n) {
    Real r = detail::make_prec(x.precision());
    mpfr_pow_si(r.raw(), x.raw(), n, MPFR_RNDN);
    return r;
}
inline Real pow(const Real& x, const Real& y) {
    Real r = detail::make_prec(detail::res_prec(x, y));
    mpfr_pow(r.raw(), x.raw(), y.raw(), MPFR_RNDN);
    return r;
}
inline Real max(const Real& a, const Real& b) { return a >= b ? a : b; }
inline Real min(const Real& a, const Real& b) { return a <= b ? a : b; }

// 2^e as a Real, handy for tolerance thresholds like 2^{-bits/2}.
inline Real pow2(long e) {
    Real r;
    mpfr_set_ui_2exp(r.raw(), 1, e, MPFR_RNDN);
    return r;
}

// Round x down to the given precision (for cheap low-precision prepasses).
inline Real reduced(const Real& x, long bits) {
    Real r = detail::make_prec(bits);
    mpfr_set(r.raw(), x.raw(), MPFR_RNDN);
    return r;
}

// sin and cos in one mpfr call.
inline void sin_cos(const Real& x, Real& s, Real& c) {
    s = detail::make_prec(x.precision());
    c = detail::make_prec(x.precision());
    mpfr_sin_cos(s.raw(), c.raw(), x.raw(), MPFR_RNDN);
}

inline std::ostream& operator<<(std::ostream& os, const Real& x) { return os << x.str(20); }

struct Complex {
    Real re, im;

    Complex() = default;
    Complex(Real r) : re(std::move(r)), im() {}
    Complex(double r) : re(r), im() {}
    Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
    Complex(double r, double i) : re(r), im(i) {}

    Complex& operator+=(const Complex& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    Complex& operator-=(const Complex& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    Complex& operator*=(const Complex& o) {
        Real t = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = std::move(t);
        return *this;
    }
    Complex& operator*=(const Real& s) {
        re *= s;
        im *= s;
        return *this;
    }
};

inline Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
inline Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
inline Complex operator-(const Complex& a) { return {-a.re, -a.im}; }
inline Complex operator*(const Complex& a, const Complex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline Complex operator*(const Real& s, const Complex& a) { return {s * a.re, s * a.im}; }
inline Complex operator*(const Complex& a, const Real& s) { return s * a; }
inline Complex conj(const Complex& a) { return {a.re, -a.im}; }
inline Real norm2(const Complex& a) { return a.re * a.re + a.im * a.im; }
inline Real abs(const Complex& a) { return hypot(a.re, a.im); }
inline Real arg(const Complex& a) { return atan2(a.im, a.re); }
inline Complex operator/(const Complex& a, const Real& s) { return {a.re / s, a.im / s}; }
inline Complex operator/(const Complex& a, const Complex& b) {
    Real d = norm2(b);
    Complex n = a * conj(b);
    return {n.re / d, n.im / d};
}
// e^{i t}
inline Complex expi(const Real& t) {
    Complex r;
    mpfr_sin_cos(r.im.raw(), r.re.raw(), t.raw(), MPFR_RNDN);
    return r;
}
inline Complex exp(const Complex& z) {
    Real m = exp(z.re);
    Complex p = expi(z.im);
    return {m * p.re, m * p.im};
}

inline std::ostream& operator<<(std::ostream& os, const Complex& z) {
    return os << "(" << z.re << ", " << z.im << ")";
}

using RVec = std::vector<Real>;
using CVec = std::vector<Complex>;

inline Real norm(const RVec& v) {
    Real s;
    for (const auto& x : v) s += x * x;
    return sqrt(s);
}
inline Real norm(const CVec& v) {
    Real s;
    for (const auto& z : v) s += norm2(z);
    return sqrt(s);
}

}  // namespace obscost
