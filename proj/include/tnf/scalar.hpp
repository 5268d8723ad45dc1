#pragma once

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>

#include <gmpxx.h>

#include "tnf/errors.hpp"

namespace tnf {

/// Tolerances used by the floating-point backend. The exact backend
/// ignores both.
struct float_config {
    /// Coefficient comparison tolerance (tau_cmp).
    static double& comparison_tol() {
        static double tol = 1e-10;
        return tol;
    }
    /// Resonance detection tolerance (tau_res): a divisor within this of
    /// zero is classified resonant.
    static double& resonance_tol() {
        static double tol = 1e-10;
        return tol;
    }
};

/// Parses "p", "p/q", a decimal like "-2.5" or scientific notation like
/// "3e-7" into an exact rational (powers of ten are exact).
inline mpq_class parse_rational(const std::string& text) {
    if (text.empty()) throw validation_error("empty rational literal");
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        mpq_class q;
        if (q.set_str(text, 10) != 0) throw validation_error("bad rational literal '" + text + "'");
        if (q.get_den() == 0) throw validation_error("zero denominator in '" + text + "'");
        q.canonicalize();
        return q;
    }
    std::string body = text;
    long exponent = 0;
    const auto epos = text.find_first_of("eE");
    if (epos != std::string::npos) {
        body = text.substr(0, epos);
        try {
            exponent = std::stol(text.substr(epos + 1));
        } catch (const std::exception&) {
            throw validation_error("bad exponent in '" + text + "'");
        }
    }
    mpq_class q;
    const auto dot = body.find('.');
    if (dot == std::string::npos) {
        if (q.set_str(body, 10) != 0) throw validation_error("bad integer literal '" + text + "'");
    } else {
        std::string digits = body.substr(0, dot) + body.substr(dot + 1);
        const std::size_t frac_len = body.size() - dot - 1;
        if (digits.empty() || digits == "-" || digits == "+")
            throw validation_error("bad decimal literal '" + text + "'");
        mpz_class num;
        if (num.set_str(digits, 10) != 0) throw validation_error("bad decimal literal '" + text + "'");
        mpz_class den = 1;
        for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
        q = mpq_class(num, den);
    }
    for (long i = 0; i < exponent; ++i) q *= 10;
    for (long i = 0; i > exponent; --i) q /= 10;
    q.canonicalize();
    return q;
}

inline std::string rational_str(const mpq_class& q) {
    return q.get_str();
}

/// Element of Q(i): exact complex rational. Supports the ring operations
/// and exact division needed by the series algebra; equality and the zero
/// test are decidable with no rounding.
struct GaussianRational {
    mpq_class re;
    mpq_class im;

    GaussianRational() : re(0), im(0) {}
    GaussianRational(mpq_class r, mpq_class i) : re(std::move(r)), im(std::move(i)) {}
    explicit GaussianRational(long r) : re(r), im(0) {}

    friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
        return {a.re - b.re, a.im - b.im};
    }
    GaussianRational operator-() const { return {-re, -im}; }
    friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
        mpq_class n = b.re * b.re + b.im * b.im;
        if (n == 0) throw math_error("division by zero Gaussian rational");
        return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
    }
    GaussianRational& operator+=(const GaussianRational& b) {
        re += b.re;
        im += b.im;
        return *this;
    }
    GaussianRational& operator-=(const GaussianRational& b) {
        re -= b.re;
        im -= b.im;
        return *this;
    }
    GaussianRational& operator*=(const GaussianRational& b) { return *this = *this * b; }
    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }
};

/// Backend traits. The series algebra is written against this interface;
/// instantiate with GaussianRational (exact) or std::complex<double>.
template <class C>
struct scalar_traits;

template <>
struct scalar_traits<GaussianRational> {
    static constexpr bool exact = true;

    static GaussianRational zero() { return GaussianRational(0); }
    static GaussianRational one() { return GaussianRational(1); }
    static GaussianRational imaginary_unit() { return {mpq_class(0), mpq_class(1)}; }
    static GaussianRational from_int(long v) { return GaussianRational(v); }
    static GaussianRational from_ratio(long long num, long long den) {
        mpq_class q(static_cast<long>(num), static_cast<long>(den));
        q.canonicalize();
        return {q, mpq_class(0)};
    }
    static GaussianRational from_double(double re, double im) {
        // only used when ingesting float data on the exact backend
        mpq_class r(re), i(im);
        r.canonicalize();
        i.canonicalize();
        return {r, i};
    }
    static GaussianRational parse(const std::string& re, const std::string& im) {
        return {parse_rational(re), parse_rational(im)};
    }

    static bool is_zero(const GaussianRational& v) { return v.re == 0 && v.im == 0; }
    /// Same as is_zero: the exact backend has no tolerance.
    static bool negligible(const GaussianRational& v) { return is_zero(v); }
    static bool approx_equal(const GaussianRational& a, const GaussianRational& b) { return a == b; }

    static double abs(const GaussianRational& v) {
        return std::hypot(v.re.get_d(), v.im.get_d());
    }
    static double re_double(const GaussianRational& v) { return v.re.get_d(); }
    static double im_double(const GaussianRational& v) { return v.im.get_d(); }
    static std::complex<double> to_complex(const GaussianRational& v) {
        return {v.re.get_d(), v.im.get_d()};
    }

    /// Total order used for class keys; any strict order on values works.
    static bool value_less(const GaussianRational& a, const GaussianRational& b) {
        const int c = cmp(a.re, b.re);
        if (c != 0) return c < 0;
        return cmp(a.im, b.im) < 0;
    }

    static std::string str(const GaussianRational& v) {
        if (v.im == 0) return rational_str(v.re);
        std::string s = rational_str(v.re);
        s += (v.im > 0 ? "+" : "-");
        mpq_class a = ::abs(v.im);
        s += rational_str(a) + "i";
        return s;
    }
};

template <>
struct scalar_traits<std::complex<double>> {
    static constexpr bool exact = false;
    using C = std::complex<double>;

    static C zero() { return {0.0, 0.0}; }
    static C one() { return {1.0, 0.0}; }
    static C imaginary_unit() { return {0.0, 1.0}; }
    static C from_int(long v) { return {static_cast<double>(v), 0.0}; }
    static C from_ratio(long long num, long long den) {
        return {static_cast<double>(num) / static_cast<double>(den), 0.0};
    }
    static C from_double(double re, double im) { return {re, im}; }
    static C parse(const std::string& re, const std::string& im) {
        return {parse_rational(re).get_d(), parse_rational(im).get_d()};
    }

    /// Structural zero, used for canonical sparse form.
    static bool is_zero(const C& v) { return v.real() == 0.0 && v.imag() == 0.0; }
    /// Within tau_cmp of zero.
    static bool negligible(const C& v) { return std::abs(v) <= float_config::comparison_tol(); }
    static bool approx_equal(const C& a, const C& b) { return negligible(a - b); }

    static double abs(const C& v) { return std::abs(v); }
    static double re_double(const C& v) { return v.real(); }
    static double im_double(const C& v) { return v.imag(); }
    static std::complex<double> to_complex(const C& v) { return v; }

    static bool value_less(const C& a, const C& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    }

    static std::string str(const C& v);
};

/// Shortest round-trippable decimal form, deterministic across runs.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string scalar_traits<std::complex<double>>::str(const C& v) {
    if (v.imag() == 0.0) return format_double(v.real());
    std::string s = format_double(v.real());
    if (v.imag() >= 0.0) s += "+";
    s += format_double(v.imag()) + "i";
    return s;
}

} // namespace tnf
