#pragma once

// Scalar abstraction: the whole library is templated on Real, with double as
// the default and teich::dd as the extended mode. Cplx is a minimal complex
// template (std::complex is only specified for builtin floating types).

#include <cmath>
#include <type_traits>

#include "teich/dd.hpp"

namespace teich {

template <class R>
struct RealTraits;

template <>
struct RealTraits<double> {
    static constexpr int mantissa_bits = 53;
    static double pi() { return 3.14159265358979323846264338327950288; }
    static double two_pi() { return 2.0 * pi(); }
    static double eps() { return 2.220446049250313e-16; }
};

template <>
struct RealTraits<dd> {
    static constexpr int mantissa_bits = 106;
    static dd pi() { return dd_const::pi; }
    static dd two_pi() { return dd_const::two_pi; }
    static dd eps() { return dd(4.93e-32); }
};

template <class R> R pi_v() { return RealTraits<R>::pi(); }
template <class R> R two_pi_v() { return RealTraits<R>::two_pi(); }

inline double to_double(double x) { return x; }

// bring cmath names into scope so unqualified calls dispatch to dd overloads
using std::abs;
using std::acosh;
using std::atan2;
using std::cos;
using std::cosh;
using std::exp;
using std::fabs;
using std::floor;
using std::isfinite;
using std::log;
using std::log1p;
using std::sin;
using std::sinh;
using std::sqrt;
using std::tanh;

// angle reduced to [0, 2pi)
template <class R>
R normalize_angle(R a) {
    const R tp = two_pi_v<R>();
    a = a - tp * floor(a / tp);
    while (a >= tp) a = a - tp;
    while (a < R(0)) a = a + tp;
    return a;
}

// signed difference a-b wrapped to (-pi, pi]
template <class R>
R wrap_pi(R a) {
    const R tp = two_pi_v<R>();
    a = a - tp * floor(a / tp + R(0.5));
    while (a > pi_v<R>()) a = a - tp;
    while (a <= -pi_v<R>()) a = a + tp;
    return a;
}

template <class R>
struct Cplx {
    R re{};
    R im{};

    Cplx() = default;
    Cplx(R r) : re(r) {}
    Cplx(R r, R i) : re(r), im(i) {}

    Cplx operator-() const { return {-re, -im}; }
};

template <class R> Cplx<R> operator+(const Cplx<R>& a, const Cplx<R>& b) { return {a.re + b.re, a.im + b.im}; }
template <class R> Cplx<R> operator-(const Cplx<R>& a, const Cplx<R>& b) { return {a.re - b.re, a.im - b.im}; }
template <class R> Cplx<R> operator*(const Cplx<R>& a, const Cplx<R>& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
template <class R> Cplx<R> operator*(const R& s, const Cplx<R>& a) { return {s * a.re, s * a.im}; }
template <class R> Cplx<R> operator*(const Cplx<R>& a, const R& s) { return s * a; }
template <class R> Cplx<R> conj(const Cplx<R>& a) { return {a.re, -a.im}; }
template <class R> R norm2(const Cplx<R>& a) { return a.re * a.re + a.im * a.im; }
template <class R> R abs(const Cplx<R>& a) { return sqrt(norm2(a)); }
template <class R> Cplx<R> operator/(const Cplx<R>& a, const Cplx<R>& b) {
    R n = norm2(b);
    Cplx<R> p = a * conj(b);
    return {p.re / n, p.im / n};
}
template <class R> Cplx<R> operator/(const Cplx<R>& a, const R& s) { return {a.re / s, a.im / s}; }
template <class R> R arg(const Cplx<R>& a) { return atan2(a.im, a.re); }
template <class R> Cplx<R> unit_from_angle(const R& t) { return {cos(t), sin(t)}; }
template <class R> Cplx<R> sqrt_c(const Cplx<R>& a) {
    R r = abs(a);
    if (r == R(0)) return {R(0), R(0)};
    R t = arg(a) / R(2);
    R s = sqrt(r);
    return {s * cos(t), s * sin(t)};
}

} // namespace teich
