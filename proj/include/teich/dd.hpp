#pragma once

// Double-double arithmetic: an unevaluated sum hi + lo with |lo| <= ulp(hi)/2,
// giving ~106 mantissa bits. Classic error-free transformations (two_sum,
// two_prod with FMA) plus argument-reduced Taylor kernels for the
// transcendentals the geometry needs (sin, cos, atan2, exp, log, sqrt).

#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>

namespace teich {

namespace dd_detail {
inline double two_sum(double a, double b, double& err) {
    double s = a + b;
    double bb = s - a;
    err = (a - (s - bb)) + (b - bb);
    return s;
}
inline double quick_two_sum(double a, double b, double& err) {
    // requires |a| >= |b|
    double s = a + b;
    err = b - (s - a);
    return s;
}
inline double two_prod(double a, double b, double& err) {
    double p = a * b;
    err = std::fma(a, b, -p);
    return p;
}
} // namespace dd_detail

struct dd {
    double hi = 0.0;
    double lo = 0.0;

    constexpr dd() = default;
    constexpr dd(double h) : hi(h), lo(0.0) {}
    constexpr dd(double h, double l) : hi(h), lo(l) {}
    constexpr dd(int v) : hi(double(v)), lo(0.0) {}
    constexpr dd(long v) : hi(double(v)), lo(0.0) {}

    explicit operator double() const { return hi; }

    dd operator-() const { return dd(-hi, -lo); }
};

inline double to_double(const dd& a) { return a.hi; }

inline dd operator+(const dd& a, const dd& b) {
    using namespace dd_detail;
    double e1, e2, e3;
    double s1 = two_sum(a.hi, b.hi, e1);
    double s2 = two_sum(a.lo, b.lo, e2);
    e1 += s2;
    s1 = quick_two_sum(s1, e1, e3);
    e3 += e2;
    double lo;
    double hi = quick_two_sum(s1, e3, lo);
    return dd(hi, lo);
}
inline dd operator-(const dd& a, const dd& b) { return a + (-b); }

inline dd operator*(const dd& a, const dd& b) {
    using namespace dd_detail;
    double e;
    double p = two_prod(a.hi, b.hi, e);
    e += a.hi * b.lo + a.lo * b.hi;
    double lo;
    double hi = quick_two_sum(p, e, lo);
    return dd(hi, lo);
}

inline dd operator/(const dd& a, const dd& b) {
    using namespace dd_detail;
    double q1 = a.hi / b.hi;
    dd r = a - dd(q1) * b;
    double q2 = r.hi / b.hi;
    r = r - dd(q2) * b;
    double q3 = r.hi / b.hi;
    double lo;
    double hi = quick_two_sum(q1, q2, lo);
    dd q(hi, lo);
    return q + dd(q3);
}

inline dd& operator+=(dd& a, const dd& b) { a = a + b; return a; }
inline dd& operator-=(dd& a, const dd& b) { a = a - b; return a; }
inline dd& operator*=(dd& a, const dd& b) { a = a * b; return a; }
inline dd& operator/=(dd& a, const dd& b) { a = a / b; return a; }

inline dd operator+(double a, const dd& b) { return dd(a) + b; }
inline dd operator-(double a, const dd& b) { return dd(a) - b; }
inline dd operator*(double a, const dd& b) { return dd(a) * b; }
inline dd operator/(double a, const dd& b) { return dd(a) / b; }
inline dd operator+(const dd& a, double b) { return a + dd(b); }
inline dd operator-(const dd& a, double b) { return a - dd(b); }
inline dd operator*(const dd& a, double b) { return a * dd(b); }
inline dd operator/(const dd& a, double b) { return a / dd(b); }

inline bool operator==(const dd& a, const dd& b) { return a.hi == b.hi && a.lo == b.lo; }
inline bool operator!=(const dd& a, const dd& b) { return !(a == b); }
inline bool operator<(const dd& a, const dd& b) {
    return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo);
}
inline bool operator>(const dd& a, const dd& b) { return b < a; }
inline bool operator<=(const dd& a, const dd& b) { return !(b < a); }
inline bool operator>=(const dd& a, const dd& b) { return !(a < b); }

inline dd fabs(const dd& a) { return a.hi < 0.0 || (a.hi == 0.0 && a.lo < 0.0) ? -a : a; }
inline dd abs(const dd& a) { return fabs(a); }
inline bool isfinite(const dd& a) { return std::isfinite(a.hi); }

inline dd ldexp(const dd& a, int n) { return dd(std::ldexp(a.hi, n), std::ldexp(a.lo, n)); }

inline dd sqrt(const dd& a) {
    if (a.hi == 0.0 && a.lo == 0.0) return dd(0.0);
    // Karp & Markstein: one high-precision correction of the double seed.
    double x = 1.0 / std::sqrt(a.hi);
    double y = a.hi * x;
    dd y2 = dd(y) * dd(y);
    dd r = dd(y) + (a - y2) * dd(x * 0.5);
    return r;
}

inline dd floor(const dd& a) {
    double f = std::floor(a.hi);
    if (f != a.hi) return dd(f);
    double g = std::floor(a.lo);
    using namespace dd_detail;
    double lo;
    double hi = quick_two_sum(f, g, lo);
    return dd(hi, lo);
}

namespace dd_const {
// high/low legs of standard constants (QD library values)
inline const dd pi   (3.141592653589793116e+00, 1.224646799147353207e-16);
inline const dd two_pi(6.283185307179586232e+00, 2.449293598294706414e-16);
inline const dd half_pi(1.570796326794896558e+00, 6.123233995736766036e-17);
inline const dd ln2  (6.931471805599452862e-01, 2.319046813846299558e-17);
inline const dd e    (2.718281828459045091e+00, 1.445646891729250158e-16);
} // namespace dd_const

inline dd exp(const dd& a) {
    // a = k ln2 + r, |r| <= ln2/2; exp(r) by Taylor.
    if (a.hi > 709.0) return dd(std::numeric_limits<double>::infinity());
    if (a.hi < -740.0) return dd(0.0);
    double k = std::round(a.hi / dd_const::ln2.hi);
    dd r = a - dd_const::ln2 * dd(k);
    dd sum = dd(1.0);
    dd term = dd(1.0);
    for (int i = 1; i <= 24; ++i) {
        term = term * r / dd(double(i));
        sum += term;
        if (std::fabs(term.hi) < 1e-35 * std::fabs(sum.hi)) break;
    }
    return ldexp(sum, int(k));
}

inline dd log(const dd& a) {
    // Newton on y -> y + a e^{-y} - 1, seeded from double log.
    double y0 = std::log(a.hi);
    dd y(y0);
    for (int i = 0; i < 2; ++i)
        y = y + a * exp(-y) - dd(1.0);
    return y;
}

inline dd log1p(const dd& a) {
    if (std::fabs(a.hi) > 0.25) return log(dd(1.0) + a);
    // Taylor in the small range to avoid cancellation.
    dd sum = a;
    dd term = a;
    for (int i = 2; i <= 48; ++i) {
        term = term * (-a);
        sum += term / dd(double(i));
        if (std::fabs(term.hi) < 1e-35 * std::fabs(sum.hi) + 1e-320) break;
    }
    return sum;
}

inline dd cosh(const dd& a) { dd e1 = exp(a); return (e1 + dd(1.0) / e1) * dd(0.5); }
inline dd sinh(const dd& a) {
    if (std::fabs(a.hi) > 0.1) { dd e1 = exp(a); return (e1 - dd(1.0) / e1) * dd(0.5); }
    dd sum = a, term = a, a2 = a * a;
    for (int i = 1; i <= 12; ++i) {
        term = term * a2 / dd(double(2 * i) * double(2 * i + 1));
        sum += term;
    }
    return sum;
}
inline dd acosh(const dd& a) { return log(a + sqrt(a * a - dd(1.0))); }
inline dd atanh(const dd& a) { return dd(0.5) * log((dd(1.0) + a) / (dd(1.0) - a)); }
inline dd tanh(const dd& a) { dd e2 = exp(a + a); return (e2 - dd(1.0)) / (e2 + dd(1.0)); }

namespace dd_detail {
inline dd sin_taylor(const dd& r) {
    // |r| <= pi/4
    dd sum = r, term = r;
    dd r2 = r * r;
    for (int i = 1; i <= 14; ++i) {
        term = term * r2 / dd(-double(2 * i) * double(2 * i + 1));
        sum += term;
        if (std::fabs(term.hi) < 1e-35) break;
    }
    return sum;
}
inline dd cos_taylor(const dd& r) {
    dd sum = dd(1.0), term = dd(1.0);
    dd r2 = r * r;
    for (int i = 1; i <= 14; ++i) {
        term = term * r2 / dd(-double(2 * i - 1) * double(2 * i));
        sum += term;
        if (std::fabs(term.hi) < 1e-35) break;
    }
    return sum;
}
} // namespace dd_detail

inline void sincos(const dd& a, dd& s, dd& c) {
    // reduce mod 2. pi, then to a quadrant multiple of pi/2
    dd x = a;
    double k = std::floor(x.hi / dd_const::two_pi.hi);
    x = x - dd_const::two_pi * dd(k);
    while (x.hi >= dd_const::two_pi.hi) x -= dd_const::two_pi;
    while (x.hi < 0.0) x += dd_const::two_pi;
    int q = int(std::round(x.hi / dd_const::half_pi.hi));
    dd r = x - dd_const::half_pi * dd(double(q));
    q &= 3;
    dd sr = dd_detail::sin_taylor(r);
    dd cr = dd_detail::cos_taylor(r);
    switch (q) {
        case 0: s = sr; c = cr; break;
        case 1: s = cr; c = -sr; break;
        case 2: s = -sr; c = -cr; break;
        default: s = -cr; c = sr; break;
    }
}
inline dd sin(const dd& a) { dd s, c; sincos(a, s, c); return s; }
inline dd cos(const dd& a) { dd s, c; sincos(a, s, c); return c; }

inline dd atan2(const dd& y, const dd& x) {
    if (y.hi == 0.0 && y.lo == 0.0) return x.hi >= 0.0 ? dd(0.0) : dd_const::pi;
    // Newton on f(t) = sin(t) x - cos(t) y from the double seed:
    // t <- t - f/f', f' = cos(t) x + sin(t) y (= radius at the solution).
    dd t(std::atan2(y.hi, x.hi));
    for (int i = 0; i < 2; ++i) {
        dd s, c;
        sincos(t, s, c);
        dd f = s * x - c * y;
        dd fp = c * x + s * y;
        t = t - f / fp;
    }
    if (t.hi > dd_const::pi.hi) t -= dd_const::two_pi;
    if (t.hi < -dd_const::pi.hi) t += dd_const::two_pi;
    return t;
}

inline dd pow(const dd& a, int n) {
    if (n == 0) return dd(1.0);
    bool inv = n < 0;
    unsigned m = inv ? unsigned(-(long long)n) : unsigned(n);
    dd r(1.0), b = a;
    while (m) {
        if (m & 1u) r = r * b;
        b = b * b;
        m >>= 1;
    }
    return inv ? dd(1.0) / r : r;
}

inline std::ostream& operator<<(std::ostream& os, const dd& a) {
    return os << a.hi << (a.lo >= 0 ? "+" : "") << a.lo;
}

} // namespace teich
