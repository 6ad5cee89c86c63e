#pragma once

// Hyperbolic geometry kernel in the disk model: unit-determinant Mobius maps
// z -> (a z + b)/(conj(b) z + conj(a)), circle points, arcs, geodesics.
// Derivative extrema over arcs are closed-form via the isometric circle, so
// expansion certificates need no grid sampling.

#include <utility>

#include "teich/errors.hpp"
#include "teich/real.hpp"

namespace teich {

inline double kAngleTol = 1e-9; // global point-identification tolerance (CLI-configurable)

template <class R>
struct CirclePoint {
    R angle{}; // radians in [0, 2pi)

    CirclePoint() = default;
    explicit CirclePoint(R a) : angle(normalize_angle(a)) {}

    Cplx<R> embed() const { return unit_from_angle(angle); }
};

template <class R>
bool same_point(const CirclePoint<R>& p, const CirclePoint<R>& q, double tol = kAngleTol) {
    return to_double(fabs(wrap_pi(p.angle - q.angle))) <= tol;
}

// counterclockwise arc [start, start+length); length in (0, 2pi)
template <class R>
struct Arc {
    CirclePoint<R> start;
    R length{};

    Arc() = default;
    Arc(CirclePoint<R> s, R len) : start(s), length(len) {}
    static Arc from_endpoints(CirclePoint<R> s, CirclePoint<R> e) {
        R len = normalize_angle(e.angle - s.angle);
        return Arc(s, len);
    }

    CirclePoint<R> end() const { return CirclePoint<R>(start.angle + length); }
    CirclePoint<R> midpoint() const { return CirclePoint<R>(start.angle + length / R(2)); }

    // offset of theta from start, in [0, 2pi)
    R offset(const R& theta) const { return normalize_angle(theta - start.angle); }

    bool contains_half_open(const R& theta) const {
        return offset(theta) < length;
    }
    bool contains(const R& theta, double tol = kAngleTol) const {
        R off = offset(theta);
        return to_double(off) <= to_double(length) + tol ||
               to_double(off) >= 2.0 * to_double(pi_v<R>()) - tol;
    }
    bool contains_interior(const R& theta, double tol = kAngleTol) const {
        R off = offset(theta);
        return to_double(off) >= tol && to_double(off) <= to_double(length) - tol;
    }
    bool contains_arc(const Arc& other, double tol = kAngleTol) const {
        R off = offset(other.start.angle);
        double o = to_double(off);
        double tp = 2.0 * to_double(pi_v<R>());
        if (o >= tp - tol) o -= tp;
        return o <= tol + to_double(length) &&
               o + to_double(other.length) <= to_double(length) + tol;
    }
};

template <class R>
struct Geodesic {
    CirclePoint<R> p, q; // ideal endpoints, p != q

    Geodesic() = default;
    Geodesic(CirclePoint<R> p_, CirclePoint<R> q_) : p(p_), q(q_) {
        if (same_point(p, q))
            throw DegenerateGeodesic("geodesic endpoints coincide");
    }
};

// Euclidean support of a geodesic: circle orthogonal to S^1, or a diameter.
template <class R>
struct GeodesicCircle {
    bool is_diameter = false;
    Cplx<R> center{};   // circle case
    R radius{};         // circle case
    R direction{};      // diameter case: line through 0 at this angle
};

template <class R>
GeodesicCircle<R> geodesic_support(const Geodesic<R>& g) {
    GeodesicCircle<R> gc;
    Cplx<R> u = g.p.embed(), v = g.q.embed();
    R det = u.re * v.im - u.im * v.re; // sin(q - p)
    if (to_double(fabs(det)) < 1e-14) {
        gc.is_diameter = true;
        gc.direction = g.p.angle;
        return gc;
    }
    gc.center = Cplx<R>((v.im - u.im) / det, (u.re - v.re) / det);
    gc.radius = sqrt(norm2(gc.center) - R(1));
    return gc;
}

// geodesic through two interior points (or one interior, one ideal embedded)
template <class R>
GeodesicCircle<R> circle_through(const Cplx<R>& z1, const Cplx<R>& z2) {
    GeodesicCircle<R> gc;
    R det = z1.re * z2.im - z1.im * z2.re;
    R scale = abs(z1 - z2);
    if (to_double(fabs(det)) < 1e-13 * to_double(scale)) {
        gc.is_diameter = true;
        gc.direction = arg(z2 - z1);
        return gc;
    }
    R r1 = (norm2(z1) + R(1)) / R(2);
    R r2 = (norm2(z2) + R(1)) / R(2);
    gc.center = Cplx<R>((r1 * z2.im - r2 * z1.im) / det, (r2 * z1.re - r1 * z2.re) / det);
    gc.radius = sqrt(norm2(gc.center) - R(1));
    return gc;
}

// Full geodesic through two interior points, endpoints ordered so that the
// second returned point is the ideal continuation beyond z2.
template <class R>
Geodesic<R> geodesic_through(const Cplx<R>& z1, const Cplx<R>& z2) {
    GeodesicCircle<R> gc = circle_through(z1, z2);
    if (gc.is_diameter) {
        R d = gc.direction;
        return Geodesic<R>(CirclePoint<R>(d + pi_v<R>()), CirclePoint<R>(d));
    }
    R tc = arg(gc.center);
    R half = atan2(gc.radius, sqrt(norm2(gc.center) - gc.radius * gc.radius));
    // ideal endpoints at angles tc +- acos(1/|c|); acos via atan2 for stability
    R spread = atan2(sqrt(norm2(gc.center) - R(1)), R(1));
    (void)half;
    CirclePoint<R> e1(tc - spread), e2(tc + spread);
    // order along the circle around gc.center
    auto psi = [&](const Cplx<R>& z) { return arg(z - gc.center); };
    R base = psi(e1.embed());
    R de2 = wrap_pi(psi(e2.embed()) - base);
    R dz1 = wrap_pi(psi(z1) - base);
    R dz2 = wrap_pi(psi(z2) - base);
    (void)de2;
    if (to_double(fabs(dz2)) > to_double(fabs(dz1)))
        return Geodesic<R>(e1, e2); // z2 is nearer e2
    return Geodesic<R>(e2, e1);
}

template <class R>
struct DiskMobius {
    Cplx<R> a{R(1), R(0)};
    Cplx<R> b{};

    DiskMobius() = default;
    DiskMobius(Cplx<R> a_, Cplx<R> b_, bool renorm = true) : a(a_), b(b_) {
        if (renorm) renormalize();
    }

    static DiskMobius identity() { return DiskMobius(); }
    static DiskMobius rotation(const R& theta) {
        return DiskMobius(unit_from_angle(theta / R(2)), Cplx<R>{}, false);
    }
    // translate p to the origin
    static DiskMobius point_to_zero(const Cplx<R>& p) {
        return DiskMobius(Cplx<R>{R(1), R(0)}, -p);
    }

    R det() const { return norm2(a) - norm2(b); }

    void renormalize() {
        R s = sqrt(det());
        a = a / s;
        b = b / s;
    }

    Cplx<R> apply_c(const Cplx<R>& z) const {
        return (a * z + b) / (conj(b) * z + conj(a));
    }
    CirclePoint<R> apply(const CirclePoint<R>& z) const {
        return CirclePoint<R>(arg(apply_c(z.embed())));
    }
    R apply_angle(const R& theta) const {
        return normalize_angle(arg(apply_c(unit_from_angle(theta))));
    }

    // |m'(z)| for |z| = 1; equals the angular derivative of the circle map
    R circle_derivative(const CirclePoint<R>& z) const {
        return R(1) / norm2(conj(b) * z.embed() + conj(a));
    }

    R trace() const { return R(2) * a.re; }

    DiskMobius inverse() const { return DiskMobius(conj(a), -b, false); }
};

template <class R>
DiskMobius<R> compose(const DiskMobius<R>& m1, const DiskMobius<R>& m2) {
    return DiskMobius<R>(m1.a * m2.a + m1.b * conj(m2.b),
                         m1.a * m2.b + m1.b * conj(m2.a));
}

template <class R>
DiskMobius<R> conjugate(const DiskMobius<R>& m, const DiskMobius<R>& h) {
    return compose(h, compose(m, h.inverse()));
}

// Frobenius distance to the nearest of +-identity (projective identity test)
template <class R>
double identity_distance(const DiskMobius<R>& m) {
    auto dist = [&](double sign) {
        Cplx<R> da = m.a - Cplx<R>(R(sign), R(0));
        return to_double(sqrt(norm2(da) + norm2(m.b)));
    };
    double d1 = dist(1.0), d2 = dist(-1.0);
    return d1 < d2 ? d1 : d2;
}

enum class MobiusClass { identity, elliptic, parabolic, hyperbolic };

template <class R>
MobiusClass classify(const DiskMobius<R>& m, double tol = kAngleTol) {
    double t = std::fabs(to_double(m.trace()));
    if (t > 2.0 + tol) return MobiusClass::hyperbolic;
    if (t < 2.0 - tol) {
        if (identity_distance(m) <= tol) return MobiusClass::identity;
        return MobiusClass::elliptic;
    }
    if (identity_distance(m) <= tol) return MobiusClass::identity;
    return MobiusClass::parabolic;
}

template <class R>
std::pair<CirclePoint<R>, CirclePoint<R>> fixed_points(const DiskMobius<R>& m) {
    if (classify(m) != MobiusClass::hyperbolic)
        throw NotHyperbolic("fixed_points requires a hyperbolic element");
    // conj(b) z^2 + (conj(a) - a) z - b = 0 on |z| = 1
    R s = sqrt(m.a.re * m.a.re - R(1));
    Cplx<R> ima(R(0), m.a.im);
    Cplx<R> cb = conj(m.b);
    Cplx<R> z1 = (ima + Cplx<R>(s, R(0))) / cb;
    Cplx<R> z2 = (ima - Cplx<R>(s, R(0))) / cb;
    CirclePoint<R> p1(arg(z1)), p2(arg(z2));
    R d1 = m.circle_derivative(p1);
    if (to_double(d1) < 1.0) return {p1, p2};
    return {p2, p1};
}

template <class R>
R translation_length(const DiskMobius<R>& m) {
    if (classify(m) != MobiusClass::hyperbolic)
        throw NotHyperbolic("translation_length requires a hyperbolic element");
    return R(2) * acosh(fabs(m.trace()) / R(2));
}

// axis oriented repelling -> attracting
template <class R>
Geodesic<R> axis(const DiskMobius<R>& m) {
    auto [att, rep] = fixed_points(m);
    return Geodesic<R>(rep, att);
}

// isometric circle |m'| = 1: center and radius in the plane (b != 0)
template <class R>
std::pair<Cplx<R>, R> isometric_circle(const DiskMobius<R>& m) {
    if (to_double(abs(m.b)) < 1e-15)
        throw BadInput("isometric circle undefined for rotations");
    Cplx<R> c = -conj(m.a) / conj(m.b);
    return {c, R(1) / abs(m.b)};
}

// hyperbolic translation by distance t along g, toward g.q for t > 0
template <class R>
DiskMobius<R> translation_along(const Geodesic<R>& g, const R& t) {
    GeodesicCircle<R> gc = geodesic_support(g);
    DiskMobius<R> to_diameter;
    if (!gc.is_diameter) {
        R cl = abs(gc.center);
        Cplx<R> p0 = gc.center * ((cl - gc.radius) / cl); // closest point to 0
        to_diameter = DiskMobius<R>::point_to_zero(p0);
    }
    Cplx<R> qi = to_diameter.apply_c(g.q.embed());
    DiskMobius<R> c = compose(DiskMobius<R>::rotation(-arg(qi)), to_diameter);
    R ch = cosh(t / R(2)), sh = sinh(t / R(2));
    DiskMobius<R> at(Cplx<R>(ch, R(0)), Cplx<R>(sh, R(0)), false);
    return compose(c.inverse(), compose(at, c));
}

// hyperbolic distance between interior points
template <class R>
R hyperbolic_distance(const Cplx<R>& z, const Cplx<R>& w) {
    Cplx<R> num = z - w;
    Cplx<R> den = Cplx<R>(R(1), R(0)) - conj(w) * z;
    R r = abs(num) / abs(den);
    return log((R(1) + r) / (R(1) - r));
}

// interior angle at v between segments [v,u1] and [v,u2] (geodesic sides)
template <class R>
R angle_at_vertex(const Cplx<R>& v, const Cplx<R>& u1, const Cplx<R>& u2) {
    auto tangent_toward = [&](const Cplx<R>& u) {
        GeodesicCircle<R> gc = circle_through(v, u);
        Cplx<R> t;
        if (gc.is_diameter)
            t = u - v;
        else {
            Cplx<R> radial = v - gc.center;
            t = Cplx<R>(-radial.im, radial.re);
            Cplx<R> chord = u - v;
            if (to_double(t.re * chord.re + t.im * chord.im) < 0.0) t = -t;
        }
        return t / abs(t);
    };
    Cplx<R> t1 = tangent_toward(u1), t2 = tangent_toward(u2);
    R c = t1.re * t2.re + t1.im * t2.im;
    R s = t1.re * t2.im - t1.im * t2.re;
    return fabs(atan2(s, c));
}

template <class R>
R asin_v(const R& x) {
    return atan2(x, sqrt(R(1) - x * x));
}

// Endpoint pair with its chord, propagated one Mobius map at a time. Entries
// of a single side-pairing map are moderate, so each step keeps full
// relative precision in the chord, unlike a difference of mapped angles or
// a single step with a deeply composed matrix.
template <class R>
struct ChordPair {
    Cplx<R> u, v;
    R chord{};

    static ChordPair of_arc(const Arc<R>& arc) {
        ChordPair c;
        c.u = arc.start.embed();
        c.v = arc.end().embed();
        c.chord = R(2) * sin(arc.length / R(2));
        return c;
    }
    void step(const DiskMobius<R>& m) {
        R du = abs(conj(m.b) * u + conj(m.a));
        R dv = abs(conj(m.b) * v + conj(m.a));
        chord = chord / (du * dv);
        u = m.apply_c(u);
        v = m.apply_c(v);
        u = u / abs(u);
        v = v / abs(v);
    }
    // valid while the arc stays shorter than pi (true for cylinders)
    R length() const {
        R half = chord / R(2);
        if (to_double(half) >= 1.0) half = R(1);
        return R(2) * asin_v(half);
    }
};

// Length of m(arc) for images shorter than pi, computed through the chord:
// |m(x) - m(y)| = |x - y| / (|conj(b) x + conj(a)| |conj(b) y + conj(a)|).
// Deep cylinder lengths keep full relative precision this way, while a
// difference of mapped angles would cancel catastrophically.
template <class R>
R image_arc_length(const DiskMobius<R>& m, const Arc<R>& arc) {
    Cplx<R> u = arc.start.embed(), v = arc.end().embed();
    R chord = R(2) * sin(arc.length / R(2));
    R du = abs(conj(m.b) * u + conj(m.a));
    R dv = abs(conj(m.b) * v + conj(m.a));
    R c = chord / (du * dv) / R(2);
    if (to_double(c) >= 1.0) c = R(1);
    return R(2) * asin_v(c);
}

// ---- closed-form derivative extrema over an arc ------------------------

namespace mobius_detail {

// range of angular distance D(theta) = |theta - theta_c| in [0, pi] over an arc
template <class R>
void distance_range(const Arc<R>& arc, const R& theta_c, R& dlo, R& dhi) {
    R da = fabs(wrap_pi(arc.start.angle - theta_c));
    R db = fabs(wrap_pi(arc.end().angle - theta_c));
    bool has_center = arc.contains(theta_c, 0.0);
    bool has_antipode = arc.contains(normalize_angle(theta_c + pi_v<R>()), 0.0);
    dlo = has_center ? R(0) : (da < db ? da : db);
    dhi = has_antipode ? pi_v<R>() : (da > db ? da : db);
}

} // namespace mobius_detail

// min and max of |m'| over an arc of the circle (exact up to rounding)
template <class R>
std::pair<R, R> derivative_range_on_arc(const DiskMobius<R>& m, const Arc<R>& arc) {
    if (to_double(abs(m.b)) < 1e-15) return {R(1), R(1)}; // rotation
    auto [c, rad] = isometric_circle(m);
    R cl = abs(c), tc = arg(c);
    R dlo, dhi;
    mobius_detail::distance_range(arc, tc, dlo, dhi);
    auto deriv_at = [&](const R& d) {
        return (rad * rad) / (R(1) + cl * cl - R(2) * cl * cos(d));
    };
    return {deriv_at(dhi), deriv_at(dlo)}; // {min, max}: |m'| decreases in d
}

// max of |d/dtheta log|m'(e^{i theta})|| over an arc
template <class R>
R log_derivative_bound_on_arc(const DiskMobius<R>& m, const Arc<R>& arc) {
    if (to_double(abs(m.b)) < 1e-15) return R(0);
    auto [c, rad] = isometric_circle(m);
    (void)rad;
    R cl = abs(c), tc = arg(c);
    R dlo, dhi;
    mobius_detail::distance_range(arc, tc, dlo, dhi);
    auto g = [&](const R& d) {
        return R(2) * cl * sin(d) / (R(1) + cl * cl - R(2) * cl * cos(d));
    };
    // g increases to d* = acos(2c/(1+c^2)), then decreases
    R cosd = R(2) * cl / (R(1) + cl * cl);
    R dstar = atan2(sqrt(R(1) - cosd * cosd), cosd);
    if (dstar >= dlo && dstar <= dhi) return R(2) * cl / (cl * cl - R(1));
    R glo = g(dlo), ghi = g(dhi);
    return glo > ghi ? glo : ghi;
}

} // namespace teich
