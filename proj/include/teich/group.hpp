#pragma once

// Standard genus-g Fuchsian groups from the regular 4g-gon, plus exact
// deformations: twist flows along generator axes and global conjugation.
//
// Conventions (fixed here, recorded in output metadata):
//  - vertices of the fundamental polygon at angles (2j+1)pi/(4g), so side 0
//    is bisected by the positive real axis; sides labeled counterclockwise
//    a1, b1, a1inv, b1inv, a2, ...
//  - the pairing map of side s carries side s onto its corresponding side
//    (a_j <-> a_jinv, b_j <-> b_jinv) reversing boundary orientation;
//  - the generator stored under label "a_j" is the pairing map of the side
//    labeled a_jinv (equivalently the inverse of side a_j's map), while
//    "b_j" stores side b_j's own map. With this naming the surface relation
//    reads prod_j [a_j, b_j] = +-identity, which is asserted at build time.

#include <string>
#include <vector>

#include "teich/mobius.hpp"

namespace teich {

template <class R>
struct Polygon {
    int genus = 0;
    std::vector<Cplx<R>> vertices; // 4g interior points, counterclockwise
    R circumradius_hyperbolic{};

    int sides() const { return int(vertices.size()); }
    // side s runs from vertex (s-1) to vertex s counterclockwise
    Cplx<R> side_start(int s) const { return vertices[(s + sides() - 1) % sides()]; }
    Cplx<R> side_end(int s) const { return vertices[s % sides()]; }

    R vertex_angle(int j) const {
        int n = sides();
        return angle_at_vertex(vertices[j], vertices[(j + n - 1) % n], vertices[(j + 1) % n]);
    }
};

struct ProvenanceEvent {
    std::string kind;  // "twist" | "conjugate"
    std::string curve; // twist curve label
    double t = 0.0;    // twist parameter
    double m_a_re = 1.0, m_a_im = 0.0, m_b_re = 0.0, m_b_im = 0.0; // conjugator
};

template <class R>
struct SurfaceGroupRep {
    int genus = 0;
    std::vector<DiskMobius<R>> generators; // a1 b1 a1inv b1inv a2 ...
    std::vector<std::string> labels;
    bool is_standard = false;
    double relation_residual = 0.0;
    std::vector<ProvenanceEvent> provenance;

    int count() const { return int(generators.size()); }

    static int inverse_index(int i) { return i ^ 2; }

    int index_of(const std::string& label) const {
        for (int i = 0; i < count(); ++i)
            if (labels[i] == label) return i;
        throw UnknownLabel("no generator labeled '" + label + "'");
    }

    const DiskMobius<R>& gen(const std::string& label) const { return generators[index_of(label)]; }
};

template <class R>
struct Marking {
    // all markings here are index-preserving; the map is kept for the record
    SurfaceGroupRep<R> source;
    SurfaceGroupRep<R> target;
    std::vector<int> generator_map;

    static Marking make(const SurfaceGroupRep<R>& src, const SurfaceGroupRep<R>& tgt) {
        Marking m;
        m.source = src;
        m.target = tgt;
        m.generator_map.resize(src.count());
        for (int i = 0; i < src.count(); ++i) m.generator_map[i] = i;
        return m;
    }
};

inline std::vector<std::string> generator_labels(int genus) {
    std::vector<std::string> out;
    for (int j = 1; j <= genus; ++j) {
        out.push_back("a" + std::to_string(j));
        out.push_back("b" + std::to_string(j));
        out.push_back("a" + std::to_string(j) + "inv");
        out.push_back("b" + std::to_string(j) + "inv");
    }
    return out;
}

// side s pairs with side corr(s): offset +-2 inside each group of four
inline int corresponding_side(int s) {
    int p = s % 4;
    return (p == 0 || p == 1) ? s + 2 : s - 2;
}

namespace group_detail {

// orientation-preserving isometry with (p, q) -> (p2, q2); requires
// d(p,q) = d(p2,q2)
template <class R>
DiskMobius<R> pair_transport(const Cplx<R>& p, const Cplx<R>& q,
                             const Cplx<R>& p2, const Cplx<R>& q2) {
    auto frame = [](const Cplx<R>& x, const Cplx<R>& y) {
        DiskMobius<R> t = DiskMobius<R>::point_to_zero(x);
        Cplx<R> yi = t.apply_c(y);
        return compose(DiskMobius<R>::rotation(-arg(yi)), t);
    };
    DiskMobius<R> A = frame(p, q), B = frame(p2, q2);
    return compose(B.inverse(), A);
}

template <class R>
Polygon<R> regular_polygon(int genus, const R& circumradius) {
    Polygon<R> poly;
    poly.genus = genus;
    poly.circumradius_hyperbolic = circumradius;
    int n = 4 * genus;
    R re = tanh(circumradius / R(2));
    for (int j = 0; j < n; ++j) {
        R ang = R(2 * j + 1) * pi_v<R>() / R(n);
        poly.vertices.push_back(Cplx<R>(re * cos(ang), re * sin(ang)));
    }
    return poly;
}

} // namespace group_detail

// Circumradius solved by bisection on the geometrically computed vertex
// angle (decreasing in r); the closed form cosh r = cot^2(pi/4g) is used as
// a cross-check in the tests, not trusted here.
template <class R>
R standard_circumradius(int genus) {
    R target = pi_v<R>() / R(2 * genus);
    auto angle_of = [&](const R& r) {
        Polygon<R> p = group_detail::regular_polygon(genus, r);
        return p.vertex_angle(0);
    };
    R lo(0.05), hi(12.0);
    int iters = RealTraits<R>::mantissa_bits + 12;
    for (int i = 0; i < iters; ++i) {
        R mid = (lo + hi) / R(2);
        if (angle_of(mid) > target)
            lo = mid;
        else
            hi = mid;
    }
    return (lo + hi) / R(2);
}

template <class R = double>
std::pair<SurfaceGroupRep<R>, Polygon<R>> build_standard_group(int genus) {
    if (genus < 2) throw BadInput("genus must be >= 2");
    int n = 4 * genus;
    R r = standard_circumradius<R>(genus);
    Polygon<R> poly = group_detail::regular_polygon(genus, r);

    // pairing map of side s: (start_s, end_s) -> (end_corr, start_corr)
    std::vector<DiskMobius<R>> side_map(n);
    for (int s = 0; s < n; ++s) {
        int c = corresponding_side(s);
        side_map[s] = group_detail::pair_transport(poly.side_start(s), poly.side_end(s),
                                                   poly.side_end(c), poly.side_start(c));
    }

    SurfaceGroupRep<R> rep;
    rep.genus = genus;
    rep.labels = generator_labels(genus);
    rep.is_standard = true;
    rep.generators.resize(n);
    for (int j = 0; j < genus; ++j) {
        rep.generators[4 * j + 0] = side_map[4 * j + 2]; // a_{j+1}
        rep.generators[4 * j + 1] = side_map[4 * j + 1]; // b_{j+1}
        rep.generators[4 * j + 2] = side_map[4 * j + 0]; // a_{j+1} inverse
        rep.generators[4 * j + 3] = side_map[4 * j + 3]; // b_{j+1} inverse
    }

    // commutator relation
    DiskMobius<R> prod = DiskMobius<R>::identity();
    for (int j = 0; j < genus; ++j) {
        const auto& a = rep.generators[4 * j + 0];
        const auto& b = rep.generators[4 * j + 1];
        prod = compose(prod, compose(compose(a, b), compose(a.inverse(), b.inverse())));
    }
    rep.relation_residual = identity_distance(prod);
    if (rep.relation_residual > 1e-9)
        throw ConstructionFailure("surface relation residual " +
                                  std::to_string(rep.relation_residual));

    double angle_err = std::fabs(to_double(poly.vertex_angle(0) - pi_v<R>() / R(2 * genus)));
    if (angle_err > 1e-9)
        throw ConstructionFailure("vertex angle off by " + std::to_string(angle_err));

    for (const auto& g : rep.generators)
        if (classify(g) != MobiusClass::hyperbolic)
            throw ConstructionFailure("non-hyperbolic side pairing");

    return {rep, poly};
}

template <class R>
double recompute_relation_residual(const SurfaceGroupRep<R>& rep) {
    DiskMobius<R> prod = DiskMobius<R>::identity();
    for (int j = 0; j < rep.genus; ++j) {
        const auto& a = rep.generators[4 * j + 0];
        const auto& b = rep.generators[4 * j + 1];
        prod = compose(prod, compose(compose(a, b), compose(a.inverse(), b.inverse())));
    }
    return identity_distance(prod);
}

// Fenchel-Nielsen style twist: for curve a_i replace b_i by b_i * A_t with
// A_t the hyperbolic translation by t along axis(a_i) (and symmetrically for
// curve b_i). A_t commutes with the curve generator, so the relation is
// preserved exactly.
template <class R>
std::pair<SurfaceGroupRep<R>, Marking<R>> twist_deform(const SurfaceGroupRep<R>& rep,
                                                       const std::string& curve, const R& t) {
    int ci = rep.index_of(curve);
    int pos = ci % 4;
    if (pos >= 2) throw BadInput("twist curve must be an a_i or b_i label");
    if (classify(rep.generators[ci]) != MobiusClass::hyperbolic)
        throw NotHyperbolic("twist curve generator is not hyperbolic");

    int partner = (pos == 0) ? ci + 1 : ci - 1; // b_i for curve a_i, a_i for b_i
    DiskMobius<R> flow = translation_along(axis(rep.generators[ci]), t);

    SurfaceGroupRep<R> out = rep;
    out.is_standard = false;
    out.generators[partner] = compose(rep.generators[partner], flow);
    out.generators[SurfaceGroupRep<R>::inverse_index(partner)] = out.generators[partner].inverse();
    out.relation_residual = recompute_relation_residual(out);
    if (out.relation_residual > 1e-9)
        throw ConstructionFailure("twist broke the relation: residual " +
                                  std::to_string(out.relation_residual));
    ProvenanceEvent ev;
    ev.kind = "twist";
    ev.curve = curve;
    ev.t = to_double(t);
    out.provenance.push_back(ev);
    return {out, Marking<R>::make(rep, out)};
}

template <class R>
std::pair<SurfaceGroupRep<R>, Marking<R>> conjugate_rep(const SurfaceGroupRep<R>& rep,
                                                        const DiskMobius<R>& m) {
    SurfaceGroupRep<R> out = rep;
    out.is_standard = false;
    for (auto& g : out.generators) g = conjugate(g, m);
    out.relation_residual = recompute_relation_residual(out);
    ProvenanceEvent ev;
    ev.kind = "conjugate";
    ev.m_a_re = to_double(m.a.re);
    ev.m_a_im = to_double(m.a.im);
    ev.m_b_re = to_double(m.b.re);
    ev.m_b_im = to_double(m.b.im);
    out.provenance.push_back(ev);
    return {out, Marking<R>::make(rep, out)};
}

// whitespace-separated label word, leftmost factor applied last (so the
// word "g1 g2" acts as g1 after g2... i.e. matrix product in written order)
template <class R>
DiskMobius<R> evaluate_word(const SurfaceGroupRep<R>& rep, const std::string& word) {
    DiskMobius<R> prod = DiskMobius<R>::identity();
    size_t i = 0;
    while (i < word.size()) {
        while (i < word.size() && std::isspace(static_cast<unsigned char>(word[i]))) ++i;
        if (i >= word.size()) break;
        size_t j = i;
        while (j < word.size() && !std::isspace(static_cast<unsigned char>(word[j]))) ++j;
        prod = compose(prod, rep.generators[rep.index_of(word.substr(i, j - i))]);
        i = j;
    }
    return prod;
}

template <class R>
DiskMobius<R> evaluate_indices(const SurfaceGroupRep<R>& rep, const std::vector<int>& idx) {
    DiskMobius<R> prod = DiskMobius<R>::identity();
    for (int i : idx) prod = compose(prod, rep.generators[i]);
    return prod;
}

} // namespace teich
