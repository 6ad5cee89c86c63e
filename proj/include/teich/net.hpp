#pragma once

// The tessellation layer behind the boundary Markov map: tiles adjacent to
// the fundamental polygon, the vertex set V, the circle point set W from net
// geodesics, and the J(v) arcs. Tiles around a vertex are enumerated by
// walking the vertex cycle (crossing one side at a time), which is exact and
// needs no word-length cutoff.

#include <algorithm>
#include <vector>

#include "teich/group.hpp"

namespace teich {

// pairing map attached to side s (generators are stored relabeled; see group.hpp)
inline int side_pairing_index(int s) {
    int p = s % 4;
    return (p == 0 || p == 2) ? (s ^ 2) : s;
}

template <class R>
const DiskMobius<R>& side_pairing(const SurfaceGroupRep<R>& rep, int s) {
    return rep.generators[side_pairing_index(s)];
}

template <class R>
struct VertexCycleStep {
    DiskMobius<R> word; // tile = word(D)
    int vertex;         // D-vertex index carried onto the pivot
};

// All 4g tiles around the pivot start_word(v[start_vertex]), starting at
// start_word's tile. Throws NetIncomplete if the cycle fails to close.
template <class R>
std::vector<VertexCycleStep<R>> walk_vertex_cycle(const SurfaceGroupRep<R>& rep,
                                                  const Polygon<R>& poly,
                                                  const DiskMobius<R>& start_word,
                                                  int start_vertex) {
    const int n = poly.sides();
    std::vector<VertexCycleStep<R>> steps;
    Cplx<R> pivot = start_word.apply_c(poly.vertices[start_vertex]);

    DiskMobius<R> M = start_word;
    int j = start_vertex;
    int s_in = j; // pretend we entered through side j so the walk starts across side j+1
    for (int k = 0; k < n; ++k) {
        steps.push_back({M, j});
        Cplx<R> here = M.apply_c(poly.vertices[j]);
        if (to_double(abs(here - pivot)) > 1e-6)
            throw NetIncomplete("vertex cycle drifted off its pivot");
        int s_out = (s_in == j) ? (j + 1) % n : j;
        int c = corresponding_side(s_out);
        M = compose(M, side_pairing(rep, c));
        j = (s_out == (j + 1) % n) ? c : (c + n - 1) % n;
        s_in = c; // entered side, in the new tile's base coordinates
    }
    // closure: the next tile must be the starting one
    Cplx<R> c_end = M.apply_c(Cplx<R>(R(0), R(0)));
    Cplx<R> c_start = start_word.apply_c(Cplx<R>(R(0), R(0)));
    if (to_double(abs(c_end - c_start)) > 1e-6)
        throw NetIncomplete("vertex cycle did not close after 4g tiles");
    return steps;
}

template <class R>
struct NetVertex {
    Cplx<R> point;
    DiskMobius<R> anchor_word; // a tile containing this vertex
    int anchor_vertex;         // D-vertex index inside the anchor tile
};

template <class R>
struct Net {
    SurfaceGroupRep<R> rep;
    Polygon<R> base;
    std::vector<DiskMobius<R>> adjacent_tiles; // distinct tiles sharing a vertex with D
    std::vector<std::vector<VertexCycleStep<R>>> base_cycles; // per base vertex
    std::vector<Cplx<R>> V0;
    std::vector<NetVertex<R>> V;
};

template <class R>
Net<R> build_net(const Polygon<R>& poly, const SurfaceGroupRep<R>& rep) {
    if (!rep.is_standard) throw BadInput("build_net expects the standard representation");
    const int n = poly.sides();
    Net<R> net;
    net.rep = rep;
    net.base = poly;
    net.V0 = poly.vertices;

    for (int j = 0; j < n; ++j) {
        auto cyc = walk_vertex_cycle(rep, poly, DiskMobius<R>::identity(), j);
        // angle sum around the base vertex
        R total(0);
        for (const auto& st : cyc) {
            int m = st.vertex;
            Cplx<R> v = st.word.apply_c(poly.vertices[m]);
            Cplx<R> u1 = st.word.apply_c(poly.vertices[(m + n - 1) % n]);
            Cplx<R> u2 = st.word.apply_c(poly.vertices[(m + 1) % n]);
            total = total + angle_at_vertex(v, u1, u2);
        }
        if (std::fabs(to_double(total) - 2.0 * to_double(pi_v<R>())) > 1e-6)
            throw NetIncomplete("angle sum around base vertex " + std::to_string(j));
        net.base_cycles.push_back(std::move(cyc));
    }

    // distinct adjacent tiles (excluding D), deduped by center
    auto near = [](const Cplx<R>& x, const Cplx<R>& y, double tol) {
        return to_double(abs(x - y)) <= tol;
    };
    Cplx<R> origin(R(0), R(0));
    for (const auto& cyc : net.base_cycles) {
        for (const auto& st : cyc) {
            Cplx<R> c = st.word.apply_c(origin);
            if (near(c, origin, 1e-9)) continue;
            bool seen = false;
            for (const auto& t : net.adjacent_tiles)
                if (near(t.apply_c(origin), c, 1e-9)) { seen = true; break; }
            if (!seen) net.adjacent_tiles.push_back(st.word);
        }
    }

    // V: net neighbors of V0 outside V0 (other endpoints of net edges at V0)
    for (const auto& cyc : net.base_cycles) {
        for (const auto& st : cyc) {
            int m = st.vertex;
            for (int d : {-1, +1}) {
                int mi = (m + d + n) % n;
                Cplx<R> u = st.word.apply_c(poly.vertices[mi]);
                bool in_v0 = false;
                for (const auto& b : net.V0)
                    if (near(u, b, 1e-9)) { in_v0 = true; break; }
                if (in_v0) continue;
                bool seen = false;
                for (const auto& w : net.V)
                    if (near(w.point, u, 1e-9)) { seen = true; break; }
                if (!seen) net.V.push_back({u, st.word, mi});
            }
        }
    }
    return net;
}

// ---- W: endpoints of the net geodesics through V ------------------------

template <class R>
struct WData {
    std::vector<R> angles;                 // sorted in [0, 2pi), merged
    std::vector<std::vector<int>> sources; // net-geodesic ids per point
    std::vector<std::pair<R, R>> geodesics; // deduped endpoint angle pairs
    int raw_count = 0;
};

namespace net_detail {

// the 2g full geodesics through a net vertex, as endpoint angle pairs
template <class R>
std::vector<std::pair<R, R>> geodesics_through_vertex(const Net<R>& net,
                                                      const DiskMobius<R>& anchor,
                                                      int anchor_vertex) {
    const int n = net.base.sides();
    auto cyc = walk_vertex_cycle(net.rep, net.base, anchor, anchor_vertex);
    Cplx<R> pivot = anchor.apply_c(net.base.vertices[anchor_vertex]);

    std::vector<Cplx<R>> nbrs;
    for (const auto& st : cyc) {
        for (int d : {-1, +1}) {
            Cplx<R> u = st.word.apply_c(net.base.vertices[(st.vertex + d + n) % n]);
            bool seen = false;
            for (const auto& w : nbrs)
                if (to_double(abs(w - u)) <= 1e-9) { seen = true; break; }
            if (!seen) nbrs.push_back(u);
        }
    }
    if (int(nbrs.size()) != n)
        throw NetIncomplete("expected 4g net edges at a vertex, got " +
                            std::to_string(nbrs.size()));

    std::vector<std::pair<R, R>> out;
    for (const auto& u : nbrs) {
        Geodesic<R> g = geodesic_through(pivot, u);
        R x = g.p.angle, y = g.q.angle;
        bool seen = false;
        for (const auto& pr : out) {
            bool direct = std::fabs(to_double(wrap_pi(pr.first - x))) <= 1e-8 &&
                          std::fabs(to_double(wrap_pi(pr.second - y))) <= 1e-8;
            bool swapped = std::fabs(to_double(wrap_pi(pr.first - y))) <= 1e-8 &&
                           std::fabs(to_double(wrap_pi(pr.second - x))) <= 1e-8;
            if (direct || swapped) { seen = true; break; }
        }
        if (!seen) out.emplace_back(x, y);
    }
    if (int(out.size()) != n / 2)
        throw DegenerateGeodesic("expected 2g geodesics through a net vertex, got " +
                                 std::to_string(out.size()));
    return out;
}

} // namespace net_detail

template <class R>
WData<R> compute_W(const Net<R>& net) {
    WData<R> w;

    // global geodesic list over all p in V
    for (const auto& p : net.V) {
        auto gs = net_detail::geodesics_through_vertex(net, p.anchor_word, p.anchor_vertex);
        for (const auto& g : gs) {
            bool seen = false;
            for (const auto& pr : w.geodesics) {
                bool direct = std::fabs(to_double(wrap_pi(pr.first - g.first))) <= 1e-8 &&
                              std::fabs(to_double(wrap_pi(pr.second - g.second))) <= 1e-8;
                bool swapped = std::fabs(to_double(wrap_pi(pr.first - g.second))) <= 1e-8 &&
                               std::fabs(to_double(wrap_pi(pr.second - g.first))) <= 1e-8;
                if (direct || swapped) { seen = true; break; }
            }
            if (!seen) w.geodesics.push_back(g);
        }
    }

    // endpoints, merged at tolerance
    std::vector<std::pair<R, int>> pts;
    for (int gi = 0; gi < int(w.geodesics.size()); ++gi) {
        pts.emplace_back(normalize_angle(w.geodesics[gi].first), gi);
        pts.emplace_back(normalize_angle(w.geodesics[gi].second), gi);
    }
    w.raw_count = int(pts.size());
    std::sort(pts.begin(), pts.end(),
              [](const auto& a, const auto& b) { return to_double(a.first) < to_double(b.first); });

    const double tol = kAngleTol;
    size_t i = 0;
    while (i < pts.size()) {
        size_t j = i + 1;
        while (j < pts.size() && to_double(pts[j].first - pts[i].first) <= tol) ++j;
        // wrap-around cluster at 2pi handled after the loop
        R rep_angle = pts[i].first;
        std::vector<int> src;
        for (size_t k = i; k < j; ++k) src.push_back(pts[k].second);
        std::sort(src.begin(), src.end());
        src.erase(std::unique(src.begin(), src.end()), src.end());
        w.angles.push_back(rep_angle);
        w.sources.push_back(std::move(src));
        i = j;
    }
    // merge first and last if they wrap within tolerance
    if (w.angles.size() >= 2) {
        double tp = 2.0 * to_double(pi_v<R>());
        if (to_double(w.angles.front()) + tp - to_double(w.angles.back()) <= tol) {
            for (int s : w.sources.back()) w.sources.front().push_back(s);
            std::sort(w.sources.front().begin(), w.sources.front().end());
            w.sources.front().erase(
                std::unique(w.sources.front().begin(), w.sources.front().end()),
                w.sources.front().end());
            w.angles.pop_back();
            w.sources.pop_back();
        }
    }

    // ambiguity guard: distinct points must be clearly separated
    for (size_t k = 0; k < w.angles.size(); ++k) {
        R next = w.angles[(k + 1) % w.angles.size()];
        R gap = normalize_angle(next - w.angles[k]);
        if (to_double(gap) < 10 * tol)
            throw DegenerateGeodesic("two W points closer than 10x tolerance");
    }

    // W_q subset of W for every base vertex q
    for (int j = 0; j < net.base.sides(); ++j) {
        auto gs = net_detail::geodesics_through_vertex(net, DiskMobius<R>::identity(), j);
        for (const auto& g : gs)
            for (const R& a : {g.first, g.second}) {
                bool found = false;
                for (const R& x : w.angles)
                    if (std::fabs(to_double(wrap_pi(x - a))) <= 1e-8) { found = true; break; }
                if (!found)
                    throw ConstructionFailure("W_q endpoint missing from W");
            }
    }
    return w;
}

// index of the W point within tol, or -1
template <class R>
int locate_W(const WData<R>& w, const R& angle, double tol = 1e-8) {
    // angles are sorted; binary search plus wrap check
    double a = to_double(normalize_angle(angle));
    int n = int(w.angles.size());
    int lo = 0, hi = n;
    while (lo < hi) {
        int mid = (lo + hi) / 2;
        if (to_double(w.angles[mid]) < a) lo = mid + 1; else hi = mid;
    }
    for (int cand : {lo % n, (lo + n - 1) % n, (lo + 1) % n})
        if (std::fabs(to_double(wrap_pi(w.angles[cand] - angle))) <= tol) return cand;
    return -1;
}

// ---- J(v) ----------------------------------------------------------------

template <class R>
struct JvArc {
    int vertex = 0;       // base vertex index
    Arc<R> arc;           // [w(v), w'(v)] inside int(J_s cap J_s')
    int w_index = -1;     // W index of the ccw start endpoint
    int w_prime_index = -1; // W index of the ccw end endpoint
};

// smaller circle arc cut off by the geodesic through side s, oriented so the
// ccw start is the ideal continuation beyond the side's ccw-start vertex
template <class R>
Arc<R> side_arc_Js(const Polygon<R>& poly, int s) {
    // side s runs v_{s-1} -> v_s counterclockwise
    Geodesic<R> beta = geodesic_through(poly.side_start(s), poly.side_end(s));
    // beta.q is beyond v_s, beta.p beyond v_{s-1}
    Arc<R> a = Arc<R>::from_endpoints(CirclePoint<R>(beta.p.angle), CirclePoint<R>(beta.q.angle));
    if (to_double(a.length) > to_double(pi_v<R>()))
        throw ConstructionFailure("J_s arc orientation: smaller arc is not ccw from "
                                  "the beyond-start endpoint");
    return a;
}

template <class R>
JvArc<R> compute_Jv(const Net<R>& net, const WData<R>& w, int vertex) {
    const int n = net.base.sides();
    const auto& poly = net.base;
    int s = vertex;             // side [v_{s-1}, v_s] ends at v
    int sp = (vertex + 1) % n;  // side [v_s, v_{s+1}] starts at v
    Cplx<R> v = poly.vertices[vertex];
    Cplx<R> v_prev = poly.vertices[(vertex + n - 1) % n];
    Cplx<R> v_next = poly.vertices[(vertex + 1) % n];

    Arc<R> js = side_arc_Js(poly, s);
    Arc<R> jsp = side_arc_Js(poly, sp);

    // overlap arc of J_s and J_s'; both contain the region beyond v
    R ov_start = jsp.start.angle; // J_s' begins beyond v, inside J_s for 4g-gons
    R ov_len = normalize_angle(js.end().angle - ov_start);
    Arc<R> overlap(CirclePoint<R>(ov_start), ov_len);
    if (!(js.contains_arc(overlap, 1e-9) && jsp.contains_arc(overlap, 1e-9)))
        throw ConstructionFailure("J_s overlap arc construction failed");

    // p, p': net neighbors of v along beta, beta' away from the polygon side
    Geodesic<R> beta = geodesic_through(v_prev, v);    // extends beyond v
    Geodesic<R> betap = geodesic_through(v_next, v);
    auto on_geodesic = [&](const Geodesic<R>& g, const Cplx<R>& u) {
        GeodesicCircle<R> gc = geodesic_support(g);
        if (gc.is_diameter) {
            R cross = u.re * sin(gc.direction) - u.im * cos(gc.direction);
            return std::fabs(to_double(cross)) <= 1e-8;
        }
        return std::fabs(to_double(abs(u - gc.center) - gc.radius)) <= 1e-8;
    };

    const auto& cyc = net.base_cycles[vertex];
    Cplx<R> p{}, pp{};
    bool found_p = false, found_pp = false;
    std::vector<Cplx<R>> nbrs;
    for (const auto& st : cyc)
        for (int d : {-1, +1}) {
            Cplx<R> u = st.word.apply_c(poly.vertices[(st.vertex + d + n) % n]);
            bool dup = false;
            for (const auto& x : nbrs)
                if (to_double(abs(x - u)) <= 1e-9) { dup = true; break; }
            if (!dup) nbrs.push_back(u);
        }
    for (const auto& u : nbrs) {
        if (to_double(abs(u - v_prev)) <= 1e-9 || to_double(abs(u - v_next)) <= 1e-9) continue;
        if (on_geodesic(beta, u)) { p = u; found_p = true; }
        if (on_geodesic(betap, u)) { pp = u; found_pp = true; }
    }
    if (!found_p || !found_pp)
        throw ConstructionFailure("net neighbors of v along its side geodesics not found");

    // the tile of the vertex cycle having v, p, p' among its vertices
    bool found_tile = false;
    Cplx<R> q{}, qp{};
    for (const auto& st : cyc) {
        int m = st.vertex;
        Cplx<R> u_minus = st.word.apply_c(poly.vertices[(m + n - 1) % n]);
        Cplx<R> u_plus = st.word.apply_c(poly.vertices[(m + 1) % n]);
        bool mp = to_double(abs(u_minus - p)) <= 1e-9, mq = to_double(abs(u_plus - pp)) <= 1e-9;
        bool sp2 = to_double(abs(u_minus - pp)) <= 1e-9, sq = to_double(abs(u_plus - p)) <= 1e-9;
        if (mp && mq) {
            q = st.word.apply_c(poly.vertices[(m + n - 2) % n]);
            qp = st.word.apply_c(poly.vertices[(m + 2) % n]);
            found_tile = true;
            break;
        }
        if (sp2 && sq) {
            qp = st.word.apply_c(poly.vertices[(m + n - 2) % n]);
            q = st.word.apply_c(poly.vertices[(m + 2) % n]);
            found_tile = true;
            break;
        }
    }
    if (!found_tile)
        throw ConstructionFailure("opposite tile q,p,v,p',q' not located");

    // delta through (p, q), delta' through (p', q'): endpoints inside the overlap
    Geodesic<R> delta = geodesic_through(q, p);
    Geodesic<R> deltap = geodesic_through(qp, pp);
    auto endpoint_inside = [&](const Geodesic<R>& g) {
        bool a_in = overlap.contains_interior(g.p.angle, 1e-12);
        bool b_in = overlap.contains_interior(g.q.angle, 1e-12);
        if (a_in == b_in)
            throw ConstructionFailure("delta geodesic does not have exactly one endpoint "
                                      "inside J_s cap J_s'");
        return a_in ? g.p.angle : g.q.angle;
    };
    R wv = endpoint_inside(delta);
    R wvp = endpoint_inside(deltap);

    // delta and delta' must not cross: endpoint pairs must not interleave
    {
        auto inside = [&](const R& x, const Geodesic<R>& g) {
            Arc<R> ga = Arc<R>::from_endpoints(CirclePoint<R>(g.p.angle), CirclePoint<R>(g.q.angle));
            return ga.contains_interior(x, 1e-12);
        };
        int cnt = int(inside(deltap.p.angle, delta)) + int(inside(deltap.q.angle, delta));
        if (cnt == 1) throw ConstructionFailure("delta and delta' intersect");
    }

    JvArc<R> out;
    out.vertex = vertex;
    Arc<R> cand1 = Arc<R>::from_endpoints(CirclePoint<R>(wv), CirclePoint<R>(wvp));
    Arc<R> cand2 = Arc<R>::from_endpoints(CirclePoint<R>(wvp), CirclePoint<R>(wv));
    out.arc = overlap.contains_arc(cand1, 1e-9) ? cand1 : cand2;
    if (!overlap.contains_arc(out.arc, 1e-9))
        throw ConstructionFailure("J(v) not contained in J_s cap J_s'");

    out.w_index = locate_W(w, out.arc.start.angle);
    out.w_prime_index = locate_W(w, out.arc.end().angle);
    if (out.w_index < 0 || out.w_prime_index < 0)
        throw ConstructionFailure("J(v) endpoints are not W points");

    // no other W point strictly inside
    for (const R& x : w.angles)
        if (out.arc.contains_interior(x, 1e-8))
            throw ConstructionFailure("J(v) contains an interior W point");
    return out;
}

} // namespace teich
