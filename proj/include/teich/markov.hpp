#pragma once

// The boundary Markov map: partition of S^1 by W, one pairing-map branch per
// interval, transition matrix from arc containments (exact combinatorics via
// endpoint snapping), expansion and transitivity certificates.
//
// Intervals are half-open counterclockwise [W_j, W_{j+1}); the map at a
// shared endpoint is recorded per branch, one value from each side.

#include <cstdint>
#include <string>
#include <vector>

#include "teich/net.hpp"

namespace teich {

template <class R>
struct MarkovSystem {
    int genus = 0;
    SurfaceGroupRep<R> rep;
    // Partition points in a fixed cyclic order shared by all systems with the
    // same combinatorics: index j means the same symbolic interval on every
    // deformation. For the standard system the array is sorted and first = 0.
    std::vector<R> W;
    int first = 0; // index of the smallest angle
    std::vector<std::vector<int>> W_sources; // net-geodesic ids (provenance)
    std::vector<std::pair<R, R>> geodesics;  // net geodesics backing W
    std::vector<DiskMobius<R>> branch;       // per interval
    std::vector<int> branch_gen;             // generator index of the branch
    std::vector<int> branch_side;            // source side of the pairing map
    std::vector<int> branch_alternatives;    // how many sides could serve
    std::vector<int> img_lo, img_hi;         // branch image = W indices [lo, hi) cyclic
    std::vector<JvArc<R>> jv;                // the J(v) arcs, per base vertex
    double markov_residual = 0.0;            // max snap distance of f(W) into W
    double lambda0 = 0.0;                    // certified expansion constant
    int depth_used = 1;                      // depth of the expansion certificate

    int size() const { return int(W.size()); }
    Arc<R> interval(int j) const {
        int k = size();
        return Arc<R>(CirclePoint<R>(W[j]), normalize_angle(W[(j + 1) % k] - W[j]));
    }
    // interval containing the angle under the half-open convention
    int locate(const R& angle) const {
        double a = to_double(normalize_angle(angle - W[first]));
        int k = size();
        int lo = 0, hi = k; // search offsets from W[first] in rotated order
        while (lo < hi) {
            int mid = (lo + hi) / 2;
            double off = to_double(normalize_angle(W[(first + mid) % k] - W[first]));
            if (mid > 0 && off == 0.0) off = 2.0 * to_double(pi_v<R>());
            if (off <= a) lo = mid + 1; else hi = mid;
        }
        return (first + lo + k - 1) % k;
    }
    bool admissible(int i, int j) const {
        int k = size();
        int span = (img_hi[i] - img_lo[i] + k) % k;
        if (span == 0) span = k;
        int off = (j - img_lo[i] + k) % k;
        return off < span;
    }
    int row_sum(int i) const {
        int k = size();
        int span = (img_hi[i] - img_lo[i] + k) % k;
        return span == 0 ? k : span;
    }
    // branch image of W point j from the interval on its right / left
    int image_index_right(int j) const { return img_lo[j]; }
    int image_index_left(int j) const { return img_hi[(j + size() - 1) % size()]; }
};

namespace markov_detail {

// J~_s as a ccw arc: from the start of J(v_{s-1}) to the start of J(v_s),
// where side s runs v_{s-1} -> v_s counterclockwise (so reading J_s
// clockwise starts beyond v_s). Contains J(v_{s-1}), excludes int J(v_s).
template <class R>
Arc<R> trimmed_branch_domain(const Polygon<R>& poly, const std::vector<JvArc<R>>& jv, int s) {
    const int n = poly.sides();
    Arc<R> js = side_arc_Js(poly, s);
    const Arc<R>& j_keep = jv[(s + n - 1) % n].arc; // J(v) at the ccw start vertex
    const Arc<R>& j_drop = jv[s % n].arc;           // J(v') at the ccw end vertex
    Arc<R> out = Arc<R>::from_endpoints(j_keep.start, j_drop.start);
    if (!js.contains_arc(out, 1e-8))
        throw ConstructionFailure("trimmed branch domain escapes J_s");
    return out;
}

} // namespace markov_detail

template <class R>
MarkovSystem<R> assign_branches(const Net<R>& net, const WData<R>& w,
                                const std::vector<JvArc<R>>& jv) {
    const auto& poly = net.base;
    const int n = poly.sides();
    MarkovSystem<R> sys;
    sys.genus = net.rep.genus;
    sys.rep = net.rep;
    sys.W = w.angles;
    sys.W_sources = w.sources;
    sys.geodesics = w.geodesics;
    sys.jv = jv;
    const int k = sys.size();

    std::vector<Arc<R>> domains;
    for (int s = 0; s < n; ++s)
        domains.push_back(markov_detail::trimmed_branch_domain(poly, jv, s));

    sys.branch.resize(k);
    sys.branch_gen.resize(k);
    sys.branch_side.resize(k);
    sys.branch_alternatives.assign(k, 0);
    for (int j = 0; j < k; ++j) {
        Arc<R> ij = sys.interval(j);
        int best = -1;
        double best_min = 0.0;
        for (int s = 0; s < n; ++s) {
            if (!domains[s].contains_arc(ij, 1e-9)) continue;
            ++sys.branch_alternatives[j];
            double m = to_double(derivative_range_on_arc(side_pairing(net.rep, s), ij).first);
            if (best < 0 || m > best_min) { best = s; best_min = m; }
        }
        if (best < 0)
            throw UncoveredInterval("interval " + std::to_string(j) +
                                    " lies in no trimmed branch domain");
        sys.branch_side[j] = best;
        sys.branch_gen[j] = side_pairing_index(best);
        sys.branch[j] = side_pairing(net.rep, best);
    }

    // Markov closure: branch images of interval endpoints snap into W
    sys.img_lo.resize(k);
    sys.img_hi.resize(k);
    double residual = 0.0;
    for (int j = 0; j < k; ++j) {
        R a = sys.branch[j].apply_angle(sys.W[j]);
        R b = sys.branch[j].apply_angle(sys.W[(j + 1) % k]);
        int ia = locate_W(w, a), ib = locate_W(w, b);
        if (ia < 0 || ib < 0)
            throw ConstructionFailure("branch image of a partition point is not in W");
        residual = std::max(residual, std::fabs(to_double(wrap_pi(sys.W[ia] - a))));
        residual = std::max(residual, std::fabs(to_double(wrap_pi(sys.W[ib] - b))));
        sys.img_lo[j] = ia;
        sys.img_hi[j] = ib;
        if (ia == ib)
            throw ConstructionFailure("branch image of an interval collapsed");
    }
    sys.markov_residual = residual;
    if (residual > 1e-8)
        throw ConstructionFailure("Markov closure residual " + std::to_string(residual));

    // expansion certificate at depth 1
    double lam = 1e300;
    for (int j = 0; j < k; ++j)
        lam = std::min(lam, to_double(derivative_range_on_arc(sys.branch[j], sys.interval(j)).first));
    sys.lambda0 = lam;
    sys.depth_used = 1;
    if (lam <= 1.0)
        throw ExpansionFailure("standard system not expanding at depth 1: min |f'| = " +
                               std::to_string(lam));
    return sys;
}

// raw pipeline for the standard surface; symbolic.hpp adds the fixed-point
// polish of W on top of this (standard_system)
template <class R = double>
MarkovSystem<R> standard_system_raw(int genus) {
    auto [rep, poly] = build_standard_group<R>(genus);
    Net<R> net = build_net(poly, rep);
    WData<R> w = compute_W(net);
    std::vector<JvArc<R>> jv;
    for (int j = 0; j < poly.sides(); ++j) jv.push_back(compute_Jv(net, w, j));
    return assign_branches(net, w, jv);
}

// ---- transition matrix, transitivity ------------------------------------

template <class R>
std::vector<std::vector<uint8_t>> transition_matrix(const MarkovSystem<R>& sys) {
    int k = sys.size();
    std::vector<std::vector<uint8_t>> A(k, std::vector<uint8_t>(k, 0));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            A[i][j] = sys.admissible(i, j) ? 1 : 0;
    return A;
}

struct TransitivityReport {
    bool transitive = false;
    int n_mix = -1;          // all pairs connected within <= n_mix steps
    int primitive_exponent = -1; // smallest m with A^m > 0, -1 if not found
    std::pair<int, int> witness{-1, -1}; // unreachable pair when not transitive
};

inline TransitivityReport check_transitive(const std::vector<std::vector<uint8_t>>& A) {
    int k = int(A.size());
    TransitivityReport rep;
    std::vector<std::vector<int>> succ(k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (A[i][j]) succ[i].push_back(j);

    int diameter = 0;
    for (int s = 0; s < k; ++s) {
        std::vector<int> dist(k, -1);
        std::vector<int> queue{s};
        dist[s] = 0;
        for (size_t qi = 0; qi < queue.size(); ++qi) {
            int u = queue[qi];
            for (int v : succ[u])
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
        }
        for (int t = 0; t < k; ++t) {
            if (dist[t] < 0) {
                rep.transitive = false;
                rep.witness = {s, t};
                rep.n_mix = -1;
                return rep;
            }
            diameter = std::max(diameter, dist[t]);
        }
    }
    rep.transitive = true;
    rep.n_mix = diameter;

    // primitivity: A^m all-positive for some m (bitset powers)
    int words = (k + 63) / 64;
    std::vector<std::vector<uint64_t>> cur(k, std::vector<uint64_t>(words, 0));
    for (int i = 0; i < k; ++i)
        for (int j : succ[i]) cur[i][j / 64] |= (uint64_t(1) << (j % 64));
    auto all_ones = [&](const std::vector<std::vector<uint64_t>>& M) {
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                if (!((M[i][j / 64] >> (j % 64)) & 1)) return false;
        return true;
    };
    auto mul = [&](const std::vector<std::vector<uint64_t>>& X,
                   const std::vector<std::vector<uint64_t>>& Y) {
        std::vector<std::vector<uint64_t>> Z(k, std::vector<uint64_t>(words, 0));
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                if ((X[i][j / 64] >> (j % 64)) & 1)
                    for (int t = 0; t < words; ++t) Z[i][t] |= Y[j][t];
        return Z;
    };
    auto M = cur;
    for (int m = 1; m <= 4 * diameter + 8; ++m) {
        if (all_ones(M)) {
            rep.primitive_exponent = m;
            break;
        }
        M = mul(M, cur);
    }
    return rep;
}

// ---- expansion certificates via min-plus chains --------------------------

// log of the certified minimum of |(f^d)'| over all depth-d branch chains:
// edge weight (i->j) = log min |f'| over the subarc of I_i mapping onto I_j.
template <class R>
struct ChainCertificate {
    std::vector<std::vector<std::pair<int, double>>> edges; // i -> (j, weight)
    // min over admissible chains of length d of the weight sum
    double min_chain(int d) const {
        int k = int(edges.size());
        std::vector<double> f(k, 0.0), g(k);
        for (int step = 0; step < d; ++step) {
            for (int i = 0; i < k; ++i) {
                double best = 1e300;
                for (const auto& [j, wt] : edges[i]) best = std::min(best, wt + f[j]);
                g[i] = best;
            }
            f.swap(g);
        }
        double out = 1e300;
        for (double x : f) out = std::min(out, x);
        return out;
    }
    double max_chain(int d) const {
        int k = int(edges.size());
        std::vector<double> f(k, 0.0), g(k);
        for (int step = 0; step < d; ++step) {
            for (int i = 0; i < k; ++i) {
                double best = -1e300;
                for (const auto& [j, wt] : edges[i]) best = std::max(best, wt + f[j]);
                g[i] = best;
            }
            f.swap(g);
        }
        double out = -1e300;
        for (double x : f) out = std::max(out, x);
        return out;
    }
};

// edges stored in successor-offset order: edges[i][o] pairs with the
// admissible target (img_lo[i] + o) mod k
template <class R>
ChainCertificate<R> chain_certificate(const MarkovSystem<R>& sys) {
    int k = sys.size();
    ChainCertificate<R> c;
    c.edges.resize(k);
    for (int i = 0; i < k; ++i) {
        DiskMobius<R> inv = sys.branch[i].inverse();
        int span = sys.row_sum(i);
        for (int o = 0; o < span; ++o) {
            int j = (sys.img_lo[i] + o) % k;
            // subarc of I_i mapping onto I_j
            Arc<R> ij = sys.interval(j);
            R a = inv.apply_angle(ij.start.angle);
            R b = inv.apply_angle(ij.end().angle);
            Arc<R> sub = Arc<R>::from_endpoints(CirclePoint<R>(a), CirclePoint<R>(b));
            double m = to_double(derivative_range_on_arc(sys.branch[i], sub).first);
            c.edges[i].emplace_back(j, std::log(m));
        }
    }
    return c;
}

// eventual-expansion certificate for systems whose depth-1 minimum dips
// below 1 (deformed surfaces); sets lambda0/depth_used or throws
template <class R>
void certify_expansion(MarkovSystem<R>& sys, int max_depth = 24) {
    double lam1 = 1e300;
    for (int j = 0; j < sys.size(); ++j)
        lam1 = std::min(lam1,
                        to_double(derivative_range_on_arc(sys.branch[j], sys.interval(j)).first));
    if (lam1 > 1.0) {
        sys.lambda0 = lam1;
        sys.depth_used = 1;
        return;
    }
    ChainCertificate<R> cert = chain_certificate(sys);
    for (int d = 2; d <= max_depth; ++d) {
        double m = cert.min_chain(d);
        if (m > 0.0) {
            sys.lambda0 = std::exp(m / d);
            sys.depth_used = d;
            return;
        }
    }
    throw ExpansionFailure("no expansion certificate up to depth " + std::to_string(max_depth));
}

} // namespace teich
