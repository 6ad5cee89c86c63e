#pragma once

// Finite words of the subshift, cylinder arcs from inverse-branch
// compositions, the projection onto the circle, and exact transport of
// partition points to deformed surfaces through preperiodic codes.
//
// Words are stored left-to-right (i_0 i_1 ... i_n). The same storage read
// right-to-left is the dual word j_n ... j_1 j_0 with j_m = i_{n-m}; the
// dual shift drops the rightmost dual symbol, i.e. pops the back here.

#include <vector>

#include "teich/markov.hpp"

namespace teich {

using Word = std::vector<int>;

template <class R>
bool is_admissible(const MarkovSystem<R>& sys, const Word& w) {
    if (w.empty()) return false;
    for (int s : w)
        if (s < 0 || s >= sys.size()) return false;
    for (size_t l = 0; l + 1 < w.size(); ++l)
        if (!sys.admissible(w[l], w[l + 1])) return false;
    return true;
}

inline Word shift_word(const Word& w) {
    if (w.empty()) throw EmptyWord("shift of the empty word");
    return Word(w.begin() + 1, w.end());
}

inline Word dual_shift(const Word& w) {
    if (w.empty()) throw EmptyWord("dual shift of the empty word");
    return Word(w.begin(), w.end() - 1);
}

// I_{w_n}: the composed inverse branches applied to the last symbol's
// interval; the length is propagated stepwise so deep cylinders stay accurate
template <class R>
Arc<R> cylinder_interval(const MarkovSystem<R>& sys, const Word& w) {
    if (!is_admissible(sys, w)) throw Inadmissible("cylinder of an inadmissible word");
    ChordPair<R> c = ChordPair<R>::of_arc(sys.interval(w.back()));
    for (size_t l = w.size() - 1; l-- > 0;) c.step(sys.branch[w[l]].inverse());
    return Arc<R>(CirclePoint<R>(arg(c.u)), c.length());
}

// midpoint enclosure for the projection pi: |pi(w) - point| <= radius
template <class R>
std::pair<CirclePoint<R>, R> pi_point(const MarkovSystem<R>& sys, const Word& w) {
    Arc<R> c = cylinder_interval(sys, w);
    return {c.midpoint(), c.length / R(2)};
}

// ---- preperiodic codes of partition points -------------------------------

struct PreperiodicCode {
    int point = -1;               // W index
    std::vector<int> preperiod;   // generator indices, applied first to last
    std::vector<int> period;      // generator indices of the cycle
    double residual = 0.0;        // fixed-point verification distance
    bool branch_tie = false;      // an endpoint had two equally good branches
};

namespace symbolic_detail {

// one-sided images of W point p: (generator index, image W index, residual)
template <class R>
struct EndpointImage {
    int gen;
    int image;
    double residual;
};

template <class R>
std::pair<EndpointImage<R>, EndpointImage<R>> endpoint_images(const MarkovSystem<R>& sys, int p) {
    int k = sys.size();
    int left = (p + k - 1) % k;
    EndpointImage<R> right{sys.branch_gen[p], sys.img_lo[p], 0.0};
    EndpointImage<R> leftim{sys.branch_gen[left], sys.img_hi[left], 0.0};
    R img_r = sys.branch[p].apply_angle(sys.W[p]);
    R img_l = sys.branch[left].apply_angle(sys.W[p]);
    right.residual = std::fabs(to_double(wrap_pi(sys.W[right.image] - img_r)));
    leftim.residual = std::fabs(to_double(wrap_pi(sys.W[leftim.image] - img_l)));
    return {right, leftim};
}

} // namespace symbolic_detail

// iterate the branch map on the finite set W until the orbit repeats
template <class R>
PreperiodicCode code_of_partition_point(const MarkovSystem<R>& sys, int p) {
    int k = sys.size();
    PreperiodicCode code;
    code.point = p;

    std::vector<int> step_of(k, -1);
    std::vector<int> gens;
    std::vector<int> orbit;
    int cur = p;
    while (step_of[cur] < 0) {
        step_of[cur] = int(orbit.size());
        orbit.push_back(cur);
        auto [right, left] = symbolic_detail::endpoint_images(sys, cur);
        if (right.residual > 1e-8 && left.residual > 1e-8)
            throw CodeFailure("orbit of a partition point left W");
        bool tie = std::fabs(right.residual - left.residual) < 1e-12 && right.image != left.image;
        code.branch_tie = code.branch_tie || tie;
        const auto& choice = (right.residual <= left.residual) ? right : left;
        gens.push_back(choice.gen);
        cur = choice.image;
    }
    int cycle_start = step_of[cur];
    code.preperiod.assign(gens.begin(), gens.begin() + cycle_start);
    code.period.assign(gens.begin() + cycle_start, gens.end());

    // verify: the period word's composition is hyperbolic and repels at the
    // cycle entry point
    DiskMobius<R> m_per = DiskMobius<R>::identity();
    for (int g : code.period) m_per = compose(sys.rep.generators[g], m_per);
    if (classify(m_per) != MobiusClass::hyperbolic)
        throw CodeFailure("period word of a partition point is not hyperbolic");
    auto [att, rep] = fixed_points(m_per);
    (void)att;
    code.residual = std::fabs(to_double(wrap_pi(rep.angle - sys.W[orbit[cycle_start]])));
    if (code.residual > 1e-9)
        throw CodeFailure("period fixed point mismatch: " + std::to_string(code.residual));
    return code;
}

template <class R>
std::vector<PreperiodicCode> compute_codes(const MarkovSystem<R>& sys) {
    std::vector<PreperiodicCode> out;
    out.reserve(sys.size());
    for (int p = 0; p < sys.size(); ++p) out.push_back(code_of_partition_point(sys, p));
    return out;
}

// H(w) on the deformed surface: the preperiod is undone with the deformed
// generators after transporting the periodic point through its fixed point
template <class R>
CirclePoint<R> transport_point(const PreperiodicCode& code, const SurfaceGroupRep<R>& target) {
    DiskMobius<R> m_per = DiskMobius<R>::identity();
    for (int g : code.period) m_per = compose(target.generators[g], m_per);
    if (classify(m_per) != MobiusClass::hyperbolic)
        throw NotHyperbolic("transported period word is not hyperbolic");
    auto [att, rep] = fixed_points(m_per);
    (void)att;
    DiskMobius<R> m_pre = DiskMobius<R>::identity();
    for (int g : code.preperiod) m_pre = compose(target.generators[g], m_pre);
    return m_pre.inverse().apply(rep);
}

// ---- deformed Markov system ----------------------------------------------

// Bowen-Series system for a deformed marked surface: same combinatorics,
// partition points transported by preperiodic code, branches replaced by the
// corresponding deformed generators. Certifies eventual expansion.
template <class R>
MarkovSystem<R> conjugated_system(const MarkovSystem<R>& sys0, const Marking<R>& marking,
                                  std::vector<PreperiodicCode>* codes_out = nullptr,
                                  int max_expansion_depth = 24) {
    const int k = sys0.size();
    const auto& target = marking.target;

    std::vector<PreperiodicCode> codes = compute_codes(sys0);
    std::vector<R> moved(k);
    for (int p = 0; p < k; ++p) {
        int mapped = codes[p].point;
        moved[mapped] = transport_point(codes[p], target).angle;
    }

    // cyclic order must be preserved (orientation-preserving boundary map);
    // indices are kept, only the position of the smallest angle moves
    int rot = 0;
    for (int p = 1; p < k; ++p)
        if (to_double(moved[p]) < to_double(moved[rot])) rot = p;
    for (int p = 0; p + 1 < k; ++p) {
        int a = (rot + p) % k, b = (rot + p + 1) % k;
        if (!(to_double(moved[a]) < to_double(moved[b])))
            throw OrderViolation("transported partition points out of cyclic order");
    }

    MarkovSystem<R> sys = sys0;
    sys.rep = target;
    sys.first = rot;
    sys.geodesics.clear(); // geodesic provenance is a standard-system artifact
    for (int j = 0; j < k; ++j) {
        sys.W[j] = moved[j];
        sys.branch_gen[j] = marking.generator_map[sys0.branch_gen[j]];
        sys.branch[j] = target.generators[sys.branch_gen[j]];
    }
    for (size_t v = 0; v < sys0.jv.size(); ++v) {
        JvArc<R>& t = sys.jv[v];
        t.arc = Arc<R>::from_endpoints(CirclePoint<R>(sys.W[t.w_index]),
                                       CirclePoint<R>(sys.W[t.w_prime_index]));
    }

    // semiconjugacy at partition points doubles as the same-combinatorics
    // assertion: the deformed branch must carry W'_j onto W'_{img_lo[j]}
    double residual = 0.0;
    for (int j = 0; j < k; ++j) {
        R a = sys.branch[j].apply_angle(sys.W[j]);
        R b = sys.branch[j].apply_angle(sys.W[(j + 1) % k]);
        residual = std::max(residual, std::fabs(to_double(wrap_pi(sys.W[sys.img_lo[j]] - a))));
        residual = std::max(residual, std::fabs(to_double(wrap_pi(sys.W[sys.img_hi[j]] - b))));
    }
    sys.markov_residual = residual;
    if (residual > 1e-8)
        throw ConstructionFailure("deformed system lost the Markov property: residual " +
                                  std::to_string(residual));

    certify_expansion(sys, max_expansion_depth);
    if (codes_out) *codes_out = std::move(codes);
    return sys;
}

template <class R>
std::pair<MarkovSystem<R>, Marking<R>> twisted_system(const MarkovSystem<R>& sys0,
                                                      const std::string& curve, const R& t) {
    auto [rep2, marking] = twist_deform(sys0.rep, curve, t);
    return {conjugated_system(sys0, marking), marking};
}

// Polish the partition points: each W point is the inverse preperiod image
// of its period word's repelling fixed point, so recomputing it from the
// code removes the error accumulated in the net construction. Brings the
// Markov closure residual from the construction scale (~1e-12) down to
// rounding, which the child partition-of-unity sums inherit.
template <class R>
void refine_partition(MarkovSystem<R>& sys) {
    std::vector<PreperiodicCode> codes = compute_codes(sys);
    std::vector<R> polished(sys.size());
    for (int p = 0; p < sys.size(); ++p)
        polished[p] = transport_point(codes[p], sys.rep).angle;
    // order must be untouched by the polish
    for (int p = 0; p < sys.size(); ++p) {
        int a = (sys.first + p) % sys.size(), b = (sys.first + p + 1) % sys.size();
        if (p + 1 < sys.size() && !(to_double(polished[a]) < to_double(polished[b])))
            throw ConstructionFailure("partition polish disturbed the cyclic order");
    }
    sys.W = std::move(polished);
    for (auto& t : sys.jv)
        t.arc = Arc<R>::from_endpoints(CirclePoint<R>(sys.W[t.w_index]),
                                       CirclePoint<R>(sys.W[t.w_prime_index]));
    double residual = 0.0;
    for (int j = 0; j < sys.size(); ++j) {
        R a = sys.branch[j].apply_angle(sys.W[j]);
        R b = sys.branch[j].apply_angle(sys.W[(j + 1) % sys.size()]);
        residual = std::max(residual, std::fabs(to_double(wrap_pi(sys.W[sys.img_lo[j]] - a))));
        residual = std::max(residual, std::fabs(to_double(wrap_pi(sys.W[sys.img_hi[j]] - b))));
    }
    sys.markov_residual = residual;
    double lam = 1e300;
    for (int j = 0; j < sys.size(); ++j)
        lam = std::min(lam, to_double(derivative_range_on_arc(sys.branch[j], sys.interval(j)).first));
    if (sys.depth_used == 1) sys.lambda0 = lam;
}

// full pipeline for the standard surface, with polished partition points
template <class R = double>
MarkovSystem<R> standard_system(int genus) {
    MarkovSystem<R> sys = standard_system_raw<R>(genus);
    refine_partition(sys);
    return sys;
}

} // namespace teich
