#pragma once

// Pre-scaling and scaling functions on the dual space, with certified error
// bounds. The Cauchy constant comes from the distortion chain
//   |S(w*_m) - S(w*_n)| <= exp(L * sum_{k>=n} nu_k) - 1,
// where L bounds |d log|f'| / dtheta| on branch domains and nu_k is the
// largest depth-k cylinder. nu_k is measured exactly at small depths and
// bounded at all depths by min-plus chain certificates, so the published
// (C, mu) pair is valid at every depth, not just the measured ones.

#include <cmath>
#include <random>

#include "teich/symbolic.hpp"

namespace teich {

// stable cylinder length via stepwise chord propagation (innermost branch
// applied first)
template <class R>
R propagated_cylinder_length(const MarkovSystem<R>& sys, const Word& w) {
    ChordPair<R> c = ChordPair<R>::of_arc(sys.interval(w.back()));
    for (size_t l = w.size() - 1; l-- > 0;) c.step(sys.branch[w[l]].inverse());
    return c.length();
}

// |I_w| / |I_parent(w)| for a word of >= 2 symbols; both lengths go through
// propagated chords so the ratio holds full relative precision at any depth
template <class R>
R prescaling(const MarkovSystem<R>& sys, const Word& w) {
    size_t n = w.size();
    if (n < 2) throw Inadmissible("prescaling needs at least two symbols");
    if (!is_admissible(sys, w)) throw Inadmissible("prescaling of an inadmissible word");
    ChordPair<R> parent = ChordPair<R>::of_arc(sys.interval(w[n - 2]));
    ChordPair<R> child = ChordPair<R>::of_arc(sys.interval(w[n - 1]));
    child.step(sys.branch[w[n - 2]].inverse());
    for (size_t l = n - 2; l-- > 0;) {
        const DiskMobius<R> inv = sys.branch[w[l]].inverse();
        parent.step(inv);
        child.step(inv);
    }
    return child.length() / parent.length();
}

// ---- cylinder length envelope --------------------------------------------

// exact nu_d = max depth-d cylinder length for d = 1..max_depth (eta_d has
// words of d+1 symbols). Branch and bound: descendants are capped both by
// nesting (child <= parent) and by the accumulated chain-weight certificate,
// so only near-maximal chains get expanded.
template <class R>
std::vector<double> measure_max_cylinders(const MarkovSystem<R>& sys, int max_depth) {
    int k = sys.size();
    std::vector<double> best(max_depth + 1, 0.0);

    ChainCertificate<R> cert = chain_certificate(sys);
    std::vector<double> mc(max_depth + 1, 0.0);
    for (int d = 1; d <= max_depth; ++d) mc[d] = cert.min_chain(d);
    double nu0 = 0.0;
    for (int j = 0; j < k; ++j) nu0 = std::max(nu0, to_double(sys.interval(j).length));

    struct Frame {
        int symbol;
        DiskMobius<R> m; // composed inverse branches of all earlier symbols
        double len;
        double cum; // accumulated chain weight: len <= nu0 * exp(-cum)
        int depth;
    };
    std::vector<Frame> stack;
    std::vector<int> order(k);
    for (int i = 0; i < k; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return to_double(sys.interval(a).length) < to_double(sys.interval(b).length);
    });
    for (int i : order)
        stack.push_back({i, DiskMobius<R>::identity(), to_double(sys.interval(i).length), 0.0, 0});

    std::vector<std::pair<int, double>> kids;
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        if (f.depth > 0 && f.len > best[f.depth]) best[f.depth] = f.len;
        if (f.depth == max_depth) continue;
        bool useful = f.depth == 0;
        for (int t = f.depth + 1; t <= max_depth && !useful; ++t) {
            double cap = std::min(f.len, nu0 * std::exp(-(f.cum + mc[t - f.depth])));
            if (cap > best[t]) useful = true;
        }
        if (!useful) continue;
        DiskMobius<R> m2 = compose(f.m, sys.branch[f.symbol].inverse());
        int span = sys.row_sum(f.symbol);
        kids.clear();
        for (int o = 0; o < span; ++o) {
            int j = cert.edges[f.symbol][o].first;
            kids.emplace_back(o, to_double(image_arc_length(m2, sys.interval(j))));
        }
        std::sort(kids.begin(), kids.end(),
                  [](const auto& a, const auto& b) { return a.second < b.second; });
        for (const auto& [o, len] : kids)
            stack.push_back({cert.edges[f.symbol][o].first, m2, len,
                             f.cum + cert.edges[f.symbol][o].second, f.depth + 1});
    }
    best.erase(best.begin()); // drop the depth-0 slot
    return best;
}

// ---- constants -------------------------------------------------------------

struct DistortionConstants {
    double m = 0.0;       // min branch derivative over the partition
    double M_bound = 0.0; // max |d log|f'| / dtheta| over branch domains
    double A_len = 0.0;   // nu_n <= A_len * mu^n for all n (certified)
    double mu = 0.0;
    double B = 0.0;     // exp(A_len * M_bound / (m (1 - mu)))
    double C_lip = 0.0; // |S(w*) - S(w*_n)| <= C_lip * mu^n for n >= 2

    // diagnostics
    double mu_fit = 0.0, A_fit = 0.0; // least squares on measured depths
    std::vector<double> nu_measured;  // exact max cylinder lengths
    int chain_depth = 0;              // DP horizon behind mu

    double error_bound(int depth_n) const { return C_lip * std::pow(mu, depth_n); }
};

template <class R>
DistortionConstants distortion_constants(const MarkovSystem<R>& sys, int measured_depth = 10,
                                         int chain_depth = 96) {
    if (sys.lambda0 <= 0.0) throw ExpansionFailure("system lacks an expansion certificate");
    DistortionConstants dc;
    int k = sys.size();

    double m = 1e300, L = 0.0, nu0 = 0.0;
    for (int j = 0; j < k; ++j) {
        Arc<R> ij = sys.interval(j);
        m = std::min(m, to_double(derivative_range_on_arc(sys.branch[j], ij).first));
        L = std::max(L, to_double(log_derivative_bound_on_arc(sys.branch[j], ij)));
        nu0 = std::max(nu0, to_double(ij.length));
    }
    dc.m = m;
    dc.M_bound = L;

    // min-plus chain sums m_d are superadditive, so exp(-m_D/D) bounds the
    // per-step decay of max cylinder lengths from above at every depth
    ChainCertificate<R> cert = chain_certificate(sys);
    std::vector<double> mchain(chain_depth + 1, 0.0);
    for (int d = 1; d <= chain_depth; ++d) mchain[d] = cert.min_chain(d);
    dc.chain_depth = chain_depth;
    double mu_cert = std::exp(-mchain[chain_depth] / chain_depth);
    if (mu_cert >= 1.0) throw ExpansionFailure("chain certificate gives no contraction");

    dc.nu_measured = measure_max_cylinders(sys, measured_depth);

    // certified per-depth length bounds: exact where measured, chain bound to
    // the DP horizon, block recursion m_{q D + r} >= q m_D + m_r beyond
    int horizon = 2 * chain_depth;
    std::vector<double> nus(horizon + 1);
    nus[0] = nu0;
    for (int d = 1; d <= horizon; ++d) {
        if (d <= measured_depth)
            nus[d] = dc.nu_measured[d - 1];
        else if (d <= chain_depth)
            nus[d] = nu0 * std::exp(-mchain[d]);
        else
            nus[d] = nu0 * std::exp(-mchain[chain_depth] - mchain[d - chain_depth]);
    }

    // least-squares fit on the measured depths (diagnostic only)
    {
        int n = measured_depth;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (int d = 1; d <= n; ++d) {
            double x = d, y = std::log(dc.nu_measured[d - 1]);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
        }
        double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        double icept = (sy - slope * sx) / n;
        dc.mu_fit = std::exp(slope);
        dc.A_fit = std::exp(icept);
    }

    // per-depth Cauchy bounds from tail sums: exp(L * T_n) - 1
    std::vector<double> bound(horizon + 1, 0.0);
    {
        double block = std::exp(-mchain[chain_depth]); // per-chain_depth block decay
        double tail = 0.0;
        for (int r = 1; r <= chain_depth; ++r) tail += nus[chain_depth + r];
        tail *= block / (1.0 - block); // blocks beyond the extended horizon
        double T = tail;
        for (int d = horizon; d >= 2; --d) {
            T += nus[d];
            bound[d] = std::expm1(dc.M_bound * T);
        }
    }

    // Envelope C mu^n >= bound_n for all n. Any mu in [mu_cert, 1) is valid
    // with its own C; pick the one with the least total slack over the
    // working depths 2..12.
    auto envelope_C = [&](double mu) {
        double C = 0.0;
        for (int d = 2; d <= horizon; ++d) C = std::max(C, bound[d] * std::pow(mu, -d));
        return C;
    };
    double best_mu = mu_cert, best_score = 1e300, best_C = envelope_C(mu_cert);
    for (int i = 0; i <= 60; ++i) {
        double mu = mu_cert + (0.90 - mu_cert) * i / 60.0;
        double C = envelope_C(mu);
        double score = 0.0;
        for (int d = 2; d <= 12; ++d) score += std::log(C * std::pow(mu, d) / bound[d]);
        if (score < best_score) { best_score = score; best_mu = mu; best_C = C; }
    }
    dc.mu = best_mu;
    dc.C_lip = best_C;

    double A = 0.0;
    for (int r = 0; r <= horizon; ++r) A = std::max(A, nus[r] * std::pow(dc.mu, -r));
    dc.A_len = A;
    dc.B = std::exp(dc.A_len * dc.M_bound / (dc.m * (1.0 - dc.mu)));
    return dc;
}

// ---- certified samples -----------------------------------------------------

struct ScalingSample {
    Word dual_word;     // depth n <=> n+1 symbols (stored left to right)
    double value = 0.0; // in (0, 1)
    double error_bound = 0.0;

    int depth() const { return int(dual_word.size()) - 1; }
};

// estimate from the rightmost depth+1 symbols of the tail; the bound covers
// every infinite extension of those symbols
template <class R>
ScalingSample scaling_estimate(const MarkovSystem<R>& sys, const DistortionConstants& dc,
                               const Word& tail, int depth) {
    if (depth < 2) throw Inadmissible("scaling estimates need depth >= 2");
    if (int(tail.size()) < depth + 1)
        throw Inadmissible("tail shorter than the requested depth");
    ScalingSample s;
    s.dual_word.assign(tail.end() - (depth + 1), tail.end());
    s.value = to_double(prescaling(sys, s.dual_word));
    s.error_bound = dc.error_bound(depth);
    return s;
}

// ---- maximum-metric estimate ----------------------------------------------

struct DMaxOptions {
    int full_enumeration_cap = 1000000; // switch to sampling above this count
    int min_samples = 10000;
    int strata_symbols = 3; // rightmost symbols enumerated exhaustively
    uint64_t seed = 7;
};

struct DMaxResult {
    double lower = 0.0, upper = 0.0;
    double max_measured = 0.0;
    Word argmax;
    bool sampled = false;
    long long words_examined = 0;
    double err_x = 0.0, err_y = 0.0;
    int depth = 0;
};

template <class R>
void require_same_combinatorics(const MarkovSystem<R>& x, const MarkovSystem<R>& y) {
    if (x.size() != y.size() || x.img_lo != y.img_lo || x.img_hi != y.img_hi)
        throw CombinatoricsMismatch("systems do not share a transition structure");
}

template <class R>
DMaxResult d_max_estimate(const MarkovSystem<R>& sys_x, const MarkovSystem<R>& sys_y,
                          const DistortionConstants& dcx, const DistortionConstants& dcy,
                          int depth, const DMaxOptions& opt = {}) {
    require_same_combinatorics(sys_x, sys_y);
    if (depth < 2) throw Inadmissible("d_max estimates need depth >= 2");
    const int k = sys_x.size();
    const int nsym = depth + 1;

    DMaxResult res;
    res.depth = depth;
    res.err_x = dcx.error_bound(depth);
    res.err_y = dcy.error_bound(depth);

    // count words of nsym symbols (saturating)
    double count = 0;
    {
        std::vector<double> cnt(k, 1.0);
        for (int l = 1; l < nsym; ++l) {
            std::vector<double> nxt(k, 0.0);
            for (int i = 0; i < k; ++i) {
                int span = sys_x.row_sum(i);
                for (int o = 0; o < span; ++o) nxt[(sys_x.img_lo[i] + o) % k] += cnt[i];
            }
            cnt.swap(nxt);
        }
        for (double c : cnt) count += c;
    }

    auto consider = [&](const Word& w, double sx, double sy) {
        double d = std::fabs(sx - sy);
        ++res.words_examined;
        if (d > res.max_measured) {
            res.max_measured = d;
            res.argmax = w;
        }
    };

    if (count <= double(opt.full_enumeration_cap)) {
        // exhaustive sweep over all admissible words of depth+1 symbols
        struct Node {
            Word w;
            double px, py; // cylinder lengths of the node's own word
        };
        for (int i0 = 0; i0 < k; ++i0) {
            std::vector<Node> stack;
            stack.push_back({Word{i0}, to_double(sys_x.interval(i0).length),
                             to_double(sys_y.interval(i0).length)});
            while (!stack.empty()) {
                Node nd = std::move(stack.back());
                stack.pop_back();
                int tip = nd.w.back();
                int span = sys_x.row_sum(tip);
                for (int o = 0; o < span; ++o) {
                    int j = (sys_x.img_lo[tip] + o) % k;
                    Word w2 = nd.w;
                    w2.push_back(j);
                    double lx = to_double(propagated_cylinder_length(sys_x, w2));
                    double ly = to_double(propagated_cylinder_length(sys_y, w2));
                    if (int(w2.size()) == nsym) {
                        consider(w2, lx / nd.px, ly / nd.py);
                    } else {
                        stack.push_back({std::move(w2), lx, ly});
                    }
                }
            }
        }
    } else {
        // deterministic stratified sample: every rightmost pattern of
        // strata_symbols symbols, extended into the past at random
        res.sampled = true;
        std::vector<std::vector<int>> preds(k);
        for (int i = 0; i < k; ++i) {
            int span = sys_x.row_sum(i);
            for (int o = 0; o < span; ++o) preds[(sys_x.img_lo[i] + o) % k].push_back(i);
        }
        // enumerate strata: admissible words of strata_symbols symbols
        std::vector<Word> strata;
        {
            std::vector<Word> cur;
            for (int i = 0; i < k; ++i) cur.push_back(Word{i});
            for (int l = 1; l < opt.strata_symbols; ++l) {
                std::vector<Word> nxt;
                for (const auto& w : cur) {
                    int span = sys_x.row_sum(w.back());
                    for (int o = 0; o < span; ++o) {
                        Word w2 = w;
                        w2.push_back((sys_x.img_lo[w.back()] + o) % k);
                        nxt.push_back(std::move(w2));
                    }
                }
                cur.swap(nxt);
            }
            strata.swap(cur);
        }
        int per = std::max(1, int((opt.min_samples + strata.size() - 1) / strata.size()));
        for (size_t si = 0; si < strata.size(); ++si) {
            std::mt19937_64 rng(opt.seed * 0x9e3779b97f4a7c15ull + si);
            for (int rep = 0; rep < per; ++rep) {
                Word w = strata[si];
                while (int(w.size()) < nsym) {
                    const auto& ps = preds[w.front()];
                    w.insert(w.begin(), ps[rng() % ps.size()]);
                }
                consider(w, to_double(prescaling(sys_x, w)), to_double(prescaling(sys_y, w)));
            }
        }
    }

    res.upper = res.max_measured + res.err_x + res.err_y;
    res.lower = std::max(0.0, res.max_measured - res.err_x - res.err_y);
    return res;
}

// ---- periodic cycles -------------------------------------------------------

// left word of `length` symbols ending at the dual position shifted k times
// into the past of the periodic point with block C
inline Word periodic_tail(const Word& block, int rotation, int length) {
    int p = int(block.size());
    Word out(length);
    for (int l = 0; l < length; ++l)
        out[l] = block[((l - length - rotation) % p + p) % p];
    return out;
}

template <class R>
bool cyclically_admissible(const MarkovSystem<R>& sys, const Word& block) {
    if (block.empty()) return false;
    for (size_t l = 0; l < block.size(); ++l)
        if (!sys.admissible(block[l], block[(l + 1) % block.size()])) return false;
    return true;
}

struct CycleCheck {
    double residual = 0.0; // |sum log S_est + log |(f^p)'(x)||
    double bound = 0.0;    // propagated certified bound
    double log_multiplier = 0.0;
    int period = 0;
};

template <class R>
CycleCheck cycle_sum_check(const MarkovSystem<R>& sys, const DistortionConstants& dc,
                           const Word& block, int depth) {
    if (!cyclically_admissible(sys, block))
        throw Inadmissible("cycle block is not cyclically admissible");
    const int p = int(block.size());

    // periodic point of f: repelling fixed point of the branch composition
    DiskMobius<R> m = DiskMobius<R>::identity();
    for (int l = 0; l < p; ++l) m = compose(sys.branch[block[l]], m);
    if (classify(m) != MobiusClass::hyperbolic)
        throw NotHyperbolic("cycle composition is not hyperbolic");
    auto [att, repl] = fixed_points(m);
    (void)att;
    // itinerary check: the fixed point must realize the block
    R x = repl.angle;
    for (int l = 0; l < p; ++l) {
        if (!sys.interval(block[l]).contains(x, 1e-7))
            throw Inadmissible("cycle fixed point does not realize its block");
        x = sys.branch[block[l]].apply_angle(x);
    }

    CycleCheck out;
    out.period = p;
    out.log_multiplier = std::log(to_double(m.circle_derivative(repl)));

    double sum = 0.0, bound = 0.0;
    for (int rot = 0; rot < p; ++rot) {
        Word tail = periodic_tail(block, rot, depth + 1);
        double s = to_double(prescaling(sys, tail));
        double eb = dc.error_bound(depth);
        sum += std::log(s);
        bound += (eb < s) ? -std::log1p(-eb / s) : 1e300;
    }
    out.residual = std::fabs(sum + out.log_multiplier);
    out.bound = bound;
    return out;
}

// all cyclically admissible blocks of period <= max_period (all rotations)
template <class R>
std::vector<Word> periodic_blocks(const MarkovSystem<R>& sys, int max_period) {
    std::vector<Word> out;
    int k = sys.size();
    std::vector<Word> cur;
    for (int i = 0; i < k; ++i) cur.push_back(Word{i});
    for (int p = 1; p <= max_period; ++p) {
        for (const auto& w : cur)
            if (cyclically_admissible(sys, w)) out.push_back(w);
        if (p == max_period) break;
        std::vector<Word> nxt;
        for (const auto& w : cur) {
            int span = sys.row_sum(w.back());
            for (int o = 0; o < span; ++o) {
                Word w2 = w;
                w2.push_back((sys.img_lo[w.back()] + o) % k);
                nxt.push_back(std::move(w2));
            }
        }
        cur.swap(nxt);
    }
    return out;
}

} // namespace teich
