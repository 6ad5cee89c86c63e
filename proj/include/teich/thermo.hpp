#pragma once

// Depth-n transfer machinery on the dual subshift: pressure as the Perron
// value of the weighted word-to-word operator, Gibbs measures from left and
// right eigenvectors, variance by second differences and by Birkhoff sums,
// and the pressure metric along deformation paths.
//
// States are words of n symbols; w -> w' when w' prepends one older symbol
// and drops the newest. The operator weight on a transition is exp(phi(w')).
// Its action factorizes through parent/suffix pointers, so one iteration is
// two linear passes and no matrix is stored.

#include <random>

#include "teich/scaling.hpp"
#include "teich/wordspace.hpp"

namespace teich {

// hyperbolic area of a closed genus-g surface (Gauss-Bonnet)
inline double hyperbolic_area(int genus) {
    return 4.0 * 3.14159265358979323846 * (genus - 1);
}

struct Potential {
    int depth = 0; // number of symbols of the domain words
    std::vector<double> values;
};

template <class R>
Potential potential_from_scaling(const WordSpace<R>& ws, int depth) {
    if (depth < 2 || depth > ws.levels)
        throw DepthMismatch("potential depth outside the built word space");
    Potential phi;
    phi.depth = depth;
    size_t n = ws.count(depth);
    phi.values.resize(n);
    for (size_t i = 0; i < n; ++i)
        phi.values[i] = std::log(ws.len[depth][i] / ws.len[depth - 1][ws.parent[depth][i]]);
    return phi;
}

struct SpectralData {
    double pressure = 0.0;
    std::vector<double> right, left; // Perron vectors, max-normalized
    int iterations = 0;
    double bracket = 0.0; // Collatz-Wielandt relative enclosure width
};

template <class R>
SpectralData transfer_spectral(const WordSpace<R>& ws, const Potential& phi, double tol = 1e-12,
                               int max_iter = 20000) {
    const int n = phi.depth;
    if (n < 2 || n > ws.levels) throw DepthMismatch("potential depth outside the word space");
    const size_t N = ws.count(n);
    const size_t Np = ws.count(n - 1);
    if (phi.values.size() != N) throw DepthMismatch("potential size mismatch");

    std::vector<double> weight(N);
    for (size_t i = 0; i < N; ++i) weight[i] = std::exp(phi.values[i]);

    const auto& sfxv = ws.sfx[n];
    const auto& par = ws.parent[n];

    SpectralData out;
    std::vector<double> x(N, 1.0), z(Np), xnew(N);
    double lambda = 1.0;
    for (int it = 1; it <= max_iter; ++it) {
        std::fill(z.begin(), z.end(), 0.0);
        for (size_t i = 0; i < N; ++i) z[sfxv[i]] += weight[i] * x[i];
        double lo = 1e300, hi = 0.0, mx = 0.0;
        for (size_t i = 0; i < N; ++i) {
            double v = z[par[i]];
            xnew[i] = v;
            double ratio = v / x[i];
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
            mx = std::max(mx, v);
        }
        for (size_t i = 0; i < N; ++i) x[i] = xnew[i] / mx;
        lambda = 0.5 * (lo + hi);
        out.iterations = it;
        out.bracket = (hi - lo) / lambda;
        if (out.bracket < tol) break;
    }
    out.pressure = std::log(lambda);
    out.right = std::move(x);

    // left vector: same spectral value through the transposed factorization
    std::vector<double> l(N, 1.0), y(Np), lnew(N);
    const auto& cs = ws.child_start[n - 1];
    for (int it = 1; it <= out.iterations + 50; ++it) {
        for (size_t q = 0; q < Np; ++q) {
            double s = 0.0;
            for (uint32_t c = cs[q]; c < cs[q + 1]; ++c) s += l[c];
            y[q] = s;
        }
        double lo = 1e300, hi = 0.0, mx = 0.0;
        for (size_t i = 0; i < N; ++i) {
            double v = weight[i] * y[sfxv[i]];
            lnew[i] = v;
            double ratio = v / l[i];
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
            mx = std::max(mx, v);
        }
        for (size_t i = 0; i < N; ++i) l[i] = lnew[i] / mx;
        if ((hi - lo) / (0.5 * (lo + hi)) < tol) break;
    }
    out.left = std::move(l);
    return out;
}

template <class R>
double pressure(const WordSpace<R>& ws, const Potential& phi, double tol = 1e-12) {
    return transfer_spectral(ws, phi, tol).pressure;
}

template <class R>
double check_zero_pressure(const WordSpace<R>& ws, int depth) {
    return std::fabs(pressure(ws, potential_from_scaling(ws, depth)));
}

struct GibbsApprox {
    int depth = 0;
    double pressure = 0.0;
    std::vector<double> left, right;
    std::vector<double> measure; // word masses, sum 1
};

template <class R>
GibbsApprox gibbs(const WordSpace<R>& ws, const Potential& phi, double tol = 1e-12) {
    SpectralData sd = transfer_spectral(ws, phi, tol);
    GibbsApprox g;
    g.depth = phi.depth;
    g.pressure = sd.pressure;
    g.measure.resize(sd.right.size());
    double total = 0.0;
    for (size_t i = 0; i < g.measure.size(); ++i) {
        g.measure[i] = sd.left[i] * sd.right[i];
        if (!(g.measure[i] > 0.0))
            throw NotIrreducible("Perron data not strictly positive");
        total += g.measure[i];
    }
    for (double& v : g.measure) v /= total;
    g.left = std::move(sd.left);
    g.right = std::move(sd.right);
    return g;
}

inline double mean_potential(const Potential& psi, const GibbsApprox& g) {
    if (psi.depth != g.depth || psi.values.size() != g.measure.size())
        throw DepthMismatch("potential and Gibbs data at different depths");
    double s = 0.0;
    for (size_t i = 0; i < g.measure.size(); ++i) s += psi.values[i] * g.measure[i];
    return s;
}

// method (a): centered second difference of the pressure
template <class R>
double variance_quadratic(const WordSpace<R>& ws, const Potential& phi, const Potential& psi,
                          const GibbsApprox& g, double h = 1e-3) {
    if (phi.depth != psi.depth) throw DepthMismatch("phi and psi depths differ");
    double mu = mean_potential(psi, g);
    Potential plus = phi, minus = phi;
    for (size_t i = 0; i < phi.values.size(); ++i) {
        double centered = psi.values[i] - mu;
        plus.values[i] += h * centered;
        minus.values[i] -= h * centered;
    }
    double pp = pressure(ws, plus);
    double pm = pressure(ws, minus);
    return (pp - 2.0 * g.pressure + pm) / (h * h);
}

// method (b): (1/n) E[(S_n psi~)^2] over segments sampled from the Gibbs chain
template <class R>
double variance_birkhoff(const WordSpace<R>& ws, const Potential& phi, const Potential& psi,
                         const GibbsApprox& g, long segments = 100000, int seg_len = 64,
                         uint64_t seed = 1234) {
    const int n = phi.depth;
    const size_t N = ws.count(n);
    double mu = mean_potential(psi, g);

    // successors of u live in the reverse-suffix bucket of parent(u)
    std::vector<uint32_t> bucket_start(ws.count(n - 1) + 1, 0), items(N);
    for (size_t i = 0; i < N; ++i) bucket_start[ws.sfx[n][i] + 1]++;
    for (size_t q = 1; q < bucket_start.size(); ++q) bucket_start[q] += bucket_start[q - 1];
    {
        std::vector<uint32_t> fill = bucket_start;
        for (size_t i = 0; i < N; ++i) items[fill[ws.sfx[n][i]]++] = uint32_t(i);
    }

    std::vector<double> weight(N);
    for (size_t i = 0; i < N; ++i) weight[i] = std::exp(phi.values[i]) * g.right[i];

    // stationary start states by inverse CDF
    std::vector<double> cdf(N);
    double acc = 0.0;
    for (size_t i = 0; i < N; ++i) {
        acc += g.measure[i];
        cdf[i] = acc;
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double sum2 = 0.0;
    std::vector<double> w_local;
    for (long s = 0; s < segments; ++s) {
        double u0 = unif(rng) * acc;
        size_t state = std::lower_bound(cdf.begin(), cdf.end(), u0) - cdf.begin();
        if (state >= N) state = N - 1;
        double birkhoff = 0.0;
        for (int t = 0; t < seg_len; ++t) {
            birkhoff += psi.values[state] - mu;
            uint32_t q = ws.parent[n][state];
            uint32_t b0 = bucket_start[q], b1 = bucket_start[q + 1];
            double total = 0.0;
            w_local.clear();
            for (uint32_t b = b0; b < b1; ++b) {
                total += weight[items[b]];
                w_local.push_back(total);
            }
            double pick = unif(rng) * total;
            uint32_t sel = b0;
            while (sel + 1 < b1 && w_local[sel - b0] < pick) ++sel;
            state = items[sel];
        }
        sum2 += birkhoff * birkhoff;
    }
    return sum2 / double(segments) / double(seg_len);
}

// coboundary u o sigma* - u for a function u of depth-(n-1) words
template <class R>
Potential coboundary_potential(const WordSpace<R>& ws, int depth,
                               const std::vector<double>& u) {
    if (u.size() != ws.count(depth - 1)) throw DepthMismatch("u must live on depth-1 words");
    Potential psi;
    psi.depth = depth;
    psi.values.resize(ws.count(depth));
    for (size_t i = 0; i < psi.values.size(); ++i)
        psi.values[i] = u[ws.parent[depth][i]] - u[ws.sfx[depth][i]];
    return psi;
}

struct PressureMetricResult {
    double value = 0.0;
    double variance = 0.0;
    double variance_birkhoff = 0.0;
    double denominator = 0.0;   // -int log S_0 dm*_0
    double mean_residual = 0.0; // |int psi dm*_0|
    double psi_norm = 0.0;      // sup |psi|
};

// pressure metric of the path tangent at t = 0 from systems at -delta, 0,
// +delta sharing combinatorics
template <class R>
PressureMetricResult pressure_metric(const WordSpace<R>& ws0, const WordSpace<R>& ws_plus,
                                     const WordSpace<R>& ws_minus, double delta, int depth,
                                     bool with_birkhoff = false, uint64_t seed = 1234) {
    if (ws0.count(depth) != ws_plus.count(depth) || ws0.count(depth) != ws_minus.count(depth))
        throw CombinatoricsMismatch("word spaces differ across the path");

    Potential phi0 = potential_from_scaling(ws0, depth);
    Potential phip = potential_from_scaling(ws_plus, depth);
    Potential phim = potential_from_scaling(ws_minus, depth);

    Potential psi;
    psi.depth = depth;
    psi.values.resize(phi0.values.size());
    PressureMetricResult out;
    for (size_t i = 0; i < psi.values.size(); ++i) {
        psi.values[i] = (phip.values[i] - phim.values[i]) / (2.0 * delta);
        out.psi_norm = std::max(out.psi_norm, std::fabs(psi.values[i]));
    }

    GibbsApprox g = gibbs(ws0, phi0);
    out.mean_residual = std::fabs(mean_potential(psi, g));
    out.denominator = -mean_potential(phi0, g);
    out.variance = variance_quadratic(ws0, phi0, psi, g);
    if (with_birkhoff)
        out.variance_birkhoff = variance_birkhoff(ws0, phi0, psi, g, 100000, 64, seed);
    out.value = out.variance / out.denominator;
    return out;
}

} // namespace teich
