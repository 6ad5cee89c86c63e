#pragma once

// Explicit quasisymmetry bounds: the deviation bound zeta(M) for
// M-quasisymmetric maps of [0,1] fixing the endpoints, the dilatation
// bounds M(K), lambda(K), and a sampler for dyadic-ratio maps used to
// stress the bound.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "teich/errors.hpp"

namespace teich {

// sup_n sum_{k<=n} chi_k with
// chi_k = max((M/(M+1))^k - 2^-k, 2^-k - (1/(M+1))^k); terms are summed
// until they drop below 1e-15. This series value is authoritative.
inline double zeta_series(double M) {
    if (M < 1.0) throw InvalidM("zeta needs M >= 1");
    double a = M / (M + 1.0), b = 1.0 / (M + 1.0);
    double pa = 1.0, pb = 1.0, p2 = 1.0, sum = 0.0;
    for (int k = 1; k <= 200000; ++k) {
        pa *= a;
        pb *= b;
        p2 *= 0.5;
        double chi = std::max(pa - p2, p2 - pb);
        if (chi > 0.0) sum += chi;
        if (std::max({pa, pb, p2}) < 1e-15) break;
    }
    return sum;
}

// Closed form obtained by summing the two chi branches as geometric series:
// max over n of
//   M - 1 + 2^-n - M (M/(M+1))^n   and   1 - 1/M + (1/M)(1/(M+1))^n - 2^-n.
inline double zeta_closed_form(double M) {
    if (M < 1.0) throw InvalidM("zeta needs M >= 1");
    double a = M / (M + 1.0), b = 1.0 / (M + 1.0);
    double best = 0.0;
    double an = 1.0, bn = 1.0, p2 = 1.0;
    for (int n = 1; n <= 4000; ++n) {
        an *= a;
        bn *= b;
        p2 *= 0.5;
        double b1 = M - 1.0 + p2 - M * an;
        double b2 = 1.0 - 1.0 / M + (1.0 / M) * bn - p2;
        best = std::max({best, b1, b2});
    }
    return best;
}

// The second branch as printed in the source display reads (1/M)(1/M)^n
// instead of (1/M)(1/(M+1))^n; near M = 1 that variant blows up, so it is
// kept only to report the discrepancy. The series value is authoritative.
inline double zeta_closed_form_as_printed(double M) {
    if (M < 1.0) throw InvalidM("zeta needs M >= 1");
    double a = M / (M + 1.0);
    double best = 0.0;
    double an = 1.0, mn = 1.0, p2 = 1.0;
    for (int n = 1; n <= 4000; ++n) {
        an *= a;
        mn /= M;
        p2 *= 0.5;
        double b1 = M - 1.0 + p2 - M * an;
        double b2 = 1.0 - 1.0 / M + (1.0 / M) * mn - p2;
        best = std::max({best, b1, b2});
    }
    return best;
}

inline double zeta(double M) { return zeta_series(M); }

// |closed form - series|; beyond 1e-12 callers log a discrepancy
inline double zeta_form_gap(double M) { return std::fabs(zeta_series(M) - zeta_closed_form(M)); }
inline double zeta_printed_form_gap(double M) {
    return std::fabs(zeta_series(M) - zeta_closed_form_as_printed(M));
}

inline double M_of_K(double K) {
    if (K < 1.0) throw InvalidK("M(K) needs K >= 1");
    return std::exp(10.0 * (K - 1.0));
}

inline double lambda_bound(double K) {
    if (K < 1.0) throw InvalidK("lambda(K) needs K >= 1");
    return std::exp(5.0 * (K - 1.0));
}

struct DyadicQsMap {
    int depth = 0;
    std::vector<double> values; // H(i / 2^depth), i = 0..2^depth
    double ratio_bound = 1.0;

    double deviation() const {
        double worst = 0.0;
        size_t n = values.size() - 1;
        for (size_t i = 0; i <= n; ++i)
            worst = std::max(worst, std::fabs(values[i] - double(i) / double(n)));
        return worst;
    }
};

// recursive midpoint construction: each midpoint splits its parent interval
// at a uniform fraction in [1/(M+1), M/(M+1)], so all construction-triple
// ratios lie in [1/M, M]
inline DyadicQsMap sample_dyadic_qs(double M, int depth, uint64_t seed) {
    if (M < 1.0) throw InvalidM("sampler needs M >= 1");
    DyadicQsMap map;
    map.depth = depth;
    map.ratio_bound = M;
    size_t n = size_t(1) << depth;
    map.values.assign(n + 1, 0.0);
    map.values[n] = 1.0;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> frac(1.0 / (M + 1.0), M / (M + 1.0));
    for (int level = 1; level <= depth; ++level) {
        size_t step = n >> level;
        for (size_t left = 0; left < n; left += 2 * step) {
            size_t right = left + 2 * step;
            double t = (M == 1.0) ? 0.5 : frac(rng);
            map.values[left + step] =
                map.values[left] + t * (map.values[right] - map.values[left]);
        }
    }
    return map;
}

inline bool verify_sd_bound(const DyadicQsMap& map) {
    return map.deviation() <= zeta(map.ratio_bound) + 1e-12;
}

} // namespace teich
