#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN

#include <cmath>
#include <cstdio>

#include "doctest.h"
#include "teich/qs.hpp"

using namespace teich;

TEST_CASE("zeta: base cases, monotonicity, closed form") {
    CHECK(zeta(1.0) == 0.0);
    double prev = 0.0;
    for (double M : {1.1, 1.5, 2.0, 3.0}) {
        double z = zeta(M);
        CHECK(z > prev);
        prev = z;
    }
    // series and the displayed closed form agree across a grid on [1, 4]
    double worst = 0.0;
    for (int i = 0; i <= 100; ++i) {
        double M = 1.0 + 3.0 * i / 100.0;
        worst = std::max(worst, zeta_form_gap(M));
    }
    std::printf("[qs] worst |series - closed form| on [1,4]: %.3e\n", worst);
    CHECK(worst <= 1e-12);

    // quantitative continuity: zeta(1 + 2^-j) strictly decreasing to 0
    double last = 1e300;
    for (int j = 1; j <= 10; ++j) {
        double z = zeta(1.0 + std::ldexp(1.0, -j));
        CHECK(z < last);
        last = z;
    }
    CHECK(last < 2e-3);

    CHECK_THROWS_AS((void)zeta(0.9), InvalidM);
}

TEST_CASE("M(K) and lambda(K)") {
    CHECK(M_of_K(1.0) == 1.0);
    CHECK(lambda_bound(1.0) == 1.0);
    CHECK(M_of_K(1.2) == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
    CHECK(lambda_bound(1.2) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
    for (double K : {1.0, 1.1, 1.3, 2.0})
        CHECK(M_of_K(K) == doctest::Approx(lambda_bound(K) * lambda_bound(K)).epsilon(1e-13));
    CHECK_THROWS_AS((void)M_of_K(0.5), InvalidK);
}

TEST_CASE("dyadic sampler: identity at M=1, bound never violated") {
    auto id = sample_dyadic_qs(1.0, 10, 5);
    CHECK(id.deviation() == 0.0);

    double max_ratio = 0.0;
    for (int s = 0; s < 10000; ++s) {
        auto m = sample_dyadic_qs(1.5, 12, 1000 + s);
        CHECK(verify_sd_bound(m));
        max_ratio = std::max(max_ratio, m.deviation() / zeta(1.5));
    }
    std::printf("[qs] max observed deviation / zeta at M=1.5: %.4f\n", max_ratio);
    CHECK(max_ratio < 1.0);

    // adversarial: push every midpoint to the extreme admissible fraction;
    // the deviation approaches zeta from below
    DyadicQsMap adv;
    adv.depth = 14;
    adv.ratio_bound = 1.5;
    size_t n = size_t(1) << adv.depth;
    adv.values.assign(n + 1, 0.0);
    adv.values[n] = 1.0;
    for (int level = 1; level <= adv.depth; ++level) {
        size_t step = n >> level;
        for (size_t left = 0; left < n; left += 2 * step) {
            size_t right = left + 2 * step;
            adv.values[left + step] =
                adv.values[left] + (1.5 / 2.5) * (adv.values[right] - adv.values[left]);
        }
    }
    CHECK(verify_sd_bound(adv));
    std::printf("[qs] adversarial deviation / zeta: %.4f\n", adv.deviation() / zeta(1.5));
    CHECK(adv.deviation() / zeta(1.5) > 0.2);

    // midpoint ratios stay inside [1/M, M]
    auto m = sample_dyadic_qs(2.0, 8, 99);
    size_t nn = size_t(1) << m.depth;
    for (size_t step = nn / 2; step >= 1; step /= 2) {
        for (size_t left = 0; left + 2 * step <= nn; left += 2 * step) {
            double r = (m.values[left + step] - m.values[left]) /
                       (m.values[left + 2 * step] - m.values[left + step]);
            CHECK(r >= 1.0 / m.ratio_bound - 1e-12);
            CHECK(r <= m.ratio_bound + 1e-12);
        }
        if (step == 1) break;
    }
}
