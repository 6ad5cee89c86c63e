#pragma once

#include <random>

#include "doctest.h"
#include "teich/mobius.hpp"

namespace th {

using teich::Arc;
using teich::CirclePoint;
using teich::Cplx;
using teich::DiskMobius;
using teich::Geodesic;

inline std::mt19937_64 rng(uint64_t seed = 20240811ull) { return std::mt19937_64(seed); }

inline double urand(std::mt19937_64& g, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

// random hyperbolic element: conjugated translation, optionally spun
template <class R = double>
DiskMobius<R> random_hyperbolic(std::mt19937_64& g, double max_len = 3.0) {
    R p = R(urand(g, 0.0, 6.283));
    R q = R(teich::normalize_angle(p + R(urand(g, 0.3, 5.9))));
    Geodesic<R> geo((CirclePoint<R>(p)), (CirclePoint<R>(q)));
    R t = R(urand(g, 0.2, max_len));
    auto m = teich::translation_along(geo, t);
    return m;
}

} // namespace th
