#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN

#include <cmath>
#include <cstdio>

#include "helpers.hpp"
#include "teich/symbolic.hpp"

using namespace teich;

TEST_CASE("g=2 net: vertex cycles, tiles, V") {
    auto [rep, poly] = build_standard_group<double>(2);
    Net<double> net = build_net(poly, rep);
    // each base vertex surrounded by 4g = 8 tiles
    for (const auto& cyc : net.base_cycles) CHECK(cyc.size() == 8);
    // net neighbors of V0 outside V0: 4g(4g-2) = 48 for g=2
    CHECK(net.V.size() == 48);
    std::printf("[net] g=2: adjacent tiles %zu, |V| = %zu\n", net.adjacent_tiles.size(),
                net.V.size());

    // tile set invariant under rotation by pi/(2g) (one side step)
    Cplx<double> origin(0, 0);
    auto rot = DiskMobius<double>::rotation(3.14159265358979323846 / 4);
    for (const auto& t : net.adjacent_tiles) {
        Cplx<double> c = rot.apply_c(t.apply_c(origin));
        bool found = false;
        for (const auto& u : net.adjacent_tiles)
            if (std::sqrt(norm2(u.apply_c(origin) - c)) < 1e-9) { found = true; break; }
        CHECK(found);
    }
}

TEST_CASE("g=2 W and Markov system") {
    MarkovSystem<double> sys = standard_system<double>(2);
    std::printf("[markov] g=2: |W| = %d, lambda0 = %.6f, markov residual = %.3e\n", sys.size(),
                sys.lambda0, sys.markov_residual);
    CHECK(sys.markov_residual <= 1e-8);
    CHECK(sys.lambda0 > 1.0);

    // intervals tile the circle
    double total = 0;
    for (int j = 0; j < sys.size(); ++j) total += sys.interval(j).length;
    CHECK(total == doctest::Approx(2 * 3.14159265358979323846).epsilon(1e-12));

    auto A = transition_matrix(sys);
    auto tr = check_transitive(A);
    std::printf("[markov] transitive = %d, n_mix = %d, primitive exponent = %d\n",
                int(tr.transitive), tr.n_mix, tr.primitive_exponent);
    CHECK(tr.transitive);
    CHECK(tr.n_mix >= 1);

    for (int i = 0; i < sys.size(); ++i) CHECK(sys.row_sum(i) >= 1);

    // a reducible synthetic matrix yields a witness pair
    std::vector<std::vector<uint8_t>> bad{{1, 1}, {0, 1}};
    auto rbad = check_transitive(bad);
    CHECK_FALSE(rbad.transitive);
    CHECK(rbad.witness.first == 1);
    CHECK(rbad.witness.second == 0);

    // reference constants of the first verified genus-2 build
    CHECK(sys.size() == 336);
    CHECK(sys.geodesics.size() == 168);
    CHECK(sys.lambda0 == doctest::Approx(1.0937666).epsilon(1e-6));
    CHECK(tr.n_mix == 8);
    CHECK(tr.primitive_exponent == 8);
}
