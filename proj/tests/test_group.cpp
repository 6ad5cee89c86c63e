#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN

#include <cmath>

#include "helpers.hpp"
#include "teich/group.hpp"

using namespace teich;

namespace {
const double PI = 3.14159265358979323846;

double gen_distance(const DiskMobius<double>& x, const DiskMobius<double>& y) {
    return identity_distance(compose(x, y.inverse()));
}
} // namespace

TEST_CASE("standard group g=2: polygon and relation") {
    auto [rep, poly] = build_standard_group<double>(2);
    CHECK(poly.sides() == 8);
    for (int j = 0; j < 8; ++j)
        CHECK(std::fabs(poly.vertex_angle(j) - PI / 4) < 1e-9);
    CHECK(rep.relation_residual <= 1e-9);

    // closed-form circumradius oracle: cosh r = cot^2(pi/(4g))
    double cot = 1.0 / std::tan(PI / 8);
    CHECK(std::cosh(poly.circumradius_hyperbolic) == doctest::Approx(cot * cot).epsilon(1e-11));

    // full relator as a word
    auto rel = evaluate_word(rep, "a1 b1 a1inv b1inv a2 b2 a2inv b2inv");
    CHECK(identity_distance(rel) <= 1e-9);
}

TEST_CASE("standard group g=3 and g=4") {
    for (int g : {3, 4}) {
        auto [rep, poly] = build_standard_group<double>(g);
        CHECK(poly.sides() == 4 * g);
        CHECK(std::fabs(poly.vertex_angle(0) - PI / (2 * g)) < 1e-9);
        CHECK(rep.relation_residual <= 1e-9);
        double cot = 1.0 / std::tan(PI / (4 * g));
        CHECK(std::cosh(poly.circumradius_hyperbolic) == doctest::Approx(cot * cot).epsilon(1e-11));
    }
}

TEST_CASE("generators: hyperbolic, inverses, equal lengths, isometric circles") {
    auto [rep, poly] = build_standard_group<double>(2);
    double len0 = translation_length(rep.generators[0]);
    for (int i = 0; i < rep.count(); ++i) {
        CHECK(classify(rep.generators[i]) == MobiusClass::hyperbolic);
        int inv = SurfaceGroupRep<double>::inverse_index(i);
        CHECK(gen_distance(rep.generators[i].inverse(), rep.generators[inv]) < 1e-10);
        CHECK(translation_length(rep.generators[i]) == doctest::Approx(len0).epsilon(1e-9));
    }

    // the pairing map of each side has |derivative| = 1 on the geodesic
    // through that side (its isometric circle)
    for (int j = 0; j < rep.genus; ++j) {
        // stored b_j is the pairing map of side 4j+1
        int s = 4 * j + 1;
        auto geo = geodesic_through(poly.side_start(s), poly.side_end(s));
        const auto& m = rep.generators[4 * j + 1];
        CHECK(m.circle_derivative(geo.p) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(m.circle_derivative(geo.q) == doctest::Approx(1.0).epsilon(1e-10));
        // stored a_j is the pairing map of side 4j+2
        int s2 = 4 * j + 2;
        auto geo2 = geodesic_through(poly.side_start(s2), poly.side_end(s2));
        const auto& m2 = rep.generators[4 * j + 0];
        CHECK(m2.circle_derivative(geo2.p) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(m2.circle_derivative(geo2.q) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("rotation by 2pi/g conjugates the generator set to a relabeling") {
    auto [rep, poly] = build_standard_group<double>(2);
    auto rot = DiskMobius<double>::rotation(2 * PI / rep.genus);
    for (int i = 0; i < rep.count(); ++i) {
        auto shifted = conjugate(rep.generators[i], rot);
        int target = (i + 4) % rep.count(); // a_j -> a_{j+1} etc.
        CHECK(gen_distance(shifted, rep.generators[target]) < 1e-9);
    }
}

TEST_CASE("twist_deform") {
    auto [rep, poly] = build_standard_group<double>(2);

    auto [t0, m0] = twist_deform(rep, "a1", 0.0);
    for (int i = 0; i < rep.count(); ++i)
        CHECK(gen_distance(t0.generators[i], rep.generators[i]) < 1e-12);

    auto [t1, m1] = twist_deform(rep, "a1", 0.3);
    CHECK(t1.relation_residual <= 1e-9);
    CHECK_FALSE(t1.is_standard);
    CHECK(m1.generator_map.size() == 8);

    // inverse twist returns generator-wise
    auto [back, m2] = twist_deform(t1, "a1", -0.3);
    for (int i = 0; i < rep.count(); ++i)
        CHECK(gen_distance(back.generators[i], rep.generators[i]) < 1e-10);

    // one-parameter flow: 0.2 then 0.5 equals 0.7
    auto [u1, mu1] = twist_deform(rep, "a1", 0.2);
    auto [u2, mu2] = twist_deform(u1, "a1", 0.5);
    auto [u3, mu3] = twist_deform(rep, "a1", 0.7);
    for (int i = 0; i < rep.count(); ++i)
        CHECK(gen_distance(u2.generators[i], u3.generators[i]) < 1e-10);

    // twisting about b2 also preserves the relation
    auto [tb, mb] = twist_deform(rep, "b2", 0.4);
    CHECK(tb.relation_residual <= 1e-9);

    // only the partner generator changes
    int bi = rep.index_of("b1");
    for (int i = 0; i < rep.count(); ++i) {
        if (i == bi || i == SurfaceGroupRep<double>::inverse_index(bi)) continue;
        CHECK(gen_distance(t1.generators[i], rep.generators[i]) < 1e-12);
    }
}

TEST_CASE("conjugate_rep") {
    auto [rep, poly] = build_standard_group<double>(2);
    auto [same, m0] = conjugate_rep(rep, DiskMobius<double>::identity());
    for (int i = 0; i < rep.count(); ++i)
        CHECK(gen_distance(same.generators[i], rep.generators[i]) < 1e-12);

    auto rot = DiskMobius<double>::rotation(0.37);
    auto [moved, m1] = conjugate_rep(rep, rot);
    CHECK(moved.relation_residual <= 1e-9);
    for (int i = 0; i < rep.count(); ++i) {
        auto [att, repell] = fixed_points(rep.generators[i]);
        auto [att2, repell2] = fixed_points(moved.generators[i]);
        CHECK(std::fabs(wrap_pi(att2.angle - att.angle - 0.37)) < 1e-10);
        CHECK(std::fabs(wrap_pi(repell2.angle - repell.angle - 0.37)) < 1e-10);
    }
}

TEST_CASE("evaluate_word") {
    auto [rep, poly] = build_standard_group<double>(2);
    CHECK(identity_distance(evaluate_word(rep, "")) < 1e-15);
    CHECK(identity_distance(evaluate_word(rep, "a1 a1inv")) < 1e-12);
    CHECK(identity_distance(evaluate_word(rep, "a1 b1 a1inv b1inv a2 b2 a2inv b2inv")) <= 1e-9);
    CHECK_THROWS_AS((void)evaluate_word(rep, "c7"), UnknownLabel);
}

TEST_CASE("standard group in dd precision") {
    auto [rep, poly] = build_standard_group<dd>(2);
    CHECK(rep.relation_residual < 1e-25);
    CHECK(std::fabs(to_double(poly.vertex_angle(0) - dd_const::pi / dd(4.0))) < 1e-28);
}
