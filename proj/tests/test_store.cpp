#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN

#include <cstdio>

#include "helpers.hpp"
#include "teich/io.hpp"

using namespace teich;

TEST_CASE("representation JSON round-trips exactly") {
    auto [rep, poly] = build_standard_group<double>(2);
    auto [tw, marking] = twist_deform(rep, "a1", 0.3);
    auto j = rep_to_json(tw);
    auto back = rep_from_json<double>(j);
    CHECK(back.genus == tw.genus);
    CHECK(back.is_standard == tw.is_standard);
    for (int i = 0; i < tw.count(); ++i) {
        CHECK(back.generators[i].a.re == tw.generators[i].a.re);
        CHECK(back.generators[i].a.im == tw.generators[i].a.im);
        CHECK(back.generators[i].b.re == tw.generators[i].b.re);
        CHECK(back.generators[i].b.im == tw.generators[i].b.im);
        CHECK(back.labels[i] == tw.labels[i]);
    }
    CHECK(back.provenance.size() == 1);
    CHECK(back.provenance[0].kind == "twist");
    CHECK(back.provenance[0].t == 0.3);

    // second serialization is byte-identical
    CHECK(rep_to_json(back).dump() == j.dump());
}

TEST_CASE("cache round-trip reproduces the system bit-identically") {
    MarkovSystem<double> sys = standard_system<double>(2);
    auto codes = compute_codes(sys);
    auto dc = distortion_constants(sys, 5);
    auto j = cache_to_json(sys, codes, &dc);

    std::vector<PreperiodicCode> codes2;
    DistortionConstants dc2;
    auto sys2 = cache_from_json<double>(j, &codes2, &dc2);

    CHECK(sys2.size() == sys.size());
    for (int i = 0; i < sys.size(); ++i) {
        CHECK(sys2.W[i] == sys.W[i]); // bit-identical angles
        CHECK(sys2.branch_gen[i] == sys.branch_gen[i]);
        CHECK(sys2.img_lo[i] == sys.img_lo[i]);
        CHECK(sys2.img_hi[i] == sys.img_hi[i]);
    }
    CHECK(sys2.lambda0 == sys.lambda0);
    CHECK(sys2.markov_residual == sys.markov_residual);
    CHECK(codes2.size() == codes.size());
    for (size_t i = 0; i < codes.size(); ++i) {
        CHECK(codes2[i].preperiod == codes[i].preperiod);
        CHECK(codes2[i].period == codes[i].period);
    }
    CHECK(dc2.C_lip == dc.C_lip);
    CHECK(dc2.mu == dc.mu);

    // re-serialization is byte-identical (digest stability)
    auto j2 = cache_to_json(sys2, codes2, &dc2);
    CHECK(j2.dump() == j.dump());

    // prescaling through the reloaded system matches bit for bit
    Word w{0, sys.img_lo[0], 0, 0};
    w[2] = sys.img_lo[w[1]];
    w[3] = sys.img_lo[w[2]];
    CHECK(prescaling(sys2, w) == prescaling(sys, w));

    // recomputing codes on the reloaded system reproduces them exactly
    auto recomputed = compute_codes(sys2);
    for (size_t i = 0; i < codes.size(); ++i) {
        CHECK(recomputed[i].preperiod == codes[i].preperiod);
        CHECK(recomputed[i].period == codes[i].period);
    }
}

TEST_CASE("cache rejects tampering and version skew") {
    MarkovSystem<double> sys = standard_system<double>(2);
    auto codes = compute_codes(sys);
    auto j = cache_to_json(sys, codes);

    auto tampered = j;
    tampered["lambda0"] = 99.0;
    CHECK_THROWS_AS((void)cache_from_json<double>(tampered, nullptr, nullptr), BadInput);

    auto skewed = j;
    skewed["format_version"] = 999;
    CHECK_THROWS_AS((void)cache_from_json<double>(skewed, nullptr, nullptr), BadInput);
}

TEST_CASE("deterministic builds give identical serializations") {
    auto a = cache_to_json(standard_system<double>(2), compute_codes(standard_system<double>(2)));
    auto b = cache_to_json(standard_system<double>(2), compute_codes(standard_system<double>(2)));
    CHECK(a.dump() == b.dump());
}

TEST_CASE("dd values serialize as hi/lo pairs") {
    auto [rep, poly] = build_standard_group<dd>(2);
    auto j = rep_to_json(rep);
    auto back = rep_from_json<dd>(j);
    for (int i = 0; i < rep.count(); ++i) {
        CHECK(back.generators[i].a.re.hi == rep.generators[i].a.re.hi);
        CHECK(back.generators[i].a.re.lo == rep.generators[i].a.re.lo);
    }
}
