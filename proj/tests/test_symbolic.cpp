#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN

#include <cmath>
#include <cstdio>

#include "helpers.hpp"
#include "teich/symbolic.hpp"

using namespace teich;

namespace {
MarkovSystem<double>& sys2() {
    static MarkovSystem<double> s = standard_system<double>(2);
    return s;
}

Word random_admissible(const MarkovSystem<double>& sys, std::mt19937_64& g, int len) {
    std::uniform_int_distribution<int> start(0, sys.size() - 1);
    Word w{start(g)};
    while (int(w.size()) < len) {
        int span = sys.row_sum(w.back());
        std::uniform_int_distribution<int> pick(0, span - 1);
        w.push_back((sys.img_lo[w.back()] + pick(g)) % sys.size());
    }
    return w;
}
} // namespace

TEST_CASE("shifts and admissibility") {
    auto& sys = sys2();
    Word w{3, 7, 2};
    CHECK(dual_shift(w) == Word{3, 7});
    CHECK(shift_word(w) == Word{7, 2});
    CHECK_THROWS_AS(dual_shift(Word{}), EmptyWord);

    // an inadmissible pair
    int i0 = 0;
    int bad = (sys.img_hi[i0] + 1) % sys.size(); // just outside the image range
    if (!sys.admissible(i0, bad)) CHECK_FALSE(is_admissible(sys, Word{i0, bad}));

    auto g = th::rng(11);
    for (int t = 0; t < 50; ++t) CHECK(is_admissible(sys, random_admissible(sys, g, 6)));
}

TEST_CASE("admissible word counts match integer powers of A") {
    auto& sys = sys2();
    int k = sys.size();
    // count words of length L by dynamic programming on exact integers
    std::vector<unsigned long long> cnt(k, 1);
    std::vector<unsigned long long> expect;
    for (int L = 2; L <= 4; ++L) {
        std::vector<unsigned long long> nxt(k, 0);
        for (int i = 0; i < k; ++i) {
            int span = sys.row_sum(i);
            for (int o = 0; o < span; ++o) nxt[(sys.img_lo[i] + o) % k] += cnt[i];
        }
        cnt.swap(nxt);
        unsigned long long tot = 0;
        for (auto x : cnt) tot += x;
        expect.push_back(tot);
    }
    // oracle: dense 0-1 matrix powers summed
    auto A = transition_matrix(sys);
    std::vector<std::vector<unsigned long long>> M(k, std::vector<unsigned long long>(k, 0));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) M[i][j] = A[i][j];
    for (int L = 2; L <= 4; ++L) {
        unsigned long long tot = 0;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) tot += M[i][j];
        CHECK(tot == expect[L - 2]);
        if (L < 4) {
            std::vector<std::vector<unsigned long long>> N(k,
                std::vector<unsigned long long>(k, 0));
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j)
                    if (A[i][j])
                        for (int l = 0; l < k; ++l) N[i][l] += M[j][l];
            // note: N = A*M computed as sum over middle index
            M.swap(N);
        }
    }
}

TEST_CASE("cylinders nest and shrink") {
    auto& sys = sys2();
    // single symbol: the interval itself
    Arc<double> c0 = cylinder_interval(sys, Word{5});
    CHECK(c0.start.angle == doctest::Approx(sys.interval(5).start.angle));
    CHECK(c0.length == doctest::Approx(sys.interval(5).length));

    auto g = th::rng(12);
    for (int t = 0; t < 100; ++t) {
        Word w = random_admissible(sys, g, 9);
        Arc<double> prev = cylinder_interval(sys, Word{w[0]});
        for (int n = 2; n <= 9; ++n) {
            Word sub(w.begin(), w.begin() + n);
            Arc<double> cur = cylinder_interval(sys, sub);
            CHECK(prev.contains_arc(cur, 1e-9));
            prev = cur;
        }
        CHECK(prev.length < 0.05); // depth-8 cylinders are already small
    }

    CHECK_THROWS_AS((void)cylinder_interval(sys2(), Word{}), Inadmissible);
}

TEST_CASE("pi: fixed-point oracle, semiconjugacy, shared prefixes") {
    auto& sys = sys2();
    // a symbol with a self-loop gives the constant word
    int loop = -1;
    for (int i = 0; i < sys.size(); ++i)
        if (sys.admissible(i, i)) { loop = i; break; }
    REQUIRE(loop >= 0);
    Word cst(8, loop);
    auto [pt, rad] = pi_point(sys, cst);
    auto [att, rep] = fixed_points(sys.branch[loop]);
    (void)att;
    CHECK(std::fabs(wrap_pi(pt.angle - rep.angle)) <= rad + 1e-12);

    auto g = th::rng(13);
    for (int t = 0; t < 50; ++t) {
        Word w = random_admissible(sys, g, 7);
        auto [x, r] = pi_point(sys, w);
        auto [fx, r2] = pi_point(sys, shift_word(w));
        double image = sys.branch[w[0]].apply_angle(x.angle);
        // |f(pi(w)) - pi(sigma w)| <= |I_{sigma w}| (both lie in that cylinder)
        double bound = cylinder_interval(sys, shift_word(w)).length;
        CHECK(std::fabs(wrap_pi(image - fx.angle)) <= bound + 1e-12);
        (void)r; (void)r2;

        // two words sharing the first 5 symbols stay within that cylinder
        Word w2(w.begin(), w.begin() + 5);
        Word ext = w2;
        while (int(ext.size()) < 8) {
            int span = sys.row_sum(ext.back());
            ext.push_back((sys.img_lo[ext.back()] + (span > 1 ? span - 1 : 0)) % sys.size());
        }
        auto [y, ry] = pi_point(sys, ext);
        double cap = cylinder_interval(sys, w2).length;
        CHECK(std::fabs(wrap_pi(y.angle - x.angle)) <= cap + 1e-12);
        (void)ry;
    }
}

TEST_CASE("preperiodic codes for every partition point") {
    auto& sys = sys2();
    auto codes = compute_codes(sys);
    int k = sys.size();
    int max_len = 0;
    for (int p = 0; p < k; ++p) {
        const auto& c = codes[p];
        CHECK(int(c.preperiod.size() + c.period.size()) <= k);
        CHECK(c.period.size() >= 1);
        CHECK(c.residual <= 1e-9);
        max_len = std::max(max_len, int(c.preperiod.size() + c.period.size()));
        if (c.preperiod.empty() && c.period.size() == 1) {
            // genuinely fixed point of one branch
            auto m = sys.rep.generators[c.period[0]];
            CHECK(std::fabs(wrap_pi(m.apply_angle(sys.W[p]) - sys.W[p])) < 1e-8);
        }
    }
    std::printf("[codes] g=2: longest preperiod+period = %d\n", max_len);

    // codes are deterministic
    auto codes2 = compute_codes(sys);
    for (int p = 0; p < k; ++p) {
        CHECK(codes[p].preperiod == codes2[p].preperiod);
        CHECK(codes[p].period == codes2[p].period);
    }
}

TEST_CASE("transport: identity, equivariance, direct conjugation oracle") {
    auto& sys = sys2();
    auto codes = compute_codes(sys);

    // identity marking reproduces the points
    auto id_marking = Marking<double>::make(sys.rep, sys.rep);
    for (int p = 0; p < sys.size(); p += 7)
        CHECK(std::fabs(wrap_pi(transport_point(codes[p], sys.rep).angle - sys.W[p])) < 1e-10);

    // direct conjugation: H = the conjugating map itself
    auto psi = compose(DiskMobius<double>::rotation(0.41),
                       translation_along(Geodesic<double>(CirclePoint<double>(2.0),
                                                          CirclePoint<double>(5.2)),
                                         0.6));
    auto [crep, cmark] = conjugate_rep(sys.rep, psi);
    for (int p = 0; p < sys.size(); p += 5) {
        double direct = psi.apply_angle(sys.W[p]);
        double via_code = transport_point(codes[p], crep).angle;
        CHECK(std::fabs(wrap_pi(direct - via_code)) < 1e-9);
    }

    // equivariance under a twist: H(f0(w)) = phi(branch)(H(w))
    auto [trep, tmark] = twist_deform(sys.rep, "a1", 0.2);
    for (int p = 0; p < sys.size(); p += 3) {
        double hw = transport_point(codes[p], trep).angle;
        int img = sys.img_lo[p];
        double hfw = transport_point(codes[img], trep).angle;
        double moved = trep.generators[sys.branch_gen[p]].apply_angle(hw);
        CHECK(std::fabs(wrap_pi(moved - hfw)) < 1e-9);
    }
    (void)id_marking;
}

TEST_CASE("conjugated_system: identity, twist, combinatorics") {
    auto& sys = sys2();

    auto idsys = conjugated_system(sys, Marking<double>::make(sys.rep, sys.rep));
    for (int j = 0; j < sys.size(); ++j)
        CHECK(std::fabs(wrap_pi(idsys.W[j] - sys.W[j])) < 1e-10);

    auto [tw, marking] = twisted_system(sys, "a1", 0.2);
    CHECK(tw.markov_residual <= 1e-8);
    CHECK(tw.lambda0 > 1.0);
    std::printf("[deformed] twist 0.2: lambda0 = %.4f at depth %d, markov residual %.2e\n",
                tw.lambda0, tw.depth_used, tw.markov_residual);
    // same combinatorics: identical image ranges after the index rotation
    for (int j = 0; j < sys.size(); ++j)
        CHECK(tw.row_sum(j) >= 1);
    double total = 0;
    for (int j = 0; j < tw.size(); ++j) total += tw.interval(j).length;
    CHECK(total == doctest::Approx(2 * 3.14159265358979323846).epsilon(1e-9));
}
