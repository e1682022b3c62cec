#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "qaemu/errors.hpp"
#include "qaemu/ising.hpp"
#include "test_helpers.hpp"

using namespace qaemu;

TEST_CASE("energy matches the defining sum") {
    SUBCASE("empty problem") {
        Hamiltonian H(3);
        CHECK(energy(H, SpinState{1, -1, 1}) == 0.0);
    }
    SUBCASE("single ferromagnetic coupling") {
        Hamiltonian H(2, {0.0, 0.0}, {{0, 1, -1.0}});
        CHECK(energy(H, SpinState{1, 1}) == -1.0);
        CHECK(energy(H, SpinState{1, -1}) == 1.0);
    }
    SUBCASE("frustrated triangle: brute-force minimum is -1") {
        Hamiltonian H(3, {0, 0, 0}, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}});
        CHECK(energy(H, SpinState{1, 1, -1}) == -1.0);
        double best = 1e30;
        for (double e : test::full_spectrum(H)) best = std::min(best, e);
        CHECK(best == -1.0);
    }
    SUBCASE("length mismatch") {
        Hamiltonian H(2);
        CHECK_THROWS_AS(energy(H, SpinState{1}), DimensionError);
    }
}

TEST_CASE("constructor normalizes couplers") {
    SUBCASE("symmetric input folds into u < v") {
        Hamiltonian H(3, {0, 0, 0}, {{1, 0, 0.5}, {0, 1, 0.25}});
        REQUIRE(H.couplers().size() == 1);
        CHECK(H.couplers()[0].u == 0);
        CHECK(H.couplers()[0].v == 1);
        CHECK(H.couplers()[0].value == 0.75);
    }
    SUBCASE("cancelled couplers are dropped") {
        Hamiltonian H(2, {0, 0}, {{0, 1, 1.0}, {1, 0, -1.0}});
        CHECK(H.couplers().empty());
    }
    SUBCASE("self-couplings rejected") {
        CHECK_THROWS_AS(Hamiltonian(2, {0, 0}, {{1, 1, 1.0}}), ValidationError);
    }
    SUBCASE("out-of-range endpoint rejected") {
        CHECK_THROWS_AS(Hamiltonian(2, {0, 0}, {{0, 2, 1.0}}), ValidationError);
    }
}

TEST_CASE("gauge transformation") {
    SUBCASE("identity gauge") {
        Rng rng(7);
        Hamiltonian H = test::random_hamiltonian(6, 0.5, rng);
        Hamiltonian Hg = apply_gauge(H, GaugeVector(6, 1));
        CHECK(Hg.fields() == H.fields());
        for (std::size_t i = 0; i < H.couplers().size(); ++i)
            CHECK(Hg.couplers()[i].value == H.couplers()[i].value);
    }
    SUBCASE("sign flips follow h g and J g g") {
        Hamiltonian H(2, {1.0, 0.0}, {{0, 1, -1.0}});
        Hamiltonian Hg = apply_gauge(H, GaugeVector{-1, 1});
        CHECK(Hg.fields()[0] == -1.0);
        CHECK(Hg.fields()[1] == 0.0);
        CHECK(Hg.couplers()[0].value == 1.0);
    }
    SUBCASE("energy identity under gauging, exhaustive at n = 8") {
        Rng rng(11);
        Hamiltonian H = test::random_hamiltonian(8, 0.4, rng);
        GaugeVector g = random_gauge(8, rng);
        Hamiltonian Hg = apply_gauge(H, g);
        for (std::uint64_t code = 0; code < 256; ++code) {
            SpinState s = test::state_from_code(code, 8);
            CHECK(energy(Hg, gauge_state(g, s)) == energy(H, s));
        }
    }
}

TEST_CASE("gauge_state is an involution") {
    Rng rng(3);
    SpinState s = random_state(10, rng);
    GaugeVector g = random_gauge(10, rng);
    CHECK(gauge_state(GaugeVector(10, 1), s) == s);
    SpinState neg = gauge_state(GaugeVector(10, -1), s);
    for (int i = 0; i < 10; ++i) CHECK(neg[i] == -s[i]);
    CHECK(gauge_state(g, gauge_state(g, s)) == s);
    CHECK_THROWS_AS(gauge_state(GaugeVector(9, 1), s), DimensionError);
}

TEST_CASE("scale_to_unit") {
    SUBCASE("integer range R = 3 gives alpha = 1/3") {
        Hamiltonian H(3, {0, 0, 0}, {{0, 1, 3.0}, {1, 2, -2.0}});
        Hamiltonian S = scale_to_unit(H);
        CHECK(S.scale_alpha().value() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
        CHECK(S.max_abs_weight() == 1.0);
    }
    SUBCASE("already unit") {
        Hamiltonian H(2, {0, 0}, {{0, 1, -1.0}});
        Hamiltonian S = scale_to_unit(H);
        CHECK(S.scale_alpha().value() == 1.0);
        CHECK(S.couplers()[0].value == -1.0);
    }
    SUBCASE("single -6 coupler") {
        Hamiltonian H(2, {0, 0}, {{0, 1, -6.0}});
        Hamiltonian S = scale_to_unit(H);
        CHECK(S.scale_alpha().value() == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
        CHECK(S.couplers()[0].value == -1.0);
    }
    SUBCASE("all-zero problem is degenerate") {
        CHECK_THROWS_AS(scale_to_unit(Hamiltonian(4)), ValidationError);
    }
    SUBCASE("argmin preserved, exhaustive at n = 10") {
        Rng rng(5);
        Hamiltonian H = test::random_hamiltonian(10, 0.3, rng, true);
        auto [e0, g0] = test::naive_ground(H);
        auto [e1, g1] = test::naive_ground(scale_to_unit(H));
        CHECK(g0 == g1);
    }
    SUBCASE("scale_by composes alpha") {
        Hamiltonian H(2, {0, 0}, {{0, 1, 3.0}});
        Hamiltonian S = scale_by(scale_to_unit(H), 0.5);
        CHECK(S.scale_alpha().value() == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    }
}

TEST_CASE("gauge invariance of the spectrum") {
    Rng rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        int n = 6 + static_cast<int>(rng.below(7));  // up to 12
        Hamiltonian H = test::random_hamiltonian(n, 0.4, rng);
        GaugeVector g = random_gauge(n, rng);
        Hamiltonian Hg = apply_gauge(H, g);
        std::vector<double> a = test::full_spectrum(H);
        std::vector<double> b = test::full_spectrum(Hg);
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        CHECK(a == b);

        // Ground-set covariance.
        auto [ea, ga] = test::naive_ground(H);
        auto [eb, gb] = test::naive_ground(Hg);
        CHECK(ea == eb);
        std::set<std::vector<std::int8_t>> mapped;
        for (const auto& s : ga) mapped.insert(gauge_state(g, s));
        CHECK(mapped == gb);
    }
}

TEST_CASE("integer-weight energies are separated by at least 2") {
    Rng rng(23);
    for (int trial = 0; trial < 3; ++trial) {
        Hamiltonian H = test::random_hamiltonian(10, 0.4, rng, true);
        std::set<double> values;
        for (double e : test::full_spectrum(H)) values.insert(e);
        double prev = 0.0;
        bool first = true;
        for (double v : values) {
            if (!first) CHECK(v - prev >= 2.0);
            prev = v;
            first = false;
        }
    }
}

TEST_CASE("problem file round trip") {
    Rng rng(29);
    Hamiltonian H = test::random_hamiltonian(12, 0.3, rng);
    std::stringstream ss;
    write_problem(ss, H);
    Hamiltonian back = read_problem(ss);
    CHECK(back.size() == H.size());
    CHECK(back.fields() == H.fields());
    REQUIRE(back.couplers().size() == H.couplers().size());
    for (std::size_t i = 0; i < H.couplers().size(); ++i) {
        CHECK(back.couplers()[i].u == H.couplers()[i].u);
        CHECK(back.couplers()[i].v == H.couplers()[i].v);
        CHECK(back.couplers()[i].value == H.couplers()[i].value);
    }
}

TEST_CASE("problem file parse errors carry line numbers") {
    std::stringstream bad("4\n0 1 0.5\n0 x 1.0\n");
    try {
        read_problem(bad);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
    }
}

TEST_CASE("restrict_to_support drops isolated vertices") {
    Hamiltonian H(6, {0, 0, 1.0, 0, 0, 0}, {{0, 4, -2.0}});
    Subproblem sub = restrict_to_support(H);
    CHECK(sub.vertex_map == std::vector<int>{0, 2, 4});
    CHECK(sub.problem.size() == 3);
    CHECK(energy(sub.problem, SpinState{1, 1, 1}) == energy(H, SpinState(6, 1)));
}
