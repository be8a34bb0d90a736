#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "escape/open_system.hpp"
#include "oracles.hpp"

using namespace escape;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGoldenRatio = 1.6180339887498948482;

TransitionMatrix full2() { return validate_transition_matrix({{1, 1}, {1, 1}}); }
TransitionMatrix golden() { return validate_transition_matrix({{1, 1}, {1, 0}}); }

Word W(const std::string& s) { return word_from_string(s, 2); }

MarkovGibbsMeasure half() {
    return equilibrium_state(full2(), LocallyConstantFunction::constant(full2(), 1, 0.5, 0.0));
}
MarkovGibbsMeasure coin(double p) {
    return equilibrium_state(full2(),
                             LocallyConstantFunction::from_values(
                                 full2(), 1, 0.5, {{"1", std::log(p)}, {"2", std::log(1.0 - p)}}));
}

// all nonempty proper subsets of the admissible depth-n words
std::vector<std::vector<Word>> all_holes(const TransitionMatrix& A, int n) {
    const auto words = enumerate_words(A, n);
    const std::size_t total = words.size();
    std::vector<std::vector<Word>> out;
    for (std::uint64_t mask = 1; mask + 1 < (1ull << total); ++mask) {
        std::vector<Word> pick;
        for (std::size_t i = 0; i < total; ++i)
            if (mask & (1ull << i)) pick.push_back(words[i]);
        out.push_back(std::move(pick));
    }
    return out;
}

}  // namespace

TEST_SUITE("open_system") {

TEST_CASE("hole construction validates depth, admissibility, and coverage") {
    const auto A = full2();
    CHECK_THROWS_AS(make_hole(A, 1, {}), ValidationError);
    CHECK_THROWS_AS(make_hole(A, 1, {W("1"), W("2")}), ValidationError);  // nothing survives
    CHECK_THROWS_AS(make_hole(A, 2, {W("1")}), ValidationError);          // wrong depth
    CHECK_THROWS_AS(make_hole(golden(), 2, {W("22")}), ValidationError);  // inadmissible
    const Hole H = make_hole(A, 2, {W("21"), W("11"), W("21")});
    CHECK(H.words.size() == 2);  // duplicates collapse
    CHECK(hole_contains(H, W("11")));
    CHECK(hole_contains(H, W("1121")));  // prefix rule
    CHECK_FALSE(hole_contains(H, W("12")));
    CHECK_FALSE(hole_contains(H, W("1")));  // too short to land inside
}

TEST_CASE("survivor masses of the coin shift with one forbidden letter") {
    const auto mu = half();
    const Hole H = make_hole(full2(), 1, {W("2")});
    const auto ks = survivor_log_curve(mu, H, 5);
    for (int k = 1; k <= 5; ++k)
        CHECK(ks[k - 1] == doctest::Approx(-k * std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("survivor masses with a forbidden two-letter block") {
    const auto mu = half();
    const Hole H = make_hole(full2(), 2, {W("11")});
    // 5-letter words with no 11 in the first four windows: 13 of 32
    CHECK(survivor_log_measure(mu, H, 4) == doctest::Approx(std::log(13.0 / 32.0)).epsilon(1e-13));
}

TEST_CASE("survivor masses are nonincreasing and monotone in the hole") {
    const auto mu = coin(0.3);
    const Hole small = make_hole(full2(), 2, {W("11")});
    const Hole big = make_hole(full2(), 2, {W("11"), W("21")});
    const auto a = survivor_log_curve(mu, small, 30);
    const auto b = survivor_log_curve(mu, big, 30);
    for (int k = 0; k < 30; ++k) {
        if (k > 0) CHECK(a[k] <= a[k - 1]);
        CHECK(b[k] <= a[k]);  // a larger hole never keeps more mass
    }
}

TEST_CASE("escape rates of the classical examples") {
    const auto mu = half();
    const auto r2 = escape_rate_discrete(mu, make_hole(full2(), 1, {W("2")}), 4);
    CHECK(r2.rate == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK_FALSE(r2.full_escape);

    const auto r11 = escape_rate_discrete(mu, make_hole(full2(), 2, {W("11")}), 4);
    CHECK(r11.rate == doctest::Approx(std::log(2.0) - std::log(kGoldenRatio)).epsilon(1e-12));
    CHECK(r11.rate == doctest::Approx(0.21193535550034182).epsilon(1e-12));
    CHECK(r11.open_eigenvalue == doctest::Approx(kGoldenRatio).epsilon(1e-12));
}

TEST_CASE("the two routes to the escape rate agree") {
    struct Case {
        MarkovGibbsMeasure mu;
        Hole H;
    };
    std::vector<Case> cases;
    cases.push_back({half(), make_hole(full2(), 2, {W("11")})});
    cases.push_back({coin(0.3), make_hole(full2(), 1, {W("1")})});
    cases.push_back({coin(0.3), make_hole(full2(), 3, {W("112"), W("221")})});
    cases.push_back({equilibrium_state(golden(),
                                       LocallyConstantFunction::constant(golden(), 1, 0.5, 0.0)),
                     make_hole(golden(), 2, {W("12")})});
    for (const auto& c : cases) {
        const auto r = escape_rate_discrete(c.mu, c.H, 2);
        CHECK(r.rate == doctest::Approx(r.rate_chain).epsilon(1e-10));
        CHECK(r.rate > 0.0);
    }
}

TEST_CASE("total escape when nothing admissible survives") {
    const auto mu =
        equilibrium_state(golden(), LocallyConstantFunction::constant(golden(), 1, 0.5, 0.0));
    const Hole H = make_hole(golden(), 1, {W("1")});
    const auto r = escape_rate_discrete(mu, H, 3);
    CHECK(r.full_escape);
    CHECK(r.rate == kInf);
    CHECK(r.survivor_log_measures[0] > -kInf);   // mass of [2] is still there
    CHECK(r.survivor_log_measures[1] == -kInf);  // but 2 cannot follow 2
}

TEST_CASE("survivor curves match brute-force cylinder sums") {
    // every nonempty proper hole at depths one and two, both shifts
    struct Sys {
        TransitionMatrix A;
        MarkovGibbsMeasure mu;
    };
    std::vector<Sys> systems;
    systems.push_back({full2(), coin(0.3)});
    systems.push_back({golden(), equilibrium_state(golden(), LocallyConstantFunction::constant(
                                                                 golden(), 1, 0.5, 0.0))});
    for (const auto& sys : systems) {
        for (int depth = 1; depth <= 2; ++depth) {
            for (const auto& words : all_holes(sys.A, depth)) {
                if (words.size() == count_words(sys.A, depth)) continue;
                const Hole H = make_hole(sys.A, depth, words);
                const auto lib = survivor_log_curve(sys.mu, H, 10);
                const auto ref = oracle::survivor_log_brute(sys.mu, H, 10);
                for (int k = 0; k < 10; ++k) {
                    if (ref[k] == -kInf)
                        CHECK(lib[k] == -kInf);
                    else
                        CHECK(lib[k] == doctest::Approx(ref[k]).epsilon(1e-10));
                }
            }
        }
    }
}

TEST_CASE("the survivor slope approaches the escape rate") {
    struct Case {
        MarkovGibbsMeasure mu;
        Hole H;
    };
    std::vector<Case> cases;
    cases.push_back({half(), make_hole(full2(), 4, {W("1111")})});
    cases.push_back({coin(0.3), make_hole(full2(), 4, {W("1111")})});
    for (const auto& c : cases) {
        const auto r = escape_rate_discrete(c.mu, c.H, 400);
        const auto& ks = r.survivor_log_measures;
        const double slope = (ks[199] - ks[399]) / 200.0;  // |K(k) - K(2k)| / k at k = 200
        CHECK(std::abs(slope - r.rate) <= 0.05 * r.rate);
    }
}

TEST_CASE("generated nested families around a periodic target pass every check") {
    const auto mu = half();
    const auto seq = make_nested_cylinders(mu, periodic_point(full2(), W("1")), 1, 12);
    REQUIRE(seq.holes.size() == 12);
    for (int n = 1; n <= 12; ++n) CHECK(seq.at(n).depth == n);
    CHECK(seq.rho < 1.0);
    CHECK(seq.rho > 0.0);
    CHECK(seq.c > 0.0);
    const auto rep = validate_nested(seq, mu);
    CHECK(rep.all_pass());
    CHECK(rep.items[4].applicable);
    CHECK(rep.items[4].witness_n == 1);
}

TEST_CASE("a target with unknown tail leaves the pull-back check open") {
    const auto mu = half();
    ShiftPoint z;
    z.prefix = W("12112111211112");  // long enough for every requested depth
    NestedHoleSequence seq = make_nested_cylinders(mu, z, 1, 6);
    const auto rep = validate_nested(seq, mu);
    CHECK_FALSE(rep.items[4].applicable);
    CHECK(rep.items[4].pass);
    CHECK(rep.all_pass());
}

TEST_CASE("membership violations are caught at the right depth") {
    const auto mu = half();
    NestedHoleSequence seq = make_nested_cylinders(mu, periodic_point(full2(), W("1")), 1, 5);
    seq.holes[2] = make_hole(full2(), 3, {W("112")});  // still nested, no longer contains z
    seq.l[2] = 2;  // [112] sits inside [z]_2, so the support check stays clean
    const auto rep = validate_nested(seq, mu);
    CHECK_FALSE(rep.all_pass());
    CHECK(rep.items[0].pass);
    CHECK_FALSE(rep.items[1].pass);
    CHECK(rep.items[1].witness_n == 3);
    CHECK(rep.items[2].pass);
    CHECK(rep.items[3].pass);
    CHECK(rep.items[4].pass);  // recovers past the swapped depth
    CHECK(rep.items[4].witness_n == 4);
}

TEST_CASE("a too-optimistic decay certificate fails only the decay check") {
    const auto mu = half();
    NestedHoleSequence seq = make_nested_cylinders(mu, periodic_point(full2(), W("1")), 1, 8);
    seq.c = 1e-6;
    seq.rho = 0.01;
    const auto rep = validate_nested(seq, mu);
    CHECK_FALSE(rep.items[2].pass);
    CHECK(rep.items[2].witness_n == 1);
    CHECK(rep.items[0].pass);
    CHECK(rep.items[1].pass);
    CHECK(rep.items[3].pass);
    CHECK(rep.items[4].pass);
}

TEST_CASE("shallow support depths fail only the depth-ratio check") {
    const auto mu = half();
    NestedHoleSequence seq = make_nested_cylinders(mu, periodic_point(full2(), W("1")), 1, 8);
    seq.kappa = 0.9;
    for (std::size_t i = 0; i < seq.l.size(); ++i)
        seq.l[i] = (static_cast<int>(i) + 2) / 2;  // ceil(n/2)
    const auto rep = validate_nested(seq, mu);
    CHECK_FALSE(rep.items[3].pass);
    CHECK(rep.items[3].witness_n == 2);
    CHECK(rep.items[0].pass);
    CHECK(rep.items[1].pass);
    CHECK(rep.items[2].pass);
    CHECK(rep.items[4].pass);
}

TEST_CASE("holes that refuse to shrink fail the decay check") {
    const auto mu = half();
    NestedHoleSequence seq;
    seq.z = periodic_point(full2(), W("2"));
    seq.n_min = 1;
    seq.kappa = 0.5;
    seq.c = 1.0;
    seq.rho = 0.9;
    for (int n = 1; n <= 6; ++n) {
        std::vector<Word> words;
        for (const Word& w : enumerate_words(full2(), n))
            if (w != Word(static_cast<std::size_t>(n), Symbol(1))) words.push_back(w);
        seq.holes.push_back(make_hole(full2(), n, words));
        seq.l.push_back(n);
    }
    const auto rep = validate_nested(seq, mu);
    CHECK_FALSE(rep.items[2].pass);  // mass stays near 1, no geometric decay
    CHECK_FALSE(rep.all_pass());
}

TEST_CASE("ratio curves approach the escape weight of the target") {
    const auto mu = half();
    const auto seq = make_nested_cylinders(mu, periodic_point(full2(), W("1")), 4, 12);
    const auto curve = discrete_ratio_curve(mu, seq, 64);
    REQUIRE(curve.size() == 9);
    for (const auto& pt : curve) CHECK(pt.gamma_target == doctest::Approx(0.5).epsilon(1e-13));
    // regression pins; the eigensolver tolerance divided by the hole mass
    // bounds how tightly each ratio is even reproducible
    CHECK(curve[0].ratio == doctest::Approx(0.5902592211674218).epsilon(1e-9));
    CHECK(curve[4].ratio == doctest::Approx(0.5085137107867297).epsilon(1e-9));
    CHECK(curve[6].ratio == doctest::Approx(0.5025833671896862).epsilon(1e-8));
    CHECK(curve[8].ratio == doctest::Approx(0.5007646904473404).epsilon(1e-8));

    const auto mu3 = coin(0.3);
    const auto seq3 = make_nested_cylinders(mu3, periodic_point(full2(), W("1")), 12, 12);
    const auto curve3 = discrete_ratio_curve(mu3, seq3, 8);
    CHECK(curve3[0].ratio == doctest::Approx(0.7000032186174838).epsilon(1e-6));
    CHECK(curve3[0].gamma_target == doctest::Approx(0.7).epsilon(1e-12));

    const auto seq12 = make_nested_cylinders(mu, periodic_point(full2(), W("12")), 12, 12);
    const auto curve12 = discrete_ratio_curve(mu, seq12, 8);
    CHECK(curve12[0].ratio == doctest::Approx(0.7516764362799222).epsilon(1e-8));
    CHECK(curve12[0].gamma_target == doctest::Approx(0.75).epsilon(1e-12));
}

}  // TEST_SUITE
