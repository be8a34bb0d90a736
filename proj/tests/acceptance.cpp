// Acceptance gate: the headline numerical claims, each printed as one
// PASS/FAIL line. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "escape/escape_flow.hpp"
#include "oracles.hpp"

using namespace escape;

namespace {

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
MarkovGibbsMeasure parry() {
    return equilibrium_state(golden(), LocallyConstantFunction::constant(golden(), 1, 0.5, 0.0));
}

RoofFunction const_roof(const TransitionMatrix& A, double c) {
    return RoofFunction::from(LocallyConstantFunction::constant(A, 1, 0.5, c));
}
RoofFunction two_step_roof() {
    return RoofFunction::from(
        LocallyConstantFunction::from_values(full2(), 1, 0.5, {{"1", 1.5}, {"2", 2.0}}));
}

DiscretizationParams params_for(const RoofFunction& f, const MarkovGibbsMeasure& mu, int m,
                                double delta) {
    DiscretizationParams p;
    p.m = m;
    p.delta = delta;
    p.eta_m = eta(f.f, m);
    p.integral_f = mu.integral(f.f);
    return p;
}

Word repeat1(int n) { return Word(static_cast<std::size_t>(n), 1); }

struct Gate {
    int failures = 0;
    double elapsed = 0.0;

    void run(int id, const std::string& label, const std::function<bool(std::string&)>& body) {
        std::string note;
        bool ok = false;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            ok = body(note);
        } catch (const std::exception& e) {
            note = std::string("exception: ") + e.what();
        }
        elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s  criterion %2d  %s%s%s  [%.1fs]\n", ok ? "PASS" : "FAIL", id,
                    label.c_str(), note.empty() ? "" : " -- ", note.c_str(), elapsed);
        std::fflush(stdout);
        if (!ok) ++failures;
    }
};

bool ratio_endpoint(const MarkovGibbsMeasure& mu, const ShiftPoint& z, double target,
                    bool need_decreasing, double budget, std::string& note) {
    const auto t0 = std::chrono::steady_clock::now();
    const NestedHoleSequence seq = make_nested_cylinders(mu, z, 4, 12);
    const auto curve = discrete_ratio_curve(mu, seq);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    bool ok = true;
    double prev = std::numeric_limits<double>::infinity();
    for (const RatioPoint& p : curve) {
        const double err = std::abs(p.ratio - target);
        if (need_decreasing && err >= prev) ok = false;
        prev = err;
        if (p.n == 10 && need_decreasing && err > 0.05) ok = false;
        if (p.n == 12 && err > 0.05) ok = false;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "ratio(12) = %.6f vs %.3f in %.2fs", curve.back().ratio,
                  target, seconds);
    note = buf;
    return ok && seconds < budget && std::abs(curve.back().gamma_target - target) <= 1e-12;
}

}  // namespace

int main() {
    Gate gate;

    gate.run(1, "fair-base cylinder ratios fall monotonically onto 1/2 at the fixed point",
             [&](std::string& note) {
                 return ratio_endpoint(half(), periodic_point(full2(), W("1")), 0.5, true, 5.0,
                                       note);
             });

    gate.run(2, "biased-base cylinder ratios land on 0.7 at the fixed point",
             [&](std::string& note) {
                 return ratio_endpoint(coin(0.3), periodic_point(full2(), W("1")), 0.7, false,
                                       5.0, note);
             });

    gate.run(3, "fair-base cylinder ratios land on 0.75 at the two-cycle",
             [&](std::string& note) {
                 return ratio_endpoint(half(), periodic_point(full2(), W("12")), 0.75, false,
                                       5.0, note);
             });

    gate.run(4, "survivor curves match brute enumeration for every hole of depth <= 3",
             [&](std::string& note) {
                 const auto t0 = std::chrono::steady_clock::now();
                 int holes_checked = 0;
                 double worst = 0.0;
                 bool ok = true;
                 const std::vector<std::pair<TransitionMatrix, MarkovGibbsMeasure>> systems = {
                     {full2(), half()}, {golden(), parry()}};
                 for (const auto& [A, mu] : systems) {
                     for (int depth = 1; depth <= 3; ++depth) {
                         const std::vector<Word> words = enumerate_words(A, depth);
                         const std::size_t count = words.size();
                         for (std::size_t mask = 1; mask + 1 < (1u << count); ++mask) {
                             std::vector<Word> pick;
                             for (std::size_t i = 0; i < count; ++i)
                                 if (mask & (1u << i)) pick.push_back(words[i]);
                             const Hole H = make_hole(A, depth, pick);
                             const EscapeResult r = escape_rate_discrete(mu, H, 12);
                             const auto brute = oracle::survivor_log_brute(mu, H, 12);
                             for (int k = 0; k < 12; ++k) {
                                 const double a = r.survivor_log_measures[k], b = brute[k];
                                 if (std::isinf(a) || std::isinf(b)) {
                                     if (!(std::isinf(a) && std::isinf(b) && a < 0 && b < 0))
                                         ok = false;
                                 } else {
                                     worst = std::max(worst, std::abs(a - b));
                                 }
                             }
                             ++holes_checked;
                         }
                     }
                 }
                 const double seconds =
                     std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                         .count();
                 char buf[160];
                 std::snprintf(buf, sizeof buf, "%d holes, worst gap %.2e, %.2fs",
                               holes_checked, worst, seconds);
                 note = buf;
                 return ok && holes_checked == 270 + 38 && worst <= 1e-10 && seconds < 30.0;
             });

    gate.run(5, "tower measures verify invariance and two-sided weights on every combination",
             [&](std::string& note) {
                 int combos = 0;
                 for (const auto& mu : {half(), coin(0.3)}) {
                     for (const RoofFunction& f : {const_roof(full2(), 2.0), two_step_roof()}) {
                         for (double delta : {0.25, 0.1}) {
                             const DiscretizedRoof roof = roof_upper(f, 1, delta);
                             const SuspensionSFT S = build_suspension_sft(full2(), roof, 1);
                             const SuspensionMeasure nu = mu_tilde(mu, roof, S);
                             if (!verify_invariance(nu, 8).pass(1e-12)) return false;
                             const InducedPotential ip = induced_potential(nu, 8);
                             if (!(ip.c1 > 0.0 && ip.c1 <= ip.c2 && std::isfinite(ip.c2)))
                                 return false;
                             ++combos;
                         }
                     }
                 }
                 note = std::to_string(combos) + " base/roof/step combinations";
                 return combos == 8;
             });

    gate.run(6, "flow bracket at depth 10 overlaps its envelope tightly", [&](std::string& note) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto mu = half();
        const RoofFunction f = const_roof(full2(), 2.0);
        const Hole H = make_hole(full2(), 10, {repeat1(10)});
        const FlowEscapeResult r = escape_rate_flow(mu, f, H, params_for(f, mu, 6, 0.05));
        const double g = gamma(mu, periodic_point(full2(), W("1")));
        const double env_lo = g * r.params.integral_f / r.integral_upper;
        const double env_hi = g * r.params.integral_f / r.integral_lower;
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const double width = r.ratio_hi - r.ratio_lo;
        const double mid = 0.5 * (r.ratio_lo + r.ratio_hi);
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "ratio [%.6f, %.6f], envelope [%.6f, %.6f], %.1fs", r.ratio_lo,
                      r.ratio_hi, env_lo, env_hi, seconds);
        note = buf;
        return r.ratio_lo <= env_hi && r.ratio_hi >= env_lo && width <= 0.15 &&
               std::abs(mid - 0.5) <= 0.08 && seconds < 120.0;
    });

    gate.run(7, "variable-roof brackets contain 1/2 and tighten as the step refines",
             [&](std::string& note) {
                 const auto mu = half();
                 const RoofFunction f = two_step_roof();
                 const Hole H = make_hole(full2(), 10, {repeat1(10)});
                 double prev = std::numeric_limits<double>::infinity();
                 std::string widths;
                 for (double delta : {0.2, 0.1, 0.05}) {
                     const FlowEscapeResult r =
                         escape_rate_flow(mu, f, H, params_for(f, mu, 6, delta));
                     if (!(r.ratio_lo <= 0.5 && 0.5 <= r.ratio_hi)) return false;
                     const double width = r.ratio_hi - r.ratio_lo;
                     if (!(width < prev)) return false;
                     prev = width;
                     widths += (widths.empty() ? "widths " : ", ") + std::to_string(width);
                 }
                 note = widths;
                 return prev <= 0.08;
             });

    gate.run(8, "simulation agrees with the exact survivor mass and reruns bit-identically",
             [&](std::string& note) {
                 const auto mu = half();
                 const RoofFunction f = const_roof(full2(), 2.0);
                 const Hole H = make_hole(full2(), 6, {repeat1(6)});
                 const double exact = flow_survivor_mass_const(mu, 2.0, H, 20.0);
                 if (std::abs(exact - 0.914611816406) > 1e-9) {
                     note = "exact mass moved: " + std::to_string(exact);
                     return false;
                 }
                 const MonteCarloResult a = monte_carlo_survival(mu, f, H, 20.0, 100000, 2026);
                 const MonteCarloResult b = monte_carlo_survival(mu, f, H, 20.0, 100000, 2026);
                 char buf[160];
                 std::snprintf(buf, sizeof buf, "estimate %.6f vs exact %.6f (%.2f sigma)",
                               a.estimate, exact,
                               std::abs(a.estimate - exact) / a.std_error);
                 note = buf;
                 return a.estimate == b.estimate && a.survivors == b.survivors &&
                        std::abs(a.estimate - exact) <= 3.0 * a.std_error;
             });

    gate.run(9, "no sandwich violations across the bracket grid", [&](std::string& note) {
        const Hole H1 = make_hole(full2(), 1, {W("1")});
        int points = 0, violations = 0;
        struct System {
            MarkovGibbsMeasure mu;
            RoofFunction f;
            bool constant;
        };
        const std::vector<System> systems = {{half(), const_roof(full2(), 2.0), true},
                                             {coin(0.3), const_roof(full2(), 2.0), true},
                                             {half(), two_step_roof(), false}};
        for (const System& sys : systems) {
            for (double delta : {0.25, 0.1}) {
                const DiscretizedRoof up = roof_upper(sys.f, 1, delta);
                const DiscretizedRoof lo = roof_lower(sys.f, 1, delta);
                const SuspensionMeasure nu_up =
                    mu_tilde(sys.mu, up, build_suspension_sft(full2(), up, 1));
                const SuspensionMeasure nu_lo =
                    mu_tilde(sys.mu, lo, build_suspension_sft(full2(), lo, 1));
                for (double t : {2.1, 5.0, 10.7, 20.0}) {
                    const FlowSurvivorBounds b = flow_survivor_bounds(nu_up, nu_lo, H1, t);
                    ++points;
                    if (b.lower > b.upper) ++violations;
                    if (sys.constant) {
                        const double exact =
                            std::log(flow_survivor_mass_const(sys.mu, 2.0, H1, t));
                        if (exact < b.lower - 1e-12 || exact > b.upper + 1e-12) ++violations;
                    } else {
                        const MonteCarloResult mc =
                            monte_carlo_survival(sys.mu, sys.f, H1, t, 20000, 11);
                        const double slack = 3.0 * std::max(mc.std_error, 1e-4);
                        if (mc.estimate < std::exp(b.lower) - slack ||
                            mc.estimate > std::exp(b.upper) + slack)
                            ++violations;
                    }
                }
            }
        }
        note = std::to_string(points) + " grid points, " + std::to_string(violations) +
               " violations";
        return points == 24 && violations == 0;
    });

    gate.run(10, "generated hole families certify cleanly; corrupted ones fail where intended",
             [&](std::string& note) {
                 const auto mu = half();
                 // honest families across three kinds of target
                 const std::vector<ShiftPoint> targets = {
                     periodic_point(full2(), W("1")), periodic_point(full2(), W("12")),
                     ShiftPoint{W("12112111211112"), {}}};
                 for (const ShiftPoint& z : targets) {
                     const NestedHoleSequence seq = make_nested_cylinders(mu, z, 1, 12);
                     if (!validate_nested(seq, mu).all_pass()) return false;
                 }
                 const NestedHoleSequence seq3 =
                     make_nested_cylinders(coin(0.3), periodic_point(full2(), W("1")), 1, 12);
                 if (!validate_nested(seq3, coin(0.3)).all_pass()) return false;

                 // each corruption must trip exactly its own check
                 const ShiftPoint z1 = periodic_point(full2(), W("1"));
                 const auto trips_exactly = [&](const NestedHoleSequence& seq, int item) {
                     const NestedReport rep = validate_nested(seq, mu);
                     for (const NestedCheck& c : rep.items) {
                         if (c.item == item && c.pass) return false;
                         if (c.item != item && !c.pass) return false;
                     }
                     return true;
                 };

                 NestedHoleSequence bad2 = make_nested_cylinders(mu, z1, 1, 6);
                 bad2.holes[2] = make_hole(full2(), 3, {W("112")});
                 bad2.l[2] = 2;
                 if (!trips_exactly(bad2, 2)) return false;

                 NestedHoleSequence bad3 = make_nested_cylinders(mu, z1, 1, 6);
                 bad3.c = 1e-6;
                 bad3.rho = 0.01;
                 if (!trips_exactly(bad3, 3)) return false;

                 NestedHoleSequence bad4 = make_nested_cylinders(mu, z1, 1, 6);
                 bad4.kappa = 0.9;
                 for (std::size_t i = 0; i < bad4.l.size(); ++i)
                     bad4.l[i] = static_cast<int>(i + 2) / 2;
                 if (!trips_exactly(bad4, 4)) return false;

                 note = "4 families pass, 3 corruptions isolated";
                 return true;
             });

    std::printf("%s: %d of 10 criteria failed\n", gate.failures ? "GATE FAIL" : "GATE PASS",
                gate.failures);
    return gate.failures ? 1 : 0;
}
