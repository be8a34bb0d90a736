#pragma once

// Escape through a hole placed on the base copy of the suspension: survivor
// masses and escape rates of the open tower chains, the two-sided flow
// bracket, the rate-over-measure curve toward the escape weight of the
// target, and the Monte Carlo cross-check of the flow survivor mass.

#include <cstdint>

#include "escape/open_system.hpp"
#include "escape/suspension.hpp"

namespace escape {

// Keep mask over tower states: drops (w, 0) when w starts in the hole.
// Throws DepthMismatchError when the hole is deeper than the tower blocks.
std::vector<std::uint8_t> flow_hole_mask(const SuspensionSFT& S, const Hole& H);

// Survivor log-masses of the open tower chain at k = 1..k_max masked steps,
// started from the stationary tower measure.
std::vector<double> tower_survivor_curve(const SuspensionMeasure& nu, const Hole& H, int k_max,
                                         kernels::Exec exec = kernels::Exec::parallel);

// Log-mass bracket for the flow survivor set at time t: the lower tower's
// curve at ceil(t/delta) shifted down by log 2, the upper tower's curve at
// floor(t/delta) shifted up by log 2.
struct FlowSurvivorBounds {
    double lower = 0.0, upper = 0.0;
    int k_lower = 0, k_upper = 0;
};
FlowSurvivorBounds flow_survivor_bounds(const SuspensionMeasure& upper_tower,
                                        const SuspensionMeasure& lower_tower, const Hole& H,
                                        double t,
                                        kernels::Exec exec = kernels::Exec::parallel);

// Escape-rate bracket for the flow with hole H x {0}: rate_lower comes from
// the upper step roof's tower, rate_upper from the lower one's, each as
// -log(spectral radius of the masked tower chain) / delta. The ratios divide
// the rates by hole_measure / integral_f.
struct FlowEscapeResult {
    DiscretizationParams params;
    double integral_upper = 0.0;  // integral of the upper step roof
    double integral_lower = 0.0;  // integral of the lower step roof
    double rate_lower = 0.0;
    double rate_upper = 0.0;
    double hole_measure = 0.0;  // base measure of the hole words
    double slab_measure = 0.0;  // unit-height slab: hole_measure / integral_f
    double ratio_lo = 0.0, ratio_hi = 0.0;
    bool full_escape = false;
};

FlowEscapeResult escape_rate_flow(const MarkovGibbsMeasure& mu, const RoofFunction& f,
                                  const Hole& H, const DiscretizationParams& params,
                                  const kernels::EigenOptions& opt = {});

// One hole-family row: the flow bracket for I_n with the limit candidates,
// gamma(z) scaled by integral_f over each step-roof integral.
struct FlowRatioPoint {
    int n = 0;
    FlowEscapeResult flow;
    double gamma_target = 1.0;
    double envelope_lo = 0.0, envelope_hi = 0.0;
};

std::vector<FlowRatioPoint> theorem_a_curve(const MarkovGibbsMeasure& mu, const RoofFunction& f,
                                            const NestedHoleSequence& seq,
                                            const DiscretizationParams& params,
                                            const kernels::EigenOptions& opt = {});

// Direct simulation of the flow survivor fraction at time t: points sampled
// from the normalized product measure, killed at the first base crossing that
// lands in the hole. Fixed 64-way sharding keeps reruns byte-identical for
// any thread count.
struct MonteCarloResult {
    double estimate = 0.0;
    double std_error = 0.0;  // binomial
    std::uint64_t survivors = 0;
    std::uint64_t samples = 0;
    int horizon = 0;  // symbols generated per sample
};

MonteCarloResult monte_carlo_survival(const MarkovGibbsMeasure& mu, const RoofFunction& f,
                                      const Hole& H, double t, std::uint64_t samples,
                                      std::uint64_t seed,
                                      kernels::Exec exec = kernels::Exec::parallel);

// Exact flow survivor mass for a constant roof c: heights split each orbit
// into floor or ceiling many base crossings, so the mass interpolates the
// discrete survivor curve: [s* S(J) + (c - s*) S(J+1)] / c with J = floor(t/c),
// s* = (J+1)c - t.
double flow_survivor_mass_const(const MarkovGibbsMeasure& mu, double roof_value, const Hole& H,
                                double t, kernels::Exec exec = kernels::Exec::parallel);

}  // namespace escape
