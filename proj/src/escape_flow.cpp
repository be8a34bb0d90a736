#include "escape/escape_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace escape {

namespace {

using kernels::Sparse;

constexpr double kInf = std::numeric_limits<double>::infinity();

double step_roof_integral(const MarkovGibbsMeasure& mu, const DiscretizedRoof& roof) {
    double s = 0.0;
    for (std::size_t i = 0; i < roof.words.size(); ++i)
        s += roof.levels[i] * roof.delta * mu.cylinder(roof.words[i]);
    return s;
}

// escape rate of one open tower, in flow time units
double tower_flow_rate(const MarkovGibbsMeasure& mu, const DiscretizedRoof& roof, const Hole& H,
                       int block_depth, const kernels::EigenOptions& opt) {
    const SuspensionSFT S = build_suspension_sft(mu.alphabet_matrix(), roof, block_depth);
    const SuspensionMeasure nu(mu, roof, S);
    const std::vector<std::uint8_t> keep = flow_hole_mask(S, H);
    const Sparse open_chain = kernels::restrict_states(nu.transition_matrix(), keep);
    const double rho = kernels::spectral_radius(open_chain, opt);
    if (rho <= 0.0) return kInf;
    return -std::log(rho) / roof.delta;
}

}  // namespace

std::vector<std::uint8_t> flow_hole_mask(const SuspensionSFT& S, const Hole& H) {
    if (H.depth > S.block_depth)
        throw DepthMismatchError("hole depth " + std::to_string(H.depth) +
                                 " exceeds the tower block depth " +
                                 std::to_string(S.block_depth));
    std::vector<std::uint8_t> keep(static_cast<std::size_t>(S.state_count()), 1);
    for (std::size_t wi = 0; wi < S.base_words.size(); ++wi)
        if (hole_contains(H, S.base_words[wi]))
            keep[static_cast<std::size_t>(S.offset[wi])] = 0;
    return keep;
}

std::vector<double> tower_survivor_curve(const SuspensionMeasure& nu, const Hole& H, int k_max,
                                         kernels::Exec exec) {
    const std::vector<std::uint8_t> keep = flow_hole_mask(nu.tower(), H);
    return kernels::survivor_log_masses(nu.transition_matrix(), nu.state_measures(), keep,
                                        k_max, exec);
}

FlowSurvivorBounds flow_survivor_bounds(const SuspensionMeasure& upper_tower,
                                        const SuspensionMeasure& lower_tower, const Hole& H,
                                        double t, kernels::Exec exec) {
    const double delta = upper_tower.delta();
    if (std::abs(lower_tower.delta() - delta) > 1e-15)
        throw ValidationError("towers were discretized with different deltas");
    if (!(t > 0.0)) throw ValidationError("bracket time must be positive");

    FlowSurvivorBounds out;
    out.k_lower = static_cast<int>(std::ceil(t / delta));
    out.k_upper = static_cast<int>(std::floor(t / delta));
    const std::vector<double> lo = tower_survivor_curve(lower_tower, H, out.k_lower, exec);
    out.lower = lo[static_cast<std::size_t>(out.k_lower) - 1] - std::log(2.0);
    if (out.k_upper == 0) {
        out.upper = std::log(2.0);
    } else {
        const std::vector<double> up = tower_survivor_curve(upper_tower, H, out.k_upper, exec);
        out.upper = up[static_cast<std::size_t>(out.k_upper) - 1] + std::log(2.0);
    }
    return out;
}

FlowEscapeResult escape_rate_flow(const MarkovGibbsMeasure& mu, const RoofFunction& f,
                                  const Hole& H, const DiscretizationParams& params,
                                  const kernels::EigenOptions& opt) {
    const int block_depth = std::max({params.m, H.depth, mu.block_depth()});
    const DiscretizedRoof up = roof_upper(f, params.m, params.delta);
    const DiscretizedRoof lo = roof_lower(f, params.m, params.delta);

    FlowEscapeResult out;
    out.params = params;
    out.integral_upper = step_roof_integral(mu, up);
    out.integral_lower = step_roof_integral(mu, lo);
    out.rate_lower = tower_flow_rate(mu, up, H, block_depth, opt);
    out.rate_upper = tower_flow_rate(mu, lo, H, block_depth, opt);
    out.full_escape = std::isinf(out.rate_lower) || std::isinf(out.rate_upper);

    out.hole_measure = 0.0;
    for (const Word& w : H.words) out.hole_measure += mu.cylinder(w);
    out.slab_measure = out.hole_measure / params.integral_f;
    out.ratio_lo = out.rate_lower / out.slab_measure;
    out.ratio_hi = out.rate_upper / out.slab_measure;
    return out;
}

std::vector<FlowRatioPoint> theorem_a_curve(const MarkovGibbsMeasure& mu, const RoofFunction& f,
                                            const NestedHoleSequence& seq,
                                            const DiscretizationParams& params,
                                            const kernels::EigenOptions& opt) {
    const double g = gamma(mu, seq.z);
    std::vector<FlowRatioPoint> out;
    for (int n = seq.n_min; n <= seq.n_max(); ++n) {
        FlowRatioPoint p;
        p.n = n;
        p.flow = escape_rate_flow(mu, f, seq.at(n), params, opt);
        p.gamma_target = g;
        p.envelope_lo = g * params.integral_f / p.flow.integral_upper;
        p.envelope_hi = g * params.integral_f / p.flow.integral_lower;
        out.push_back(std::move(p));
    }
    return out;
}

MonteCarloResult monte_carlo_survival(const MarkovGibbsMeasure& mu, const RoofFunction& f,
                                      const Hole& H, double t, std::uint64_t samples,
                                      std::uint64_t seed, kernels::Exec exec) {
    if (!(t >= 0.0)) throw ValidationError("simulation time must be >= 0");
    if (samples == 0) throw ValidationError("need at least one sample");
    const double max_f = f.f.max_value();
    const int crossings =
        std::max(static_cast<int>(std::ceil(t)) + 2,
                 static_cast<int>(std::ceil((t + max_f) / f.min_value)) + 1);
    const int horizon = crossings + std::max(H.depth, f.f.depth()) + 1;
    const int depth = H.depth;

    constexpr int kShards = 64;
    auto shard_fn = [&](int shard, std::uint64_t shard_seed) -> std::uint64_t {
        std::uint64_t quota = samples / kShards + (static_cast<std::uint64_t>(shard) < samples % kShards ? 1 : 0);
        FlowSampler sampler(mu, f, shard_seed, horizon);
        std::uint64_t alive = 0;
        Word window(static_cast<std::size_t>(depth));
        for (std::uint64_t i = 0; i < quota; ++i) {
            const FlowPoint p = sampler.sample();
            bool dead = false;
            double acc = 0.0;  // Birkhoff sum of the roof along the orbit
            for (int j = 0; j + 1 + depth <= static_cast<int>(p.x.prefix.size()); ++j) {
                acc += f.f.value_at(p.x, static_cast<std::size_t>(j));
                if (acc - p.height > t) break;  // next crossing is already past t
                window.assign(p.x.prefix.begin() + j + 1, p.x.prefix.begin() + j + 1 + depth);
                if (hole_contains(H, window)) {
                    dead = true;
                    break;
                }
            }
            if (!dead) ++alive;
        }
        return alive;
    };

    MonteCarloResult out;
    out.samples = samples;
    out.horizon = horizon;
    out.survivors = kernels::sharded_count(kShards, seed, shard_fn, exec);
    out.estimate = static_cast<double>(out.survivors) / static_cast<double>(samples);
    out.std_error =
        std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(samples));
    return out;
}

double flow_survivor_mass_const(const MarkovGibbsMeasure& mu, double roof_value, const Hole& H,
                                double t, kernels::Exec exec) {
    if (!(roof_value > 0.0)) throw ValidationError("roof value must be positive");
    if (!(t >= 0.0)) throw ValidationError("time must be >= 0");
    const double c = roof_value;
    const int J = static_cast<int>(std::floor(t / c));
    const double s_star = (J + 1) * c - t;  // heights with only J crossings by time t
    const std::vector<double> curve = survivor_log_curve(mu, H, J + 1, exec);
    auto S = [&](int k) { return k == 0 ? 1.0 : std::exp(curve[static_cast<std::size_t>(k) - 1]); };
    return (s_star * S(J) + (c - s_star) * S(J + 1)) / c;
}

}  // namespace escape
