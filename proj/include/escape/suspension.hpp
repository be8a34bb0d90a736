#pragma once

// Special semi-flow under a roof function and its discretization: step roofs
// bounding f from above/below on m-cylinders, the (word, level) tower shift,
// its invariant measure with the level-0 projection, invariance verification,
// the induced potential scan, exact flow advance, and a seeded flow sampler.

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "escape/gibbs.hpp"
#include "escape/sft.hpp"

namespace escape {

struct RoofFunction {
    LocallyConstantFunction f;
    double min_value = 0.0;

    // validates min > 1, as the flow construction requires
    static RoofFunction from(const LocallyConstantFunction& f);
    double epsilon() const { return min_value - 1e-9; }  // any positive bound below f works
    double value(const Word& w) const { return f.value(w); }
};

// eta(m) = |f|_theta * theta^m, the oscillation modulus on m-cylinders
double eta(const LocallyConstantFunction& f, int m);

struct DiscretizationParams {
    int m = 1;
    double delta = 0.0;
    double eta_m = 0.0;
    double integral_f = 0.0;  // against the reference measure used to choose them
};

// Largest usable delta <= delta_request (capped by epsilon/3 and by the
// feasibility constraint 2*delta + eta(m) < 0.5*integral f) with the smallest
// depth m >= depth(f) making the constraint hold. Throws InfeasibleError when
// no pair with delta >= 1e-6 works.
DiscretizationParams choose_discretization(const RoofFunction& f, const MarkovGibbsMeasure& mu,
                                           double delta_request);

// Step roof, constant on m-cylinders, values exact integer multiples of delta.
struct DiscretizedRoof {
    int m = 1;
    double delta = 0.0;
    std::vector<Word> words;  // admissible m-words, lexicographic
    std::vector<int> levels;  // value = levels[i] * delta

    int level_count(const Word& w) const;  // by m-prefix
    double value(const Word& w) const { return level_count(w) * delta; }
    int min_levels() const;
    int max_levels() const;
};

// f_bar(w) = (floor(sup f on [w]_m / delta) + 2) * delta
DiscretizedRoof roof_upper(const RoofFunction& f, int m, double delta);
// f_under(w) = (floor(inf f on [w]_m / delta) - 2) * delta; throws
// NonPositiveLowerError when any value drops to <= 0
DiscretizedRoof roof_lower(const RoofFunction& f, int m, double delta);

// The tower SFT: states (block word, level), level < roof(word)/delta.
// Interior states step up one level under the same word; top states jump to
// level 0 of every admissible one-step shift of the word.
struct SuspensionSFT {
    int block_depth = 1;  // >= roof depth m; holes may force deeper blocks
    double delta = 0.0;
    std::vector<Word> base_words;
    std::vector<int> fiber_levels;  // roof(word)/delta per base word
    std::vector<int> offset;        // state id of (word, 0); size words+1
    kernels::Sparse adjacency;      // 0/1
    int period = 1;                 // gcd of cycle lengths (1 = aperiodic)

    int state_count() const { return adjacency.n; }
    int index(int word_index, int level) const { return offset[word_index] + level; }
    std::pair<int, int> unpack(int state) const;  // (word_index, level)
};

// Builds and validates the tower: strongly connected or throws NotPrimitiveError;
// the cycle period (= gcd of fiber heights reachable) is recorded.
SuspensionSFT build_suspension_sft(const TransitionMatrix& A, const DiscretizedRoof& roof,
                                   int block_depth);

// Projection of a tower word to the base symbols it determines, with the
// level-0 count: #w = interior zero-levels + 1. Validates adjacency.
struct TowerProjection {
    Word base;  // block_depth + (#w - 1) determined symbols
    int count = 1;
};
TowerProjection pi_tilde(const SuspensionSFT& S, const std::vector<int>& states);

// Invariant probability on the tower: each state (w,k) carries
// delta * mu([w]) / integral(f*), and a cylinder of tower states carries the
// base measure of the word it determines, scaled the same way.
class SuspensionMeasure {
  public:
    SuspensionMeasure() = default;
    SuspensionMeasure(const MarkovGibbsMeasure& mu, const DiscretizedRoof& roof,
                      const SuspensionSFT& S);

    const SuspensionSFT& tower() const { return S_; }
    const MarkovGibbsMeasure& base() const { return mu_; }
    const DiscretizedRoof& roof() const { return roof_; }
    double normalizer() const { return integral_star_; }  // integral of the step roof
    double delta() const { return S_.delta; }

    double state_measure(int state) const;
    double cylinder(const std::vector<int>& states) const;
    std::vector<double> state_measures() const;  // indexed by state id
    // the tower Markov chain: interior steps probability 1, top steps follow
    // the base block chain
    kernels::Sparse transition_matrix() const;

  private:
    MarkovGibbsMeasure mu_;
    DiscretizedRoof roof_;
    SuspensionSFT S_;
    double integral_star_ = 0.0;
    BlockChain block_;  // base chain at the tower's block depth
};

SuspensionMeasure mu_tilde(const MarkovGibbsMeasure& mu, const DiscretizedRoof& roof,
                           const SuspensionSFT& S);

// Kolmogorov-consistency scan over all tower cylinders up to length L:
// total single-state mass, right-extension sums, left-extension sums.
struct InvarianceReport {
    double total_mass_error = 0.0;
    double max_right_error = 0.0;
    double max_left_error = 0.0;
    long cylinders_checked = 0;
    bool pass(double tol = 1e-12) const {
        return total_mass_error <= tol && max_right_error <= tol && max_left_error <= tol;
    }
};
InvarianceReport verify_invariance(const SuspensionMeasure& nu, int L);

// The base potential read through the projection, with the two-sided bound
// scan for the tower measure: ratio of each tower cylinder to the base Gibbs
// weight of its determined word.
struct InducedPotential {
    std::vector<double> values;       // per tower state
    std::vector<double> oscillation;  // V_n over tower n-cylinders, n = 0..scan
    double c1 = 0.0, c2 = 0.0;        // extremal ratios over the scan
    int scan_length = 0;
};
InducedPotential induced_potential(const SuspensionMeasure& nu, int L);

// ------------------------------------------------------------------- flow

struct FlowPoint {
    ShiftPoint x;
    double height = 0.0;
};

struct FlowStep {
    FlowPoint p;
    int shifts = 0;
};

// Advance t units of flow time: climb, jump by the shift at the roof.
FlowStep flow_map(const RoofFunction& f, const FlowPoint& p, double t);

// Seeded sampler for the normalized measure mu x Lebesgue / integral(f):
// base word of `horizon` symbols from the stationary chain, height by
// rejection against the roof. One instance per thread of use.
class FlowSampler {
  public:
    FlowSampler(const MarkovGibbsMeasure& mu, const RoofFunction& f, std::uint64_t seed,
                int horizon);
    FlowPoint sample();

  private:
    double uniform();  // in [0,1)
    const MarkovGibbsMeasure* mu_;
    const RoofFunction* f_;
    int horizon_;
    double max_f_;
    std::mt19937_64 rng_;
};

}  // namespace escape
