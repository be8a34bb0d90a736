#pragma once

// Open systems on the shift: holes (finite unions of equal-depth cylinders),
// survivor-set measures and escape rates through a hole, nested hole
// sequences shrinking to a target point with their five-condition validator,
// and the per-n escape-rate/hole-measure ratio curve.

#include <string>
#include <vector>

#include "escape/gibbs.hpp"
#include "escape/sft.hpp"

namespace escape {

struct Hole {
    int depth = 1;
    std::vector<Word> words;  // sorted, distinct, admissible depth-words
};

// Validates: words admissible, of length `depth`, deduplicated, nonempty,
// and a proper subset of all depth-words.
Hole make_hole(const TransitionMatrix& A, int depth, std::vector<Word> words);

// Does the cylinder of w (|w| >= depth) lie inside H?
bool hole_contains(const Hole& H, const Word& w);

struct EscapeResult {
    std::vector<double> survivor_log_measures;  // K at k = 1..k_max; -inf once empty
    double open_eigenvalue = 0.0;  // leading eigenvalue of the row-masked weighted operator
    double rate = 0.0;             // pressure - log(open_eigenvalue); +inf on full escape
    double rate_chain = 0.0;       // -log spectral radius of the masked probability chain
    bool full_escape = false;      // masked operator nilpotent
};

// K at exactly k masked steps (log measure of the k-step survivor set).
double survivor_log_measure(const MarkovGibbsMeasure& mu, const Hole& H, int k,
                            kernels::Exec exec = kernels::Exec::parallel);
// K at k = 1..k_max in one recursion.
std::vector<double> survivor_log_curve(const MarkovGibbsMeasure& mu, const Hole& H, int k_max,
                                       kernels::Exec exec = kernels::Exec::parallel);

// Escape rate through H, spectrally, plus the finite-k survivor diagnostics.
EscapeResult escape_rate_discrete(const MarkovGibbsMeasure& mu, const Hole& H, int k_max = 64,
                                  const kernels::EigenOptions& opt = {});

// Shrinking hole family around a target point, with the decay/depth constants
// the validator checks: measures bounded by c*rho^n, holes inside [z]_{l_n)
// with kappa < l_n/n <= 1.
struct NestedHoleSequence {
    ShiftPoint z;  // empty tail = declared-aperiodic target
    int n_min = 1;
    std::vector<Hole> holes;  // depth n_min + i
    std::vector<int> l;       // support depth per hole
    double c = 0.0, rho = 0.0, kappa = 0.0;

    int n_max() const { return n_min + static_cast<int>(holes.size()) - 1; }
    const Hole& at(int n) const;
    int l_at(int n) const;
};

// The single-cylinder family I_n = [z]_n with fitted constants
// (rho = max successive measure ratio + slack, c scaled to cover the range).
NestedHoleSequence make_nested_cylinders(const MarkovGibbsMeasure& mu, const ShiftPoint& z,
                                         int n_min, int n_max);

struct NestedCheck {
    int item = 0;            // 1..5
    bool applicable = true;  // item 5 is vacuous for aperiodic targets
    bool pass = false;
    int witness_n = 0;       // failing n, or the threshold n0 for item 5
    std::string note;
};

struct NestedReport {
    std::vector<NestedCheck> items;
    bool all_pass() const;
};

// Checks, on the stored finite range: (1) depths and cylinder structure,
// (2) nesting and z-membership, (3) measure decay mu(I_n) <= c*rho^n with
// 0 < rho < 1, (4) I_n inside [z]_{l_n} with kappa < l_n/n <= 1, and
// (5) for periodic z of prime period p, sigma^{-p}(I_n) cap [z]_p inside I_n
// from some n0 in range onward.
NestedReport validate_nested(const NestedHoleSequence& seq, const MarkovGibbsMeasure& mu);

struct RatioPoint {
    int n = 0;
    double rate = 0.0;
    double lambda_open = 0.0;
    double hole_measure = 0.0;
    double ratio = 0.0;  // rate / hole_measure
    double gamma_target = 0.0;
};

// Escape rate over hole measure per n, with the escape weight of the target
// alongside; per-n solves are independent.
std::vector<RatioPoint> discrete_ratio_curve(const MarkovGibbsMeasure& mu,
                                             const NestedHoleSequence& seq, int k_max = 8,
                                             const kernels::EigenOptions& opt = {});

}  // namespace escape
