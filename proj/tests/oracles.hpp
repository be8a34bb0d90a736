#pragma once

// Reference computations used only by the tests. Everything here is a plain
// dense recursion over enumerated words: no sparse kernels, no eigensolver,
// no shared code with the library paths under test.

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <vector>

#include "escape/gibbs.hpp"
#include "escape/open_system.hpp"
#include "escape/sft.hpp"

namespace oracle {

using escape::Word;

// total potential weight of a finite word: sum of phi over every fully
// determined window
inline double word_weight(const escape::LocallyConstantFunction& phi, const Word& u) {
    const int d = phi.depth();
    double s = 0.0;
    for (std::size_t j = 0; j + d <= u.size(); ++j)
        s += phi.value(Word(u.begin() + j, u.begin() + j + d));
    return std::exp(s);
}

// mu([w]) as the limit of weighted path-count ratios over long words that
// pass through w far from BOTH ends: a forward total-weight vector and a
// backward one are marched independently and paired at the junction block,
// so the starting and ending symbols are weighted the way arbitrarily long
// words weight them. One-sided counting (growing only to the right of w)
// would converge to the wrong limit whenever the starts of long admissible
// words are not equidistributed.
inline double cylinder_by_path_counts(const escape::TransitionMatrix& A,
                                      const escape::LocallyConstantFunction& phi, const Word& w,
                                      double tol = 1e-13, int cap = 4000) {
    const int dphi = phi.depth();
    const int D = std::max<int>(static_cast<int>(w.size()), dphi);
    const auto blocks = escape::enumerate_words(A, D);
    const int B = static_cast<int>(blocks.size());

    std::vector<std::vector<int>> succ(B);
    std::vector<double> stepw(B);  // weight of the one window a forward step completes
    std::vector<char> has_prefix(B, 0);
    for (int i = 0; i < B; ++i) {
        stepw[i] = std::exp(phi.value(Word(blocks[i].end() - dphi, blocks[i].end())));
        has_prefix[i] = std::equal(w.begin(), w.end(), blocks[i].begin()) ? 1 : 0;
        for (int j = 0; j < B; ++j) {
            Word join = blocks[i];
            join.push_back(blocks[j].back());
            if (std::equal(blocks[i].begin() + 1, blocks[i].end(), blocks[j].begin()) &&
                escape::admissible(A, join))
                succ[i].push_back(j);
        }
    }

    // fwd[u]: total weight of words ending in block u; bwd[u]: total weight
    // added by words continuing out of u (the window inside u itself is
    // already counted on the forward side)
    std::vector<double> fwd(B), bwd(B, 1.0);
    for (int i = 0; i < B; ++i) fwd[i] = word_weight(phi, blocks[i]);

    double ratio = std::numeric_limits<double>::quiet_NaN();
    int stable = 0;
    for (int it = 0; it < cap; ++it) {
        std::vector<double> f2(B, 0.0), b2(B, 0.0);
        for (int i = 0; i < B; ++i)
            for (int j : succ[i]) {
                f2[j] += fwd[i] * stepw[j];
                b2[i] += stepw[j] * bwd[j];
            }
        double zf = 0.0, zb = 0.0;
        for (int i = 0; i < B; ++i) {
            zf += f2[i];
            zb += b2[i];
        }
        if (zf <= 0.0 || zb <= 0.0) throw std::runtime_error("all paths died");
        double num = 0.0, den = 0.0;
        for (int i = 0; i < B; ++i) {
            fwd[i] = f2[i] / zf;
            bwd[i] = b2[i] / zb;
            const double mass = fwd[i] * bwd[i];
            den += mass;
            if (has_prefix[i]) num += mass;
        }
        const double r = num / den;
        stable = std::abs(r - ratio) <= tol ? stable + 1 : 0;
        ratio = r;
        if (stable >= 5) return ratio;
    }
    throw std::runtime_error("path-count ratio did not settle");
}

// Brute-force survivor masses: enumerate every word long enough to decide
// the first k_max windows, bucket each by its first window inside the hole,
// and take suffix sums. Entry k-1 is log mu{first k windows all miss}.
inline std::vector<double> survivor_log_brute(const escape::MarkovGibbsMeasure& mu,
                                              const escape::Hole& H, int k_max) {
    const int n = H.depth;
    const std::set<Word> hole(H.words.begin(), H.words.end());
    std::vector<double> bucket(static_cast<std::size_t>(k_max) + 1, 0.0);
    for (const Word& u : escape::enumerate_words(mu.alphabet_matrix(), k_max + n - 1)) {
        int first_bad = k_max;
        for (int j = 0; j < k_max; ++j) {
            if (hole.count(Word(u.begin() + j, u.begin() + j + n))) {
                first_bad = j;
                break;
            }
        }
        bucket[first_bad] += mu.cylinder(u);
    }
    std::vector<double> out(k_max);
    double tail = 0.0;
    for (int k = k_max; k >= 1; --k) {
        tail += bucket[k];
        out[k - 1] = tail > 0.0 ? std::log(tail) : -std::numeric_limits<double>::infinity();
    }
    return out;
}

}  // namespace oracle
