#pragma once

// Thermodynamic formalism on a primitive SFT: weighted transfer matrices,
// pressure, the induced stationary Markov chain (the equilibrium state of a
// locally constant potential), empirical two-sided cylinder bounds, and the
// escape weight of a target point.

#include <cmath>
#include <cstdint>
#include <vector>

#include "escape/kernels.hpp"
#include "escape/sft.hpp"

namespace escape {

// stationary Markov chain on admissible L-words
struct BlockChain {
    int L = 1;
    std::vector<Word> states;      // lexicographic
    kernels::Sparse Q;             // row-stochastic transition matrix
    std::vector<double> pi;        // stationary distribution, pi Q = pi

    int index(const Word& w) const;  // -1 when not a state
};

// weighted transfer matrix e^{phi(u)} on the depth(phi)-block presentation
struct TransferOperator {
    Recode recode;
    kernels::Sparse M;             // M(u,v) = e^{phi(u)} when u -> v
    double lambda = 0.0;           // leading eigenvalue
    double pressure = 0.0;         // log lambda
    std::vector<double> right;     // max entry 1
    std::vector<double> left;      // normalized so left . right = 1
    int iterations = 0;
};

TransferOperator build_transfer(const TransitionMatrix& A, const LocallyConstantFunction& phi,
                                const kernels::EigenOptions& opt = {});

double pressure(const TransitionMatrix& A, const LocallyConstantFunction& phi,
                const kernels::EigenOptions& opt = {});

// the equilibrium measure of phi, realized as a stationary Markov chain on
// depth(phi)-blocks: Q(u,v) = M(u,v) r_v / (lambda r_u), pi_u = l_u r_u
class MarkovGibbsMeasure {
  public:
    MarkovGibbsMeasure() = default;

    const TransitionMatrix& alphabet_matrix() const { return A_; }
    const LocallyConstantFunction& potential() const { return phi_; }
    const TransferOperator& transfer() const { return op_; }
    double pressure_value() const { return op_.pressure; }
    int block_depth() const { return chain_.L; }
    const BlockChain& chain() const { return chain_; }

    // measure of the cylinder of w, any length >= 1
    double cylinder(const Word& w) const;
    // integral of a locally constant function
    double integral(const LocallyConstantFunction& f) const;
    // the same measure presented as a chain on L-blocks, L >= depth(phi)
    BlockChain block_chain(int L) const;

  private:
    friend MarkovGibbsMeasure equilibrium_state(const TransitionMatrix&,
                                                const LocallyConstantFunction&,
                                                const kernels::EigenOptions&);
    TransitionMatrix A_;
    LocallyConstantFunction phi_;
    TransferOperator op_;
    BlockChain chain_;
};

MarkovGibbsMeasure equilibrium_state(const TransitionMatrix& A,
                                     const LocallyConstantFunction& phi,
                                     const kernels::EigenOptions& opt = {});

// Extremes of mu([x]_n) / exp(-P n + S_n phi(x)) over all cylinders with
// n <= n_max. S_n phi needs n + depth - 1 symbols, so the scan runs over
// that many; the bounds are exact for the scanned range.
struct GibbsCertificate {
    int n_max = 0;
    double c1 = 0.0, c2 = 0.0;   // observed two-sided constants
    Word arg_min, arg_max;       // witnesses (extended words)
    bool two_sided() const { return c1 > 0.0 && std::isfinite(c2); }
};

GibbsCertificate certify_gibbs(const MarkovGibbsMeasure& mu, int n_max,
                               kernels::Exec exec = kernels::Exec::parallel);

// Escape weight of a target point z: 1 for a point with no period, else
// 1 - exp(S_p phi(z) - p P) with p the prime period. Lands in [0,1].
double gamma(const MarkovGibbsMeasure& mu, const ShiftPoint& z);

}  // namespace escape
