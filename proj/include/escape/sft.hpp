#pragma once

// One-sided subshifts of finite type over a finite alphabet {1..a}:
// transition matrices, admissible words, eventually periodic points,
// the theta-metric and locally constant (finite depth) functions.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "escape/errors.hpp"

namespace escape {

using Symbol = std::uint8_t;          // 1-based symbol, 1..alphabet_size
using Word = std::vector<Symbol>;

// default cap on enumerated words; guards against runaway depth requests
constexpr std::uint64_t kEnumerationCap = 10'000'000;

std::string word_to_string(const Word& w);
Word word_from_string(const std::string& s, int alphabet_size);

// ---------------------------------------------------------------- matrices

struct TransitionMatrix {
    int a = 0;                        // alphabet size
    std::vector<std::uint8_t> bits;   // a*a, row major, 0/1
    // minimal d with A^d entrywise positive, when it has been computed
    std::optional<int> exponent;

    bool at(int i, int j) const { return bits[static_cast<std::size_t>(i) * a + j] != 0; }
};

// Checks shape, 0/1 entries, no stranded symbol (empty row or column),
// and primitivity via boolean powers up to the Wielandt bound (a-1)^2 + 1.
TransitionMatrix validate_transition_matrix(const std::vector<std::vector<int>>& rows);

// Exact count of admissible n-words (column sums of A^(n-1)), saturating at 2^63.
std::uint64_t count_words(const TransitionMatrix& A, int n);

// All admissible n-words in lexicographic order. Throws LengthOverflowError
// if the count exceeds the cap.
std::vector<Word> enumerate_words(const TransitionMatrix& A, int n,
                                  std::uint64_t cap = kEnumerationCap);

// Is w admissible (every adjacent pair allowed)?
bool admissible(const TransitionMatrix& A, const Word& w);

// ---------------------------------------------------------------- recoding

// The higher-block presentation: states are admissible m-words, with an edge
// u -> v exactly when u and v overlap in m-1 symbols and the joined
// (m+1)-word is admissible. Conjugate to the original shift.
struct Recode {
    int m = 1;
    TransitionMatrix matrix;          // over the m-word alphabet; exponent left unset
    std::vector<Word> states;         // lexicographic m-words
    int index(const Word& w) const;   // -1 if not a state
};

Recode higher_block_recode(const TransitionMatrix& A, int m,
                           std::uint64_t cap = kEnumerationCap);

// ------------------------------------------------------------------ points

// A point of the shift given by finitely many known symbols plus an optional
// repeating tail. Empty tail declares "known prefix only": evaluation past
// the prefix throws PrefixExhaustedError.
struct ShiftPoint {
    Word prefix;
    Word tail;

    bool eventually_periodic() const { return !tail.empty(); }
    Symbol at(std::size_t i) const;
    // first n symbols
    Word head(int n) const;
};

// Periodic point from a repeating word (validated cyclically admissible).
ShiftPoint periodic_point(const TransitionMatrix& A, const Word& w);

// Least p dividing |w| such that w is the p-periodic repetition of its own
// prefix; requires the infinite repetition of w to be admissible.
int prime_period(const TransitionMatrix& A, const Word& w);

// Prime period of a purely periodic point, 0 when the point is not periodic
// (prefix-only descriptions are never certified periodic).
int point_prime_period(const ShiftPoint& z);

// theta^(first disagreement index); 0 for equal points. Decides equality of
// eventually periodic points exactly; throws PrefixExhaustedError when a
// prefix-only description runs out before a disagreement is found.
double d_theta(const ShiftPoint& x, const ShiftPoint& y, double theta);

// --------------------------------------------------- locally constant maps

// Real function on the shift depending on the first `depth` symbols only,
// stored as one value per admissible depth-word.
class LocallyConstantFunction {
  public:
    LocallyConstantFunction() = default;

    // values keyed by word string; must cover exactly the admissible words
    static LocallyConstantFunction from_values(const TransitionMatrix& A, int depth,
                                               double theta,
                                               const std::map<std::string, double>& values);
    static LocallyConstantFunction constant(const TransitionMatrix& A, int depth,
                                            double theta, double c);

    int depth() const { return depth_; }
    double theta() const { return theta_; }
    const TransitionMatrix& matrix() const { return A_; }
    const std::vector<Word>& words() const { return words_; }
    const std::vector<double>& values() const { return values_; }

    // value on the cylinder of w; w may be longer than depth (prefix is used)
    double value(const Word& w) const;
    double value_by_index(int i) const { return values_[i]; }
    // f(sigma^offset x); reads symbols offset..offset+depth-1
    double value_at(const ShiftPoint& x, std::size_t offset = 0) const;
    // sum over k < n of f(sigma^k x)
    double birkhoff(const ShiftPoint& x, int n) const;

    double min_value() const;
    double max_value() const;

    // V_n: largest oscillation of f over any n-cylinder (n = 0: whole space);
    // zero once n >= depth
    double oscillation(int n) const;
    // sup over n >= 0 of V_n / theta^n (a maximum over n < depth)
    double lipschitz_seminorm() const;

  private:
    int depth_ = 1;
    double theta_ = 0.5;
    TransitionMatrix A_;
    std::vector<Word> words_;       // admissible depth-words, lexicographic
    std::vector<double> values_;

    int index_of(const Word& w) const;
};

}  // namespace escape
