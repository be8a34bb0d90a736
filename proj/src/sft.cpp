#include "escape/sft.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace escape {

std::string word_to_string(const Word& w) {
    std::string s;
    s.reserve(w.size());
    for (Symbol c : w) s.push_back(static_cast<char>('0' + c));
    return s;
}

Word word_from_string(const std::string& s, int alphabet_size) {
    if (alphabet_size > 9)
        throw ValidationError("word strings are digit strings; alphabet size must be <= 9");
    Word w;
    w.reserve(s.size());
    for (char c : s) {
        if (c < '1' || c > '0' + alphabet_size)
            throw ValidationError("word '" + s + "': symbol '" + std::string(1, c) +
                                  "' outside 1.." + std::to_string(alphabet_size));
        w.push_back(static_cast<Symbol>(c - '0'));
    }
    return w;
}

// ---------------------------------------------------------------- matrices

namespace {

// boolean matrix product, c = a*b
std::vector<std::uint8_t> bool_mul(const std::vector<std::uint8_t>& a,
                                   const std::vector<std::uint8_t>& b, int n) {
    std::vector<std::uint8_t> c(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            if (a[static_cast<std::size_t>(i) * n + k])
                for (int j = 0; j < n; ++j)
                    if (b[static_cast<std::size_t>(k) * n + j])
                        c[static_cast<std::size_t>(i) * n + j] = 1;
    return c;
}

bool all_positive(const std::vector<std::uint8_t>& a) {
    return std::all_of(a.begin(), a.end(), [](std::uint8_t x) { return x != 0; });
}

}  // namespace

TransitionMatrix validate_transition_matrix(const std::vector<std::vector<int>>& rows) {
    const int a = static_cast<int>(rows.size());
    if (a < 2) throw ValidationError("transition matrix must be at least 2x2");
    TransitionMatrix A;
    A.a = a;
    A.bits.assign(static_cast<std::size_t>(a) * a, 0);
    for (int i = 0; i < a; ++i) {
        if (static_cast<int>(rows[i].size()) != a)
            throw ValidationError("transition matrix row " + std::to_string(i + 1) +
                                  " has wrong length");
        for (int j = 0; j < a; ++j) {
            if (rows[i][j] != 0 && rows[i][j] != 1)
                throw ValidationError("transition matrix entries must be 0 or 1");
            A.bits[static_cast<std::size_t>(i) * a + j] = static_cast<std::uint8_t>(rows[i][j]);
        }
    }
    for (int i = 0; i < a; ++i) {
        bool row = false, col = false;
        for (int j = 0; j < a; ++j) {
            row = row || A.at(i, j);
            col = col || A.at(j, i);
        }
        if (!row || !col)
            throw EmptyRowOrColError("symbol " + std::to_string(i + 1) +
                                     " has no " + (row ? "incoming" : "outgoing") + " edge");
    }
    // primitivity: some power is entrywise positive; the minimal such power
    // is at most (a-1)^2 + 1 for primitive matrices (Wielandt)
    const int bound = (a - 1) * (a - 1) + 1;
    std::vector<std::uint8_t> p = A.bits;
    for (int d = 1; d <= bound; ++d) {
        if (all_positive(p)) {
            A.exponent = d;
            return A;
        }
        p = bool_mul(p, A.bits, a);
    }
    throw NotPrimitiveError("transition matrix is not primitive (no positive power up to " +
                            std::to_string(bound) + ")");
}

std::uint64_t count_words(const TransitionMatrix& A, int n) {
    if (n <= 0) return n == 0 ? 1 : 0;
    const int a = A.a;
    constexpr std::uint64_t cap = std::numeric_limits<std::int64_t>::max();
    std::vector<std::uint64_t> v(a, 1);  // counts of extensions, built right to left
    for (int step = 0; step < n - 1; ++step) {
        std::vector<std::uint64_t> w(a, 0);
        for (int i = 0; i < a; ++i) {
            std::uint64_t s = 0;
            for (int j = 0; j < a; ++j)
                if (A.at(i, j)) {
                    s += v[j];
                    if (s >= cap) { s = cap; break; }
                }
            w[i] = s;
        }
        v = std::move(w);
    }
    std::uint64_t total = 0;
    for (int i = 0; i < a; ++i) {
        total += v[i];
        if (total >= cap) return cap;
    }
    return total;
}

std::vector<Word> enumerate_words(const TransitionMatrix& A, int n, std::uint64_t cap) {
    if (n <= 0) throw ValidationError("word length must be positive");
    const std::uint64_t total = count_words(A, n);
    if (total > cap)
        throw LengthOverflowError("length-" + std::to_string(n) + " enumeration needs " +
                                  std::to_string(total) + " words, cap is " + std::to_string(cap));
    std::vector<Word> out;
    out.reserve(total);
    Word w;
    w.reserve(n);
    // depth-first in symbol order gives lexicographic output
    auto rec = [&](auto&& self, int len) -> void {
        if (len == n) {
            out.push_back(w);
            return;
        }
        for (int s = 1; s <= A.a; ++s) {
            if (len > 0 && !A.at(w.back() - 1, s - 1)) continue;
            w.push_back(static_cast<Symbol>(s));
            self(self, len + 1);
            w.pop_back();
        }
    };
    rec(rec, 0);
    assert(out.size() == total);
    return out;
}

bool admissible(const TransitionMatrix& A, const Word& w) {
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
        if (!A.at(w[i] - 1, w[i + 1] - 1)) return false;
    return !w.empty();
}

// ---------------------------------------------------------------- recoding

int Recode::index(const Word& w) const {
    auto it = std::lower_bound(states.begin(), states.end(), w);
    if (it == states.end() || *it != w) return -1;
    return static_cast<int>(it - states.begin());
}

Recode higher_block_recode(const TransitionMatrix& A, int m, std::uint64_t cap) {
    if (m < 1) throw ValidationError("block length must be >= 1");
    Recode r;
    r.m = m;
    r.states = enumerate_words(A, m, cap);
    const int n = static_cast<int>(r.states.size());
    r.matrix.a = n;
    r.matrix.bits.assign(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i) {
        const Word& u = r.states[i];
        // successors: shift off u[0], append any symbol extending u admissibly
        Word v(u.begin() + (m > 1 ? 1 : 0), u.end());
        if (m == 1) v.clear();
        for (int s = 1; s <= A.a; ++s) {
            if (!A.at(u.back() - 1, s - 1)) continue;
            v.push_back(static_cast<Symbol>(s));
            int j = r.index(v);
            v.pop_back();
            if (j >= 0) r.matrix.bits[static_cast<std::size_t>(i) * n + j] = 1;
        }
    }
    // conjugate to the original shift, so primitivity carries over; the
    // minimal positive power is not recomputed here (can be large to search)
    r.matrix.exponent.reset();
    return r;
}

// ------------------------------------------------------------------ points

Symbol ShiftPoint::at(std::size_t i) const {
    if (i < prefix.size()) return prefix[i];
    if (tail.empty())
        throw PrefixExhaustedError("point evaluated at index " + std::to_string(i) +
                                   " beyond its known prefix of length " +
                                   std::to_string(prefix.size()));
    return tail[(i - prefix.size()) % tail.size()];
}

Word ShiftPoint::head(int n) const {
    Word w;
    w.reserve(n);
    for (int i = 0; i < n; ++i) w.push_back(at(i));
    return w;
}

ShiftPoint periodic_point(const TransitionMatrix& A, const Word& w) {
    if (w.empty()) throw ValidationError("periodic point needs a nonempty word");
    if (!admissible(A, w) || !A.at(w.back() - 1, w.front() - 1))
        throw InvalidPeriodicPointError("word '" + word_to_string(w) +
                                        "' is not cyclically admissible");
    return ShiftPoint{{}, w};
}

int prime_period(const TransitionMatrix& A, const Word& w) {
    if (!admissible(A, w) || !A.at(w.back() - 1, w.front() - 1))
        throw NotCyclicallyAdmissibleError("word '" + word_to_string(w) +
                                           "' is not cyclically admissible");
    const int n = static_cast<int>(w.size());
    for (int p = 1; p <= n; ++p) {
        if (n % p != 0) continue;
        bool ok = true;
        for (int i = 0; ok && i < n; ++i) ok = (w[i] == w[i % p]);
        if (ok) return p;
    }
    return n;  // unreachable, p = n always matches
}

int point_prime_period(const ShiftPoint& z) {
    if (!z.eventually_periodic()) return 0;
    const std::size_t pre = z.prefix.size();
    const std::size_t T = z.tail.size();
    // purely periodic with period T at all?
    for (std::size_t i = 0; i < pre + T; ++i)
        if (z.at(i) != z.at(i + T)) return 0;
    // the minimal period of a periodic sequence divides every period
    for (std::size_t d = 1; d < T; ++d) {
        if (T % d != 0) continue;
        bool ok = true;
        for (std::size_t i = 0; i < T && ok; ++i) ok = z.at(i) == z.at(i + d);
        if (ok) return static_cast<int>(d);
    }
    return static_cast<int>(T);
}

double d_theta(const ShiftPoint& x, const ShiftPoint& y, double theta) {
    if (theta <= 0.0 || theta >= 1.0) throw ValidationError("theta must be in (0,1)");
    // eventually periodic sequences agree everywhere iff they agree up to
    // max prefix + lcm of the tail lengths
    std::size_t bound;
    if (x.eventually_periodic() && y.eventually_periodic()) {
        std::size_t pre = std::max(x.prefix.size(), y.prefix.size());
        bound = pre + std::lcm(x.tail.size(), y.tail.size());
    } else {
        bound = std::max(x.prefix.size() + x.tail.size(), y.prefix.size() + y.tail.size());
    }
    for (std::size_t i = 0; i < bound; ++i) {
        Symbol a, b;
        try {
            a = x.at(i);
            b = y.at(i);
        } catch (const PrefixExhaustedError&) {
            throw PrefixExhaustedError(
                "distance undecidable: points agree on all known symbols");
        }
        if (a != b) return std::pow(theta, static_cast<double>(i));
    }
    if (!x.eventually_periodic() || !y.eventually_periodic())
        throw PrefixExhaustedError("distance undecidable: points agree on all known symbols");
    return 0.0;
}

// --------------------------------------------------- locally constant maps

LocallyConstantFunction LocallyConstantFunction::from_values(
        const TransitionMatrix& A, int depth, double theta,
        const std::map<std::string, double>& values) {
    if (depth < 1) throw ValidationError("function depth must be >= 1");
    if (theta <= 0.0 || theta >= 1.0) throw ValidationError("theta must be in (0,1)");
    LocallyConstantFunction f;
    f.depth_ = depth;
    f.theta_ = theta;
    f.A_ = A;
    f.words_ = enumerate_words(A, depth);
    f.values_.resize(f.words_.size());
    for (std::size_t i = 0; i < f.words_.size(); ++i) {
        auto it = values.find(word_to_string(f.words_[i]));
        if (it == values.end())
            throw ValidationError("function values missing admissible word '" +
                                  word_to_string(f.words_[i]) + "'");
        f.values_[i] = it->second;
    }
    if (values.size() != f.words_.size()) {
        for (const auto& [k, v] : values) {
            Word w = word_from_string(k, A.a);
            if (static_cast<int>(w.size()) != depth || !admissible(A, w))
                throw ValidationError("function values contain non-admissible word '" + k + "'");
        }
        throw ValidationError("function values contain duplicate or unusable keys");
    }
    return f;
}

LocallyConstantFunction LocallyConstantFunction::constant(const TransitionMatrix& A, int depth,
                                                          double theta, double c) {
    std::map<std::string, double> values;
    for (const Word& w : enumerate_words(A, depth)) values[word_to_string(w)] = c;
    return from_values(A, depth, theta, values);
}

int LocallyConstantFunction::index_of(const Word& w) const {
    if (static_cast<int>(w.size()) == depth_) {
        auto it = std::lower_bound(words_.begin(), words_.end(), w);
        if (it != words_.end() && *it == w) return static_cast<int>(it - words_.begin());
        return -1;
    }
    Word head(w.begin(), w.begin() + depth_);
    auto it = std::lower_bound(words_.begin(), words_.end(), head);
    if (it != words_.end() && *it == head) return static_cast<int>(it - words_.begin());
    return -1;
}

double LocallyConstantFunction::value(const Word& w) const {
    if (static_cast<int>(w.size()) < depth_)
        throw DepthMismatchError("need " + std::to_string(depth_) +
                                 " symbols to evaluate, got " + std::to_string(w.size()));
    int i = index_of(w);
    if (i < 0) throw ValidationError("word '" + word_to_string(w) + "' is not admissible here");
    return values_[i];
}

double LocallyConstantFunction::value_at(const ShiftPoint& x, std::size_t offset) const {
    Word w;
    w.reserve(depth_);
    for (int k = 0; k < depth_; ++k) w.push_back(x.at(offset + k));
    return value(w);
}

double LocallyConstantFunction::birkhoff(const ShiftPoint& x, int n) const {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += value_at(x, k);
    return s;
}

double LocallyConstantFunction::min_value() const {
    return *std::min_element(values_.begin(), values_.end());
}

double LocallyConstantFunction::max_value() const {
    return *std::max_element(values_.begin(), values_.end());
}

double LocallyConstantFunction::oscillation(int n) const {
    if (n < 0) throw ValidationError("oscillation index must be >= 0");
    if (n >= depth_) return 0.0;
    // group depth-words by their first n symbols; spread of values per group
    double worst = 0.0;
    std::size_t i = 0;
    while (i < words_.size()) {
        std::size_t j = i;
        double lo = values_[i], hi = values_[i];
        while (j + 1 < words_.size() &&
               std::equal(words_[i].begin(), words_[i].begin() + n, words_[j + 1].begin())) {
            ++j;
            lo = std::min(lo, values_[j]);
            hi = std::max(hi, values_[j]);
        }
        worst = std::max(worst, hi - lo);
        i = j + 1;
    }
    return worst;
}

double LocallyConstantFunction::lipschitz_seminorm() const {
    double best = 0.0;
    double scale = 1.0;  // theta^-n accumulated
    for (int n = 0; n < depth_; ++n) {
        best = std::max(best, oscillation(n) * scale);
        scale /= theta_;
    }
    return best;
}

}  // namespace escape
