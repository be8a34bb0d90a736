#include "escape/open_system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace escape {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// block chain at the depth needed by the hole, plus the survivor mask
struct OpenSetup {
    BlockChain bc;
    std::vector<std::uint8_t> keep;
};

OpenSetup open_setup(const MarkovGibbsMeasure& mu, const Hole& H) {
    OpenSetup s;
    const int L = std::max(mu.block_depth(), H.depth);
    s.bc = mu.block_chain(L);
    s.keep.resize(s.bc.states.size());
    for (std::size_t i = 0; i < s.bc.states.size(); ++i)
        s.keep[i] = hole_contains(H, s.bc.states[i]) ? 0 : 1;
    return s;
}

}  // namespace

Hole make_hole(const TransitionMatrix& A, int depth, std::vector<Word> words) {
    if (depth < 1) throw ValidationError("hole depth must be positive");
    if (words.empty()) throw ValidationError("hole needs at least one cylinder");
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    for (const Word& w : words) {
        if (static_cast<int>(w.size()) != depth)
            throw ValidationError("hole word '" + word_to_string(w) + "' does not have depth " +
                                  std::to_string(depth));
        if (!admissible(A, w))
            throw ValidationError("hole word '" + word_to_string(w) + "' is not admissible");
    }
    if (static_cast<std::uint64_t>(words.size()) >= count_words(A, depth))
        throw ValidationError("hole covers every cylinder; nothing can survive");
    return Hole{depth, std::move(words)};
}

bool hole_contains(const Hole& H, const Word& w) {
    if (static_cast<int>(w.size()) < H.depth) return false;
    const Word head(w.begin(), w.begin() + H.depth);
    return std::binary_search(H.words.begin(), H.words.end(), head);
}

std::vector<double> survivor_log_curve(const MarkovGibbsMeasure& mu, const Hole& H, int k_max,
                                       kernels::Exec exec) {
    if (k_max < 1) throw ValidationError("survivor horizon must be at least 1");
    const OpenSetup s = open_setup(mu, H);
    return kernels::survivor_log_masses(s.bc.Q, s.bc.pi, s.keep, k_max, exec);
}

double survivor_log_measure(const MarkovGibbsMeasure& mu, const Hole& H, int k,
                            kernels::Exec exec) {
    return survivor_log_curve(mu, H, k, exec).back();
}

EscapeResult escape_rate_discrete(const MarkovGibbsMeasure& mu, const Hole& H, int k_max,
                                  const kernels::EigenOptions& opt) {
    const OpenSetup s = open_setup(mu, H);
    EscapeResult r;
    if (k_max >= 1) r.survivor_log_measures = kernels::survivor_log_masses(s.bc.Q, s.bc.pi, s.keep, k_max, opt.exec);

    // raw-weight route: e^{phi} on the same edge structure, hole states removed
    kernels::Sparse M = s.bc.Q;
    const auto& phi = mu.potential();
    for (int i = 0; i < M.n; ++i) {
        const double w = std::exp(phi.value(s.bc.states[i]));
        for (int k = M.ptr[i]; k < M.ptr[i + 1]; ++k) M.val[k] = w;
    }
    const kernels::Sparse M_open = kernels::restrict_states(M, s.keep);
    const kernels::Sparse Q_open = kernels::restrict_states(s.bc.Q, s.keep);
    r.open_eigenvalue = M_open.n == 0 ? 0.0 : kernels::spectral_radius(M_open, opt);
    const double chain_radius = Q_open.n == 0 ? 0.0 : kernels::spectral_radius(Q_open, opt);

    if (r.open_eigenvalue <= 0.0 || chain_radius <= 0.0) {
        r.full_escape = true;
        r.rate = kInf;
        r.rate_chain = kInf;
        return r;
    }
    r.rate = mu.pressure_value() - std::log(r.open_eigenvalue);
    r.rate_chain = -std::log(chain_radius);
    return r;
}

const Hole& NestedHoleSequence::at(int n) const {
    if (n < n_min || n > n_max()) throw ValidationError("hole index outside stored range");
    return holes[static_cast<std::size_t>(n - n_min)];
}

int NestedHoleSequence::l_at(int n) const {
    if (n < n_min || n > n_max()) throw ValidationError("hole index outside stored range");
    return l[static_cast<std::size_t>(n - n_min)];
}

NestedHoleSequence make_nested_cylinders(const MarkovGibbsMeasure& mu, const ShiftPoint& z,
                                         int n_min, int n_max) {
    if (n_min < 1 || n_max < n_min) throw ValidationError("hole range must satisfy 1 <= n_min <= n_max");
    NestedHoleSequence seq;
    seq.z = z;
    seq.n_min = n_min;
    seq.kappa = 0.5;

    std::vector<double> measures;
    for (int n = n_min; n <= n_max; ++n) {
        seq.holes.push_back(make_hole(mu.alphabet_matrix(), n, {z.head(n)}));
        seq.l.push_back(n);
        measures.push_back(mu.cylinder(seq.holes.back().words.front()));
    }

    double rho = 0.0;
    for (std::size_t i = 0; i + 1 < measures.size(); ++i)
        rho = std::max(rho, measures[i + 1] / measures[i]);
    if (rho == 0.0) rho = 0.5;  // single-hole range: any decay certificate works
    seq.rho = rho + 1e-9;

    double c = 0.0;
    for (std::size_t i = 0; i < measures.size(); ++i)
        c = std::max(c, measures[i] / std::pow(seq.rho, n_min + static_cast<int>(i)));
    seq.c = c * (1.0 + 1e-6);
    return seq;
}

bool NestedReport::all_pass() const {
    for (const auto& it : items)
        if (!it.pass) return false;
    return true;
}

NestedReport validate_nested(const NestedHoleSequence& seq, const MarkovGibbsMeasure& mu) {
    NestedReport rep;
    rep.items.resize(5);
    for (int i = 0; i < 5; ++i) {
        rep.items[i].item = i + 1;
        rep.items[i].pass = true;
    }
    const auto& A = mu.alphabet_matrix();
    const int n_min = seq.n_min, n_max = seq.n_max();

    // 1: every stored hole is a union of admissible cylinders of the right depth
    for (int n = n_min; n <= n_max && rep.items[0].pass; ++n) {
        const Hole& H = seq.at(n);
        if (H.depth != n || H.words.empty()) {
            rep.items[0] = {1, true, false, n, "hole depth/word-count mismatch"};
            break;
        }
        for (const Word& w : H.words) {
            if (static_cast<int>(w.size()) != n || !admissible(A, w)) {
                rep.items[0] = {1, true, false, n, "word '" + word_to_string(w) + "' invalid"};
                break;
            }
        }
    }

    // 2: nesting and membership of the target
    for (int n = n_min; n <= n_max && rep.items[1].pass; ++n) {
        Word zn;
        try {
            zn = seq.z.head(n);
        } catch (const PrefixExhaustedError&) {
            rep.items[1] = {2, true, false, n, "target prefix shorter than hole depth"};
            break;
        }
        if (!hole_contains(seq.at(n), zn)) {
            rep.items[1] = {2, true, false, n, "target left the hole"};
            break;
        }
        if (n > n_min) {
            for (const Word& w : seq.at(n).words) {
                if (!hole_contains(seq.at(n - 1), w)) {
                    rep.items[1] = {2, true, false, n,
                                    "word '" + word_to_string(w) + "' not nested in depth " +
                                        std::to_string(n - 1)};
                    break;
                }
            }
        }
    }

    // 3: stored decay certificate mu(I_n) <= c * rho^n with 0 < rho < 1
    if (!(seq.c > 0.0) || !(seq.rho > 0.0) || !(seq.rho < 1.0)) {
        rep.items[2] = {3, true, false, n_min, "decay constants out of range"};
    } else {
        for (int n = n_min; n <= n_max; ++n) {
            double mass = 0.0;
            for (const Word& w : seq.at(n).words) mass += mu.cylinder(w);
            if (mass > seq.c * std::pow(seq.rho, n)) {
                rep.items[2] = {3, true, false, n, "measure exceeds the decay bound"};
                break;
            }
        }
    }

    // 4: support depth, I_n inside [z]_{l_n} and kappa < l_n/n <= 1
    for (int n = n_min; n <= n_max && rep.items[3].pass; ++n) {
        const int ln = seq.l_at(n);
        if (!(seq.kappa < static_cast<double>(ln) / n) || ln > n) {
            rep.items[3] = {4, true, false, n, "depth ratio l_n/n outside (kappa, 1]"};
            break;
        }
        Word zl;
        try {
            zl = seq.z.head(ln);
        } catch (const PrefixExhaustedError&) {
            rep.items[3] = {4, true, false, n, "target prefix shorter than l_n"};
            break;
        }
        for (const Word& w : seq.at(n).words) {
            if (!std::equal(zl.begin(), zl.end(), w.begin())) {
                rep.items[3] = {4, true, false, n,
                                "word '" + word_to_string(w) + "' not inside [z]_{l_n}"};
                break;
            }
        }
    }

    // 5: sigma^{-p}(I_n) cap [z]_p inside I_n from some n0 onward (periodic z)
    const int p = point_prime_period(seq.z);
    if (p == 0) {
        rep.items[4] = {5, false, true, 0, "not applicable: target not periodic"};
    } else {
        const Word zp = seq.z.head(p);
        auto holds_at = [&](int n) {
            const Hole& H = seq.at(n);
            for (const Word& w : H.words) {
                Word u = zp;
                u.insert(u.end(), w.begin(), w.end());
                if (!admissible(A, u)) continue;  // empty piece of the preimage
                if (!hole_contains(H, u)) return false;
            }
            return true;
        };
        int n0 = n_max + 1;
        for (int n = n_max; n >= n_min && holds_at(n); --n) n0 = n;
        if (n0 > n_max) {
            rep.items[4] = {5, true, false, n_max, "pull-back condition fails on the whole range"};
        } else {
            rep.items[4] = {5, true, true, n0,
                            "holds for n >= " + std::to_string(n0) + " (prime period " +
                                std::to_string(p) + ")"};
        }
    }
    return rep;
}

std::vector<RatioPoint> discrete_ratio_curve(const MarkovGibbsMeasure& mu,
                                             const NestedHoleSequence& seq, int k_max,
                                             const kernels::EigenOptions& opt) {
    std::vector<RatioPoint> out;
    const double g = gamma(mu, seq.z);
    for (int n = seq.n_min; n <= seq.n_max(); ++n) {
        const Hole& H = seq.at(n);
        const EscapeResult r = escape_rate_discrete(mu, H, k_max, opt);
        double mass = 0.0;
        for (const Word& w : H.words) mass += mu.cylinder(w);
        RatioPoint pt;
        pt.n = n;
        pt.rate = r.rate;
        pt.lambda_open = r.open_eigenvalue;
        pt.hole_measure = mass;
        pt.ratio = r.rate / mass;
        pt.gamma_target = g;
        out.push_back(pt);
    }
    return out;
}

}  // namespace escape
