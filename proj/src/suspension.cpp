#include "escape/suspension.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace escape {

namespace {

using kernels::Sparse;
using kernels::coeff;

int find_word(const std::vector<Word>& sorted, const Word& w) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), w);
    if (it == sorted.end() || *it != w) return -1;
    return static_cast<int>(it - sorted.begin());
}

}  // namespace

RoofFunction RoofFunction::from(const LocallyConstantFunction& f) {
    const double lo = f.min_value();
    if (!(lo > 1.0))
        throw ValidationError("roof function must stay above 1, got min " + std::to_string(lo));
    RoofFunction r;
    r.f = f;
    r.min_value = lo;
    return r;
}

double eta(const LocallyConstantFunction& f, int m) {
    if (m < 0) throw ValidationError("eta needs m >= 0");
    return f.lipschitz_seminorm() * std::pow(f.theta(), m);
}

DiscretizationParams choose_discretization(const RoofFunction& f, const MarkovGibbsMeasure& mu,
                                           double delta_request) {
    if (!(delta_request > 0.0))
        throw ValidationError("delta request must be positive");
    const double integral_f = mu.integral(f.f);
    const double target = 0.5 * integral_f;
    const TransitionMatrix& A = f.f.matrix();

    auto smallest_m = [&](double delta) -> int {
        for (int m = f.f.depth(); m <= 64; ++m) {
            if (count_words(A, m) > kEnumerationCap) break;
            if (2.0 * delta + eta(f.f, m) < target) return m;
        }
        return -1;
    };

    // largest delta allowed by the spacing bound, then shrink once if the
    // mass constraint 2*delta + eta(m) < integral/2 cannot be met at any depth
    double delta = std::min(delta_request, f.epsilon() / 3.0 - 1e-9);
    int m = delta >= 1e-6 ? smallest_m(delta) : -1;
    if (m < 0) {
        delta = std::min(delta, 0.25 * integral_f - 1e-9);
        m = delta >= 1e-6 ? smallest_m(delta) : -1;
    }
    if (delta < 1e-6 || m < 0)
        throw InfeasibleError("no discretization depth fits: requested delta " +
                              std::to_string(delta_request) + ", roof integral " +
                              std::to_string(integral_f));

    DiscretizationParams out;
    out.m = m;
    out.delta = delta;
    out.eta_m = eta(f.f, m);
    out.integral_f = integral_f;
    return out;
}

int DiscretizedRoof::level_count(const Word& w) const {
    if (static_cast<int>(w.size()) < m)
        throw DepthMismatchError("step roof needs " + std::to_string(m) + " symbols, got " +
                                 std::to_string(w.size()));
    Word key(w.begin(), w.begin() + m);
    const int i = find_word(words, key);
    if (i < 0) throw ValidationError("step roof queried off the shift: " + word_to_string(key));
    return levels[i];
}

int DiscretizedRoof::min_levels() const {
    return *std::min_element(levels.begin(), levels.end());
}

int DiscretizedRoof::max_levels() const {
    return *std::max_element(levels.begin(), levels.end());
}

namespace {

// sup/inf of f over each m-cylinder; exact since f is locally constant
DiscretizedRoof discretize_roof(const RoofFunction& f, int m, double delta, bool upper) {
    if (m < 1) throw ValidationError("step roof depth must be >= 1");
    if (!(delta > 0.0)) throw ValidationError("delta must be positive");
    const LocallyConstantFunction& g = f.f;
    DiscretizedRoof out;
    out.m = m;
    out.delta = delta;
    out.words = enumerate_words(g.matrix(), m);
    out.levels.resize(out.words.size());
    for (std::size_t i = 0; i < out.words.size(); ++i) {
        double v;
        if (m >= g.depth()) {
            v = g.value(out.words[i]);
        } else {
            // extremum over the depth-words extending this prefix
            v = upper ? -std::numeric_limits<double>::infinity()
                      : std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < g.words().size(); ++j) {
                const Word& u = g.words()[j];
                if (!std::equal(out.words[i].begin(), out.words[i].end(), u.begin())) continue;
                v = upper ? std::max(v, g.value_by_index(static_cast<int>(j)))
                          : std::min(v, g.value_by_index(static_cast<int>(j)));
            }
        }
        const int base = static_cast<int>(std::floor(v / delta + 1e-9));
        out.levels[i] = upper ? base + 2 : base - 2;
        if (!upper && out.levels[i] <= 0)
            throw NonPositiveLowerError("lower step roof vanished on " +
                                        word_to_string(out.words[i]) + ": delta " +
                                        std::to_string(delta) + " too coarse");
    }
    return out;
}

}  // namespace

DiscretizedRoof roof_upper(const RoofFunction& f, int m, double delta) {
    return discretize_roof(f, m, delta, true);
}

DiscretizedRoof roof_lower(const RoofFunction& f, int m, double delta) {
    return discretize_roof(f, m, delta, false);
}

std::pair<int, int> SuspensionSFT::unpack(int state) const {
    auto it = std::upper_bound(offset.begin(), offset.end(), state);
    const int wi = static_cast<int>(it - offset.begin()) - 1;
    return {wi, state - offset[wi]};
}

SuspensionSFT build_suspension_sft(const TransitionMatrix& A, const DiscretizedRoof& roof,
                                   int block_depth) {
    SuspensionSFT S;
    S.block_depth = std::max(block_depth, roof.m);
    S.delta = roof.delta;
    S.base_words = enumerate_words(A, S.block_depth);
    const int W = static_cast<int>(S.base_words.size());
    S.fiber_levels.resize(W);
    S.offset.assign(W + 1, 0);
    for (int i = 0; i < W; ++i) {
        S.fiber_levels[i] = roof.level_count(S.base_words[i]);
        if (S.fiber_levels[i] < 1)
            throw NonPositiveLowerError("fiber over " + word_to_string(S.base_words[i]) +
                                        " has no levels");
        S.offset[i + 1] = S.offset[i] + S.fiber_levels[i];
    }
    const int n = S.offset[W];

    std::vector<int> rows, cols;
    std::vector<double> vals;
    for (int wi = 0; wi < W; ++wi) {
        const Word& w = S.base_words[wi];
        for (int k = 0; k + 1 < S.fiber_levels[wi]; ++k) {
            rows.push_back(S.offset[wi] + k);
            cols.push_back(S.offset[wi] + k + 1);
            vals.push_back(1.0);
        }
        const int top = S.offset[wi] + S.fiber_levels[wi] - 1;
        for (int s = 1; s <= A.a; ++s) {
            if (!A.at(w.back() - 1, s - 1)) continue;
            Word v(w.begin() + 1, w.end());
            v.push_back(static_cast<Symbol>(s));
            const int vi = find_word(S.base_words, v);
            if (vi < 0) continue;  // shift fell off the word list (inadmissible interior pair)
            rows.push_back(top);
            cols.push_back(S.offset[vi]);
            vals.push_back(1.0);
        }
    }
    S.adjacency = Sparse::from_triplets(n, rows, cols, vals);
    if (!kernels::is_strongly_connected(S.adjacency))
        throw NotPrimitiveError("tower shift is not strongly connected");
    S.period = kernels::component_period(S.adjacency, 0);
    return S;
}

TowerProjection pi_tilde(const SuspensionSFT& S, const std::vector<int>& states) {
    if (states.empty()) throw ValidationError("empty tower cylinder");
    for (int s : states)
        if (s < 0 || s >= S.state_count())
            throw ValidationError("tower state out of range: " + std::to_string(s));
    for (std::size_t i = 0; i + 1 < states.size(); ++i)
        if (coeff(S.adjacency, states[i], states[i + 1]) == 0.0)
            throw ValidationError("tower cylinder is not a path at position " + std::to_string(i));

    TowerProjection out;
    out.base = S.base_words[S.unpack(states[0]).first];
    out.count = 1;
    for (std::size_t i = 1; i < states.size(); ++i) {
        const auto [wi, k] = S.unpack(states[i]);
        if (k != 0) continue;
        out.base.push_back(S.base_words[wi].back());
        ++out.count;
    }
    return out;
}

SuspensionMeasure::SuspensionMeasure(const MarkovGibbsMeasure& mu, const DiscretizedRoof& roof,
                                     const SuspensionSFT& S)
    : mu_(mu), roof_(roof), S_(S) {
    if (S.block_depth < mu.block_depth())
        throw DepthMismatchError("tower blocks shorter than the base chain blocks");
    integral_star_ = 0.0;
    for (std::size_t i = 0; i < roof.words.size(); ++i)
        integral_star_ += roof.levels[i] * roof.delta * mu.cylinder(roof.words[i]);
    block_ = mu.block_chain(S.block_depth);
    if (block_.states.size() != S.base_words.size())
        throw DepthMismatchError("tower base words disagree with the base chain states");
}

double SuspensionMeasure::state_measure(int state) const {
    const int wi = S_.unpack(state).first;
    return S_.delta * block_.pi[wi] / integral_star_;
}

double SuspensionMeasure::cylinder(const std::vector<int>& states) const {
    const TowerProjection p = pi_tilde(S_, states);
    return S_.delta * mu_.cylinder(p.base) / integral_star_;
}

std::vector<double> SuspensionMeasure::state_measures() const {
    std::vector<double> out(static_cast<std::size_t>(S_.state_count()));
    for (int s = 0; s < S_.state_count(); ++s) out[static_cast<std::size_t>(s)] = state_measure(s);
    return out;
}

kernels::Sparse SuspensionMeasure::transition_matrix() const {
    std::vector<int> rows, cols;
    std::vector<double> vals;
    const int n = S_.state_count();
    for (int s = 0; s < n; ++s) {
        const auto [wi, k] = S_.unpack(s);
        const bool top = k + 1 == S_.fiber_levels[wi];
        for (int e = S_.adjacency.ptr[s]; e < S_.adjacency.ptr[s + 1]; ++e) {
            const int t = S_.adjacency.col[e];
            rows.push_back(s);
            cols.push_back(t);
            vals.push_back(top ? coeff(block_.Q, wi, S_.unpack(t).first) : 1.0);
        }
    }
    return Sparse::from_triplets(n, rows, cols, vals);
}

SuspensionMeasure mu_tilde(const MarkovGibbsMeasure& mu, const DiscretizedRoof& roof,
                           const SuspensionSFT& S) {
    return SuspensionMeasure(mu, roof, S);
}

InvarianceReport verify_invariance(const SuspensionMeasure& nu, int L) {
    if (L < 1) throw ValidationError("invariance scan needs L >= 1");
    const SuspensionSFT& S = nu.tower();
    const int n = S.state_count();
    const Sparse back = kernels::transpose(S.adjacency);

    InvarianceReport rep;
    double total = 0.0;
    for (int s = 0; s < n; ++s) total += nu.state_measure(s);
    rep.total_mass_error = std::abs(total - 1.0);

    // walk every cylinder of length < L and compare with its one-step extensions
    std::vector<int> path;
    std::function<void(int)> dfs = [&](int last) {
        const double mass = nu.cylinder(path);
        ++rep.cylinders_checked;
        double right = 0.0;
        for (int e = S.adjacency.ptr[last]; e < S.adjacency.ptr[last + 1]; ++e) {
            path.push_back(S.adjacency.col[e]);
            right += nu.cylinder(path);
            path.pop_back();
        }
        rep.max_right_error = std::max(rep.max_right_error, std::abs(right - mass));
        double left = 0.0;
        const int head = path.front();
        for (int e = back.ptr[head]; e < back.ptr[head + 1]; ++e) {
            path.insert(path.begin(), back.col[e]);
            left += nu.cylinder(path);
            path.erase(path.begin());
        }
        rep.max_left_error = std::max(rep.max_left_error, std::abs(left - mass));
        if (static_cast<int>(path.size()) < L - 1) {
            for (int e = S.adjacency.ptr[last]; e < S.adjacency.ptr[last + 1]; ++e) {
                path.push_back(S.adjacency.col[e]);
                dfs(S.adjacency.col[e]);
                path.pop_back();
            }
        }
    };
    for (int s = 0; s < n; ++s) {
        path.assign(1, s);
        dfs(s);
    }
    return rep;
}

InducedPotential induced_potential(const SuspensionMeasure& nu, int L) {
    if (L < 1) throw ValidationError("potential scan needs L >= 1");
    const SuspensionSFT& S = nu.tower();
    const LocallyConstantFunction& phi = nu.base().potential();
    const double P = nu.base().pressure_value();
    const int depth = phi.depth();
    const int n = S.state_count();

    InducedPotential out;
    out.scan_length = L;
    out.values.resize(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s)
        out.values[static_cast<std::size_t>(s)] = phi.value(S.base_words[S.unpack(s).first]);

    // the potential reads only the current state, so oscillation dies after V_0
    const auto [vmin, vmax] = std::minmax_element(out.values.begin(), out.values.end());
    out.oscillation.assign(static_cast<std::size_t>(L) + 1, 0.0);
    out.oscillation[0] = *vmax - *vmin;

    out.c1 = std::numeric_limits<double>::infinity();
    out.c2 = -std::numeric_limits<double>::infinity();
    std::vector<int> path;
    std::function<void(int)> dfs = [&](int last) {
        const TowerProjection p = pi_tilde(S, path);
        const int windows = static_cast<int>(p.base.size()) - depth + 1;
        double birkhoff = 0.0;
        for (int j = 0; j < windows; ++j)
            birkhoff += phi.value(Word(p.base.begin() + j, p.base.begin() + j + depth));
        const double ratio = nu.cylinder(path) * std::exp(P * windows - birkhoff);
        out.c1 = std::min(out.c1, ratio);
        out.c2 = std::max(out.c2, ratio);
        if (static_cast<int>(path.size()) < L) {
            for (int e = S.adjacency.ptr[last]; e < S.adjacency.ptr[last + 1]; ++e) {
                path.push_back(S.adjacency.col[e]);
                dfs(S.adjacency.col[e]);
                path.pop_back();
            }
        }
    };
    for (int s = 0; s < n; ++s) {
        path.assign(1, s);
        dfs(s);
    }
    return out;
}

FlowStep flow_map(const RoofFunction& f, const FlowPoint& p, double t) {
    if (!(t >= 0.0)) throw ValidationError("flow time must be >= 0");
    double roof0 = f.f.value_at(p.x);
    if (p.height < 0.0 || p.height >= roof0)
        throw ValidationError("flow height " + std::to_string(p.height) +
                              " outside [0, " + std::to_string(roof0) + ")");
    FlowStep out;
    out.p.x = p.x;
    double budget = p.height + t;
    const long cap = static_cast<long>((t + f.f.max_value()) / f.min_value) + 3;
    for (long i = 0; i < cap; ++i) {
        const double fx = f.f.value_at(out.p.x);
        if (budget < fx) {
            out.p.height = budget;
            return out;
        }
        budget -= fx;
        if (!out.p.x.prefix.empty()) {
            out.p.x.prefix.erase(out.p.x.prefix.begin());
        } else {
            std::rotate(out.p.x.tail.begin(), out.p.x.tail.begin() + 1, out.p.x.tail.end());
        }
        ++out.shifts;
    }
    throw NumericalError("flow advance exceeded its crossing budget");
}

FlowSampler::FlowSampler(const MarkovGibbsMeasure& mu, const RoofFunction& f, std::uint64_t seed,
                         int horizon)
    : mu_(&mu), f_(&f), horizon_(std::max({horizon, mu.block_depth(), f.f.depth()})),
      max_f_(f.f.max_value()), rng_(seed) {}

double FlowSampler::uniform() {
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

FlowPoint FlowSampler::sample() {
    const BlockChain& chain = mu_->chain();
    for (;;) {
        // stationary draw of the first block, then chain steps out to the horizon
        double u = uniform();
        int cur = static_cast<int>(chain.pi.size()) - 1;
        double acc = 0.0;
        for (std::size_t i = 0; i < chain.pi.size(); ++i) {
            acc += chain.pi[i];
            if (u < acc) {
                cur = static_cast<int>(i);
                break;
            }
        }
        Word w = chain.states[static_cast<std::size_t>(cur)];
        while (static_cast<int>(w.size()) < horizon_) {
            u = uniform();
            acc = 0.0;
            int nxt = -1;
            for (int e = chain.Q.ptr[cur]; e < chain.Q.ptr[cur + 1]; ++e) {
                acc += chain.Q.val[static_cast<std::size_t>(e)];
                nxt = chain.Q.col[static_cast<std::size_t>(e)];
                if (u < acc) break;
            }
            cur = nxt;
            w.push_back(chain.states[static_cast<std::size_t>(cur)].back());
        }
        const double h = uniform() * max_f_;
        if (h < f_->f.value(w)) {
            FlowPoint p;
            p.x.prefix = std::move(w);
            p.height = h;
            return p;
        }
    }
}

}  // namespace escape
