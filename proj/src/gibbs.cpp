#include "escape/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace escape {

namespace {

using kernels::coeff;

int find_word(const std::vector<Word>& states, const Word& w) {
    auto it = std::lower_bound(states.begin(), states.end(), w);
    if (it == states.end() || *it != w) return -1;
    return static_cast<int>(it - states.begin());
}

}  // namespace

int BlockChain::index(const Word& w) const { return find_word(states, w); }

TransferOperator build_transfer(const TransitionMatrix& A, const LocallyConstantFunction& phi,
                                const kernels::EigenOptions& opt) {
    TransferOperator op;
    op.recode = higher_block_recode(A, phi.depth());
    const auto& states = op.recode.states;
    const int N = static_cast<int>(states.size());
    const int m = op.recode.m;

    std::vector<int> rows, cols;
    std::vector<double> vals;
    for (int i = 0; i < N; ++i) {
        const Word& u = states[i];
        const double w = std::exp(phi.value(u));
        Word v(u.begin() + (m > 1 ? 1 : 0), u.end());
        if (m == 1) v.clear();
        v.push_back(0);
        for (Symbol s = 1; s <= A.a; ++s) {
            v.back() = s;
            const int j = find_word(states, v);
            if (j < 0 || !op.recode.matrix.at(i, j)) continue;
            rows.push_back(i);
            cols.push_back(j);
            vals.push_back(w);
        }
    }
    op.M = kernels::Sparse::from_triplets(N, rows, cols, vals);

    auto right = kernels::perron_leading(op.M, opt);
    auto left = kernels::perron_leading(kernels::transpose(op.M), opt);
    op.lambda = right.value;
    op.pressure = std::log(right.value);
    op.right = std::move(right.vec);
    op.left = std::move(left.vec);
    double dot = 0.0;
    for (int i = 0; i < N; ++i) dot += op.left[i] * op.right[i];
    for (double& l : op.left) l /= dot;
    op.iterations = std::max(right.iterations, left.iterations);
    return op;
}

double pressure(const TransitionMatrix& A, const LocallyConstantFunction& phi,
                const kernels::EigenOptions& opt) {
    return build_transfer(A, phi, opt).pressure;
}

MarkovGibbsMeasure equilibrium_state(const TransitionMatrix& A,
                                     const LocallyConstantFunction& phi,
                                     const kernels::EigenOptions& opt) {
    MarkovGibbsMeasure mu;
    mu.A_ = A;
    mu.phi_ = phi;
    mu.op_ = build_transfer(A, phi, opt);

    const auto& op = mu.op_;
    const int N = op.M.n;
    BlockChain chain;
    chain.L = op.recode.m;
    chain.states = op.recode.states;

    // Q = D^-1 M D / lambda with D = diag(right); stationary pi = left .* right
    kernels::Sparse Q = op.M;
    for (int i = 0; i < N; ++i)
        for (int k = Q.ptr[i]; k < Q.ptr[i + 1]; ++k)
            Q.val[k] = Q.val[k] * op.right[Q.col[k]] / (op.lambda * op.right[i]);
    chain.Q = std::move(Q);

    chain.pi.resize(N);
    double total = 0.0;
    for (int i = 0; i < N; ++i) {
        chain.pi[i] = op.left[i] * op.right[i];
        total += chain.pi[i];
    }
    for (double& p : chain.pi) p /= total;
    mu.chain_ = std::move(chain);
    return mu;
}

double MarkovGibbsMeasure::cylinder(const Word& w) const {
    if (w.empty()) return 1.0;
    if (!admissible(A_, w)) return 0.0;
    const int m = chain_.L;
    const int n = static_cast<int>(w.size());
    if (n < m) {
        // sum the stationary mass of every block extending w
        double s = 0.0;
        for (std::size_t i = 0; i < chain_.states.size(); ++i) {
            if (std::equal(w.begin(), w.end(), chain_.states[i].begin())) s += chain_.pi[i];
        }
        return s;
    }
    Word block(w.begin(), w.begin() + m);
    int cur = chain_.index(block);
    if (cur < 0) return 0.0;
    double p = chain_.pi[cur];
    for (int t = 1; t + m <= n; ++t) {
        block.assign(w.begin() + t, w.begin() + t + m);
        const int nxt = chain_.index(block);
        if (nxt < 0) return 0.0;
        p *= coeff(chain_.Q, cur, nxt);
        cur = nxt;
    }
    return p;
}

double MarkovGibbsMeasure::integral(const LocallyConstantFunction& f) const {
    const auto words = enumerate_words(A_, f.depth());
    double s = 0.0;
    for (const Word& w : words) s += f.value(w) * cylinder(w);
    return s;
}

BlockChain MarkovGibbsMeasure::block_chain(int L) const {
    const int m = chain_.L;
    if (L < m) throw DepthMismatchError("block depth below the potential depth");
    if (L == m) return chain_;

    Recode rec = higher_block_recode(A_, L);
    const int N = static_cast<int>(rec.states.size());
    BlockChain out;
    out.L = L;
    out.states = rec.states;

    std::vector<int> rows, cols;
    std::vector<double> vals;
    for (int i = 0; i < N; ++i) {
        const Word& u = rec.states[i];
        Word tail_u(u.end() - m, u.end());
        const int cu = chain_.index(tail_u);
        Word v(u.begin() + 1, u.end());
        v.push_back(0);
        Word tail_v(m);
        for (Symbol s = 1; s <= A_.a; ++s) {
            v.back() = s;
            const int j = find_word(rec.states, v);
            if (j < 0 || !rec.matrix.at(i, j)) continue;
            tail_v.assign(v.end() - m, v.end());
            const int cv = chain_.index(tail_v);
            rows.push_back(i);
            cols.push_back(j);
            vals.push_back(coeff(chain_.Q, cu, cv));
        }
    }
    out.Q = kernels::Sparse::from_triplets(N, rows, cols, vals);

    out.pi.resize(N);
    double total = 0.0;
    for (int i = 0; i < N; ++i) {
        out.pi[i] = cylinder(rec.states[i]);
        total += out.pi[i];
    }
    for (double& p : out.pi) p /= total;
    return out;
}

GibbsCertificate certify_gibbs(const MarkovGibbsMeasure& mu, int n_max, kernels::Exec exec) {
    if (n_max < 1) throw ValidationError("certificate horizon must be at least 1");
    const auto& A = mu.alphabet_matrix();
    const auto& phi = mu.potential();
    const int m = phi.depth();
    const double P = mu.pressure_value();

    GibbsCertificate cert;
    cert.n_max = n_max;
    cert.c1 = std::numeric_limits<double>::infinity();
    cert.c2 = -std::numeric_limits<double>::infinity();

    for (int n = 1; n <= n_max; ++n) {
        const auto ext = enumerate_words(A, n + m - 1);
        auto ratio = [&](std::int64_t i) {
            const Word& u = ext[static_cast<std::size_t>(i)];
            const Word head(u.begin(), u.begin() + n);
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += phi.value(Word(u.begin() + k, u.begin() + k + m));
            return mu.cylinder(head) * std::exp(P * n - s);
        };
        auto [lo, hi] = kernels::minmax_map(static_cast<std::int64_t>(ext.size()), ratio, exec);
        if (lo < cert.c1) {
            cert.c1 = lo;
            for (std::size_t i = 0; i < ext.size(); ++i)
                if (ratio(static_cast<std::int64_t>(i)) == lo) { cert.arg_min = ext[i]; break; }
        }
        if (hi > cert.c2) {
            cert.c2 = hi;
            for (std::size_t i = 0; i < ext.size(); ++i)
                if (ratio(static_cast<std::int64_t>(i)) == hi) { cert.arg_max = ext[i]; break; }
        }
    }
    return cert;
}

double gamma(const MarkovGibbsMeasure& mu, const ShiftPoint& z) {
    const int p = point_prime_period(z);
    if (p == 0) return 1.0;
    const double s = mu.potential().birkhoff(z, p);
    const double g = 1.0 - std::exp(s - p * mu.pressure_value());
    if (g < -1e-9 || g > 1.0 + 1e-9)
        throw NumericalError("escape weight fell outside [0,1]: " + std::to_string(g));
    return std::min(1.0, std::max(0.0, g));
}

}  // namespace escape
