#include "escape/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace escape::kernels {

bool has_omp_support() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

int available_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_thread_count(int k) {
#ifdef _OPENMP
    if (k > 0) omp_set_num_threads(k);
#else
    (void)k;
#endif
}

// ------------------------------------------------------------------ sparse

Sparse Sparse::from_triplets(int n, const std::vector<int>& rows, const std::vector<int>& cols,
                             const std::vector<double>& vals) {
    assert(rows.size() == cols.size() && cols.size() == vals.size());
    Sparse A;
    A.n = n;
    A.ptr.assign(n + 1, 0);
    for (int r : rows) A.ptr[r + 1]++;
    for (int i = 0; i < n; ++i) A.ptr[i + 1] += A.ptr[i];
    A.col.resize(rows.size());
    A.val.resize(rows.size());
    std::vector<int> cursor(A.ptr.begin(), A.ptr.end() - 1);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        int at = cursor[rows[k]]++;
        A.col[at] = cols[k];
        A.val[at] = vals[k];
    }
    // sort each row by column for reproducible left-to-right sums
    for (int i = 0; i < n; ++i) {
        std::vector<std::pair<int, double>> row;
        row.reserve(A.ptr[i + 1] - A.ptr[i]);
        for (int k = A.ptr[i]; k < A.ptr[i + 1]; ++k) row.emplace_back(A.col[k], A.val[k]);
        std::sort(row.begin(), row.end());
        for (int k = A.ptr[i]; k < A.ptr[i + 1]; ++k) {
            A.col[k] = row[k - A.ptr[i]].first;
            A.val[k] = row[k - A.ptr[i]].second;
        }
    }
    return A;
}

double coeff(const Sparse& A, int i, int j) {
    const int* b = A.col.data() + A.ptr[i];
    const int* e = A.col.data() + A.ptr[i + 1];
    const int* it = std::lower_bound(b, e, j);
    if (it == e || *it != j) return 0.0;
    return A.val[static_cast<std::size_t>(it - A.col.data())];
}

Sparse transpose(const Sparse& A) {
    std::vector<int> rows, cols;
    std::vector<double> vals;
    rows.reserve(A.nnz());
    cols.reserve(A.nnz());
    vals.reserve(A.nnz());
    for (int i = 0; i < A.n; ++i)
        for (int k = A.ptr[i]; k < A.ptr[i + 1]; ++k) {
            rows.push_back(A.col[k]);
            cols.push_back(i);
            vals.push_back(A.val[k]);
        }
    return Sparse::from_triplets(A.n, rows, cols, vals);
}

Sparse restrict_states(const Sparse& A, const std::vector<std::uint8_t>& keep,
                       std::vector<int>* remap_out) {
    assert(static_cast<int>(keep.size()) == A.n);
    std::vector<int> remap(A.n, -1);
    int m = 0;
    for (int i = 0; i < A.n; ++i)
        if (keep[i]) remap[i] = m++;
    std::vector<int> rows, cols;
    std::vector<double> vals;
    for (int i = 0; i < A.n; ++i) {
        if (!keep[i]) continue;
        for (int k = A.ptr[i]; k < A.ptr[i + 1]; ++k) {
            if (!keep[A.col[k]]) continue;
            rows.push_back(remap[i]);
            cols.push_back(remap[A.col[k]]);
            vals.push_back(A.val[k]);
        }
    }
    if (remap_out) *remap_out = std::move(remap);
    return Sparse::from_triplets(m, rows, cols, vals);
}

void spmv(const Sparse& A, const std::vector<double>& x, std::vector<double>& y, Exec exec) {
    assert(static_cast<int>(x.size()) == A.n);
    y.resize(A.n);
    const bool par = (exec == Exec::parallel);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#else
    (void)par;
#endif
    for (int i = 0; i < A.n; ++i) {
        double s = 0.0;
        for (int k = A.ptr[i]; k < A.ptr[i + 1]; ++k) s += A.val[k] * x[A.col[k]];
        y[i] = s;
    }
}

void spmv_reference(const Sparse& A, const std::vector<double>& x, std::vector<double>& y) {
    y.assign(A.n, 0.0);
    for (int i = 0; i < A.n; ++i)
        for (int k = A.ptr[i]; k < A.ptr[i + 1]; ++k) y[i] += A.val[k] * x[A.col[k]];
}

// ------------------------------------------------------------------ graphs

SccInfo strongly_connected_components(const Sparse& A) {
    // iterative Tarjan
    const int n = A.n;
    SccInfo out;
    out.label.assign(n, -1);
    std::vector<int> index(n, -1), lowlink(n, 0), onstack(n, 0);
    std::vector<int> stack;
    std::vector<std::pair<int, int>> call;  // (node, next edge offset)
    int next_index = 0;
    for (int s = 0; s < n; ++s) {
        if (index[s] != -1) continue;
        call.emplace_back(s, A.ptr[s]);
        index[s] = lowlink[s] = next_index++;
        stack.push_back(s);
        onstack[s] = 1;
        while (!call.empty()) {
            auto& [v, k] = call.back();
            if (k < A.ptr[v + 1]) {
                int w = A.col[k++];
                if (index[w] == -1) {
                    index[w] = lowlink[w] = next_index++;
                    stack.push_back(w);
                    onstack[w] = 1;
                    call.emplace_back(w, A.ptr[w]);
                } else if (onstack[w]) {
                    lowlink[v] = std::min(lowlink[v], index[w]);
                }
            } else {
                if (lowlink[v] == index[v]) {
                    while (true) {
                        int w = stack.back();
                        stack.pop_back();
                        onstack[w] = 0;
                        out.label[w] = out.count;
                        if (w == v) break;
                    }
                    out.count++;
                }
                int done = v;
                call.pop_back();
                if (!call.empty())
                    lowlink[call.back().first] = std::min(lowlink[call.back().first], lowlink[done]);
            }
        }
    }
    return out;
}

int component_period(const Sparse& A, int root) {
    // BFS levels from root within root's component; the gcd of
    // level(u) + 1 - level(v) over edges u->v inside the component is the
    // cycle-length gcd
    SccInfo scc = strongly_connected_components(A);
    const int c = scc.label[root];
    std::vector<int> level(A.n, -1);
    std::vector<int> queue{root};
    level[root] = 0;
    std::size_t head = 0;
    int g = 0;
    while (head < queue.size()) {
        int u = queue[head++];
        for (int k = A.ptr[u]; k < A.ptr[u + 1]; ++k) {
            int v = A.col[k];
            if (scc.label[v] != c) continue;
            if (level[v] == -1) {
                level[v] = level[u] + 1;
                queue.push_back(v);
            } else {
                g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
            }
        }
    }
    return g;
}

bool is_strongly_connected(const Sparse& A) {
    if (A.n == 0) return false;
    SccInfo scc = strongly_connected_components(A);
    return scc.count == 1;
}

// ------------------------------------------------------------- eigensolver

EigenResult perron_leading(const Sparse& A, const EigenOptions& opt) {
    const int n = A.n;
    if (n == 0) throw ValidationError("eigensolver called on an empty matrix");
    // scale so row sums are O(1), then iterate (A/scale + I); the +I shift
    // makes an irreducible matrix primitive so the bracket closes
    double scale = 0.0;
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = A.ptr[i]; k < A.ptr[i + 1]; ++k) s += A.val[k];
        scale = std::max(scale, s);
    }
    if (scale == 0.0) {
        // no edges at all: spectral radius 0
        EigenResult r;
        r.vec.assign(n, 1.0);
        return r;
    }
    std::vector<double> v(n, 1.0), w(n);
    EigenResult r;
    for (int it = 1; it <= opt.max_iterations; ++it) {
        spmv(A, v, w, opt.exec);
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        double norm = 0.0;
        // per-entry ratio bounds (Collatz-Wielandt) for A/scale + I
        for (int i = 0; i < n; ++i) {
            w[i] = w[i] / scale + v[i];
            double ratio = w[i] / v[i];
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
            norm = std::max(norm, w[i]);
        }
        for (int i = 0; i < n; ++i) v[i] = w[i] / norm;
        r.iterations = it;
        r.lower = (lo - 1.0) * scale;
        r.upper = (hi - 1.0) * scale;
        if (hi - lo <= opt.tol * hi) {
            r.value = 0.5 * (r.lower + r.upper);
            r.vec = std::move(v);
            return r;
        }
    }
    throw NoConvergenceError("power iteration did not close the eigenvalue bracket in " +
                             std::to_string(opt.max_iterations) + " iterations (width " +
                             std::to_string(r.upper - r.lower) + ")");
}

double spectral_radius(const Sparse& A, const EigenOptions& opt) {
    if (A.n == 0) return 0.0;
    SccInfo scc = strongly_connected_components(A);
    std::vector<std::vector<int>> members(scc.count);
    for (int i = 0; i < A.n; ++i) members[scc.label[i]].push_back(i);
    double best = 0.0;
    for (int c = 0; c < scc.count; ++c) {
        const auto& nodes = members[c];
        if (nodes.size() == 1) {
            // trivial component: only a self loop contributes
            int i = nodes[0];
            for (int k = A.ptr[i]; k < A.ptr[i + 1]; ++k)
                if (A.col[k] == i) best = std::max(best, A.val[k]);
            continue;
        }
        std::vector<std::uint8_t> keep(A.n, 0);
        for (int i : nodes) keep[i] = 1;
        Sparse B = restrict_states(A, keep);
        best = std::max(best, perron_leading(B, opt).value);
    }
    return best;
}

// ---------------------------------------------------------------- survivor

namespace {

template <bool kReference>
std::vector<double> survivor_impl(const Sparse& Q, const std::vector<double>& start,
                                  const std::vector<std::uint8_t>& keep, int k_max, Exec exec) {
    assert(static_cast<int>(start.size()) == Q.n && static_cast<int>(keep.size()) == Q.n);
    const Sparse Qt = transpose(Q);
    std::vector<double> v(Q.n), w;
    for (int i = 0; i < Q.n; ++i) v[i] = keep[i] ? start[i] : 0.0;
    std::vector<double> out;
    out.reserve(k_max);
    double log_offset = 0.0;
    for (int k = 1; k <= k_max; ++k) {
        if (k > 1) {
            if constexpr (kReference)
                spmv_reference(Qt, v, w);
            else
                spmv(Qt, v, w, exec);
            for (int i = 0; i < Q.n; ++i) v[i] = keep[i] ? w[i] : 0.0;
        }
        double total = 0.0, peak = 0.0;
        for (int i = 0; i < Q.n; ++i) {
            total += v[i];
            peak = std::max(peak, v[i]);
        }
        if (total <= 0.0) {
            for (int j = k; j <= k_max; ++j) out.push_back(-std::numeric_limits<double>::infinity());
            return out;
        }
        out.push_back(std::log(total) + log_offset);
        if (peak < 1e-150) {  // rescale long horizons away from the underflow floor
            for (int i = 0; i < Q.n; ++i) v[i] /= peak;
            log_offset += std::log(peak);
        }
    }
    return out;
}

}  // namespace

std::vector<double> survivor_log_masses(const Sparse& Q, const std::vector<double>& start,
                                        const std::vector<std::uint8_t>& keep, int k_max,
                                        Exec exec) {
    return survivor_impl<false>(Q, start, keep, k_max, exec);
}

std::vector<double> survivor_log_masses_reference(const Sparse& Q,
                                                  const std::vector<double>& start,
                                                  const std::vector<std::uint8_t>& keep,
                                                  int k_max) {
    return survivor_impl<true>(Q, start, keep, k_max, Exec::serial);
}

// ------------------------------------------------------------- reductions

std::pair<double, double> minmax_map(std::int64_t n,
                                     const std::function<double(std::int64_t)>& f, Exec exec) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    const bool par = (exec == Exec::parallel);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(min : lo) reduction(max : hi) if (par)
#else
    (void)par;
#endif
    for (std::int64_t i = 0; i < n; ++i) {
        double x = f(i);
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    return {lo, hi};
}

std::pair<double, double> minmax_map_reference(std::int64_t n,
                                               const std::function<double(std::int64_t)>& f) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::int64_t i = 0; i < n; ++i) {
        double x = f(i);
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    return {lo, hi};
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 on seed + golden-ratio stride per index
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t sharded_count(int shards, std::uint64_t base_seed,
                            const std::function<std::uint64_t(int, std::uint64_t)>& shard_fn,
                            Exec exec) {
    std::vector<std::uint64_t> counts(shards, 0);
    const bool par = (exec == Exec::parallel);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#else
    (void)par;
#endif
    for (int i = 0; i < shards; ++i) counts[i] = shard_fn(i, mix_seed(base_seed, i));
    std::uint64_t total = 0;
    for (std::uint64_t c : counts) total += c;  // fixed order, thread-count invariant
    return total;
}

std::uint64_t sharded_count_reference(int shards, std::uint64_t base_seed,
                                      const std::function<std::uint64_t(int, std::uint64_t)>& shard_fn) {
    std::uint64_t total = 0;
    for (int i = 0; i < shards; ++i) total += shard_fn(i, mix_seed(base_seed, i));
    return total;
}

}  // namespace escape::kernels
