#pragma once

// Numerical kernels shared by the spectral and survivor computations.
// Each hot kernel ships OpenMP-parallel, designed so results are identical
// for any thread count (per-row sums, order-independent reductions, fixed
// shards). Plain serial reference implementations are kept alongside and
// compared in the tests and in the benchmark tool.

#include <cstdint>
#include <functional>
#include <vector>

#include "escape/errors.hpp"

namespace escape::kernels {

enum class Exec { serial, parallel };

bool has_omp_support();
int available_threads();
void set_thread_count(int k);  // no-op without OpenMP

// ------------------------------------------------------------------ sparse

// compressed sparse rows; values nonnegative throughout this project
struct Sparse {
    int n = 0;
    std::vector<int> ptr;   // n+1
    std::vector<int> col;
    std::vector<double> val;

    static Sparse from_triplets(int n, const std::vector<int>& rows,
                                const std::vector<int>& cols,
                                const std::vector<double>& vals);
    std::size_t nnz() const { return col.size(); }
};

Sparse transpose(const Sparse& A);
// entry A(i,j); columns inside a row are sorted, so this is a binary search
double coeff(const Sparse& A, int i, int j);
// keep[i] == 0 drops row i and column i (submatrix on the kept index set);
// remap returns new index per old index, -1 when dropped
Sparse restrict_states(const Sparse& A, const std::vector<std::uint8_t>& keep,
                       std::vector<int>* remap = nullptr);

// y = A x; rows are summed left to right so the result does not depend on
// the thread count
void spmv(const Sparse& A, const std::vector<double>& x, std::vector<double>& y,
          Exec exec = Exec::parallel);
void spmv_reference(const Sparse& A, const std::vector<double>& x, std::vector<double>& y);

// ------------------------------------------------------------------ graphs

// strongly connected components (iterative Tarjan); labels in [0, count)
struct SccInfo {
    int count = 0;
    std::vector<int> label;
};
SccInfo strongly_connected_components(const Sparse& A);

// gcd of cycle lengths through the component of state `root` (1 = aperiodic);
// 0 when the component has no cycle
int component_period(const Sparse& A, int root);

bool is_strongly_connected(const Sparse& A);

// ------------------------------------------------------------- eigensolver

struct EigenOptions {
    double tol = 1e-13;     // relative width of the eigenvalue bracket
    int max_iterations = 100000;
    Exec exec = Exec::parallel;
};

struct EigenResult {
    double value = 0.0;             // leading eigenvalue
    double lower = 0.0, upper = 0.0;  // certified bracket at the last iterate
    std::vector<double> vec;        // right eigenvector, max entry 1
    int iterations = 0;
};

// Leading eigenvalue/eigenvector of an irreducible nonnegative matrix by
// power iteration on A + I from the all-ones vector (the shift removes
// periodicity), stopped by the min/max Rayleigh-type bracket. Throws
// NoConvergenceError at the iteration cap.
EigenResult perron_leading(const Sparse& A, const EigenOptions& opt = {});

// Spectral radius of an arbitrary nonnegative matrix: the maximum of
// perron_leading over its strongly connected components. 0 for nilpotent.
double spectral_radius(const Sparse& A, const EigenOptions& opt = {});

// ---------------------------------------------------------------- survivor

// Log total mass after k masked steps, k = 1..k_max:
//   v_1 = start .* keep,  v_{k+1} = (Q^T v_k) .* keep,  out[k-1] = log sum v_k.
// Rescales internally, so long horizons do not underflow. -inf once the
// surviving mass is exactly zero.
std::vector<double> survivor_log_masses(const Sparse& Q, const std::vector<double>& start,
                                        const std::vector<std::uint8_t>& keep, int k_max,
                                        Exec exec = Exec::parallel);
std::vector<double> survivor_log_masses_reference(const Sparse& Q,
                                                  const std::vector<double>& start,
                                                  const std::vector<std::uint8_t>& keep,
                                                  int k_max);

// ------------------------------------------------------------- reductions

// min and max of f(i) over i in [0, n); reduction is order-independent
std::pair<double, double> minmax_map(std::int64_t n,
                                     const std::function<double(std::int64_t)>& f,
                                     Exec exec = Exec::parallel);
std::pair<double, double> minmax_map_reference(std::int64_t n,
                                               const std::function<double(std::int64_t)>& f);

// Sum of shard counts; shard seeds are derived from base_seed by index, so
// the total is independent of thread count and schedule.
std::uint64_t sharded_count(int shards, std::uint64_t base_seed,
                            const std::function<std::uint64_t(int, std::uint64_t)>& shard_fn,
                            Exec exec = Exec::parallel);
std::uint64_t sharded_count_reference(int shards, std::uint64_t base_seed,
                                      const std::function<std::uint64_t(int, std::uint64_t)>& shard_fn);

// splitmix64 step, used to derive shard seeds
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace escape::kernels
