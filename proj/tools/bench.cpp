// Times the OpenMP kernels against their serial reference implementations on
// a synthetic survivor-style workload and reports speedups plus an exact
// agreement check (the parallel kernels are designed to be bit-identical).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include "escape/kernels.hpp"

using namespace escape::kernels;

namespace {

double seconds(const std::function<void()>& fn, int reps) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

void report(const char* name, double serial, double parallel, bool match) {
    std::printf("%-22s %10.4f ms %10.4f ms   x%-6.2f %s\n", name, serial * 1e3, parallel * 1e3,
                serial / parallel, match ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 200000;
    const int degree = 4;
    std::mt19937_64 rng(12345);
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::uniform_real_distribution<double> weight(0.1, 1.0);

    std::vector<int> rows, cols;
    std::vector<double> vals;
    rows.reserve(static_cast<std::size_t>(n) * degree);
    for (int i = 0; i < n; ++i) {
        for (int d = 0; d < degree; ++d) {
            rows.push_back(i);
            cols.push_back(d == 0 ? (i + 1) % n : pick(rng));  // ring keeps it connected
            vals.push_back(weight(rng));
        }
    }
    const Sparse A = Sparse::from_triplets(n, rows, cols, vals);

    std::vector<double> x(static_cast<std::size_t>(n));
    for (double& v : x) v = weight(rng);
    std::vector<std::uint8_t> keep(static_cast<std::size_t>(n), 1);
    for (int i = 0; i < n; i += 97) keep[static_cast<std::size_t>(i)] = 0;

    std::printf("n = %d, nnz = %zu, threads = %d (omp %s)\n\n", n, A.nnz(), available_threads(),
                has_omp_support() ? "on" : "off");
    std::printf("%-22s %13s %13s   %-7s %s\n", "kernel", "serial", "parallel", "speedup",
                "results");

    {
        std::vector<double> ys(x.size()), yp(x.size());
        const double ts = seconds([&] { spmv_reference(A, x, ys); }, 20);
        const double tp = seconds([&] { spmv(A, x, yp, Exec::parallel); }, 20);
        report("spmv", ts, tp, ys == yp);
    }
    {
        std::vector<double> ks, kp;
        const double ts = seconds([&] { ks = survivor_log_masses_reference(A, x, keep, 50); }, 5);
        const double tp =
            seconds([&] { kp = survivor_log_masses(A, x, keep, 50, Exec::parallel); }, 5);
        report("survivor_log_masses", ts, tp, ks == kp);
    }
    {
        const auto f = [](std::int64_t i) {
            return std::sin(static_cast<double>(i)) * std::cos(0.5 * static_cast<double>(i));
        };
        std::pair<double, double> ms, mp;
        const std::int64_t len = 4000000;
        const double ts = seconds([&] { ms = minmax_map_reference(len, f); }, 5);
        const double tp = seconds([&] { mp = minmax_map(len, f, Exec::parallel); }, 5);
        report("minmax_map", ts, tp, ms == mp);
    }
    {
        const auto shard = [](int, std::uint64_t seed) -> std::uint64_t {
            std::mt19937_64 g(seed);
            std::uint64_t hits = 0;
            for (int i = 0; i < 400000; ++i) hits += (g() >> 11) * 0x1.0p-53 < 0.5;
            return hits;
        };
        std::uint64_t cs = 0, cp = 0;
        const double ts = seconds([&] { cs = sharded_count_reference(64, 7, shard); }, 3);
        const double tp = seconds([&] { cp = sharded_count(64, 7, shard, Exec::parallel); }, 3);
        report("sharded_count", ts, tp, cs == cp);
    }
    {
        EigenOptions serial_opt;
        serial_opt.exec = Exec::serial;
        EigenOptions parallel_opt;
        EigenResult rs, rp;
        const double ts = seconds([&] { rs = perron_leading(A, serial_opt); }, 3);
        const double tp = seconds([&] { rp = perron_leading(A, parallel_opt); }, 3);
        report("perron_leading", ts, tp, rs.value == rp.value && rs.vec == rp.vec);
    }
    return 0;
}
