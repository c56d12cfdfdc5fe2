#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include <omp.h>

#include "sounder/correlator.hpp"
#include "sounder/frontend.hpp"
#include "sounder/fzc.hpp"
#include "sounder/metrics.hpp"
#include "sounder/reference.hpp"

using namespace sounder;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

bool rows_equal(const std::vector<MonteCarloRow>& a, const std::vector<MonteCarloRow>& b) {
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].psr_q_db != b[i].psr_q_db || a[i].psr_mean_db != b[i].psr_mean_db)
            return false;
    return true;
}

// parallel Monte-Carlo sweep against the same sweep pinned to one thread
bool bench_monte_carlo(bool smoke) {
    MonteCarloSpec mc;
    mc.spec = {smoke ? 512 : 20000, 1};
    mc.snr_a_db = 40.0;
    mc.snr_r_db = {10.0, 20.0, 30.0};
    mc.bits_l = 8;
    mc.trials = smoke ? 40 : 200;
    mc.quantile_q = 0.05;
    mc.master_seed = 11;

    const int threads = omp_get_max_threads();
    omp_set_num_threads(1);
    auto start = clock_type::now();
    const std::vector<MonteCarloRow> serial = monte_carlo_psr(mc);
    const double t_serial = seconds_since(start);

    omp_set_num_threads(threads);
    start = clock_type::now();
    const std::vector<MonteCarloRow> parallel = monte_carlo_psr(mc);
    const double t_parallel = seconds_since(start);

    const bool identical = rows_equal(serial, parallel);
    std::printf("monte-carlo sweep (N=%lld, %d trials x %zu points):\n",
                static_cast<long long>(mc.spec.n), mc.trials, mc.snr_r_db.size());
    std::printf("  1 thread  %8.3f s\n", t_serial);
    std::printf("  %d threads %8.3f s  (speedup %.2fx, rows identical: %s)\n", threads,
                t_parallel, t_serial / t_parallel, identical ? "yes" : "no");
    return identical;
}

// fft-based periodic correlation against the O(N^2) reference sum
bool bench_xcorr(bool smoke) {
    bool ok = true;
    for (std::int64_t n : smoke ? std::vector<std::int64_t>{1024}
                                : std::vector<std::int64_t>{1024, 4096}) {
        const ComplexSequence ref = generate_fzc({n, 1}, 1.0);
        const ComplexSequence rx = add_noise(ref, -30.0, 5);

        auto start = clock_type::now();
        const ComplexSequence fast = periodic_xcorr(rx, ref);
        const double t_fft = seconds_since(start);

        start = clock_type::now();
        const std::vector<cplx> direct = reference::direct_xcorr(rx.samples, ref.samples);
        const double t_direct = seconds_since(start);

        double peak = 0.0, diff = 0.0;
        for (std::size_t k = 0; k < direct.size(); ++k) {
            peak = std::max(peak, std::abs(direct[k]));
            diff = std::max(diff, std::abs(fast.samples[k] - direct[k]));
        }
        const double rel = diff / peak;
        std::printf("periodic correlation, N=%lld:\n", static_cast<long long>(n));
        std::printf("  fft        %8.3f ms\n", 1e3 * t_fft);
        std::printf("  direct sum %8.3f ms  (ratio %.0fx, worst deviation %.1e)\n",
                    1e3 * t_direct, t_direct / t_fft, rel);
        ok = ok && rel <= 1e-9;
    }
    return ok;
}

} // namespace

int main(int argc, char** argv) {
    bool smoke = false;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--smoke") == 0) {
            smoke = true;
        } else {
            std::fprintf(stderr, "usage: bench [--smoke]\n");
            return 2;
        }
    }
    const bool ok = bench_monte_carlo(smoke) && bench_xcorr(smoke);
    if (!ok) {
        std::fprintf(stderr, "bench: parallel and reference paths disagree\n");
        return 1;
    }
    return 0;
}
