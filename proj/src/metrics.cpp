#include "sounder/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <omp.h>

#include "sounder/frontend.hpp"
#include "sounder/fzc.hpp"
#include "sounder/rng.hpp"

namespace sounder {

double quantile(std::vector<double> values, double q) {
    if (values.empty())
        throw EmptyInput("quantile: empty input");
    if (!(q >= 0.0 && q <= 1.0))
        throw InvalidRange("quantile: q must be in [0,1]");
    const std::size_t n = values.size();
    if (n == 1)
        return values[0];
    const double h = static_cast<double>(n - 1) * q;
    const std::size_t lo = std::min(static_cast<std::size_t>(std::floor(h)), n - 2);
    const double frac = h - static_cast<double>(lo);
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(lo),
                     values.end());
    const double v_lo = values[lo];
    if (frac == 0.0)
        return v_lo;
    // after nth_element everything right of lo is >= v_lo, so the next order
    // statistic is the minimum of that tail
    const double v_hi = *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(lo) + 1,
                                          values.end());
    return v_lo + frac * (v_hi - v_lo);
}

namespace {

std::size_t circular_distance(std::size_t a, std::size_t b, std::size_t n) {
    const std::size_t d = a > b ? a - b : b - a;
    return std::min(d, n - d);
}

std::string fmt_db(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return buf;
}

} // namespace

PsrReport psr(const CirEstimate& cir, int excluded_halfwidth) {
    if (excluded_halfwidth < 0)
        throw InvalidRange("psr: excluded_halfwidth must be >= 0");
    const std::size_t n = cir.taps.size();
    if (n <= 2 * static_cast<std::size_t>(excluded_halfwidth) + 1)
        throw ValidationError("psr: CIR length must exceed 2*excluded_halfwidth + 1");
    std::size_t peak = 0;
    double peak2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = std::norm(cir.taps[i]);
        if (p > peak2) {
            peak2 = p;
            peak = i;
        }
    }
    if (peak2 == 0.0)
        throw DegenerateCir("psr: all CIR samples are zero");
    std::vector<double> rest;
    rest.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        if (circular_distance(i, peak, n) > static_cast<std::size_t>(excluded_halfwidth))
            rest.push_back(std::abs(cir.taps[i]));
    PsrReport report;
    report.peak_index = peak;
    report.excluded_halfwidth = excluded_halfwidth;
    report.peak_magnitude_db = linear_amp_to_db(std::sqrt(peak2));
    report.floor_q99_db = linear_amp_to_db(quantile(std::move(rest), 0.99));
    report.psr_db = report.peak_magnitude_db - report.floor_q99_db;
    return report;
}

PsrReport psr(const CirEstimate& cir) {
    const int hw = cir.window.kind == WindowKind::Rectangular
                       ? 0
                       : mainlobe_halfwidth_bins(cir.window, cir.taps.size());
    return psr(cir, hw);
}

double idr(const CirEstimate& cir, const std::vector<std::size_t>& multipath_bins,
           int excluded_halfwidth) {
    if (multipath_bins.empty())
        throw EmptyInput("idr: multipath_bins must be nonempty");
    const std::size_t n = cir.taps.size();
    double strongest = 0.0;
    for (std::size_t b : multipath_bins) {
        if (b >= n)
            throw InvalidRange("idr: multipath bin " + std::to_string(b) + " out of range");
        strongest = std::max(strongest, std::abs(cir.taps[b]));
    }
    if (strongest == 0.0)
        throw DegenerateCir("idr: all multipath taps are zero");
    std::vector<double> rest;
    rest.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        bool excluded = false;
        for (std::size_t b : multipath_bins)
            if (circular_distance(i, b, n) <= static_cast<std::size_t>(excluded_halfwidth)) {
                excluded = true;
                break;
            }
        if (!excluded)
            rest.push_back(std::abs(cir.taps[i]));
    }
    if (rest.empty())
        throw ValidationError("idr: exclusion removed every error bin");
    return linear_amp_to_db(strongest) - linear_amp_to_db(quantile(std::move(rest), 0.99));
}

ProcessingGain processing_gain(std::int64_t n, int periods_k) {
    if (n < 1)
        throw InvalidRange("processing_gain: N must be >= 1");
    if (periods_k < 1)
        throw InvalidRange("processing_gain: K must be >= 1");
    ProcessingGain g;
    g.g_corr_db = 10.0 * std::log10(static_cast<double>(n));
    g.g_avg_db = 10.0 * std::log10(static_cast<double>(periods_k));
    g.g_proc_db = g.g_corr_db + g.g_avg_db;
    return g;
}

double psr_bound(double snr_r_db, double g_proc_db) {
    return snr_r_db + g_proc_db - kEmpiricalPsrConstantDb;
}

double max_path_loss(double pl_min_db, double dr_db) { return pl_min_db + dr_db; }

LinkBudget link_budget(double ptx_dbm, double s_max_dbm, double snr_a_db, std::int64_t n,
                       int periods_k, std::optional<double> ptx_max_dbm) {
    const ProcessingGain g = processing_gain(n, periods_k);
    LinkBudget lb;
    lb.g_corr_db = g.g_corr_db;
    lb.g_avg_db = g.g_avg_db;
    lb.g_proc_db = g.g_proc_db;
    lb.dr_a_db = psr_bound(snr_a_db, g.g_proc_db);
    lb.pl_min_db = ptx_dbm - s_max_dbm;
    lb.pl_max_db = max_path_loss(lb.pl_min_db, lb.dr_a_db);
    if (ptx_max_dbm) {
        lb.pl_min_0_db = *ptx_max_dbm - s_max_dbm;
        lb.dr_a_0_db = lb.dr_a_db;
        lb.pl_max_0_db = max_path_loss(*lb.pl_min_0_db, *lb.dr_a_0_db);
    }
    return lb;
}

std::vector<MonteCarloRow> monte_carlo_psr(const MonteCarloSpec& mc) {
    mc.validate();
    const ComplexSequence tx = generate_fzc(mc.spec, 1.0);
    const double full_scale_amp = 1.0 / interpolated_peak(tx, 8);
    const std::int64_t points = static_cast<std::int64_t>(mc.snr_r_db.size());
    const std::int64_t trials = mc.trials;
    std::vector<double> psr_db(static_cast<std::size_t>(points * trials), 0.0);
    // one work item per (snr_r point, trial); seeds depend only on the indices,
    // so the result is identical at any thread count
#pragma omp parallel for collapse(2) schedule(dynamic)
    for (std::int64_t p = 0; p < points; ++p) {
        for (std::int64_t t = 0; t < trials; ++t) {
            const std::uint64_t seed = rng::derive_seed(mc.master_seed,
                                                        static_cast<std::uint64_t>(p),
                                                        static_cast<std::uint64_t>(t));
            const ChannelModel channel =
                ChannelModel::single_tap(mc.snr_r_db[static_cast<std::size_t>(p)] - mc.snr_a_db);
            const NormalizedLink link = NormalizedLink::at_full_scale(mc.snr_a_db);
            Capture capture;
            capture.samples = simulate_receive_scaled(tx, channel, link, mc.bits_l, mc.periods_k,
                                                      seed, full_scale_amp);
            capture.spec = mc.spec;
            capture.periods_k = mc.periods_k;
            const CirEstimate cir = compute_cir(capture, tx, nullptr, WindowSpec{});
            psr_db[static_cast<std::size_t>(p * trials + t)] = psr(cir, 0).psr_db;
        }
    }
    std::vector<MonteCarloRow> rows;
    rows.reserve(static_cast<std::size_t>(points));
    for (std::int64_t p = 0; p < points; ++p) {
        const auto begin = psr_db.begin() + static_cast<std::ptrdiff_t>(p * trials);
        std::vector<double> per_trial(begin, begin + static_cast<std::ptrdiff_t>(trials));
        MonteCarloRow row;
        row.snr_r_db = mc.snr_r_db[static_cast<std::size_t>(p)];
        row.psr_mean_db = 0.0;
        for (double v : per_trial)
            row.psr_mean_db += v;
        row.psr_mean_db /= static_cast<double>(trials);
        row.psr_q_db = quantile(std::move(per_trial), mc.quantile_q);
        row.trials = mc.trials;
        row.n = mc.spec.n;
        row.bits_l = mc.bits_l ? *mc.bits_l : 0;
        row.periods_k = mc.periods_k;
        row.snr_a_db = mc.snr_a_db;
        row.master_seed = mc.master_seed;
        rows.push_back(row);
    }
    return rows;
}

std::vector<Recommendation> advise(const AdvisorScenario& sc) {
    if (sc.n < 1 || sc.periods_k < 1)
        throw ValidationError("advise: N and K must be >= 1");
    if (sc.ptx_dbm > sc.ptx_max_dbm)
        throw ValidationError("advise: ptx exceeds ptx_max");
    const ProcessingGain g = processing_gain(sc.n, sc.periods_k);
    const double input_at_dmin = sc.ptx_dbm - sc.min_path_loss_db;
    const double rx_headroom = sc.s_max_dbm - input_at_dmin; // dB below full scale at d_min
    const double snr_r_dmin = sc.snr_a_db - std::max(0.0, rx_headroom);
    const double dr_now = psr_bound(std::min(snr_r_dmin, sc.snr_a_db), g.g_proc_db);
    std::vector<Recommendation> recs;
    if (sc.target_dr_db <= dr_now)
        return recs; // target already met, nothing to recommend

    // rule 2: raise transmit power while the received level stays below S_max
    const double power_gain =
        std::max(0.0, std::min(rx_headroom, sc.ptx_max_dbm - sc.ptx_dbm));
    double snr_r_best = std::min(snr_r_dmin + power_gain, sc.snr_a_db);

    // rule 3: an input gain block helps when the received SNR at d_min is
    // still below the achievable SNR with that block in place
    double gain_block_delta = 0.0;
    if (sc.snr_a_gain_db && snr_r_best < *sc.snr_a_gain_db) {
        gain_block_delta = *sc.snr_a_gain_db - snr_r_best;
        snr_r_best = *sc.snr_a_gain_db;
    }

    // rule 1 covers what power moves cannot: grow the time-bandwidth product
    const double dr_after_power = psr_bound(snr_r_best, g.g_proc_db);
    const double tb_needed = sc.target_dr_db - dr_after_power;
    if (tb_needed > 0.0) {
        double tb_available = std::numeric_limits<double>::infinity();
        if (sc.max_n > 0 || sc.max_k > 0) {
            const double n_room =
                sc.max_n > 0 ? 10.0 * std::log10(static_cast<double>(sc.max_n) /
                                                 static_cast<double>(sc.n))
                             : std::numeric_limits<double>::infinity();
            const double k_room =
                sc.max_k > 0 ? 10.0 * std::log10(static_cast<double>(sc.max_k) /
                                                 static_cast<double>(sc.periods_k))
                             : std::numeric_limits<double>::infinity();
            tb_available = (std::isinf(n_room) ? 0.0 : n_room) +
                           (std::isinf(k_room) ? 0.0 : k_room);
            if (std::isinf(n_room) || std::isinf(k_room))
                tb_available = std::numeric_limits<double>::infinity();
        }
        if (tb_needed > tb_available + 1e-9)
            throw InfeasibleTarget("advise: target dynamic range unreachable; short by " +
                                   fmt_db(tb_needed - tb_available) +
                                   " dB even with all rules applied");
        const double factor = std::pow(10.0, tb_needed / 10.0);
        std::string action;
        if (sc.vary_bandwidth) {
            action = "increase the time-bandwidth product by " + fmt_db(tb_needed) +
                     " dB by widening the bandwidth by a factor of " + fmt_db(factor);
        } else {
            const long long k_suggest =
                static_cast<long long>(std::ceil(static_cast<double>(sc.periods_k) * factor));
            const long long n_suggest =
                static_cast<long long>(std::ceil(static_cast<double>(sc.n) * factor));
            action = "increase the time-bandwidth product by " + fmt_db(tb_needed) +
                     " dB (e.g. K: " + std::to_string(sc.periods_k) + " -> " +
                     std::to_string(k_suggest) + ", or N: " + std::to_string(sc.n) + " -> " +
                     std::to_string(n_suggest) + ")";
        }
        recs.push_back({1, tb_needed, std::move(action)});
    }
    if (power_gain > 0.0)
        recs.push_back({2, power_gain,
                        "increase transmit power by " + fmt_db(power_gain) +
                            " dB (received level stays below S_max at d_min)"});
    if (gain_block_delta > 0.0)
        recs.push_back({3, gain_block_delta,
                        "insert the input gain block (received SNR at d_min rises by up to " +
                            fmt_db(gain_block_delta) + " dB toward the achievable SNR " +
                            fmt_db(*sc.snr_a_gain_db) + " dB)"});
    return recs;
}

} // namespace sounder
