#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <omp.h>

#include "sounder/metrics.hpp"
#include "sounder/reference.hpp"
#include "sounder/rng.hpp"

using namespace sounder;

namespace {

CirEstimate synthetic_cir(std::size_t n, std::size_t peak, double peak_val, double floor_val) {
    CirEstimate cir;
    cir.taps.assign(n, cplx(floor_val, 0.0));
    cir.taps[peak] = cplx(peak_val, 0.0);
    return cir;
}

bool rows_equal(const std::vector<MonteCarloRow>& a, const std::vector<MonteCarloRow>& b) {
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].snr_r_db != b[i].snr_r_db || a[i].psr_q_db != b[i].psr_q_db ||
            a[i].psr_mean_db != b[i].psr_mean_db || a[i].trials != b[i].trials)
            return false;
    return true;
}

} // namespace

TEST_CASE("quantile interpolates order statistics") {
    std::vector<double> v(100);
    std::iota(v.begin(), v.end(), 1.0);
    CHECK(quantile(v, 0.99) == doctest::Approx(99.01).epsilon(1e-12));
    CHECK(quantile(v, 0.0) == 1.0);
    CHECK(quantile(v, 1.0) == 100.0);
    CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.5) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(quantile({7.0}, 0.3) == 7.0);
}

TEST_CASE("quantile rejects bad input") {
    CHECK_THROWS_AS(quantile({}, 0.5), EmptyInput);
    CHECK_THROWS_AS(quantile({1.0}, -0.1), InvalidRange);
    CHECK_THROWS_AS(quantile({1.0}, 1.5), InvalidRange);
    CHECK_THROWS_AS(quantile({1.0}, std::nan("")), InvalidRange);
}

TEST_CASE("quantile agrees with the sort-based oracle") {
    std::uint64_t ctr = 0;
    for (int instance = 0; instance < 1000; ++instance) {
        const std::size_t len = 1 + rng::bits_at(555, ctr++) % 50;
        std::vector<double> v(len);
        for (double& x : v)
            x = rng::gaussian_pair(556, ctr++).real();
        const double q = rng::unit_open(rng::bits_at(557, ctr++)) * 0.999;
        const double fast = quantile(v, q);
        const double slow = reference::quantile_by_sort(v, q);
        CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
    }
}

TEST_CASE("psr of a synthetic cir with a flat floor") {
    const CirEstimate cir = synthetic_cir(1000, 0, 1.0, 0.001);
    const PsrReport r = psr(cir, 0);
    CHECK(r.peak_index == 0);
    CHECK(r.peak_magnitude_db == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.floor_q99_db == doctest::Approx(-60.0).epsilon(1e-9));
    CHECK(r.psr_db == doctest::Approx(60.0).epsilon(1e-9));
    // self-consistency
    CHECK(r.psr_db == doctest::Approx(r.peak_magnitude_db - r.floor_q99_db).epsilon(1e-12));
}

TEST_CASE("psr exclusion removes mainlobe shoulders from the floor") {
    CirEstimate cir = synthetic_cir(100, 50, 1.0, 0.001);
    cir.taps[49] = cplx(0.5, 0.0);
    cir.taps[51] = cplx(0.5, 0.0);
    CHECK(psr(cir, 2).psr_db == doctest::Approx(60.0).epsilon(1e-9));
    // without exclusion the shoulders dominate the 0.99-quantile
    CHECK(psr(cir, 0).psr_db == doctest::Approx(6.0206).epsilon(1e-3));
}

TEST_CASE("default psr exclusion follows the window") {
    CirEstimate cir = synthetic_cir(1000, 500, 1.0, 0.001);
    cir.window = WindowSpec{WindowKind::Chebyshev, 100.0};
    const int hw = mainlobe_halfwidth_bins(cir.window, 1000);
    CHECK(psr(cir).excluded_halfwidth == hw);
    CHECK(psr(cir).psr_db == psr(cir, hw).psr_db);

    cir.window = WindowSpec{WindowKind::Rectangular, 0.0};
    CHECK(psr(cir).excluded_halfwidth == 0);
}

TEST_CASE("psr rejects degenerate input") {
    CirEstimate dead;
    dead.taps.assign(64, cplx(0.0, 0.0));
    CHECK_THROWS_AS(psr(dead, 0), DegenerateCir);
    CirEstimate tiny = synthetic_cir(5, 0, 1.0, 0.1);
    CHECK_THROWS_AS(psr(tiny, 2), ValidationError);
    CHECK_THROWS_AS(psr(tiny, -1), InvalidRange);
}

TEST_CASE("idr reduces to psr for a single tap") {
    const CirEstimate cir = synthetic_cir(500, 20, 1.0, 0.001);
    CHECK(idr(cir, {20}, 0) == doctest::Approx(psr(cir, 0).psr_db).epsilon(1e-12));
}

TEST_CASE("idr rates the strongest tap against the error floor") {
    CirEstimate cir = synthetic_cir(1000, 0, 1.0, 0.001);
    cir.taps[10] = cplx(0.0, 0.5);
    CHECK(idr(cir, {0, 10}, 0) == doctest::Approx(60.0).epsilon(1e-9));
}

TEST_CASE("idr input validation") {
    const CirEstimate cir = synthetic_cir(100, 0, 1.0, 0.001);
    CHECK_THROWS_AS(idr(cir, {}, 0), EmptyInput);
    CHECK_THROWS_AS(idr(cir, {100}, 0), InvalidRange);
    CHECK_THROWS_AS(idr(cir, {0}, 100), ValidationError);
}

TEST_CASE("processing gain splits into correlation and averaging terms") {
    const ProcessingGain a = processing_gain(100000, 1);
    CHECK(a.g_corr_db == doctest::Approx(50.0).epsilon(1e-12));
    CHECK(a.g_avg_db == 0.0);
    CHECK(a.g_proc_db == doctest::Approx(50.0).epsilon(1e-12));

    const ProcessingGain b = processing_gain(200000, 10);
    CHECK(b.g_proc_db == doctest::Approx(63.0103).epsilon(1e-5));

    const ProcessingGain c = processing_gain(1, 1);
    CHECK(c.g_proc_db == 0.0);

    CHECK_THROWS_AS(processing_gain(0, 1), InvalidRange);
    CHECK_THROWS_AS(processing_gain(100, 0), InvalidRange);
}

TEST_CASE("psr bound applies the empirical constant") {
    CHECK(psr_bound(40.0, 50.0) == doctest::Approx(80.3).epsilon(1e-12));
    CHECK(psr_bound(45.0, 50.0) == doctest::Approx(85.3).epsilon(1e-12));
    CHECK(psr_bound(34.0, processing_gain(200000, 10).g_proc_db) ==
          doctest::Approx(87.3).epsilon(1e-3));
}

TEST_CASE("maximum path loss adds the dynamic range to the minimum") {
    CHECK(max_path_loss(60.0, 83.2) == doctest::Approx(143.2).epsilon(1e-12));
}

TEST_CASE("link budget assembles the closed-form numbers") {
    const LinkBudget lb = link_budget(0.0, 0.0, 34.0, 200000, 10, 10.0);
    CHECK(lb.g_proc_db == doctest::Approx(63.0103).epsilon(1e-5));
    CHECK(lb.dr_a_db == doctest::Approx(87.3).epsilon(1e-3));
    CHECK(lb.pl_min_db == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(lb.pl_max_db == doctest::Approx(87.3).epsilon(1e-3));
    REQUIRE(lb.pl_min_0_db.has_value());
    CHECK(*lb.pl_min_0_db == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(*lb.pl_max_0_db == doctest::Approx(97.3).epsilon(1e-3));

    const LinkBudget bare = link_budget(5.0, -5.0, 40.0, 1000, 1);
    CHECK(bare.pl_min_db == doctest::Approx(10.0).epsilon(1e-12));
    CHECK_FALSE(bare.pl_min_0_db.has_value());
}

TEST_CASE("monte carlo is deterministic and invariant to thread count") {
    MonteCarloSpec mc;
    mc.spec = {256, 1};
    mc.snr_a_db = 40.0;
    mc.snr_r_db = {10.0, 20.0};
    mc.bits_l = 6;
    mc.trials = 40;
    mc.quantile_q = 0.05;
    mc.master_seed = 77;

    const std::vector<MonteCarloRow> first = monte_carlo_psr(mc);
    const std::vector<MonteCarloRow> second = monte_carlo_psr(mc);
    CHECK(rows_equal(first, second));

    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const std::vector<MonteCarloRow> serial = monte_carlo_psr(mc);
    omp_set_num_threads(saved > 1 ? saved : 2);
    const std::vector<MonteCarloRow> parallel = monte_carlo_psr(mc);
    omp_set_num_threads(saved);
    CHECK(rows_equal(serial, parallel));
    CHECK(rows_equal(first, serial));

    // row bookkeeping
    REQUIRE(first.size() == 2);
    CHECK(first[0].snr_r_db == 10.0);
    CHECK(first[1].snr_r_db == 20.0);
    CHECK(first[0].n == 256);
    CHECK(first[0].bits_l == 6);
    CHECK(first[0].periods_k == 1);
    CHECK(first[0].snr_a_db == 40.0);
    CHECK(first[0].master_seed == 77);
    CHECK(first[0].trials == 40);
}

TEST_CASE("monte carlo quantile respects ordering") {
    MonteCarloSpec mc;
    mc.spec = {512, 1};
    mc.snr_a_db = 30.0;
    mc.snr_r_db = {15.0};
    mc.trials = 30;
    mc.master_seed = 5;

    mc.quantile_q = 0.1;
    const std::vector<MonteCarloRow> low = monte_carlo_psr(mc);
    mc.quantile_q = 0.5;
    const std::vector<MonteCarloRow> median = monte_carlo_psr(mc);
    CHECK(low[0].psr_q_db <= median[0].psr_q_db);
    // same seeds, same trials: only the quantile differs
    CHECK(low[0].psr_mean_db == median[0].psr_mean_db);
}

TEST_CASE("monte carlo tracks the empirical psr law") {
    MonteCarloSpec mc;
    mc.spec = {10000, 1};
    mc.snr_a_db = 40.0;
    mc.snr_r_db = {10.0, 20.0, 30.0};
    mc.bits_l = 10;
    mc.trials = 100;
    mc.quantile_q = 0.01;
    mc.master_seed = 2024;

    const std::vector<MonteCarloRow> rows = monte_carlo_psr(mc);
    const double g_proc = processing_gain(10000, 1).g_proc_db;
    for (const MonteCarloRow& row : rows) {
        const double law = psr_bound(row.snr_r_db, g_proc);
        CAPTURE(row.snr_r_db);
        CHECK(std::abs(row.psr_q_db - law) < 1.5);
        // the bound is never exceeded by more than the stated margin
        CHECK(row.psr_q_db < law + 1.5);
    }
    // monotone in snr_r
    CHECK(rows[0].psr_q_db < rows[1].psr_q_db);
    CHECK(rows[1].psr_q_db < rows[2].psr_q_db);
}

TEST_CASE("monte carlo spec validation") {
    MonteCarloSpec mc;
    mc.spec = {256, 1};
    mc.snr_a_db = 40.0;
    mc.snr_r_db = {};
    CHECK_THROWS_AS(monte_carlo_psr(mc), ValidationError);
    mc.snr_r_db = {45.0};
    CHECK_THROWS_AS(monte_carlo_psr(mc), ValidationError);
    mc.snr_r_db = {20.0};
    mc.trials = 50;
    mc.quantile_q = 0.01; // 50 trials cannot resolve the 0.01 tail
    CHECK_THROWS_AS(monte_carlo_psr(mc), ValidationError);
    mc.trials = 200;
    mc.bits_l = 0;
    CHECK_THROWS_AS(monte_carlo_psr(mc), ValidationError);
}

TEST_CASE("advisor recommends transmit power while headroom remains") {
    AdvisorScenario sc;
    sc.min_path_loss_db = 10.0; // received level at d_min sits 10 dB below s_max
    sc.ptx_dbm = 0.0;
    sc.ptx_max_dbm = 10.0;
    sc.s_max_dbm = 0.0;
    sc.snr_a_db = 40.0;
    sc.n = 10000;
    sc.periods_k = 1;
    sc.target_dr_db = 70.3;

    const std::vector<Recommendation> recs = advise(sc);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].rule == 2);
    CHECK(recs[0].delta_db == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(recs[0].action.find("10.0 dB") != std::string::npos);
}

TEST_CASE("advisor recommends the gain block when it lifts snr_r") {
    AdvisorScenario sc;
    sc.min_path_loss_db = 0.0;
    sc.ptx_dbm = 0.0;
    sc.ptx_max_dbm = 0.0;
    sc.s_max_dbm = 0.0;
    sc.snr_a_db = 20.0; // snr_r at d_min = 20
    sc.snr_a_gain_db = 34.0;
    sc.n = 10000;
    sc.periods_k = 1;
    sc.target_dr_db = 64.3;

    const std::vector<Recommendation> recs = advise(sc);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].rule == 3);
    CHECK(recs[0].delta_db == doctest::Approx(14.0).epsilon(1e-9));
}

TEST_CASE("advisor grows the time-bandwidth product when power is exhausted") {
    AdvisorScenario sc;
    sc.min_path_loss_db = 0.0;
    sc.ptx_dbm = 0.0;
    sc.ptx_max_dbm = 0.0;
    sc.s_max_dbm = 0.0;
    sc.snr_a_db = 40.0;
    sc.n = 10000;
    sc.periods_k = 1;
    sc.target_dr_db = psr_bound(40.0, 40.0) + 10.0;

    const std::vector<Recommendation> recs = advise(sc);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].rule == 1);
    CHECK(recs[0].delta_db == doctest::Approx(10.0).epsilon(1e-6));
    CHECK(recs[0].action.find("K: 1 -> 10") != std::string::npos);
}

TEST_CASE("advisor orders combined recommendations by rule") {
    AdvisorScenario sc;
    sc.min_path_loss_db = 10.0;
    sc.ptx_dbm = 0.0;
    sc.ptx_max_dbm = 5.0; // can recover only half the headroom
    sc.s_max_dbm = 0.0;
    sc.snr_a_db = 40.0;
    sc.n = 10000;
    sc.periods_k = 1;
    sc.target_dr_db = 90.0;

    const std::vector<Recommendation> recs = advise(sc);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].rule == 1);
    CHECK(recs[1].rule == 2);
    CHECK(recs[1].delta_db == doctest::Approx(5.0).epsilon(1e-9));
    // snr_r_best = 35 -> dr = 65.3, so the tb rule covers the remaining 24.7 dB
    CHECK(recs[0].delta_db == doctest::Approx(24.7).epsilon(1e-6));
}

TEST_CASE("advisor reports an unreachable target") {
    AdvisorScenario sc;
    sc.min_path_loss_db = 0.0;
    sc.ptx_dbm = 0.0;
    sc.ptx_max_dbm = 0.0;
    sc.s_max_dbm = 0.0;
    sc.snr_a_db = 40.0;
    sc.n = 10000;
    sc.periods_k = 1;
    sc.max_n = 20000;
    sc.max_k = 2;
    sc.target_dr_db = psr_bound(40.0, 40.0) + 10.0;

    CHECK_THROWS_AS(advise(sc), InfeasibleTarget);
    try {
        advise(sc);
    } catch (const InfeasibleTarget& e) {
        CHECK(std::string(e.what()).find("short by") != std::string::npos);
    }
}

TEST_CASE("advisor stays quiet when the target is already met") {
    AdvisorScenario sc;
    sc.min_path_loss_db = 0.0;
    sc.ptx_dbm = 0.0;
    sc.ptx_max_dbm = 10.0;
    sc.s_max_dbm = 0.0;
    sc.snr_a_db = 40.0;
    sc.n = 100000;
    sc.periods_k = 1;
    sc.target_dr_db = 60.0;
    CHECK(advise(sc).empty());
}

TEST_CASE("advisor can word the first rule as a bandwidth increase") {
    AdvisorScenario sc;
    sc.min_path_loss_db = 0.0;
    sc.ptx_dbm = 0.0;
    sc.ptx_max_dbm = 0.0;
    sc.s_max_dbm = 0.0;
    sc.snr_a_db = 40.0;
    sc.n = 10000;
    sc.periods_k = 1;
    sc.target_dr_db = psr_bound(40.0, 40.0) + 3.0;
    sc.vary_bandwidth = true;

    const std::vector<Recommendation> recs = advise(sc);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].action.find("bandwidth") != std::string::npos);
}

TEST_CASE("advisor scenario validation") {
    AdvisorScenario sc;
    sc.ptx_dbm = 5.0;
    sc.ptx_max_dbm = 0.0;
    sc.n = 100;
    CHECK_THROWS_AS(advise(sc), ValidationError);
}
