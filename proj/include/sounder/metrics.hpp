#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sounder/correlator.hpp"
#include "sounder/types.hpp"

namespace sounder {

// Empirical constant of the PSR law (PSR_max = SNR_R + G_proc - const). Fitted
// from simulation, not derived analytically; the Monte-Carlo engine is the
// authority that validates it. This is the single place it lives.
inline constexpr double kEmpiricalPsrConstantDb = 9.7;

struct PsrReport {
    double psr_db = 0.0; // peak_magnitude_db - floor_q99_db
    std::size_t peak_index = 0;
    double peak_magnitude_db = 0.0;
    double floor_q99_db = 0.0; // 0.99-quantile of non-peak magnitudes
    int excluded_halfwidth = 0;
};

struct LinkBudget {
    double g_corr_db = 0.0;
    double g_avg_db = 0.0;
    double g_proc_db = 0.0; // g_corr + g_avg
    double dr_a_db = 0.0;
    double pl_min_db = 0.0;
    double pl_max_db = 0.0; // pl_min + dr_a
    // pass-through maxima over hardware configurations (no search performed)
    std::optional<double> pl_min_0_db;
    std::optional<double> dr_a_0_db;
    std::optional<double> pl_max_0_db;
};

struct MonteCarloSpec {
    FzcSpec spec;
    double snr_a_db = 40.0;
    std::vector<double> snr_r_db;
    std::optional<int> bits_l; // empty = continuous amplitude
    int periods_k = 1;
    int trials = 200;
    double quantile_q = 0.01;
    std::uint64_t master_seed = 1;

    void validate() const {
        spec.validate();
        if (snr_r_db.empty())
            throw ValidationError("MonteCarloSpec: snr_r_db list must be nonempty");
        for (double r : snr_r_db)
            if (r > snr_a_db + 1e-12)
                throw ValidationError("MonteCarloSpec: snr_r exceeds snr_a");
        if (periods_k < 1)
            throw ValidationError("MonteCarloSpec: periods_k must be >= 1");
        if (!(quantile_q > 0.0 && quantile_q < 1.0))
            throw ValidationError("MonteCarloSpec: quantile_q must be in (0,1)");
        // at least one expected sample in the estimated tail
        const double tail = quantile_q < 0.5 ? quantile_q : 1.0 - quantile_q;
        if (static_cast<double>(trials) * tail < 1.0)
            throw ValidationError("MonteCarloSpec: trials too small for quantile_q (need >= " +
                                  std::to_string(static_cast<int>(1.0 / tail)) + ")");
        if (bits_l && *bits_l < 1)
            throw ValidationError("MonteCarloSpec: bits_l must be >= 1 when present");
    }
};

// one result row; bits_l 0 encodes the unquantized pipeline
struct MonteCarloRow {
    double snr_r_db = 0.0;
    double psr_q_db = 0.0;    // quantile_q quantile of per-trial PSR
    double psr_mean_db = 0.0; // mean of per-trial PSR
    int trials = 0;
    std::int64_t n = 0;
    int bits_l = 0;
    int periods_k = 1;
    double snr_a_db = 0.0;
    std::uint64_t master_seed = 0;
};

// linear-interpolation sample quantile on order statistics (h = (n-1)*q)
double quantile(std::vector<double> values, double q);

// global peak over the 0.99-quantile of magnitudes outside the exclusion
// interval around it
PsrReport psr(const CirEstimate& cir, int excluded_halfwidth);

// default exclusion: 0 for rectangular-window CIRs, the window mainlobe
// half-width for Chebyshev-windowed ones
PsrReport psr(const CirEstimate& cir);

// strongest caller-identified multipath tap over the 0.99-quantile of all
// remaining (error) bins; equals psr for a single-tap CIR
double idr(const CirEstimate& cir, const std::vector<std::size_t>& multipath_bins,
           int excluded_halfwidth = 0);

struct ProcessingGain {
    double g_corr_db = 0.0;
    double g_avg_db = 0.0;
    double g_proc_db = 0.0;
};

// g_corr = 10log10(N) (B*T_p = N at 1 sample per chip), g_avg = 10log10(K)
ProcessingGain processing_gain(std::int64_t n, int periods_k);

// PSR_max = snr_r + g_proc - the empirical constant
double psr_bound(double snr_r_db, double g_proc_db);

// PL_max = PL_min + DR
double max_path_loss(double pl_min_db, double dr_db);

// assembles the closed-form budget; ptx_max (when given) fills the
// pass-through maxima
LinkBudget link_budget(double ptx_dbm, double s_max_dbm, double snr_a_db, std::int64_t n,
                       int periods_k, std::optional<double> ptx_max_dbm = std::nullopt);

// per (snr_r point x trial): simulate_receive -> compute_cir -> psr, seeds
// derived from (master_seed, point index, trial index); trials run in
// parallel, results identical at any thread count
std::vector<MonteCarloRow> monte_carlo_psr(const MonteCarloSpec& mc);

// measurement scenario for the parametrization advisor
struct AdvisorScenario {
    double min_path_loss_db = 0.0; // path loss at the minimal distance d_min
    double ptx_dbm = 0.0;
    double ptx_max_dbm = 0.0;
    double s_max_dbm = 0.0;
    double snr_a_db = 0.0;                // without additional input gain
    std::optional<double> snr_a_gain_db;  // achievable SNR with the input gain block
    std::int64_t n = 1;
    int periods_k = 1;
    double target_dr_db = 0.0;
    // optional caps making the time-bandwidth rule bounded (0 = unconstrained)
    std::int64_t max_n = 0;
    int max_k = 0;
    // by default B is fixed by the band under study and the first rule varies
    // N and K; set this to word the recommendation as a bandwidth increase
    bool vary_bandwidth = false;
};

struct Recommendation {
    int rule = 0; // 1 = time-bandwidth product, 2 = transmit power, 3 = gain block
    double delta_db = 0.0;
    std::string action;
};

// evaluates the three parametrization rules in order and emits the applicable
// actions with quantified gains; InfeasibleTarget when the capped rules cannot
// reach target_dr (message reports the shortfall)
std::vector<Recommendation> advise(const AdvisorScenario& scenario);

} // namespace sounder
