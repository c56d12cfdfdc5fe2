#pragma once

#include <cstdint>
#include <limits>
#include <optional>

#include "sounder/types.hpp"

namespace sounder {

struct ChannelTap {
    std::int64_t delay = 0; // samples
    cplx gain = 1.0;        // dimensionless
};

// discrete multipath channel; single-tap is the primary case (step-attenuator link)
struct ChannelModel {
    std::vector<ChannelTap> taps;

    void validate() const {
        if (taps.empty())
            throw ValidationError("ChannelModel: at least one tap required");
        std::int64_t prev = -1;
        for (const ChannelTap& t : taps) {
            if (t.delay < 0)
                throw ValidationError("ChannelModel: delays must be non-negative");
            if (t.delay <= prev)
                throw ValidationError("ChannelModel: delays must be strictly increasing");
            prev = t.delay;
        }
    }

    static ChannelModel identity() { return {{{0, 1.0}}}; }
    static ChannelModel single_tap(double gain_db, std::int64_t delay = 0) {
        return {{{delay, db_to_linear_amp(gain_db)}}};
    }
};

// generalized digital receiver chain parameters: gain -> noise -> limiter -> quantizer
struct ReceiverModel {
    double bandwidth_b = 2e9;     // Hz
    double gain_db = 0.0;         // G
    double noise_figure_db = 0.0; // NF
    double max_input_dbm = 0.0;   // S_max
    std::optional<int> bits_l;    // empty = continuous amplitude
    double fullscale_l0 = 1.0;    // limiter/quantizer ceiling, normalized units

    void validate() const {
        if (!(bandwidth_b > 0.0))
            throw ValidationError("ReceiverModel: bandwidth_b must be > 0");
        if (!(fullscale_l0 > 0.0))
            throw ValidationError("ReceiverModel: fullscale_l0 must be > 0");
        if (bits_l && *bits_l < 1)
            throw ValidationError("ReceiverModel: bits_l must be >= 1 when present");
    }
};

// SNR summary of one configured link; snr_r <= snr_a always
struct NormalizedLink {
    double snr_r_db = 0.0;
    double snr_a_db = 0.0;
    double backoff_db = 0.0; // snr_a - snr_r

    static NormalizedLink at_full_scale(double snr_a_db) { return {snr_a_db, snr_a_db, 0.0}; }
};

inline constexpr double kSnrOff = std::numeric_limits<double>::infinity();

// -174 dBm/Hz thermal floor integrated over the bandwidth
double thermal_noise_power_dbm(double bandwidth_b_hz);

// maps a dBm-level receiver description onto the normalized (snr_r, snr_a) domain;
// throws OverloadWarning when the input level exceeds S_max
NormalizedLink derive_link(const ReceiverModel& rx, double input_power_dbm);

// circular FIR over one period: out_n = sum_t gain_t * in_{(n - delay_t) mod N}
ComplexSequence apply_channel(const ComplexSequence& signal, const ChannelModel& channel);

// adds circularly-symmetric complex Gaussian noise with total per-sample power
// 10^(noise_power_db/10), split equally between real and imaginary parts;
// -inf disables. Deterministic per seed, independent of parallelism.
ComplexSequence add_noise(const ComplexSequence& signal, double noise_power_db,
                          std::uint64_t rng_seed);

// magnitude clip with phase preservation
ComplexSequence limit(const ComplexSequence& signal, double ceiling);

enum class QuantizerStyle { MidRise, MidTread };

// uniform quantization per component with step delta = 2^(1-L) * L0,
// saturating at +-(L0 - delta/2); mid-rise by default, mid-tread is a
// sensitivity-check alternative
ComplexSequence quantize(const ComplexSequence& signal, int bits_l, double fullscale_l0,
                         QuantizerStyle style = QuantizerStyle::MidRise);

// Full receive chain: K periods of tx through the channel, scaled so a
// full-scale signal (snr_r = snr_a) has interpolated peak envelope exactly at
// fullscale_l0, plus noise at the fixed floor fullscale-power - snr_a (dBFS
// convention: the output noise level does not depend on the input level),
// then limiter and optional quantizer. Returns K*N samples.
ComplexSequence simulate_receive(const ComplexSequence& tx, const ChannelModel& channel,
                                 const NormalizedLink& link, std::optional<int> bits_l,
                                 int periods_k, std::uint64_t rng_seed);

// simulate_receive with the full-scale factor precomputed by the caller
// (hot path for Monte-Carlo sweeps; identical arithmetic)
ComplexSequence simulate_receive_scaled(const ComplexSequence& tx, const ChannelModel& channel,
                                        const NormalizedLink& link, std::optional<int> bits_l,
                                        int periods_k, std::uint64_t rng_seed,
                                        double full_scale_amp, double fullscale_l0 = 1.0);

} // namespace sounder
