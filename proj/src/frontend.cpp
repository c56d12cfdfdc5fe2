#include "sounder/frontend.hpp"

#include <cmath>

#include <omp.h>

#include "sounder/fzc.hpp"
#include "sounder/rng.hpp"

namespace sounder {

double thermal_noise_power_dbm(double bandwidth_b_hz) {
    if (!(bandwidth_b_hz > 0.0))
        throw ValidationError("thermal_noise_power: bandwidth must be > 0");
    return -174.0 + 10.0 * std::log10(bandwidth_b_hz);
}

NormalizedLink derive_link(const ReceiverModel& rx, double input_power_dbm) {
    rx.validate();
    if (input_power_dbm > rx.max_input_dbm)
        throw OverloadWarning("derive_link: input " + std::to_string(input_power_dbm) +
                              " dBm exceeds S_max = " + std::to_string(rx.max_input_dbm) +
                              " dBm (receiver saturated; limiter will clip)");
    // output noise N_q = G*N0 + N_i with N_i = G*N0*(F-1), so N_q = G*N0*F;
    // the gain cancels out of both SNRs
    const double n_q_dbm = thermal_noise_power_dbm(rx.bandwidth_b) + rx.gain_db + rx.noise_figure_db;
    NormalizedLink link;
    link.snr_a_db = rx.max_input_dbm + rx.gain_db - n_q_dbm;
    link.snr_r_db = input_power_dbm + rx.gain_db - n_q_dbm;
    link.backoff_db = link.snr_a_db - link.snr_r_db;
    return link;
}

ComplexSequence apply_channel(const ComplexSequence& signal, const ChannelModel& channel) {
    signal.validate();
    channel.validate();
    const std::int64_t n = static_cast<std::int64_t>(signal.samples.size());
    for (const ChannelTap& t : channel.taps)
        if (t.delay >= n)
            throw DelayOutOfRange("apply_channel: delay " + std::to_string(t.delay) +
                                  " >= signal length " + std::to_string(n));
    ComplexSequence out;
    out.sample_rate = signal.sample_rate;
    out.samples.assign(signal.samples.size(), cplx{0.0, 0.0});
    for (const ChannelTap& t : channel.taps) {
        const std::int64_t d = t.delay;
        for (std::int64_t i = 0; i < n; ++i)
            out.samples[static_cast<std::size_t>(i)] +=
                t.gain * signal.samples[static_cast<std::size_t>((i - d + n) % n)];
    }
    return out;
}

ComplexSequence add_noise(const ComplexSequence& signal, double noise_power_db,
                          std::uint64_t rng_seed) {
    signal.validate();
    ComplexSequence out = signal;
    if (noise_power_db == -kSnrOff)
        return out;
    // split the total power equally between the quadratures
    const double sigma = std::sqrt(db_to_linear_power(noise_power_db) / 2.0);
    const std::int64_t n = static_cast<std::int64_t>(out.samples.size());
#pragma omp parallel for schedule(static) if (n > 8192 && !omp_in_parallel())
    for (std::int64_t i = 0; i < n; ++i)
        out.samples[static_cast<std::size_t>(i)] +=
            sigma * rng::gaussian_pair(rng_seed, static_cast<std::uint64_t>(i));
    return out;
}

ComplexSequence limit(const ComplexSequence& signal, double ceiling) {
    if (!(ceiling > 0.0))
        throw ValidationError("limit: ceiling must be > 0");
    ComplexSequence out = signal;
    for (cplx& v : out.samples) {
        const double mag = std::abs(v);
        if (mag > ceiling)
            v *= ceiling / mag;
    }
    return out;
}

namespace {

inline double quantize_component(double x, double delta, double top, QuantizerStyle style) {
    const double q = style == QuantizerStyle::MidRise
                         ? delta * (std::floor(x / delta) + 0.5)
                         : delta * std::round(x / delta);
    return std::min(top, std::max(-top, q));
}

} // namespace

ComplexSequence quantize(const ComplexSequence& signal, int bits_l, double fullscale_l0,
                         QuantizerStyle style) {
    if (bits_l < 1)
        throw ValidationError("quantize: bits_l must be >= 1");
    if (!(fullscale_l0 > 0.0))
        throw ValidationError("quantize: fullscale_l0 must be > 0");
    const double delta = std::pow(2.0, 1 - bits_l) * fullscale_l0;
    const double top = fullscale_l0 - delta / 2.0;
    ComplexSequence out = signal;
    const std::int64_t n = static_cast<std::int64_t>(out.samples.size());
#pragma omp parallel for schedule(static) if (n > 16384 && !omp_in_parallel())
    for (std::int64_t i = 0; i < n; ++i) {
        const cplx v = out.samples[static_cast<std::size_t>(i)];
        out.samples[static_cast<std::size_t>(i)] = {
            quantize_component(v.real(), delta, top, style),
            quantize_component(v.imag(), delta, top, style)};
    }
    return out;
}

ComplexSequence simulate_receive_scaled(const ComplexSequence& tx, const ChannelModel& channel,
                                        const NormalizedLink& link, std::optional<int> bits_l,
                                        int periods_k, std::uint64_t rng_seed,
                                        double full_scale_amp, double fullscale_l0) {
    if (periods_k < 1)
        throw ValidationError("simulate_receive: periods_k must be >= 1");
    ComplexSequence period = apply_channel(tx, channel);
    const std::size_t n = period.samples.size();
    for (cplx& v : period.samples)
        v *= full_scale_amp;
    ComplexSequence rx;
    rx.sample_rate = tx.sample_rate;
    rx.samples.resize(n * static_cast<std::size_t>(periods_k));
    for (int k = 0; k < periods_k; ++k)
        std::copy(period.samples.begin(), period.samples.end(),
                  rx.samples.begin() + static_cast<std::ptrdiff_t>(k * n));
    if (link.snr_a_db != kSnrOff) {
        // fixed noise floor referenced to full-scale power (no AGC): the
        // output noise level is independent of the channel gain
        rx = add_noise(rx, linear_amp_to_db(fullscale_l0) - link.snr_a_db, rng_seed);
    }
    rx = limit(rx, fullscale_l0);
    if (bits_l)
        rx = quantize(rx, *bits_l, fullscale_l0);
    return rx;
}

ComplexSequence simulate_receive(const ComplexSequence& tx, const ChannelModel& channel,
                                 const NormalizedLink& link, std::optional<int> bits_l,
                                 int periods_k, std::uint64_t rng_seed) {
    tx.validate();
    // full scale: interpolated peak envelope of the unattenuated waveform sits
    // exactly at the limiter ceiling (crest-factor backoff included)
    const double fullscale_l0 = 1.0;
    const double amp = fullscale_l0 / interpolated_peak(tx, 8);
    return simulate_receive_scaled(tx, channel, link, bits_l, periods_k, rng_seed, amp,
                                   fullscale_l0);
}

} // namespace sounder
