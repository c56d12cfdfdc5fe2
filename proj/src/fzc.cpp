#include "sounder/fzc.hpp"

#include <cmath>
#include <numbers>

#include "sounder/fft.hpp"

namespace sounder {

ComplexSequence generate_fzc(const FzcSpec& spec, double sample_rate) {
    spec.validate();
    const std::int64_t n = spec.n;
    const std::int64_t two_n = 2 * n;
    ComplexSequence out;
    out.sample_rate = sample_rate;
    out.samples.resize(static_cast<std::size_t>(n));
    // Phases reduced in exact integer arithmetic modulo 2N before touching
    // floating point: xi_k = pi*(lambda/N)*k(k+1) (odd N) or pi*(lambda/N)*k^2
    // (even N) is 2pi-periodic, and k(k+1) is even, so the residue mod 2N
    // carries the full information. Naive floating evaluation loses ~5 digits
    // of phase at N=1e5, which would wreck the off-peak autocorrelation floor.
    for (std::int64_t k = 0; k < n; ++k) {
        const std::int64_t m =
            (n % 2 != 0) ? (k % two_n) * ((k + 1) % two_n) % two_n : (k % two_n) * (k % two_n) % two_n;
        const std::int64_t ph = (spec.lambda % two_n) * m % two_n;
        const double xi = std::numbers::pi * static_cast<double>(ph) / static_cast<double>(n);
        out.samples[static_cast<std::size_t>(k)] = {std::cos(xi), std::sin(xi)};
    }
    return out;
}

ComplexSequence periodic_autocorrelation(const ComplexSequence& seq) {
    seq.validate();
    std::vector<cplx> spec = fft::forward(seq.samples);
    for (cplx& v : spec)
        v = cplx{std::norm(v), 0.0};
    ComplexSequence out;
    out.sample_rate = seq.sample_rate;
    out.samples = fft::inverse(spec);
    // R[0] is the sequence energy; computed directly to keep it exact
    double energy = 0.0;
    for (const cplx& s : seq.samples)
        energy += std::norm(s);
    out.samples[0] = energy;
    return out;
}

ComplexSequence oversample(const ComplexSequence& seq, int factor) {
    seq.validate();
    if (factor < 1)
        throw InvalidRange("oversample: factor must be >= 1");
    if (factor == 1)
        return seq;
    const std::size_t n = seq.samples.size();
    const std::size_t m = n * static_cast<std::size_t>(factor);
    std::vector<cplx> spec = fft::forward(seq.samples);
    std::vector<cplx> padded(m, cplx{0.0, 0.0});
    const std::size_t half = n / 2;
    if (n % 2 != 0) {
        for (std::size_t b = 0; b <= half; ++b)
            padded[b] = spec[b];
        for (std::size_t b = half + 1; b < n; ++b)
            padded[m - n + b] = spec[b];
    } else {
        // split the Nyquist bin symmetrically so the interpolant stays real
        // for real inputs and the envelope is not biased
        for (std::size_t b = 0; b < half; ++b)
            padded[b] = spec[b];
        padded[half] = spec[half] * 0.5;
        padded[m - half] = spec[half] * 0.5;
        for (std::size_t b = half + 1; b < n; ++b)
            padded[m - n + b] = spec[b];
    }
    ComplexSequence out;
    out.sample_rate = seq.sample_rate * factor;
    out.samples = fft::inverse(padded);
    const double scale = static_cast<double>(factor);
    for (cplx& v : out.samples)
        v *= scale;
    return out;
}

double interpolated_peak(const ComplexSequence& seq, int oversample_factor) {
    const ComplexSequence up = oversample(seq, oversample_factor);
    double peak2 = 0.0;
    for (const cplx& v : up.samples)
        peak2 = std::max(peak2, std::norm(v));
    return std::sqrt(peak2);
}

double crest_factor_db(const ComplexSequence& seq, int oversample_factor) {
    if (oversample_factor < 1)
        throw InvalidRange("crest_factor_db: oversample_factor must be >= 1");
    const ComplexSequence up = oversample(seq, oversample_factor);
    double peak2 = 0.0;
    double mean2 = 0.0;
    for (const cplx& v : up.samples) {
        const double p = std::norm(v);
        peak2 = std::max(peak2, p);
        mean2 += p;
    }
    mean2 /= static_cast<double>(up.samples.size());
    if (mean2 <= 0.0)
        throw ZeroSignal("crest_factor_db: zero mean power");
    return 10.0 * std::log10(peak2 / mean2);
}

} // namespace sounder
