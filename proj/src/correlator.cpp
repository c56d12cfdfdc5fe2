#include "sounder/correlator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sounder/fft.hpp"

namespace sounder {

ComplexSequence average_periods(const Capture& capture) {
    capture.validate();
    const std::size_t n = static_cast<std::size_t>(capture.spec.n);
    const std::size_t k = static_cast<std::size_t>(capture.periods_k);
    ComplexSequence out;
    out.sample_rate = capture.samples.sample_rate;
    out.samples.assign(n, cplx{0.0, 0.0});
    for (std::size_t p = 0; p < k; ++p)
        for (std::size_t i = 0; i < n; ++i)
            out.samples[i] += capture.samples.samples[p * n + i];
    const double scale = 1.0 / static_cast<double>(k);
    for (cplx& v : out.samples)
        v *= scale;
    return out;
}

ComplexSequence periodic_xcorr(const ComplexSequence& rx_period, const ComplexSequence& ref) {
    rx_period.validate();
    ref.validate();
    if (rx_period.samples.size() != ref.samples.size())
        throw LengthMismatch("periodic_xcorr: lengths differ (" +
                             std::to_string(rx_period.samples.size()) + " vs " +
                             std::to_string(ref.samples.size()) + ")");
    double e_ref = 0.0;
    for (const cplx& v : ref.samples)
        e_ref += std::norm(v);
    if (e_ref <= 0.0)
        throw ZeroSignal("periodic_xcorr: reference has zero energy");
    std::vector<cplx> rx_spec = fft::forward(rx_period.samples);
    const std::vector<cplx> ref_spec = fft::forward(ref.samples);
    for (std::size_t b = 0; b < rx_spec.size(); ++b)
        rx_spec[b] *= std::conj(ref_spec[b]);
    ComplexSequence out;
    out.sample_rate = rx_period.sample_rate;
    out.samples = fft::inverse(rx_spec);
    const double scale = 1.0 / e_ref;
    for (cplx& v : out.samples)
        v *= scale;
    return out;
}

std::vector<double> chebyshev_window(std::size_t length, double sidelobe_db) {
    if (length == 0)
        throw InvalidRange("chebyshev_window: length must be >= 1");
    if (!(sidelobe_db > 0.0))
        throw ValidationError("chebyshev_window: sidelobe suppression must be > 0 dB");
    if (length == 1)
        return {1.0};
    const std::size_t m = length;
    const double order = static_cast<double>(m - 1);
    const double ripple = std::pow(10.0, sidelobe_db / 20.0);
    const double beta = std::cosh(std::acosh(ripple) / order);
    // Chebyshev polynomial of the window's spectral samples: T_{M-1}(beta*cos(pi k/M))
    std::vector<cplx> p(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double x = beta * std::cos(std::numbers::pi * static_cast<double>(k) /
                                         static_cast<double>(m));
        double t;
        if (x > 1.0)
            t = std::cosh(order * std::acosh(x));
        else if (x < -1.0)
            t = (m % 2 != 0 ? 1.0 : -1.0) * std::cosh(order * std::acosh(-x));
        else
            t = std::cos(order * std::acos(x));
        p[k] = t;
    }
    std::vector<double> w(m);
    if (m % 2 != 0) {
        const std::vector<cplx> f = fft::forward(p);
        const std::size_t half = (m + 1) / 2;
        // assemble the symmetric window from the first half of the transform
        for (std::size_t i = 0; i < half; ++i)
            w[half - 1 + i] = f[i].real();
        for (std::size_t i = 1; i < half; ++i)
            w[half - 1 - i] = f[i].real();
    } else {
        // even length needs a half-sample phase shift before the transform
        for (std::size_t k = 0; k < m; ++k) {
            const double ph = std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
            p[k] *= cplx{std::cos(ph), std::sin(ph)};
        }
        const std::vector<cplx> f = fft::forward(p);
        const std::size_t half = m / 2 + 1;
        for (std::size_t i = 1; i < half; ++i) {
            w[half - 1 + i - 1] = f[i].real();
            w[half - 1 - i] = f[i].real();
        }
    }
    const double peak = *std::max_element(w.begin(), w.end());
    for (double& v : w)
        v /= peak;
    return w;
}

std::vector<double> window_bins(const WindowSpec& window, std::size_t n) {
    window.validate();
    if (window.kind == WindowKind::Rectangular)
        return std::vector<double>(n, 1.0);
    const std::vector<double> w = chebyshev_window(n, window.sidelobe_db);
    std::vector<double> bins(n);
    for (std::size_t b = 0; b < n; ++b)
        bins[b] = w[(b + n / 2) % n];
    return bins;
}

int mainlobe_halfwidth_bins(const WindowSpec& window, std::size_t n) {
    if (window.kind == WindowKind::Rectangular)
        return 0;
    const std::vector<double> bins = window_bins(window, n);
    std::vector<cplx> spec(n);
    for (std::size_t b = 0; b < n; ++b)
        spec[b] = bins[b];
    const std::vector<cplx> pulse = fft::inverse(spec);
    std::size_t i = 1;
    while (i < n / 2 && std::abs(pulse[i]) < std::abs(pulse[i - 1]))
        ++i;
    return static_cast<int>(i - 1);
}

CalibrationProfile calibrate_b2b(const Capture& reference_capture, const ComplexSequence& ref_seq,
                                 double known_loss_db, double degenerate_floor_db) {
    const ComplexSequence avg = average_periods(reference_capture);
    if (avg.samples.size() != ref_seq.samples.size())
        throw LengthMismatch("calibrate_b2b: capture period and reference lengths differ");
    const std::vector<cplx> rx_spec = fft::forward(avg.samples);
    const std::vector<cplx> ref_spec = fft::forward(ref_seq.samples);
    const std::size_t n = rx_spec.size();
    std::vector<cplx> measured(n);
    std::vector<double> mags(n);
    for (std::size_t b = 0; b < n; ++b) {
        if (std::abs(ref_spec[b]) == 0.0)
            throw DegenerateBin("calibrate_b2b: reference spectrum has a zero bin at " +
                                std::to_string(b));
        measured[b] = rx_spec[b] / ref_spec[b];
        mags[b] = std::abs(measured[b]);
    }
    std::vector<double> sorted = mags;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2),
                     sorted.end());
    const double median = sorted[n / 2];
    const double floor_mag = median * db_to_linear_amp(-degenerate_floor_db);
    const double target = db_to_linear_amp(-known_loss_db);
    CalibrationProfile cal;
    cal.reference_loss_db = known_loss_db;
    cal.inverse_response.resize(n);
    for (std::size_t b = 0; b < n; ++b) {
        if (mags[b] < floor_mag)
            throw DegenerateBin("calibrate_b2b: bin " + std::to_string(b) + " magnitude " +
                                std::to_string(mags[b]) + " below the degenerate floor (" +
                                std::to_string(degenerate_floor_db) +
                                " dB under the median); insufficient excitation or SNR");
        cal.inverse_response[b] = target / measured[b];
    }
    return cal;
}

CirEstimate compute_cir(const Capture& capture, const ComplexSequence& ref_seq,
                        const CalibrationProfile* cal, const WindowSpec& window) {
    const ComplexSequence avg = average_periods(capture);
    if (avg.samples.size() != ref_seq.samples.size())
        throw LengthMismatch("compute_cir: capture period and reference lengths differ");
    const std::size_t n = avg.samples.size();
    if (cal && cal->inverse_response.size() != n)
        throw LengthMismatch("compute_cir: calibration length differs from sequence length");
    std::vector<cplx> spec = fft::forward(avg.samples);
    const std::vector<cplx> ref_spec = fft::forward(ref_seq.samples);
    const std::vector<double> win = window_bins(window, n);
    // normalization makes a unity channel peak at exactly 1 for any window:
    // the correlation peak of an identity capture is (1/N)*sum_b win_b*|REF_b|^2
    double norm = 0.0;
    for (std::size_t b = 0; b < n; ++b)
        norm += win[b] * std::norm(ref_spec[b]);
    norm /= static_cast<double>(n);
    if (norm <= 0.0)
        throw ZeroSignal("compute_cir: reference has zero windowed energy");
    for (std::size_t b = 0; b < n; ++b) {
        if (cal)
            spec[b] *= cal->inverse_response[b];
        spec[b] *= win[b] * std::conj(ref_spec[b]);
    }
    CirEstimate cir;
    cir.taps = fft::inverse(spec);
    const double scale = 1.0 / norm;
    for (cplx& v : cir.taps) {
        v *= scale;
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NumericError("compute_cir: non-finite CIR value");
    }
    cir.delay_step_s = 1.0 / avg.sample_rate;
    cir.window = window;
    cir.provenance["n"] = std::to_string(capture.spec.n);
    cir.provenance["lambda"] = std::to_string(capture.spec.lambda);
    cir.provenance["periods_k"] = std::to_string(capture.periods_k);
    cir.provenance["window"] = window.kind == WindowKind::Rectangular ? "rectangular" : "chebyshev";
    if (window.kind == WindowKind::Chebyshev)
        cir.provenance["sidelobe_db"] = std::to_string(window.sidelobe_db);
    cir.provenance["calibrated"] = cal ? "yes" : "no";
    return cir;
}

} // namespace sounder
