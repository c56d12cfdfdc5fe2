#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "sounder/types.hpp"

namespace sounder {

// K recorded periods of one sounding waveform plus free-form acquisition metadata
struct Capture {
    ComplexSequence samples; // length K*N
    FzcSpec spec;
    int periods_k = 1;
    std::map<std::string, std::string> metadata;

    void validate() const {
        spec.validate();
        samples.validate();
        if (periods_k < 1)
            throw ValidationError("Capture: periods_k must be >= 1");
        if (samples.samples.size() !=
            static_cast<std::size_t>(periods_k) * static_cast<std::size_t>(spec.n))
            throw LengthMismatch("Capture: length " + std::to_string(samples.samples.size()) +
                                 " != periods_k * N = " +
                                 std::to_string(periods_k * spec.n));
    }
};

// per-frequency-bin inverse system response from a back-to-back measurement
struct CalibrationProfile {
    std::vector<cplx> inverse_response; // length N
    double reference_loss_db = 0.0;     // the known attenuation present during calibration
};

enum class WindowKind { Rectangular, Chebyshev };

struct WindowSpec {
    WindowKind kind = WindowKind::Rectangular;
    double sidelobe_db = 100.0; // chebyshev only

    void validate() const {
        if (kind == WindowKind::Chebyshev && !(sidelobe_db > 0.0))
            throw ValidationError("WindowSpec: sidelobe_db must be > 0");
    }
};

// calibrated, windowed channel impulse response; taps normalized so a unity
// channel yields peak magnitude 1 after calibration
struct CirEstimate {
    std::vector<cplx> taps;
    double delay_step_s = 1.0; // 1/B per bin
    WindowSpec window;
    std::map<std::string, std::string> provenance;
};

// coherent mean of the K length-N segments
ComplexSequence average_periods(const Capture& capture);

// c[k] = (1/E_ref) * sum_n rx_n * conj(ref_{(n-k) mod N}); rx = a*shift(ref, d)
// peaks at value a, index d
ComplexSequence periodic_xcorr(const ComplexSequence& rx_period, const ComplexSequence& ref);

// Dolph-Chebyshev window with equiripple spectral sidelobes at -sidelobe_db,
// normalized to unit peak; symmetric: w[i] = w[length-1-i]
std::vector<double> chebyshev_window(std::size_t length, double sidelobe_db);

// window samples rearranged onto DFT bin order with the peak on DC
// (applied[b] = w[(b + N/2) mod N]); rectangular = all ones
std::vector<double> window_bins(const WindowSpec& window, std::size_t n);

// bins from the window pulse peak to its first local minimum (the mainlobe
// null); 0 for rectangular. Used as the default PSR exclusion half-width.
int mainlobe_halfwidth_bins(const WindowSpec& window, std::size_t n);

// inverse_response[b] = target[b] / measured[b] with target flat at -known_loss dB;
// DegenerateBin when any measured bin magnitude falls more than
// degenerate_floor_db below the median bin
CalibrationProfile calibrate_b2b(const Capture& reference_capture, const ComplexSequence& ref_seq,
                                 double known_loss_db, double degenerate_floor_db = 60.0);

// average -> frequency domain -> calibration (optional) -> window -> correlate
// against ref_seq -> normalized CIR
CirEstimate compute_cir(const Capture& capture, const ComplexSequence& ref_seq,
                        const CalibrationProfile* cal, const WindowSpec& window);

} // namespace sounder
