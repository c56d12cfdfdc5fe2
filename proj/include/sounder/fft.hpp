#pragma once

#include <complex>
#include <vector>

namespace sounder::fft {

// Out-of-place complex DFTs backed by FFTW3. Plans use FFTW_ESTIMATE (deterministic,
// no measurement noise in planning) and are cached per (size, direction); plan
// creation is serialized, execution is thread-safe via the new-array interface.
std::vector<std::complex<double>> forward(const std::vector<std::complex<double>>& in);

// includes the 1/N factor
std::vector<std::complex<double>> inverse(const std::vector<std::complex<double>>& in);

} // namespace sounder::fft
