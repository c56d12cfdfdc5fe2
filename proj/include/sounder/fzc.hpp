#pragma once

#include "sounder/types.hpp"

namespace sounder {

// s_n = exp(j*xi_n) with xi_n = pi*(lambda/N)*n*(n+1) for odd N and
// xi_n = pi*(lambda/N)*n^2 for even N.
ComplexSequence generate_fzc(const FzcSpec& spec, double sample_rate);

// R[k] = sum_n s_n * conj(s_{(n-k) mod N}), k = 0..N-1 (unnormalized; R[0] = energy)
ComplexSequence periodic_autocorrelation(const ComplexSequence& seq);

// band-limited interpolation of the periodic signal by zero-padding the
// discrete spectrum; factor 1 returns a copy
ComplexSequence oversample(const ComplexSequence& seq, int factor);

// peak envelope magnitude of the band-limited interpolation
double interpolated_peak(const ComplexSequence& seq, int oversample_factor = 8);

// 10*log10(peak envelope power / mean envelope power) at the given oversampling
double crest_factor_db(const ComplexSequence& seq, int oversample_factor);

} // namespace sounder
