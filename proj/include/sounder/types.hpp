#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <vector>

#include "sounder/errors.hpp"

namespace sounder {

using cplx = std::complex<double>;

// (N, lambda) parameters of one FZC sequence. N and lambda must be coprime,
// 1 <= lambda <= N-1.
struct FzcSpec {
    std::int64_t n = 0;
    std::int64_t lambda = 1;

    void validate() const {
        if (n < 2)
            throw InvalidRange("FzcSpec: N must be >= 2, got " + std::to_string(n));
        if (lambda < 1 || lambda > n - 1)
            throw InvalidRange("FzcSpec: lambda must be in [1, N-1], got " +
                               std::to_string(lambda) + " for N=" + std::to_string(n));
        if (std::gcd(n, lambda) != 1)
            throw NotCoprime("FzcSpec: gcd(N, lambda) != 1 for N=" + std::to_string(n) +
                             ", lambda=" + std::to_string(lambda));
    }
};

// Block of complex baseband samples. sample_rate equals the signal bandwidth B
// under the 1-sample-per-chip convention; period T_p = N / sample_rate.
struct ComplexSequence {
    std::vector<cplx> samples;
    double sample_rate = 1.0;

    void validate() const {
        if (samples.empty())
            throw EmptyInput("ComplexSequence: length must be >= 1");
        if (!(sample_rate > 0.0))
            throw InvalidRange("ComplexSequence: sample_rate must be > 0");
        for (const cplx& s : samples)
            if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
                throw NumericError("ComplexSequence: non-finite sample");
    }

    std::size_t size() const { return samples.size(); }
};

inline double db_to_linear_power(double db) { return std::pow(10.0, db / 10.0); }
inline double db_to_linear_amp(double db) { return std::pow(10.0, db / 20.0); }
inline double linear_power_to_db(double p) { return 10.0 * std::log10(p); }
inline double linear_amp_to_db(double a) { return 20.0 * std::log10(a); }

} // namespace sounder
