#pragma once

#include "sounder/types.hpp"

namespace sounder::reference {

// O(N^2) direct-sum periodic autocorrelation, test oracle for the FFT route
std::vector<cplx> direct_autocorrelation(const std::vector<cplx>& s);

// O(N^2) direct-sum normalized cross-correlation, test oracle for the FFT route
std::vector<cplx> direct_xcorr(const std::vector<cplx>& rx, const std::vector<cplx>& ref);

// brute-force sort-and-index quantile, oracle for the selection-based one
double quantile_by_sort(std::vector<double> values, double q);

} // namespace sounder::reference
