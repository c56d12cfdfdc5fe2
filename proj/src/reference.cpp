#include "sounder/reference.hpp"

#include <algorithm>
#include <cmath>

namespace sounder::reference {

std::vector<cplx> direct_autocorrelation(const std::vector<cplx>& s) {
    const std::size_t n = s.size();
    std::vector<cplx> r(n, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            acc += s[i] * std::conj(s[(i + n - k) % n]);
        r[k] = acc;
    }
    return r;
}

std::vector<cplx> direct_xcorr(const std::vector<cplx>& rx, const std::vector<cplx>& ref) {
    const std::size_t n = rx.size();
    double e_ref = 0.0;
    for (const cplx& v : ref)
        e_ref += std::norm(v);
    std::vector<cplx> c(n, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            acc += rx[i] * std::conj(ref[(i + n - k) % n]);
        c[k] = acc / e_ref;
    }
    return c;
}

double quantile_by_sort(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n == 1)
        return values[0];
    const double h = static_cast<double>(n - 1) * q;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= n)
        return values[n - 1];
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

} // namespace sounder::reference
