#include "sounder/fft.hpp"

#include <cstring>
#include <map>
#include <mutex>
#include <utility>

#include <fftw3.h>

#include "sounder/errors.hpp"

namespace sounder::fft {
namespace {

std::mutex g_planner_mutex;
std::map<std::pair<std::size_t, int>, fftw_plan> g_plans;

// Plans are created once per (size, direction) with FFTW_ESTIMATE and reused
// through the new-array execute interface. All buffers come from fftw_malloc,
// so the alignment seen at planning time matches execution time.
fftw_plan plan_for(std::size_t n, int sign) {
    std::lock_guard<std::mutex> lock(g_planner_mutex);
    auto key = std::make_pair(n, sign);
    auto it = g_plans.find(key);
    if (it != g_plans.end())
        return it->second;
    fftw_complex* a = fftw_alloc_complex(n);
    fftw_complex* b = fftw_alloc_complex(n);
    if (!a || !b)
        throw NumericError("fft: allocation failed for n=" + std::to_string(n));
    fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), a, b, sign, FFTW_ESTIMATE);
    fftw_free(a);
    fftw_free(b);
    if (!p)
        throw NumericError("fft: planning failed for n=" + std::to_string(n));
    g_plans.emplace(key, p);
    return p;
}

std::vector<std::complex<double>> transform(const std::vector<std::complex<double>>& in,
                                            int sign) {
    if (in.empty())
        throw EmptyInput("fft: empty input");
    const std::size_t n = in.size();
    fftw_plan p = plan_for(n, sign);
    fftw_complex* a = fftw_alloc_complex(n);
    fftw_complex* b = fftw_alloc_complex(n);
    if (!a || !b)
        throw NumericError("fft: allocation failed for n=" + std::to_string(n));
    std::memcpy(a, static_cast<const void*>(in.data()), n * sizeof(fftw_complex));
    fftw_execute_dft(p, a, b);
    std::vector<std::complex<double>> out(n);
    std::memcpy(static_cast<void*>(out.data()), b, n * sizeof(fftw_complex));
    fftw_free(a);
    fftw_free(b);
    return out;
}

} // namespace

std::vector<std::complex<double>> forward(const std::vector<std::complex<double>>& in) {
    return transform(in, FFTW_FORWARD);
}

std::vector<std::complex<double>> inverse(const std::vector<std::complex<double>>& in) {
    std::vector<std::complex<double>> out = transform(in, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(out.size());
    for (std::complex<double>& v : out)
        v *= scale;
    return out;
}

} // namespace sounder::fft
