#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <vector>

#include "sounder/errors.hpp"
#include "sounder/fft.hpp"
#include "sounder/rng.hpp"
#include "sounder/types.hpp"

using namespace sounder;

TEST_CASE("counter rng is index-addressed and deterministic") {
    CHECK(rng::bits_at(42, 7) == rng::bits_at(42, 7));
    CHECK(rng::bits_at(42, 7) != rng::bits_at(42, 8));
    CHECK(rng::bits_at(42, 7) != rng::bits_at(43, 7));

    // out-of-order access sees the same stream
    const std::uint64_t late = rng::bits_at(9, 1000);
    const std::uint64_t early = rng::bits_at(9, 0);
    CHECK(rng::bits_at(9, 1000) == late);
    CHECK(rng::bits_at(9, 0) == early);
}

TEST_CASE("unit_open maps into the half-open interval") {
    for (std::uint64_t i = 0; i < 10000; ++i) {
        const double u = rng::unit_open(rng::bits_at(123, i));
        CHECK(u > 0.0);
        CHECK(u <= 1.0);
    }
    // the all-zero word must not produce 0
    CHECK(rng::unit_open(0) > 0.0);
}

TEST_CASE("gaussian pairs have standard-normal moments") {
    const std::size_t n = 200000;
    double sum_re = 0.0, sum_im = 0.0, sum_re2 = 0.0, sum_im2 = 0.0, cross = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const cplx g = rng::gaussian_pair(777, i);
        sum_re += g.real();
        sum_im += g.imag();
        sum_re2 += g.real() * g.real();
        sum_im2 += g.imag() * g.imag();
        cross += g.real() * g.imag();
    }
    const double inv = 1.0 / static_cast<double>(n);
    CHECK(std::abs(sum_re * inv) < 0.02);
    CHECK(std::abs(sum_im * inv) < 0.02);
    CHECK(sum_re2 * inv == doctest::Approx(1.0).epsilon(0.03));
    CHECK(sum_im2 * inv == doctest::Approx(1.0).epsilon(0.03));
    CHECK(std::abs(cross * inv) < 0.02);
}

TEST_CASE("derive_seed separates points, trials and masters") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t p = 0; p < 32; ++p)
        for (std::uint64_t t = 0; t < 32; ++t)
            seen.insert(rng::derive_seed(1, p, t));
    CHECK(seen.size() == 32 * 32);

    CHECK(rng::derive_seed(1, 0, 0) != rng::derive_seed(2, 0, 0));
    // swapping point and trial must not collide
    CHECK(rng::derive_seed(5, 3, 4) != rng::derive_seed(5, 4, 3));
}

TEST_CASE("fft inverse undoes forward") {
    std::vector<cplx> x(1000);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = rng::gaussian_pair(31, i);
    const std::vector<cplx> back = fft::inverse(fft::forward(x));
    REQUIRE(back.size() == x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(std::abs(back[i] - x[i]) < 1e-12);
}

TEST_CASE("fft satisfies parseval") {
    std::vector<cplx> x(513);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = rng::gaussian_pair(32, i);
    double time_energy = 0.0;
    for (const cplx& v : x)
        time_energy += std::norm(v);
    double freq_energy = 0.0;
    for (const cplx& v : fft::forward(x))
        freq_energy += std::norm(v);
    CHECK(freq_energy / static_cast<double>(x.size()) ==
          doctest::Approx(time_energy).epsilon(1e-9));
}

TEST_CASE("fft of a delta is flat") {
    std::vector<cplx> x(64, cplx(0.0, 0.0));
    x[0] = cplx(1.0, 0.0);
    for (const cplx& v : fft::forward(x))
        CHECK(std::abs(v - cplx(1.0, 0.0)) < 1e-12);
}

TEST_CASE("fft of a constant concentrates at dc") {
    std::vector<cplx> x(32, cplx(1.0, 0.0));
    const std::vector<cplx> spec = fft::forward(x);
    CHECK(std::abs(spec[0] - cplx(32.0, 0.0)) < 1e-12);
    for (std::size_t k = 1; k < spec.size(); ++k)
        CHECK(std::abs(spec[k]) < 1e-12);
}

TEST_CASE("fft matches a direct dft evaluation") {
    const std::size_t n = 128;
    std::vector<cplx> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = rng::gaussian_pair(33, i);
    const std::vector<cplx> fast = fft::forward(x);
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc(0.0, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double ph = -2.0 * std::numbers::pi * static_cast<double>(k * i) /
                              static_cast<double>(n);
            acc += x[i] * std::polar(1.0, ph);
        }
        CHECK(std::abs(fast[k] - acc) < 1e-9);
    }
}

TEST_CASE("fft rejects empty input") {
    CHECK_THROWS_AS(fft::forward({}), EmptyInput);
    CHECK_THROWS_AS(fft::inverse({}), EmptyInput);
}
