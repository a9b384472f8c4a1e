#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "wosr/spectra.hpp"
#include "wosr/wavegen.hpp"

using namespace wosr;

namespace {
IqRecord tone_record(size_t n, size_t bin, double amp = 1.0, double phase = 0.0) {
    IqRecord rec;
    rec.sample_rate_hz = 100e6;
    rec.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
        const double ang =
            2.0 * std::numbers::pi * double(bin) * double(i) / double(n) + phase;
        rec.samples[i] = amp * cplx(std::cos(ang), std::sin(ang));
    }
    return rec;
}
}  // namespace

TEST_CASE("impulse magnitude spectrum is flat ones") {
    // [TRIVIAL] flat spectrum of an impulse at n_fft = 8.
    std::vector<cplx> x(8, 0.0);
    x[0] = 1.0;
    auto mag = dft_magnitude(x, 8);
    REQUIRE(mag.size() == 8);
    for (double m : mag) CHECK(m == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tone magnitude is N at its bin and zero elsewhere") {
    // [TRIVIAL] DFT orthogonality, k=3, N=16.
    auto rec = tone_record(16, 3);
    auto mag = dft_magnitude(rec.samples, 16);
    CHECK(mag[3] == doctest::Approx(16.0).epsilon(1e-9));
    for (size_t i = 0; i < mag.size(); ++i)
        if (i != 3) CHECK(mag[i] < 1e-9);
}

TEST_CASE("dft_magnitude truncates or zero-pads to n_fft") {
    std::vector<cplx> x(100, cplx(1.0, 0.0));
    CHECK(dft_magnitude(x, 64).size() == 64);
    CHECK(dft_magnitude(x, 128).size() == 128);
    CHECK_THROWS_AS(dft_magnitude(x, 100), InvalidParams);  // not a power of two
    CHECK_THROWS_AS(dft_magnitude(x, 0), InvalidParams);
}

TEST_CASE("l2_normalize matches the 3-4-5 triangle") {
    // [TRIVIAL]
    auto v = l2_normalize({3.0, 4.0});
    CHECK(v[0] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(v[1] == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("l2_normalize is idempotent and scale-invariant") {
    // [TRIVIAL] already-unit vector unchanged; c*v maps to the same output.
    std::vector<double> v{0.6, 0.8};
    auto u = l2_normalize(v);
    CHECK(std::abs(u[0] - v[0]) < 1e-12);
    CHECK(std::abs(u[1] - v[1]) < 1e-12);
    std::vector<double> scaled{6.0, 8.0};
    auto s = l2_normalize(scaled);
    CHECK(std::abs(s[0] - v[0]) < 1e-12);
    CHECK(std::abs(s[1] - v[1]) < 1e-12);
    CHECK_THROWS_AS(l2_normalize({0.0, 0.0}), InvalidInput);
}

TEST_CASE("featurize yields a unit-norm one-hot-like vector for a tone") {
    // [TRIVIAL] composition.
    auto rec = tone_record(256, 17);
    auto feat = featurize(rec, 256);
    REQUIRE(feat.values.size() == 256);
    double norm = 0.0;
    for (float v : feat.values) norm += double(v) * double(v);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-6));
    const size_t peak =
        size_t(std::max_element(feat.values.begin(), feat.values.end()) - feat.values.begin());
    CHECK(peak == 17);
    CHECK(feat.values[peak] > 0.99f);
    CHECK(feat.label == rec.label);
}

TEST_CASE("features are amplitude-invariant") {
    // [TRIVIAL] record and 5x record give identical features.
    auto a = featurize(tone_record(256, 9, 1.0), 256);
    auto b = featurize(tone_record(256, 9, 5.0), 256);
    REQUIRE(a.values.size() == b.values.size());
    for (size_t i = 0; i < a.values.size(); ++i)
        CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(1e-6));
}

TEST_CASE("features are phase-offset invariant") {
    // [DERIVED] |DFT| kills a constant phase.
    auto a = featurize(tone_record(256, 9, 1.0, 0.0), 256);
    auto b = featurize(tone_record(256, 9, 1.0, std::numbers::pi / 3.0), 256);
    for (size_t i = 0; i < a.values.size(); ++i)
        CHECK(std::abs(double(a.values[i]) - double(b.values[i])) < 1e-7);
}

TEST_CASE("featurize handles record/n_fft length mismatches") {
    WaveParams p;
    p.record_len = 4096;
    p.seed = 9;
    auto rec = synth_single_carrier(p, ModScheme::QPSK);
    CHECK(featurize(rec, 1024).values.size() == 1024);   // truncation
    CHECK(featurize(rec, 8192).values.size() == 8192);   // zero padding
}
