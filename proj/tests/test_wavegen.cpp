#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "doctest.h"
#include "wosr/fft.hpp"
#include "wosr/wavegen.hpp"

using namespace wosr;

namespace {

WaveParams base_params(uint64_t seed = 1, size_t len = 4096, double bw = 25e6) {
    WaveParams p;
    p.sample_rate_hz = 100e6;
    p.bandwidth_hz = bw;
    p.record_len = len;
    p.seed = seed;
    return p;
}

double papr(const IqRecord& rec) {
    double peak = 0.0, mean = 0.0;
    for (const auto& s : rec.samples) {
        peak = std::max(peak, std::norm(s));
        mean += std::norm(s);
    }
    return peak / (mean / double(rec.samples.size()));
}

// Discrete instantaneous frequency in Hz via phase differences.
std::vector<double> inst_freq(const IqRecord& rec) {
    std::vector<double> f;
    for (size_t i = 0; i + 1 < rec.samples.size(); ++i) {
        const cplx r = rec.samples[i + 1] * std::conj(rec.samples[i]);
        f.push_back(std::arg(r) * rec.sample_rate_hz / (2.0 * std::numbers::pi));
    }
    return f;
}

// Test-only oracle: brute-force aperiodic autocorrelation peak sidelobe.
double peak_sidelobe(const std::vector<cplx>& c) {
    const ptrdiff_t n = static_cast<ptrdiff_t>(c.size());
    double peak = 0.0;
    for (ptrdiff_t lag = 1; lag < n; ++lag) {
        cplx acc = 0.0;
        for (ptrdiff_t i = 0; i + lag < n; ++i) acc += c[i + lag] * std::conj(c[i]);
        peak = std::max(peak, std::abs(acc));
    }
    return peak;
}

bool same_samples(const IqRecord& a, const IqRecord& b) {
    if (a.samples.size() != b.samples.size()) return false;
    for (size_t i = 0; i < a.samples.size(); ++i)
        if (a.samples[i] != b.samples[i]) return false;
    return true;
}

}  // namespace

TEST_CASE("every synthesizer meets the record contract") {
    const auto p = base_params(3);
    std::vector<IqRecord> recs;
    recs.push_back(synth_single_carrier(p, ModScheme::QPSK));
    recs.push_back(synth_multicarrier(p, MulticarrierKind::OFDM, p.sample_rate_hz / 1024,
                                      ModScheme::QAM16));
    recs.push_back(synth_multicarrier(p, MulticarrierKind::SCFDMA, p.sample_rate_hz / 1024,
                                      ModScheme::QPSK));
    recs.push_back(synth_analog(p, AnalogKind::AM));
    recs.push_back(synth_analog(p, AnalogKind::FM));
    recs.push_back(synth_lfm(p, SweepDir::Up, 0.8));
    recs.push_back(synth_phase_coded(p, CodeKind::Barker, 13, 4));
    recs.push_back(synth_unknown(p, WaveformClass::UnknownFH));
    recs.push_back(synth_unknown(p, WaveformClass::UnknownNoise));
    for (const auto& rec : recs) {
        CHECK(rec.samples.size() == p.record_len);
        CHECK(rec.sample_rate_hz == p.sample_rate_hz);
        // [DERIVED] unit average power after synthesis, e.g. the QPSK case.
        CHECK(rec.power() == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(rec.meta.count("class") == 1);
        CHECK(rec.meta.at("class") == to_string(rec.label));
    }
}

TEST_CASE("synthesis is seed-deterministic") {
    // [TRIVIAL] determinism contract.
    const auto p = base_params(77);
    auto a = synth_single_carrier(p, ModScheme::QAM64);
    auto b = synth_single_carrier(p, ModScheme::QAM64);
    CHECK(same_samples(a, b));
    auto p2 = p;
    p2.seed = 78;
    auto c = synth_single_carrier(p2, ModScheme::QAM64);
    CHECK(!same_samples(a, c));
}

TEST_CASE("single carrier rejects bandwidth above fs/2") {
    // sps >= 2 constraint.
    auto p = base_params(1, 4096, 60e6);
    CHECK_THROWS_AS(synth_single_carrier(p, ModScheme::QPSK), InvalidParams);
}

TEST_CASE("ofdm_symbol of a constant spectrum is an impulse") {
    // [TRIVIAL] IDFT of constant spectrum, no CP.
    std::vector<cplx> bins(64, 1.0);
    auto sym = ofdm_symbol(bins, 0);
    REQUIRE(sym.size() == 64);
    CHECK(std::abs(sym[0]) == doctest::Approx(8.0));  // sqrt(64) under the unitary IDFT
    for (size_t i = 1; i < sym.size(); ++i) CHECK(std::abs(sym[i]) < 1e-10);
}

TEST_CASE("ofdm_symbol prepends a true cyclic prefix") {
    Rng rng(4);
    std::vector<cplx> bins(32);
    for (auto& b : bins) b = rng.cgauss();
    auto sym = ofdm_symbol(bins, 8);
    REQUIRE(sym.size() == 40);
    for (size_t i = 0; i < 8; ++i) CHECK(std::abs(sym[i] - sym[i + 32]) < 1e-12);
}

TEST_CASE("dft_spread then same-size IDFT is the identity") {
    // [TRIVIAL] transform identity when M == IDFT size, no CP.
    Rng rng(9);
    std::vector<cplx> block(16);
    for (auto& v : block) v = rng.cgauss();
    auto spread = dft_spread(block);
    auto back = ofdm_symbol(spread, 0);
    REQUIRE(back.size() == block.size());
    for (size_t i = 0; i < block.size(); ++i) CHECK(std::abs(back[i] - block[i]) < 1e-10);
    CHECK_THROWS_AS(dft_spread({}), InvalidParams);
}

TEST_CASE("OFDM has higher PAPR than a single carrier on the same seed") {
    // [DERIVED] PAPR comparison.
    const auto p = base_params(21);
    const double papr_ofdm =
        papr(synth_multicarrier(p, MulticarrierKind::OFDM, p.sample_rate_hz / 1024,
                                ModScheme::QPSK));
    const double papr_sc = papr(synth_single_carrier(p, ModScheme::QPSK));
    CHECK(papr_ofdm > papr_sc);
}

TEST_CASE("SC-FDMA tempers the OFDM envelope") {
    const auto p = base_params(22);
    const double scs = p.sample_rate_hz / 1024;
    const double papr_ofdm =
        papr(synth_multicarrier(p, MulticarrierKind::OFDM, scs, ModScheme::QPSK));
    const double papr_scfdma =
        papr(synth_multicarrier(p, MulticarrierKind::SCFDMA, scs, ModScheme::QPSK));
    CHECK(papr_scfdma < papr_ofdm);
}

TEST_CASE("multicarrier rejects a spacing the record cannot hold") {
    const auto p = base_params();
    CHECK_THROWS_AS(synth_multicarrier(p, MulticarrierKind::OFDM, 0.0, ModScheme::QPSK),
                    InvalidParams);
    // 11 occupied subcarriers is under the floor of 12.
    CHECK_THROWS_AS(synth_multicarrier(p, MulticarrierKind::OFDM, p.bandwidth_hz / 11.0,
                                       ModScheme::QPSK),
                    InvalidParams);
}

TEST_CASE("FM is constant modulus") {
    // [TRIVIAL] angle modulation.
    auto rec = synth_analog(base_params(5), AnalogKind::FM);
    const double m0 = std::abs(rec.samples[0]);
    for (const auto& s : rec.samples) CHECK(std::abs(s) == doctest::Approx(m0).epsilon(1e-9));
}

TEST_CASE("AM with zero modulation index is a bare carrier") {
    // [TRIVIAL] zero message contribution.
    AnalogOpts opts;
    opts.mod_index = 0.0;
    auto rec = synth_analog(base_params(6), AnalogKind::AM, opts);
    const double m0 = std::abs(rec.samples[0]);
    for (const auto& s : rec.samples) CHECK(std::abs(s) == doctest::Approx(m0).epsilon(1e-9));
}

TEST_CASE("AM-SSB energy sits on one side of the carrier") {
    // [DERIVED] DFT inspection: the upper sideband dominates the lower.
    AnalogOpts opts;
    opts.sideband = Sideband::SSB;
    auto rec = synth_analog(base_params(7), AnalogKind::AM, opts);
    auto spec = fft(rec.samples);
    const size_t n = spec.size();
    double upper = 0.0, lower = 0.0;
    for (size_t k = 1; k < n / 2; ++k) {
        upper += std::norm(spec[k]);       // positive frequencies
        lower += std::norm(spec[n - k]);   // negative frequencies
    }
    CHECK(upper / lower > 100.0);  // > 20 dB one-sidedness
}

TEST_CASE("LFM sweep covers -B/2 to +B/2 monotonically") {
    // [DERIVED] finite-difference phase slope.
    auto p = base_params(8);
    auto rec = synth_lfm(p, SweepDir::Up, 1.0, 1);
    auto f = inst_freq(rec);
    const double b2 = p.bandwidth_hz / 2.0;
    CHECK(f.front() == doctest::Approx(-b2).epsilon(0.05));
    CHECK(f.back() == doctest::Approx(b2).epsilon(0.05));
    for (size_t i = 1; i < f.size(); ++i) CHECK(f[i] >= f[i - 1] - 1.0);
}

TEST_CASE("full-duty LFM has no zero samples") {
    // [TRIVIAL] duty = 1.
    auto rec = synth_lfm(base_params(9), SweepDir::Up, 1.0, 2);
    for (const auto& s : rec.samples) CHECK(std::abs(s) > 0.0);
}

TEST_CASE("down sweep negates the up sweep's frequency track") {
    // [TRIVIAL] symmetry on the same seed.
    auto p = base_params(10);
    auto up = inst_freq(synth_lfm(p, SweepDir::Up, 1.0, 1));
    auto down = inst_freq(synth_lfm(p, SweepDir::Down, 1.0, 1));
    REQUIRE(up.size() == down.size());
    for (size_t i = 0; i < up.size(); ++i)
        CHECK(down[i] == doctest::Approx(-up[i]).epsilon(1e-6));
}

TEST_CASE("Zadoff-Chu is unimodular with ideal periodic autocorrelation") {
    // [TRIVIAL] constant modulus; [DERIVED] brute-force periodic autocorrelation.
    for (int nzc : {7, 13, 63}) {
        auto z = code_sequence(CodeKind::ZadoffChu, nzc, 1);
        REQUIRE(z.size() == size_t(nzc));
        for (const auto& v : z) CHECK(std::abs(v) == doctest::Approx(1.0).epsilon(1e-12));
        for (int tau = 0; tau < nzc; ++tau) {
            cplx acc = 0.0;
            for (int i = 0; i < nzc; ++i) acc += z[(i + tau) % nzc] * std::conj(z[size_t(i)]);
            if (tau == 0)
                CHECK(std::abs(acc) == doctest::Approx(double(nzc)));
            else
                CHECK(std::abs(acc) < 1e-9 * nzc);
        }
    }
    CHECK_THROWS_AS(code_sequence(CodeKind::ZadoffChu, 8), InvalidParams);   // even
    CHECK_THROWS_AS(code_sequence(CodeKind::ZadoffChu, 9, 3), InvalidParams);  // gcd != 1
}

TEST_CASE("Barker-13 has unit peak sidelobe") {
    // [DERIVED] brute-force autocorrelation of the emitted sequence.
    auto c = code_sequence(CodeKind::Barker, 13);
    REQUIRE(c.size() == 13);
    const double signs[13] = {1, 1, 1, 1, 1, -1, -1, 1, 1, -1, 1, -1, 1};
    for (size_t i = 0; i < 13; ++i) {
        CHECK(c[i].real() == doctest::Approx(signs[i]));
        CHECK(c[i].imag() == doctest::Approx(0.0));
    }
    CHECK(peak_sidelobe(c) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(code_sequence(CodeKind::Barker, 6), InvalidParams);
}

TEST_CASE("Frank N=4 chips follow the row-wise phase matrix") {
    // [DERIVED] enumerate 2 pi i k / N.
    auto c = code_sequence(CodeKind::Frank, 4);
    REQUIRE(c.size() == 16);
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) {
            const double ang = 2.0 * std::numbers::pi * i * k / 4.0;
            const cplx want(std::cos(ang), std::sin(ang));
            CHECK(std::abs(c[size_t(i * 4 + k)] - want) < 1e-12);
        }
}

namespace {
// First contiguous nonzero run (the leading pulse) of a pulsed record.
std::pair<size_t, size_t> leading_pulse(const IqRecord& rec) {
    size_t start = 0;
    while (start < rec.samples.size() && std::abs(rec.samples[start]) < 1e-12) ++start;
    size_t end = start;
    while (end < rec.samples.size() && std::abs(rec.samples[end]) > 1e-12) ++end;
    return {start, end};
}
}  // namespace

TEST_CASE("phase-coded pulses hold one phase per chip") {
    // [DERIVED] plateau segmentation: 13 chips for Barker-13, 16 for Frank-4.
    struct Case {
        CodeKind kind;
        int param;
        int chips;
    };
    for (const auto& tc : {Case{CodeKind::Barker, 13, 13}, Case{CodeKind::Frank, 4, 16}}) {
        const int sps = 4;
        auto rec = synth_phase_coded(base_params(11), tc.kind, tc.param, sps);
        auto [start, end] = leading_pulse(rec);
        REQUIRE(end - start == size_t(tc.chips * sps));
        for (int chip = 0; chip < tc.chips; ++chip) {
            const size_t base = start + size_t(chip * sps);
            for (int i = 1; i < sps; ++i) {
                const cplx ratio = rec.samples[base + size_t(i)] / rec.samples[base];
                CHECK(std::abs(ratio - cplx(1.0)) < 1e-9);  // constant within the chip
            }
        }
    }
}

TEST_CASE("Zadoff-Chu pulse is constant modulus inside the pulse") {
    // [TRIVIAL] inherits the ZC modulus.
    auto rec = synth_phase_coded(base_params(12), CodeKind::ZadoffChu, 63, 4);
    auto [start, end] = leading_pulse(rec);
    REQUIRE(end > start);
    const double m0 = std::abs(rec.samples[start]);
    for (size_t i = start; i < end; ++i)
        CHECK(std::abs(rec.samples[i]) == doctest::Approx(m0).epsilon(1e-9));
}

TEST_CASE("unknown noise is zero-mean unit-power") {
    // [DERIVED] moment estimation.
    auto rec = synth_unknown(base_params(13), WaveformClass::UnknownNoise);
    cplx mean = 0.0;
    for (const auto& s : rec.samples) mean += s;
    mean /= double(rec.samples.size());
    CHECK(std::abs(mean) < 5.0 / std::sqrt(double(rec.samples.size())));
    CHECK(rec.power() == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("frequency hopper visits multiple centers at ~2 MHz width") {
    // [DERIVED] block-DFT peak tracking; hop bandwidth target from the corpus.
    auto p = base_params(14, 4096, 80e6);
    FhOpts opts;
    opts.n_hops = 8;
    auto rec = synth_unknown(p, WaveformClass::UnknownFH, opts);
    const size_t block = p.record_len / size_t(opts.n_hops);
    std::set<size_t> peak_bins;
    double width_sum = 0.0;
    for (int h = 0; h < opts.n_hops; ++h) {
        std::vector<cplx> blk(rec.samples.begin() + ptrdiff_t(h * block),
                              rec.samples.begin() + ptrdiff_t((h + 1) * block));
        auto spec = fft(blk);
        std::vector<double> mag(spec.size());
        for (size_t i = 0; i < spec.size(); ++i) mag[i] = std::abs(spec[i]);
        const size_t peak = size_t(std::max_element(mag.begin(), mag.end()) - mag.begin());
        peak_bins.insert(peak / 8);  // coarse bin so close peaks merge
        // -20 dB occupied width around the peak.
        const double thresh = mag[peak] * 0.1;
        size_t lo = peak, hi = peak;
        while (lo > 0 && mag[lo - 1] > thresh) --lo;
        while (hi + 1 < mag.size() && mag[hi + 1] > thresh) ++hi;
        width_sum += double(hi - lo + 1) * p.sample_rate_hz / double(block);
    }
    CHECK(peak_bins.size() >= 2);
    const double mean_width = width_sum / opts.n_hops;
    CHECK(mean_width > 1e6);   // 2 MHz +- 50%
    CHECK(mean_width < 3e6);
}

TEST_CASE("rrc taps are symmetric with a central peak and unit energy") {
    auto taps = rrc_taps(0.25, 4, 8);
    REQUIRE(taps.size() % 2 == 1);
    const size_t mid = taps.size() / 2;
    for (size_t i = 0; i < taps.size(); ++i)
        CHECK(taps[i] == doctest::Approx(taps[taps.size() - 1 - i]).epsilon(1e-12));
    CHECK(*std::max_element(taps.begin(), taps.end()) == doctest::Approx(taps[mid]));
    double e = 0.0;
    for (double t : taps) e += t * t;
    CHECK(e == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("occupied bandwidth tracks the requested bandwidth") {
    // In-band energy fraction of a shaped single carrier.
    auto p = base_params(15, 4096, 25e6);
    auto rec = synth_single_carrier(p, ModScheme::QPSK);
    auto spec = fft(rec.samples);
    const size_t n = spec.size();
    double inband = 0.0, total = 0.0;
    for (size_t k = 0; k < n; ++k) {
        const double f = (k < n / 2 ? double(k) : double(k) - double(n)) *
                         p.sample_rate_hz / double(n);
        const double e = std::norm(spec[k]);
        total += e;
        if (std::abs(f) <= p.bandwidth_hz * 0.75) inband += e;  // RRC rolloff margin
    }
    CHECK(inband / total > 0.9);
}
