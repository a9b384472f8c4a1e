#include "wosr/wavegen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include "wosr/fft.hpp"

namespace wosr {

const char* to_string(MulticarrierKind k) {
    return k == MulticarrierKind::OFDM ? "OFDM" : "SCFDMA";
}
const char* to_string(Sideband s) { return s == Sideband::DSB ? "DSB" : "SSB"; }
const char* to_string(SweepDir s) { return s == SweepDir::Up ? "up" : "down"; }
const char* to_string(CodeKind k) {
    switch (k) {
        case CodeKind::Barker: return "Barker";
        case CodeKind::Frank: return "Frank";
        case CodeKind::ZadoffChu: return "ZadoffChu";
    }
    return "?";
}

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

// Scale to unit average power over the whole record and stamp shared meta.
IqRecord finalize(std::vector<cplx> samples, const WaveParams& params,
                  WaveformClass label, std::map<std::string, std::string> meta) {
    double p = 0.0;
    for (const auto& s : samples) p += std::norm(s);
    p /= static_cast<double>(samples.size());
    if (!(p > 0.0)) throw InvalidParams("synthesized record has zero power");
    double scale = 1.0 / std::sqrt(p);
    for (auto& s : samples) s *= scale;

    IqRecord rec;
    rec.samples = std::move(samples);
    rec.sample_rate_hz = params.sample_rate_hz;
    rec.label = label;
    rec.meta = std::move(meta);
    rec.meta["class"] = to_string(label);
    rec.meta["seed"] = std::to_string(params.seed);
    return rec;
}

size_t next_pow2(double x) {
    size_t n = 1;
    while (static_cast<double>(n) < x) n <<= 1;
    return n;
}

// Seeded multi-tone message, unit RMS, confined to (0.05, 0.45) * bandwidth.
struct Message {
    std::vector<double> freqs_hz;
    std::vector<double> amps;
    std::vector<double> phases;

    double eval(double t) const {
        double v = 0.0;
        for (size_t i = 0; i < freqs_hz.size(); ++i)
            v += amps[i] * std::cos(2.0 * kPi * freqs_hz[i] * t + phases[i]);
        return v;
    }
};

Message draw_message(Rng& rng, double bandwidth_hz, int n_tones = 3) {
    Message m;
    double energy = 0.0;
    for (int i = 0; i < n_tones; ++i) {
        m.freqs_hz.push_back(rng.uniform(0.05, 0.45) * bandwidth_hz);
        m.amps.push_back(rng.uniform(0.5, 1.0));
        m.phases.push_back(rng.uniform(0.0, 2.0 * kPi));
        energy += 0.5 * m.amps.back() * m.amps.back();
    }
    double scale = 1.0 / std::sqrt(energy);  // unit RMS
    for (auto& a : m.amps) a *= scale;
    return m;
}

}  // namespace

std::vector<double> rrc_taps(double beta, int sps, int span_symbols) {
    if (!(beta > 0.0 && beta < 1.0)) throw InvalidParams("rrc beta must be in (0,1)");
    if (sps < 1 || span_symbols < 1) throw InvalidParams("rrc sps/span must be >= 1");
    const int half = span_symbols * sps / 2;
    std::vector<double> taps(2 * half + 1);
    for (int i = -half; i <= half; ++i) {
        double t = static_cast<double>(i) / sps;  // in symbols
        double v;
        if (i == 0) {
            v = 1.0 + beta * (4.0 / kPi - 1.0);
        } else if (std::abs(std::abs(t) - 1.0 / (4.0 * beta)) < 1e-12) {
            double a = kPi / (4.0 * beta);
            v = (beta / std::sqrt(2.0)) *
                ((1.0 + 2.0 / kPi) * std::sin(a) + (1.0 - 2.0 / kPi) * std::cos(a));
        } else {
            double num = std::sin(kPi * t * (1.0 - beta)) +
                         4.0 * beta * t * std::cos(kPi * t * (1.0 + beta));
            double den = kPi * t * (1.0 - 16.0 * beta * beta * t * t);
            v = num / den;
        }
        taps[i + half] = v;
    }
    double energy = std::inner_product(taps.begin(), taps.end(), taps.begin(), 0.0);
    double scale = 1.0 / std::sqrt(energy);
    for (auto& v : taps) v *= scale;
    return taps;
}

std::vector<cplx> ofdm_symbol(const std::vector<cplx>& bin_values, size_t cp_len) {
    if (!is_pow2(bin_values.size())) throw InvalidParams("ofdm_symbol: IDFT size must be a power of two");
    if (cp_len > bin_values.size()) throw InvalidParams("ofdm_symbol: cyclic prefix longer than symbol");
    std::vector<cplx> t = ifft(bin_values);
    double root_n = std::sqrt(static_cast<double>(bin_values.size()));
    for (auto& v : t) v *= root_n;  // unitary scaling
    std::vector<cplx> out;
    out.reserve(cp_len + t.size());
    out.insert(out.end(), t.end() - static_cast<ptrdiff_t>(cp_len), t.end());
    out.insert(out.end(), t.begin(), t.end());
    return out;
}

std::vector<cplx> dft_spread(const std::vector<cplx>& block) {
    if (block.empty()) throw InvalidParams("dft_spread: empty block");
    std::vector<cplx> f = dft_any(block);
    double scale = 1.0 / std::sqrt(static_cast<double>(block.size()));
    for (auto& v : f) v *= scale;
    return f;
}

std::vector<cplx> code_sequence(CodeKind kind, int param, int zc_root) {
    switch (kind) {
        case CodeKind::Barker: {
            static const std::map<int, std::vector<int>> barker = {
                {2, {1, -1}},
                {3, {1, 1, -1}},
                {4, {1, 1, -1, 1}},
                {5, {1, 1, 1, -1, 1}},
                {7, {1, 1, 1, -1, -1, 1, -1}},
                {11, {1, 1, 1, -1, -1, -1, 1, -1, -1, 1, -1}},
                {13, {1, 1, 1, 1, 1, -1, -1, 1, 1, -1, 1, -1, 1}},
            };
            auto it = barker.find(param);
            if (it == barker.end()) throw InvalidParams("no Barker code of length " + std::to_string(param));
            std::vector<cplx> out;
            out.reserve(it->second.size());
            for (int c : it->second) out.emplace_back(static_cast<double>(c), 0.0);
            return out;
        }
        case CodeKind::Frank: {
            if (param < 2) throw InvalidParams("Frank code needs N >= 2");
            const int n = param;
            std::vector<cplx> out;
            out.reserve(static_cast<size_t>(n) * n);
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k) {
                    double ang = 2.0 * kPi * i * k / n;
                    out.emplace_back(std::cos(ang), std::sin(ang));
                }
            return out;
        }
        case CodeKind::ZadoffChu: {
            const int nzc = param;
            const int u = zc_root;
            if (nzc < 3 || nzc % 2 == 0) throw InvalidParams("Zadoff-Chu length must be odd and >= 3");
            if (u < 1 || u >= nzc || std::gcd(u, nzc) != 1)
                throw InvalidParams("Zadoff-Chu root must be coprime to the length");
            std::vector<cplx> out;
            out.reserve(nzc);
            for (int n = 0; n < nzc; ++n) {
                double ang = -kPi * static_cast<double>(u) * n * (n + 1) / nzc;
                out.emplace_back(std::cos(ang), std::sin(ang));
            }
            return out;
        }
    }
    throw InvalidParams("unknown code kind");
}

IqRecord synth_single_carrier(const WaveParams& params, ModScheme scheme) {
    params.validate();
    if (params.bandwidth_hz * 2.0 > params.sample_rate_hz)
        throw InvalidParams("single carrier needs >= 2 samples per symbol; lower bandwidth");
    const int sps = static_cast<int>(std::lround(params.sample_rate_hz / params.bandwidth_hz));

    const double beta = 0.35;
    const int span = 8;
    const auto taps = rrc_taps(beta, sps, span);
    const int half = static_cast<int>(taps.size()) / 2;

    Rng rng(params.seed);
    const auto points = constellation(scheme);
    // Enough symbols that the record is fully in filter steady state.
    const size_t n_syms = (params.record_len + taps.size()) / sps + 2 * span;
    std::vector<cplx> syms(n_syms);
    for (auto& s : syms) s = points[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(points.size()) - 1))];

    std::vector<cplx> out(params.record_len);
    const size_t offset = taps.size();  // skip filter warm-up
    for (size_t n = 0; n < params.record_len; ++n) {
        const size_t t_abs = n + offset;
        cplx acc = 0.0;
        // Sum over symbols whose pulse covers sample t_abs.
        const ptrdiff_t k_lo = (static_cast<ptrdiff_t>(t_abs) - half + sps - 1) / sps;
        const ptrdiff_t k_hi = (static_cast<ptrdiff_t>(t_abs) + half) / sps;
        for (ptrdiff_t k = std::max<ptrdiff_t>(0, k_lo); k <= k_hi && k < static_cast<ptrdiff_t>(n_syms); ++k) {
            const ptrdiff_t tap = static_cast<ptrdiff_t>(t_abs) - k * sps + half;
            acc += syms[static_cast<size_t>(k)] * taps[static_cast<size_t>(tap)];
        }
        out[n] = acc;
    }

    return finalize(std::move(out), params, WaveformClass::SC,
                    {{"scheme", to_string(scheme)}, {"sps", std::to_string(sps)}});
}

IqRecord synth_multicarrier(const WaveParams& params, MulticarrierKind kind,
                            double scs_hz, ModScheme scheme) {
    params.validate();
    if (!(scs_hz > 0)) throw InvalidParams("subcarrier spacing must be positive");
    const auto occupied = static_cast<size_t>(std::floor(params.bandwidth_hz / scs_hz));
    if (occupied < 12) throw InvalidParams("multicarrier needs >= 12 occupied subcarriers");
    const size_t n_idft = next_pow2(params.sample_rate_hz / scs_hz);
    if (occupied > n_idft) throw InvalidParams("occupied subcarriers exceed DFT size");
    const size_t cp_len = n_idft / 8;

    Rng rng(params.seed);
    const auto points = constellation(scheme);
    std::vector<cplx> out;
    out.reserve(params.record_len + n_idft + cp_len);
    std::vector<cplx> block(occupied);
    std::vector<cplx> bins(n_idft);

    while (out.size() < params.record_len) {
        for (auto& s : block) s = points[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(points.size()) - 1))];
        const std::vector<cplx>& vals = kind == MulticarrierKind::SCFDMA ? dft_spread(block) : block;
        std::fill(bins.begin(), bins.end(), cplx{});
        // Contiguous block centered on DC.
        const ptrdiff_t first = -static_cast<ptrdiff_t>(vals.size() / 2);
        for (size_t k = 0; k < vals.size(); ++k) {
            const ptrdiff_t b = first + static_cast<ptrdiff_t>(k);
            bins[static_cast<size_t>((b + static_cast<ptrdiff_t>(n_idft)) % static_cast<ptrdiff_t>(n_idft))] = vals[k];
        }
        auto sym = ofdm_symbol(bins, cp_len);
        out.insert(out.end(), sym.begin(), sym.end());
    }
    out.resize(params.record_len);

    const WaveformClass label =
        kind == MulticarrierKind::OFDM ? WaveformClass::OFDM : WaveformClass::SCFDMA;
    return finalize(std::move(out), params, label,
                    {{"scheme", to_string(scheme)},
                     {"scs_hz", fmt_num(scs_hz)},
                     {"n_idft", std::to_string(n_idft)},
                     {"occupied", std::to_string(occupied)}});
}

IqRecord synth_analog(const WaveParams& params, AnalogKind kind, const AnalogOpts& opts) {
    params.validate();
    Rng rng(params.seed);
    const Message msg = draw_message(rng, params.bandwidth_hz);
    const double fs = params.sample_rate_hz;
    std::vector<cplx> out(params.record_len);

    if (kind == AnalogKind::AM) {
        if (opts.mod_index < 0.0 || opts.mod_index > 1.0)
            throw InvalidParams("AM modulation index must be in [0, 1]");
        if (opts.sideband == Sideband::DSB) {
            for (size_t n = 0; n < out.size(); ++n)
                out[n] = 1.0 + opts.mod_index * msg.eval(static_cast<double>(n) / fs);
        } else {
            // Phasing-method SSB, upper sideband, suppressed carrier.
            for (size_t n = 0; n < out.size(); ++n) {
                const double t = static_cast<double>(n) / fs;
                cplx v = 0.0;
                for (size_t i = 0; i < msg.freqs_hz.size(); ++i) {
                    double ang = 2.0 * kPi * msg.freqs_hz[i] * t + msg.phases[i];
                    v += msg.amps[i] * cplx{std::cos(ang), std::sin(ang)};
                }
                out[n] = v;
            }
        }
        std::map<std::string, std::string> meta{{"sideband", to_string(opts.sideband)},
                                                {"mod_index", fmt_num(opts.mod_index)}};
        return finalize(std::move(out), params, WaveformClass::AM, std::move(meta));
    }

    // FM: constant-modulus angle modulation with the stated peak deviation.
    double peak = 0.0;
    for (size_t n = 0; n < out.size(); ++n)
        peak = std::max(peak, std::abs(msg.eval(static_cast<double>(n) / fs)));
    double f_max = *std::max_element(msg.freqs_hz.begin(), msg.freqs_hz.end());
    double deviation = opts.peak_deviation_hz > 0.0 ? opts.peak_deviation_hz
                                                    : params.bandwidth_hz / 2.0 - f_max;
    if (!(deviation > 0.0)) throw InvalidParams("FM peak deviation must be positive");
    const double kf = deviation / peak;
    double phase = 0.0;
    for (size_t n = 0; n < out.size(); ++n) {
        phase += 2.0 * kPi * kf * msg.eval(static_cast<double>(n) / fs) / fs;
        out[n] = {std::cos(phase), std::sin(phase)};
    }
    return finalize(std::move(out), params, WaveformClass::FM,
                    {{"peak_deviation_hz", fmt_num(deviation)}});
}

IqRecord synth_lfm(const WaveParams& params, SweepDir sweep, double duty, int n_pulses) {
    params.validate();
    if (!(duty > 0.0 && duty <= 1.0)) throw InvalidParams("duty must be in (0, 1]");
    if (n_pulses < 1) throw InvalidParams("need at least one pulse");
    const size_t pri = params.record_len / static_cast<size_t>(n_pulses);
    const size_t active = std::max<size_t>(2, static_cast<size_t>(std::llround(duty * static_cast<double>(pri))));
    if (pri < 2) throw InvalidParams("record too short for the requested pulse count");

    const double fs = params.sample_rate_hz;
    const double bw = params.bandwidth_hz;
    const double t_pulse = static_cast<double>(active) / fs;
    const double sign = sweep == SweepDir::Up ? 1.0 : -1.0;

    std::vector<cplx> out(params.record_len, cplx{});
    for (size_t p = 0; p < static_cast<size_t>(n_pulses); ++p) {
        const size_t start = p * pri;
        for (size_t i = 0; i < active && start + i < out.size(); ++i) {
            const double t = (static_cast<double>(i) - static_cast<double>(active) / 2.0) / fs;
            const double ang = sign * kPi * (bw / t_pulse) * t * t;
            out[start + i] = {std::cos(ang), std::sin(ang)};
        }
    }
    return finalize(std::move(out), params, WaveformClass::LFM,
                    {{"sweep", to_string(sweep)},
                     {"duty", fmt_num(duty)},
                     {"n_pulses", std::to_string(n_pulses)}});
}

IqRecord synth_phase_coded(const WaveParams& params, CodeKind kind, int code_param,
                           int samples_per_chip, int zc_root, double duty) {
    params.validate();
    if (samples_per_chip < 2) throw InvalidParams("chip rate exceeds half the sample rate");
    if (!(duty > 0.0 && duty <= 1.0)) throw InvalidParams("duty must be in (0, 1]");
    const auto code = code_sequence(kind, code_param, zc_root);
    const size_t pulse_len = code.size() * static_cast<size_t>(samples_per_chip);
    const size_t pri = std::max(pulse_len, static_cast<size_t>(std::llround(static_cast<double>(pulse_len) / duty)));

    std::vector<cplx> out(params.record_len, cplx{});
    for (size_t start = 0; start < out.size(); start += pri) {
        for (size_t i = 0; i < pulse_len && start + i < out.size(); ++i)
            out[start + i] = code[i / static_cast<size_t>(samples_per_chip)];
    }
    return finalize(std::move(out), params, WaveformClass::PhaseCoded,
                    {{"code", to_string(kind)},
                     {"code_param", std::to_string(code_param)},
                     {"samples_per_chip", std::to_string(samples_per_chip)},
                     {"duty", fmt_num(duty)}});
}

IqRecord synth_unknown(const WaveParams& params, WaveformClass kind, const FhOpts& opts) {
    params.validate();
    Rng rng(params.seed);

    if (kind == WaveformClass::UnknownNoise) {
        std::vector<cplx> out(params.record_len);
        for (auto& s : out) s = rng.cgauss();
        return finalize(std::move(out), params, WaveformClass::UnknownNoise, {});
    }
    if (kind != WaveformClass::UnknownFH) throw InvalidParams("synth_unknown: kind must be an unknown class");
    if (opts.n_hops < 1) throw InvalidParams("need at least one hop");

    const double fs = params.sample_rate_hz;
    const int sps = std::max(1, static_cast<int>(std::lround(fs / opts.symbol_rate_hz)));
    const double rs = fs / sps;
    const double deviation = opts.mod_index * rs / 2.0;

    // Gaussian frequency pulse for the NRZ bit stream.
    const double sigma = std::sqrt(std::numbers::ln2_v<double>) / (2.0 * kPi * opts.gauss_bt * rs) * fs;
    const int g_half = std::max(1, static_cast<int>(std::lround(4.0 * sigma)));
    std::vector<double> g(2 * g_half + 1);
    double g_sum = 0.0;
    for (int i = -g_half; i <= g_half; ++i) {
        g[i + g_half] = std::exp(-0.5 * (i / sigma) * (i / sigma));
        g_sum += g[i + g_half];
    }
    for (auto& v : g) v /= g_sum;

    const size_t n = params.record_len;
    const size_t n_bits = n / sps + 2 * (g_half / sps + 2);
    std::vector<double> nrz(n_bits);
    for (auto& b : nrz) b = rng.uniform() < 0.5 ? -1.0 : 1.0;

    // Filtered instantaneous-frequency track (units of +-1 before deviation).
    const size_t warm = static_cast<size_t>(g_half) + static_cast<size_t>(sps);
    std::vector<double> freq(n);
    for (size_t i = 0; i < n; ++i) {
        const ptrdiff_t center = static_cast<ptrdiff_t>(i + warm);
        double acc = 0.0;
        for (int k = -g_half; k <= g_half; ++k) {
            const ptrdiff_t t = center + k;
            const size_t bit = static_cast<size_t>(t) / static_cast<size_t>(sps);
            acc += nrz[std::min(bit, n_bits - 1)] * g[k + g_half];
        }
        freq[i] = acc;
    }

    // Hop plan: a fresh center frequency every interval.
    const size_t hop_len = std::max<size_t>(1, n / static_cast<size_t>(opts.n_hops));
    const double span = std::max(0.0, params.bandwidth_hz / 2.0 - opts.hop_bandwidth_hz);
    std::vector<double> centers(static_cast<size_t>(opts.n_hops));
    for (auto& c : centers) c = rng.uniform(-span, span);

    std::vector<cplx> out(n);
    double phase = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const size_t hop = std::min(i / hop_len, centers.size() - 1);
        const double f_inst = centers[hop] + deviation * freq[i];
        phase += 2.0 * kPi * f_inst / fs;
        out[i] = {std::cos(phase), std::sin(phase)};
    }
    return finalize(std::move(out), params, WaveformClass::UnknownFH,
                    {{"n_hops", std::to_string(opts.n_hops)},
                     {"symbol_rate_hz", fmt_num(rs)}});
}

}  // namespace wosr
