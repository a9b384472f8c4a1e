#include "wosr/iq_record.hpp"

#include <cmath>
#include <numbers>

namespace wosr {

const char* to_string(WaveformClass c) {
    switch (c) {
        case WaveformClass::SC: return "SC";
        case WaveformClass::SCFDMA: return "SCFDMA";
        case WaveformClass::OFDM: return "OFDM";
        case WaveformClass::LFM: return "LFM";
        case WaveformClass::AM: return "AM";
        case WaveformClass::FM: return "FM";
        case WaveformClass::PhaseCoded: return "PhaseCoded";
        case WaveformClass::UnknownFH: return "UnknownFH";
        case WaveformClass::UnknownNoise: return "UnknownNoise";
    }
    return "?";
}

std::optional<WaveformClass> waveform_class_from_string(const std::string& s) {
    for (int i = 0; i < kNumClasses; ++i) {
        auto c = static_cast<WaveformClass>(i);
        if (s == to_string(c)) return c;
    }
    return std::nullopt;
}

const char* to_string(ModScheme m) {
    switch (m) {
        case ModScheme::BPSK: return "BPSK";
        case ModScheme::QPSK: return "QPSK";
        case ModScheme::PSK16: return "PSK16";
        case ModScheme::PSK64: return "PSK64";
        case ModScheme::QAM4: return "QAM4";
        case ModScheme::QAM16: return "QAM16";
        case ModScheme::QAM64: return "QAM64";
        case ModScheme::QAM256: return "QAM256";
    }
    return "?";
}

std::optional<ModScheme> mod_scheme_from_string(const std::string& s) {
    for (int i = 0; i < kNumModSchemes; ++i) {
        auto m = static_cast<ModScheme>(i);
        if (s == to_string(m)) return m;
    }
    return std::nullopt;
}

namespace {

std::vector<cplx> psk_points(int m) {
    std::vector<cplx> pts(m);
    for (int k = 0; k < m; ++k) {
        double ang = 2.0 * std::numbers::pi * k / m;
        pts[k] = {std::cos(ang), std::sin(ang)};
    }
    return pts;
}

std::vector<cplx> square_qam_points(int m) {
    int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
    std::vector<cplx> pts;
    pts.reserve(m);
    double energy = 0.0;
    for (int i = 0; i < side; ++i) {
        for (int q = 0; q < side; ++q) {
            double re = 2.0 * i - (side - 1);
            double im = 2.0 * q - (side - 1);
            pts.emplace_back(re, im);
            energy += re * re + im * im;
        }
    }
    double scale = std::sqrt(static_cast<double>(m) / energy);
    for (auto& p : pts) p *= scale;
    return pts;
}

}  // namespace

std::vector<cplx> constellation(ModScheme m) {
    switch (m) {
        case ModScheme::BPSK: return {cplx{1, 0}, cplx{-1, 0}};
        case ModScheme::QPSK: return psk_points(4);
        case ModScheme::QAM4: return square_qam_points(4);
        case ModScheme::PSK16: return psk_points(16);
        case ModScheme::PSK64: return psk_points(64);
        case ModScheme::QAM16: return square_qam_points(16);
        case ModScheme::QAM64: return square_qam_points(64);
        case ModScheme::QAM256: return square_qam_points(256);
    }
    throw InvalidParams("unknown modulation scheme");
}

void WaveParams::validate() const {
    if (!(sample_rate_hz > 0)) throw InvalidParams("sample_rate_hz must be positive");
    if (!(bandwidth_hz > 0)) throw InvalidParams("bandwidth_hz must be positive");
    if (bandwidth_hz > sample_rate_hz) throw InvalidParams("bandwidth_hz exceeds sample_rate_hz");
    if (record_len < 64) throw InvalidParams("record_len must be >= 64");
}

double IqRecord::power() const {
    if (samples.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& s : samples) acc += std::norm(s);
    return acc / static_cast<double>(samples.size());
}

}  // namespace wosr
