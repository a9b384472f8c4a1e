#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wosr/common.hpp"

namespace wosr {

// Seven known classes first, then the two test-only unknowns. Training
// manifests must never contain the unknown variants.
enum class WaveformClass : uint8_t {
    SC = 0,
    SCFDMA,
    OFDM,
    LFM,
    AM,
    FM,
    PhaseCoded,
    UnknownFH,
    UnknownNoise,
};

constexpr int kNumKnownClasses = 7;
constexpr int kNumClasses = 9;

constexpr bool is_known(WaveformClass c) {
    return static_cast<uint8_t>(c) < kNumKnownClasses;
}

const char* to_string(WaveformClass c);
std::optional<WaveformClass> waveform_class_from_string(const std::string& s);

enum class ModScheme : uint8_t {
    BPSK = 0,
    QPSK,
    PSK16,
    PSK64,
    QAM4,
    QAM16,
    QAM64,
    QAM256,
};

constexpr int kNumModSchemes = 8;

const char* to_string(ModScheme m);
std::optional<ModScheme> mod_scheme_from_string(const std::string& s);

// Constellation points, normalized to unit average symbol energy.
std::vector<cplx> constellation(ModScheme m);

struct WaveParams {
    double sample_rate_hz = 100e6;
    double bandwidth_hz = 25e6;
    size_t record_len = 4096;
    uint64_t seed = 0;

    void validate() const;  // throws InvalidParams
};

struct IqRecord {
    std::vector<cplx> samples;
    double sample_rate_hz = 0.0;
    WaveformClass label = WaveformClass::SC;
    std::map<std::string, std::string> meta;  // synthesis metadata, sorted keys

    double power() const;  // mean |s|^2
};

}  // namespace wosr
