#pragma once

#include "wosr/iq_record.hpp"

namespace wosr {

enum class MulticarrierKind : uint8_t { OFDM, SCFDMA };
enum class Sideband : uint8_t { DSB, SSB };
enum class AnalogKind : uint8_t { AM, FM };
enum class SweepDir : uint8_t { Up, Down };
enum class CodeKind : uint8_t { Barker, Frank, ZadoffChu };

const char* to_string(MulticarrierKind k);
const char* to_string(Sideband s);
const char* to_string(SweepDir s);
const char* to_string(CodeKind k);

struct AnalogOpts {
    Sideband sideband = Sideband::DSB;   // AM only
    double mod_index = 0.5;              // AM only, must be <= 1
    double peak_deviation_hz = 0.0;      // FM only; 0 derives it from bandwidth
};

struct FhOpts {
    double hop_bandwidth_hz = 2e6;   // per-hop occupied bandwidth target
    double symbol_rate_hz = 2e6;
    double gauss_bt = 0.5;
    double mod_index = 0.5;
    int n_hops = 8;
};

// Root-raised-cosine taps (unit energy), beta rolloff, sps samples/symbol.
std::vector<double> rrc_taps(double beta, int sps, int span_symbols);

// One multicarrier symbol: unitary IDFT of the given bin vector with a
// cyclic prefix of cp_len samples prepended. bin_values.size() is the
// (power-of-two) IDFT size.
std::vector<cplx> ofdm_symbol(const std::vector<cplx>& bin_values, size_t cp_len);

// Unitary M-point DFT used for SC-FDMA spreading.
std::vector<cplx> dft_spread(const std::vector<cplx>& block);

// Phase-code chip sequences.
//   Barker:    param = length in {2,3,4,5,7,11,13}
//   Frank:     param = N, sequence length N^2
//   ZadoffChu: param = odd length Nzc, zc_root = u with gcd(u, Nzc) = 1
std::vector<cplx> code_sequence(CodeKind kind, int param, int zc_root = 1);

IqRecord synth_single_carrier(const WaveParams& params, ModScheme scheme);

IqRecord synth_multicarrier(const WaveParams& params, MulticarrierKind kind,
                            double scs_hz, ModScheme scheme);

IqRecord synth_analog(const WaveParams& params, AnalogKind kind,
                      const AnalogOpts& opts = {});

IqRecord synth_lfm(const WaveParams& params, SweepDir sweep, double duty,
                   int n_pulses = 2);

IqRecord synth_phase_coded(const WaveParams& params, CodeKind kind,
                           int code_param, int samples_per_chip,
                           int zc_root = 1, double duty = 0.5);

IqRecord synth_unknown(const WaveParams& params, WaveformClass kind,
                       const FhOpts& opts = {});

}  // namespace wosr
