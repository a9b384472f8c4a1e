#pragma once

#include <optional>

#include "wosr/iq_record.hpp"

namespace wosr {

// How each record's SNR is drawn: a uniform range (training) or a uniform
// pick from a grid (testing). Disabled -> no AWGN stage.
struct SnrSpec {
    bool enabled = true;
    double lo_db = -20.0;
    double hi_db = 20.0;
    std::vector<double> grid_db;  // non-empty selects grid mode
};

struct DatasetManifest {
    std::string profile = "desk";  // desk | full
    std::string split = "train";   // train | test
    uint64_t seed = 1;

    double sample_rate_hz = 100e6;
    size_t record_len = 4096;
    size_t n_fft = 4096;
    size_t per_class_count = 1000;  // each of the 7 known classes
    size_t unknown_per_kind = 0;    // test only: UnknownFH and UnknownNoise each

    SnrSpec snr;
    bool imp_cfo = true;    // CFO ~ U[-5000, 5000] Hz
    bool imp_phase = true;  // phase ~ U[-pi, pi]
    bool imp_iq = true;     // IQ imbalance ~ U[0, 3] dB
    bool imp_fading = true; // fading kind ~ U{none, rayleigh, rician}
    double rician_k = 3.0;
    // Pin an impairment to one value instead of drawing it (robustness runs).
    std::optional<double> cfo_fixed_hz;
    std::optional<double> phase_fixed_rad;
    std::optional<double> iq_fixed_db;

    std::vector<double> bandwidths_hz;     // general grid
    std::vector<double> sc_bandwidths_hz;  // single-carrier subset (sps >= 2)
    std::vector<double> scs_hz;            // OFDM / SC-FDMA spacings
    std::vector<ModScheme> mod_schemes;

    size_t total_count() const {
        return per_class_count * kNumKnownClasses + 2 * unknown_per_kind;
    }

    // Throws InvalidParams naming the offending field.
    void validate() const;

    std::string to_json() const;  // pretty, stable key order
    static DatasetManifest from_json(const std::string& text);
    static DatasetManifest load(const std::string& path);
    void save(const std::string& path) const;

    // Canonical profiles.
    static DatasetManifest desk_train(uint64_t seed);
    static DatasetManifest desk_test(uint64_t seed);
    static DatasetManifest full_train(uint64_t seed);
    static DatasetManifest full_test(uint64_t seed);
};

// SNR bins shared by the evaluation phases and tests.
std::vector<double> default_snr_grid();

}  // namespace wosr
