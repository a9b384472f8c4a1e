#pragma once

#include <optional>

#include "wosr/iq_record.hpp"

namespace wosr {

enum class FadingModel { None, Rayleigh, Rician };
const char* to_string(FadingModel m);
FadingModel fading_from_string(const std::string& s);

// One draw of channel impairments for a single record. Ranges follow the
// evaluation conditions the corpus is defined over.
struct ImpairmentSpec {
    std::optional<double> snr_db;      // nullopt -> no noise added
    double cfo_hz = 0.0;               // [-5000, 5000]
    double phase_rad = 0.0;            // [-pi, pi]
    double iq_imbalance_db = 0.0;      // [0, 3], amplitude-only
    FadingModel fading = FadingModel::None;
    double rician_k = 3.0;             // K factor when fading == Rician
    uint64_t seed = 0;

    void validate() const;
};

// Individual stages. Each returns a new sample vector; inputs untouched.
std::vector<cplx> apply_fading(const std::vector<cplx>& x, FadingModel model,
                               double rician_k, Rng& rng);
std::vector<cplx> apply_freq_phase_offset(const std::vector<cplx>& x, double cfo_hz,
                                          double phase_rad, double sample_rate_hz);
std::vector<cplx> apply_iq_imbalance(const std::vector<cplx>& x, double imbalance_db);
std::vector<cplx> apply_awgn(const std::vector<cplx>& x, double snr_db, Rng& rng);

// Full chain: fading -> frequency/phase offset -> IQ imbalance -> AWGN.
// Stamps the applied values into rec.meta.
IqRecord impair(const IqRecord& rec, const ImpairmentSpec& spec);

}  // namespace wosr
