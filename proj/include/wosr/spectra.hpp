#pragma once

#include "wosr/iq_record.hpp"

namespace wosr {

// Feature vector for one record: L2-normalized N-point DFT magnitude.
struct SpectrumFeature {
    std::vector<float> values;
    WaveformClass label = WaveformClass::SC;
};

// |DFT| of the record, zero-padded or truncated to n_fft points.
std::vector<double> dft_magnitude(const std::vector<cplx>& samples, size_t n_fft);

// Scale to unit L2 norm. Throws InvalidInput on an all-zero vector.
std::vector<double> l2_normalize(const std::vector<double>& v);

// Full featurization; values are rounded through f32 so stored features
// and in-memory features agree bit for bit.
SpectrumFeature featurize(const IqRecord& rec, size_t n_fft);

}  // namespace wosr
