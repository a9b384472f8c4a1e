#include "wosr/spectra.hpp"

#include <cmath>

#include "wosr/fft.hpp"

namespace wosr {

std::vector<double> dft_magnitude(const std::vector<cplx>& samples, size_t n_fft) {
    if (samples.empty()) throw InvalidInput("dft_magnitude: empty input");
    if (!is_pow2(n_fft)) throw InvalidParams("dft_magnitude: n_fft must be a power of two");
    std::vector<cplx> x(samples.begin(),
                        samples.begin() + static_cast<ptrdiff_t>(std::min(samples.size(), n_fft)));
    x.resize(n_fft, cplx{});
    fft_inplace(x);
    std::vector<double> mag(n_fft);
    for (size_t i = 0; i < n_fft; ++i) mag[i] = std::abs(x[i]);
    return mag;
}

std::vector<double> l2_normalize(const std::vector<double>& v) {
    if (v.empty()) throw InvalidInput("l2_normalize: empty input");
    double e = 0.0;
    for (double x : v) e += x * x;
    if (!(e > 0.0)) throw InvalidInput("l2_normalize: zero vector");
    const double scale = 1.0 / std::sqrt(e);
    std::vector<double> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] * scale;
    return out;
}

SpectrumFeature featurize(const IqRecord& rec, size_t n_fft) {
    const auto mag = l2_normalize(dft_magnitude(rec.samples, n_fft));
    SpectrumFeature f;
    f.label = rec.label;
    f.values.resize(mag.size());
    for (size_t i = 0; i < mag.size(); ++i) f.values[i] = static_cast<float>(mag[i]);
    return f;
}

}  // namespace wosr
