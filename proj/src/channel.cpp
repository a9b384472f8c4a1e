#include "wosr/channel.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace wosr {

namespace {
constexpr double kPi = std::numbers::pi;

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

double mean_power(const std::vector<cplx>& x) {
    double p = 0.0;
    for (const auto& s : x) p += std::norm(s);
    return p / static_cast<double>(x.size());
}
}  // namespace

const char* to_string(FadingModel m) {
    switch (m) {
        case FadingModel::None: return "none";
        case FadingModel::Rayleigh: return "rayleigh";
        case FadingModel::Rician: return "rician";
    }
    return "?";
}

FadingModel fading_from_string(const std::string& s) {
    if (s == "none") return FadingModel::None;
    if (s == "rayleigh") return FadingModel::Rayleigh;
    if (s == "rician") return FadingModel::Rician;
    throw InvalidParams("unknown fading model: " + s);
}

void ImpairmentSpec::validate() const {
    if (snr_db && !(*snr_db >= -40.0 && *snr_db <= 60.0))
        throw InvalidParams("snr_db out of range [-40, 60]");
    if (!(cfo_hz >= -5000.0 && cfo_hz <= 5000.0))
        throw InvalidParams("cfo_hz out of range [-5000, 5000]");
    if (!(phase_rad >= -kPi && phase_rad <= kPi))
        throw InvalidParams("phase_rad out of range [-pi, pi]");
    if (!(iq_imbalance_db >= 0.0 && iq_imbalance_db <= 3.0))
        throw InvalidParams("iq_imbalance_db out of range [0, 3]");
    if (fading == FadingModel::Rician && !(rician_k > 0.0))
        throw InvalidParams("rician_k must be positive");
}

std::vector<cplx> apply_fading(const std::vector<cplx>& x, FadingModel model,
                               double rician_k, Rng& rng) {
    if (model == FadingModel::None) return x;
    cplx h;
    if (model == FadingModel::Rayleigh) {
        h = rng.cgauss();  // CN(0,1), E|h|^2 = 1
    } else {
        if (!(rician_k > 0.0)) throw InvalidParams("rician_k must be positive");
        const double los = std::sqrt(rician_k / (rician_k + 1.0));
        const double nlos = std::sqrt(1.0 / (rician_k + 1.0));
        h = los + nlos * rng.cgauss();
    }
    std::vector<cplx> out(x.size());
    for (size_t i = 0; i < x.size(); ++i) out[i] = h * x[i];
    return out;
}

std::vector<cplx> apply_freq_phase_offset(const std::vector<cplx>& x, double cfo_hz,
                                          double phase_rad, double sample_rate_hz) {
    if (!(sample_rate_hz > 0.0)) throw InvalidParams("sample rate must be positive");
    std::vector<cplx> out(x.size());
    for (size_t n = 0; n < x.size(); ++n) {
        const double ang = 2.0 * kPi * cfo_hz * static_cast<double>(n) / sample_rate_hz + phase_rad;
        out[n] = x[n] * cplx{std::cos(ang), std::sin(ang)};
    }
    return out;
}

std::vector<cplx> apply_iq_imbalance(const std::vector<cplx>& x, double imbalance_db) {
    if (!(imbalance_db >= 0.0)) throw InvalidParams("iq imbalance must be >= 0 dB");
    if (x.empty()) return {};
    const double alpha = std::pow(10.0, imbalance_db / 20.0);
    std::vector<cplx> out(x.size());
    for (size_t i = 0; i < x.size(); ++i) out[i] = {x[i].real(), alpha * x[i].imag()};
    // Renormalize so imbalance does not change total power.
    const double p_in = mean_power(x);
    const double p_out = mean_power(out);
    if (p_out > 0.0 && p_in > 0.0) {
        const double scale = std::sqrt(p_in / p_out);
        for (auto& s : out) s *= scale;
    }
    return out;
}

std::vector<cplx> apply_awgn(const std::vector<cplx>& x, double snr_db, Rng& rng) {
    const double p_sig = mean_power(x);
    if (!(p_sig > 0.0)) throw InvalidInput("awgn: input record has zero power");
    const double p_noise = p_sig * std::pow(10.0, -snr_db / 10.0);
    const double sigma = std::sqrt(p_noise);  // cgauss carries E|z|^2 = 1
    std::vector<cplx> out(x.size());
    for (size_t i = 0; i < x.size(); ++i) out[i] = x[i] + sigma * rng.cgauss();
    return out;
}

IqRecord impair(const IqRecord& rec, const ImpairmentSpec& spec) {
    spec.validate();
    if (rec.samples.empty()) throw InvalidInput("impair: empty record");
    Rng rng(spec.seed);

    IqRecord out = rec;
    out.samples = apply_fading(out.samples, spec.fading, spec.rician_k, rng);
    out.samples = apply_freq_phase_offset(out.samples, spec.cfo_hz, spec.phase_rad,
                                          rec.sample_rate_hz);
    if (spec.iq_imbalance_db > 0.0)
        out.samples = apply_iq_imbalance(out.samples, spec.iq_imbalance_db);
    if (spec.snr_db) out.samples = apply_awgn(out.samples, *spec.snr_db, rng);

    out.meta["snr_db"] = spec.snr_db ? fmt_num(*spec.snr_db) : "none";
    out.meta["cfo_hz"] = fmt_num(spec.cfo_hz);
    out.meta["phase_rad"] = fmt_num(spec.phase_rad);
    out.meta["iq_imbalance_db"] = fmt_num(spec.iq_imbalance_db);
    out.meta["fading"] = to_string(spec.fading);
    if (spec.fading == FadingModel::Rician) out.meta["rician_k"] = fmt_num(spec.rician_k);
    return out;
}

}  // namespace wosr
