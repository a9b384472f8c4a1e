#include "wosr/osr.hpp"

namespace wosr {

const char* to_string(FusionRule r) {
    return r == FusionRule::AnyAccepts ? "any-accepts" : "all-must-accept";
}

FusionRule fusion_from_string(const std::string& s) {
    if (s == "any-accepts") return FusionRule::AnyAccepts;
    if (s == "all-must-accept") return FusionRule::AllMustAccept;
    throw InvalidParams("unknown fusion rule: " + s);
}

void OsrModel::check() const {
    if (!classifier.trained) throw InvalidState("osr: classifier is not trained");
    if (classifier.n_out() != kNumKnownClasses)
        throw InvalidState("osr: classifier must have one output per known class");
    for (size_t c = 0; c < kNumKnownClasses; ++c) {
        if (!detectors[c].fitted)
            throw InvalidState(std::string("osr: missing detector for class ") +
                               to_string(static_cast<WaveformClass>(c)));
        if (detectors[c].class_tag != static_cast<WaveformClass>(c))
            throw InvalidState("osr: detector class tag mismatch");
    }
}

OsrVerdict classify_open_set(const OsrModel& model, const SpectrumFeature& feature) {
    model.check();
    OsrVerdict v;
    v.embedding = model.classifier.embed(feature.values);

    size_t n_accept = 0;
    for (size_t c = 0; c < kNumKnownClasses; ++c) {
        auto [flag, score] = is_outlier(model.detectors[c], v.embedding);
        v.detector_flags[c] = flag;
        v.detector_scores[c] = score;
        n_accept += flag ? 0 : 1;
    }

    const bool accepted = model.fusion_rule == FusionRule::AnyAccepts
                              ? n_accept > 0
                              : n_accept == kNumKnownClasses;
    if (!accepted) return v;  // Unknown

    auto [cls, conf] = model.classifier.predict(feature.values);
    v.is_known = true;
    v.decision = static_cast<WaveformClass>(cls);
    v.confidence = conf;
    return v;
}

std::pair<WaveformClass, double> classify_closed_set(const OsrModel& model,
                                                     const SpectrumFeature& feature) {
    auto [cls, conf] = model.classifier.predict(feature.values);
    return {static_cast<WaveformClass>(cls), conf};
}

}  // namespace wosr
