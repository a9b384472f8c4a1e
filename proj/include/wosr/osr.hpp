#pragma once

#include <array>

#include "wosr/densenet.hpp"
#include "wosr/iforest.hpp"

namespace wosr {

enum class FusionRule { AnyAccepts, AllMustAccept };
const char* to_string(FusionRule r);
FusionRule fusion_from_string(const std::string& s);

struct OsrModel {
    MlpModel classifier;
    std::array<IsolationForestModel, kNumKnownClasses> detectors;  // indexed by class
    FusionRule fusion_rule = FusionRule::AnyAccepts;

    void check() const;  // trained classifier + all 7 detectors fitted
};

struct OsrVerdict {
    bool is_known = false;
    WaveformClass decision = WaveformClass::SC;  // valid when is_known
    double confidence = 0.0;
    std::array<double, kNumKnownClasses> detector_scores{};
    std::array<bool, kNumKnownClasses> detector_flags{};  // true = flagged outlier
    std::vector<double> embedding;                        // retained for audit
};

// Embed via the classifier tap, run all 7 detectors, fuse:
//   AnyAccepts:    Unknown iff every detector flags outlier.
//   AllMustAccept: Unknown iff any detector flags outlier.
// Accepted samples get the classifier's argmax class and confidence.
OsrVerdict classify_open_set(const OsrModel& model, const SpectrumFeature& feature);

// Detector bypass; identical to the classifier's predict.
std::pair<WaveformClass, double> classify_closed_set(const OsrModel& model,
                                                     const SpectrumFeature& feature);

}  // namespace wosr
