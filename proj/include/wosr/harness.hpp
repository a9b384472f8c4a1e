#pragma once

#include <limits>

#include "wosr/dataset.hpp"
#include "wosr/metrics.hpp"
#include "wosr/osr.hpp"

namespace wosr {

// Classifier architecture + optimizer settings, JSON-round-trippable for the
// CLI. Scale profiles pick the hidden widths; everything else is shared.
struct NetConfig {
    std::vector<size_t> hidden = {512, 256, 128, 64, 32, 16};
    double dropout_rate = 0.2;
    int n_dropout_layers = 3;
    TrainConfig train;

    static NetConfig desk();
    static NetConfig full();
    std::string to_json() const;
    static NetConfig from_json(const std::string& text);
    static NetConfig load(const std::string& path);
};

struct DetectorConfig {
    size_t n_trees = 100;
    size_t psi = 256;
    double contamination = 0.02;
    double fraction = 0.5;  // share of each class's training features used
    uint64_t seed = 1;
    // Exclude sub-floor-SNR records from detector fitting; at small DFT sizes
    // their embeddings collapse toward the noise manifold and teach the
    // forests to accept it. NaN-SNR (clean) records always qualify.
    double min_snr_db = -std::numeric_limits<double>::infinity();
};

// Trains the classifier on the featurized training set.
MlpModel train_classifier(const FeatureSet& train, const NetConfig& cfg,
                          std::vector<EpochStats>* trace = nullptr);

// Embeds a seeded per-class subsample and fits one detector per known class.
void fit_detectors(OsrModel& model, const FeatureSet& train, const DetectorConfig& cfg);

// Phase 1: closed-set accuracy on the known classes (7x7 confusion).
MetricsReport run_phase1(const MlpModel& classifier, const FeatureSet& test);

// Phase 2: per-detector and pooled known-accept / unknown-reject rates.
MetricsReport run_phase2(const OsrModel& model, const FeatureSet& test);

// Phase 3: end-to-end open-set evaluation (8x8 confusion incl. Unknown).
MetricsReport run_phase3(const OsrModel& model, const FeatureSet& test);

}  // namespace wosr
