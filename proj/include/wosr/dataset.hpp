#pragma once

#include "wosr/manifest.hpp"
#include "wosr/spectra.hpp"

namespace wosr {

// One featurized record plus the metadata the evaluation phases bin on.
struct FeatureRecord {
    SpectrumFeature feat;
    float snr_db = 0.0f;  // NaN when AWGN was disabled
};

struct FeatureSet {
    size_t dim = 0;
    std::vector<FeatureRecord> items;

    std::vector<SpectrumFeature> features() const;  // labels included
};

// Single-record IQ file ("WIQR"): version, sample rate, length, label, meta,
// interleaved f32 I/Q, crc32.
void save_record(const IqRecord& rec, const std::string& path);
IqRecord load_record(const std::string& path);

// Multi-record container ("WDS1"): count + concatenated WIQR blobs.
std::vector<IqRecord> load_records(const std::string& path);

// Feature cache ("WFT1"): count, dim, per record (label, snr, values), crc32.
void save_features(const FeatureSet& fs, const std::string& path);
FeatureSet load_features(const std::string& path);

// Generates the manifest's corpus deterministically, writing into out_dir:
// manifest.json, records.bin, features.bin, sample.iq. Returns the features.
// out_dir == "" skips all file output.
FeatureSet build_dataset(const DatasetManifest& manifest, const std::string& out_dir);

// Synthesizes record `index` of `cls` under the manifest (pre-impairment
// parameter draws + impairment draws are both derived from manifest.seed).
IqRecord make_record(const DatasetManifest& manifest, WaveformClass cls, size_t index);

}  // namespace wosr
