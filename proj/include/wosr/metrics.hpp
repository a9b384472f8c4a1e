#pragma once

#include "wosr/iq_record.hpp"

namespace wosr {

// One exported measurement. `snr` is a formatted dB value or "all";
// `cls` is a class name or a pool ("overall", "known", "unknown").
struct MetricRow {
    std::string cls;
    std::string snr;
    std::string metric;
    double value = 0.0;

    bool operator==(const MetricRow&) const = default;
};

struct MetricsReport {
    std::string phase;
    std::vector<std::string> labels;               // confusion axes (may be empty)
    std::vector<std::vector<uint64_t>> confusion;  // row = truth, col = prediction
    std::vector<MetricRow> rows;
    std::string config_hash;
    uint64_t dataset_seed = 0;
    double duration_s = 0.0;  // in-memory only; never exported or compared

    // Stable schema: class,snr_db,metric,value. Confusion cells become
    // metric "confusion:<predicted label>" rows.
    std::string to_csv() const;
    std::string to_json() const;
    static MetricsReport from_json(const std::string& text);

    // OUT.csv and OUT.json for a bare base path; honors a .csv/.json suffix.
    void save(const std::string& path) const;

    double row_value(const std::string& cls, const std::string& snr,
                     const std::string& metric) const;  // throws if absent

    bool operator==(const MetricsReport& o) const;  // ignores duration_s
};

std::string format_snr(float snr_db);  // "none" for NaN, trimmed "%g" otherwise

}  // namespace wosr
