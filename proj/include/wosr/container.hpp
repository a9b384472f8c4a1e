#pragma once

#include "wosr/osr.hpp"

namespace wosr {

// Model-file failures (bad magic/version/checksum/shape) map to their own
// CLI exit code, so they get a distinct exception type.
struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Versioned binary container: magic "WOSR", version 1, a JSON header
// describing layers/detectors and a tensor directory, f32 little-endian
// tensor payload, trailing crc32 of everything before it.
// The detector block is optional (a classifier-only model after `train`).
void save_models(const std::string& path, const OsrModel& model, bool with_detectors);
OsrModel load_models(const std::string& path);

// True when the container at `path` holds fitted detectors.
bool container_has_detectors(const std::string& path);

// Human-readable summary of the container header (for `inspect`).
std::string describe_container(const std::string& path);

}  // namespace wosr
