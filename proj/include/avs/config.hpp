// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include "avs/experiment.hpp"

namespace avs {

inline constexpr int kConfigSchemaVersion = 1;

struct RunConfig {
  ExperimentParams experiment;
  SweepAxes sweep;
  /// Variant label used by `enhance`.
  std::string variant = "proposed";
  std::filesystem::path output_dir = "out";
};

/// Parses a JSON document. Missing keys keep their defaults; unknown keys, a
/// wrong schema_version or invalid values throw InvalidInput.
RunConfig parse_config(std::string_view json_text);

/// Throws IoError when the file cannot be read.
RunConfig load_config(const std::filesystem::path& path);

/// Full JSON document with every key spelled out.
std::string dump_config(const RunConfig& config);

}  // namespace avs
