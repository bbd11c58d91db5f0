// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "avs/common.hpp"

namespace avs {

struct WavData {
  double sample_rate = 16000.0;
  MultiSignal channels;
};

/// 32-bit IEEE float RIFF/WAVE. More than two channels use the extensible
/// header. Throws IoError when the file cannot be written.
void write_wav(const std::filesystem::path& path, const MultiSignal& channels, double sample_rate);

/// Reads 16/24/32-bit integer PCM or 32/64-bit float WAV files, plain or
/// extensible. Throws IoError on unreadable or malformed files.
WavData read_wav(const std::filesystem::path& path);

}  // namespace avs
