// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "avs/common.hpp"

namespace avs {

/// Parameters of the synthetic talker used in place of recorded speech.
struct TalkerParams {
  double sample_rate = 16000.0;
  double duration = 10.0;      // seconds, including the silent lead-in
  double onset = 0.0;          // seconds of silence before the first syllable
  double f0 = 115.0;           // mean fundamental, Hz
  double formant_scale = 1.0;  // >1 shifts formants up (shorter vocal tract)
  double rms = 0.1;            // RMS over the active (non-silent) part
  std::uint64_t seed = 1;
};

/// Voiced syllables (glottal pulse train through time-varying formant
/// resonators) interleaved with fricatives, gaps and pauses. The spectrum
/// falls off with frequency and the signal is sparse in time-frequency, as
/// real speech is. Deterministic given the seed.
RVector synthetic_talker(const TalkerParams& params);

}  // namespace avs
