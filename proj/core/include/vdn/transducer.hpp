#pragma once

#include "vdn/waveform.hpp"

namespace vdn {

// A drive tone as produced by a microcontroller tone() call.
struct ToneSpec {
  double frequency_hz = 0.0;
  double duration_ms = 0.0;
  double amplitude = 1.0;
  // Start phase in cycles, [0, 1). 0 starts on a positive crest.
  double phase_cycles = 0.0;

  void validate() const;
  bool operator==(const ToneSpec&) const = default;
};

inline constexpr double kDefaultAdcRateHz = 10000.0;

struct AdcSpec {
  double sample_rate_hz = kDefaultAdcRateHz;
  int bits = 10;
  double full_scale = 1.0;

  double nyquist_hz() const noexcept { return sample_rate_hz / 2.0; }
  // Quantisation step: 2 * full_scale / 2^bits.
  double step() const noexcept;
  void validate() const;
};

// Square wave of the tone's frequency and amplitude;
// length = round(duration_ms / 1000 * sample_rate_hz).
Waveform synthesize(const ToneSpec& tone, double sample_rate_hz);

// Nearest-sample resampling to the ADC rate (no anti-alias filter), clipping
// to +-full_scale and rounding to the quantisation grid.
Waveform sample(const Waveform& wave, const AdcSpec& adc);

}  // namespace vdn
