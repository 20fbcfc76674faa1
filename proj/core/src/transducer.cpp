#include "vdn/transducer.hpp"

#include <algorithm>
#include <cmath>

#include "vdn/error.hpp"

namespace vdn {

void ToneSpec::validate() const {
  if (!(frequency_hz > 0.0)) throw ContractViolation("tone: frequency must be positive");
  if (!(duration_ms > 0.0)) throw ContractViolation("tone: duration must be positive");
  if (!(amplitude > 0.0 && amplitude <= 1.0)) throw ContractViolation("tone: amplitude must lie in (0, 1]");
  if (!(phase_cycles >= 0.0 && phase_cycles < 1.0)) throw ContractViolation("tone: phase must lie in [0, 1)");
}

double AdcSpec::step() const noexcept { return 2.0 * full_scale / std::ldexp(1.0, bits); }

void AdcSpec::validate() const {
  if (!(sample_rate_hz > 0.0)) throw ContractViolation("adc: sample rate must be positive");
  if (bits < 1 || bits > 30) throw ContractViolation("adc: bits must lie in [1, 30]");
  if (!(full_scale > 0.0)) throw ContractViolation("adc: full scale must be positive");
}

Waveform synthesize(const ToneSpec& tone, double sample_rate_hz) {
  tone.validate();
  if (!(sample_rate_hz > 0.0)) throw ContractViolation("synthesize: sample rate must be positive");

  const auto n = static_cast<std::size_t>(std::llround(tone.duration_ms / 1000.0 * sample_rate_hz));
  Waveform out{sample_rate_hz, std::vector<double>(n)};
  for (std::size_t m = 0; m < n; ++m) {
    // f*m is exact for the integer-valued frequencies used in practice, so
    // crossings land exactly on 0.25 / 0.75 instead of jittering around them.
    double phase = std::fmod(tone.frequency_hz * static_cast<double>(m) / sample_rate_hz, 1.0);
    phase += tone.phase_cycles;
    if (phase >= 1.0) phase -= 1.0;
    out.samples[m] = (phase < 0.25 || phase >= 0.75) ? tone.amplitude : -tone.amplitude;
  }
  return out;
}

Waveform sample(const Waveform& wave, const AdcSpec& adc) {
  adc.validate();
  if (wave.empty() || !(wave.sample_rate_hz > 0.0))
    throw ContractViolation("sample: waveform must be non-empty with a positive rate");

  const double ratio = wave.sample_rate_hz / adc.sample_rate_hz;
  const auto out_len = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(static_cast<double>(wave.size()) / ratio)));
  const double step = adc.step();
  const double max_level = std::ldexp(1.0, adc.bits - 1);

  Waveform out{adc.sample_rate_hz, std::vector<double>(out_len)};
  for (std::size_t j = 0; j < out_len; ++j) {
    auto src = static_cast<std::size_t>(std::llround(static_cast<double>(j) * ratio));
    src = std::min(src, wave.size() - 1);
    const double clipped = std::clamp(wave.samples[src], -adc.full_scale, adc.full_scale);
    const double level = std::clamp(std::nearbyint(clipped / step), -max_level, max_level);
    out.samples[j] = level * step;
  }
  return out;
}

}  // namespace vdn
