#pragma once

#include <cstddef>
#include <vector>

namespace vdn {

// Uniformly sampled real signal; amplitudes are dimensionless with nominal
// full scale +-1.0.
struct Waveform {
  double sample_rate_hz = 0.0;
  std::vector<double> samples;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  double duration_s() const noexcept {
    return sample_rate_hz > 0.0 ? static_cast<double>(samples.size()) / sample_rate_hz : 0.0;
  }
};

// Root-mean-square of the samples; 0 for an empty waveform.
double rms(const Waveform& wave) noexcept;

}  // namespace vdn
