#include "vdn/medium.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "vdn/error.hpp"
#include "vdn/fft.hpp"

namespace vdn {

std::string_view to_string(BoundaryCondition bc) noexcept {
  switch (bc) {
    case BoundaryCondition::Supported: return "supported";
    case BoundaryCondition::ClampedAtEnds: return "clamped";
    case BoundaryCondition::ConstrainedThroughout: return "constrained";
  }
  return "supported";
}

std::optional<BoundaryCondition> parse_boundary(std::string_view text) noexcept {
  if (text == "supported") return BoundaryCondition::Supported;
  if (text == "clamped" || text == "clamped-at-ends") return BoundaryCondition::ClampedAtEnds;
  if (text == "constrained" || text == "constrained-throughout")
    return BoundaryCondition::ConstrainedThroughout;
  return std::nullopt;
}

const SpatialCalibration& ChannelCalibration::spatial(BoundaryCondition bc) const noexcept {
  switch (bc) {
    case BoundaryCondition::Supported: return supported;
    case BoundaryCondition::ClampedAtEnds: return clamped;
    case BoundaryCondition::ConstrainedThroughout: return constrained;
  }
  return supported;
}

void MediumSpec::validate() const {
  if (!(length_mm > 0.0) || !(width_mm > 0.0) || !(thickness_mm > 0.0))
    throw ContractViolation("medium: dimensions must be positive");
  if (!(noise_rms >= 0.0) || !std::isfinite(noise_rms))
    throw ContractViolation("medium: noise_rms must be finite and >= 0");
  if (!(harmonic_leak >= 0.0 && harmonic_leak <= 1.0))
    throw ContractViolation("medium: harmonic_leak must lie in [0, 1]");
  if (!(resonance_low_hz > 0.0) || !(resonance_low_hz < resonance_high_hz))
    throw ContractViolation("medium: need 0 < resonance_low_hz < resonance_high_hz");
}

namespace {

double logistic(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

double gain_profile(double f_hz, const MediumSpec& medium) {
  if (!(f_hz > 0.0)) return 0.0;
  const ChannelCalibration& cal = medium.calibration;

  const double highpass = 1.0 / (1.0 + std::pow(cal.highpass_corner_hz / f_hz, cal.highpass_order));

  double floor = cal.floor_level;
  if (f_hz > medium.resonance_high_hz)
    floor *= std::exp(-(f_hz - medium.resonance_high_hz) / cal.floor_decay_hz);

  const double plateau = cal.plateau_level *
                         logistic((f_hz - medium.resonance_low_hz) / cal.plateau_edge_hz) *
                         logistic((medium.resonance_high_hz - f_hz) / cal.plateau_edge_hz);

  double lobes = 0.0;
  for (const GainLobe& lobe : cal.lobes) {
    const double z = (f_hz - lobe.center_hz) / lobe.width_hz;
    lobes += lobe.level * std::exp(-0.5 * z * z);
  }

  return cal.gain_scale * highpass * (floor + plateau + lobes);
}

double spatial_profile(double d_mm, double f_hz, const MediumSpec& medium) {
  if (!(d_mm >= 0.0 && d_mm <= medium.length_mm))
    throw ContractViolation("spatial_profile: distance outside the beam");
  const SpatialCalibration& cal = medium.calibration.spatial(medium.boundary);
  const double envelope = std::exp(-cal.attenuation_per_mm * d_mm);
  if (!(cal.wavelength_mm_at_ref > 0.0)) return envelope;

  // Bending waves are dispersive: wavelength shrinks as 1/sqrt(f).
  const double f = std::max(f_hz, 1.0);
  const double wavelength =
      cal.wavelength_mm_at_ref * std::sqrt(medium.calibration.standing_wave_ref_hz / f);
  const double standing = 0.5 + 0.5 * std::abs(std::cos(2.0 * std::numbers::pi * d_mm / wavelength));
  return envelope * standing;
}

double channel_response(double d_mm, double f_hz, const MediumSpec& medium) {
  return gain_profile(f_hz, medium) * spatial_profile(d_mm, f_hz, medium);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Waveform channel_noise(std::size_t length, double sample_rate_hz, double noise_rms,
                       std::uint64_t seed) {
  Waveform out{sample_rate_hz, std::vector<double>(length, 0.0)};
  if (noise_rms > 0.0) {
    std::mt19937_64 rng(mix_seed(seed, 0x6e6f697365ULL));
    std::normal_distribution<double> normal(0.0, noise_rms);
    for (double& s : out.samples) s = normal(rng);
  }
  return out;
}

namespace {

// Moves harmonic_leak of the energy around the dominant bin to twice its
// frequency when that bin lies wholly below the cutoff. Operates on the
// non-negative half of the spectrum.
void apply_harmonic_leak(std::vector<dsp::Complex>& spectrum, double bin_hz, const MediumSpec& medium) {
  const std::size_t n = spectrum.size();
  const std::size_t half = n / 2;
  std::size_t peak = 0;
  double peak_mag = 0.0;
  for (std::size_t k = 1; k <= half; ++k) {
    const double mag = std::abs(spectrum[k]);
    if (mag > peak_mag) {
      peak_mag = mag;
      peak = k;
    }
  }
  if (peak == 0) return;
  const double upper_edge = (static_cast<double>(peak) + 0.5) * bin_hz;
  if (!(upper_edge < medium.calibration.harmonic_cutoff_hz)) return;

  const double keep = std::sqrt(1.0 - medium.harmonic_leak);
  const double moved = std::sqrt(medium.harmonic_leak);
  const std::size_t first = peak > 2 ? peak - 2 : 1;
  const std::size_t last = peak + 2;
  const std::vector<dsp::Complex> original = spectrum;
  for (std::size_t k = first; k <= last && 2 * k < half; ++k) spectrum[k] = original[k] * keep;
  for (std::size_t k = first; k <= last && 2 * k < half; ++k) spectrum[2 * k] += original[k] * moved;
}

}  // namespace

Waveform propagate(const Waveform& wave, const MediumSpec& medium, TapPoint src, TapPoint dst,
                   std::uint64_t seed) {
  medium.validate();
  if (wave.empty() || !(wave.sample_rate_hz > 0.0))
    throw ContractViolation("propagate: waveform must be non-empty with a positive rate");
  for (const TapPoint tap : {src, dst}) {
    if (!(tap.position_mm >= 0.0 && tap.position_mm <= medium.length_mm))
      throw ContractViolation("propagate: tap point outside the beam");
  }
  const double distance = std::abs(dst.position_mm - src.position_mm);
  const std::size_t n = wave.size();

  Waveform out = channel_noise(n, wave.sample_rate_hz, medium.noise_rms, seed);
  const bool silent = std::all_of(wave.samples.begin(), wave.samples.end(),
                                  [](double s) { return s == 0.0; });
  if (silent) return out;

  std::vector<dsp::Complex> spectrum = dsp::real_dft(wave.samples);
  const double bin_hz = wave.sample_rate_hz / static_cast<double>(n);
  if (medium.harmonic_leak > 0.0) apply_harmonic_leak(spectrum, bin_hz, medium);

  // Shape the non-negative half, then mirror to keep the spectrum Hermitian.
  const std::size_t half = n / 2;
  for (std::size_t k = 0; k <= half; ++k) {
    spectrum[k] *= channel_response(distance, static_cast<double>(k) * bin_hz, medium);
  }
  for (std::size_t k = 1; k < n - half; ++k) spectrum[n - k] = std::conj(spectrum[k]);
  if (n % 2 == 0) spectrum[half] = dsp::Complex(spectrum[half].real(), 0.0);

  const std::vector<dsp::Complex> shaped = dsp::dft(spectrum, true);
  for (std::size_t i = 0; i < n; ++i) out.samples[i] += shaped[i].real();
  return out;
}

}  // namespace vdn
