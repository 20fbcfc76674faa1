#pragma once

// Vibration channel model for a thin beam: frequency response of the
// piezo/beam pair, distance attenuation per mounting condition, additive noise
// and low-frequency harmonic distortion.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "vdn/waveform.hpp"

namespace vdn {

enum class BoundaryCondition { Supported, ClampedAtEnds, ConstrainedThroughout };

std::string_view to_string(BoundaryCondition bc) noexcept;
// Accepts "supported", "clamped", "clamped-at-ends", "constrained",
// "constrained-throughout" (case-sensitive).
std::optional<BoundaryCondition> parse_boundary(std::string_view text) noexcept;

struct GainLobe {
  double center_hz;
  double width_hz;  // Gaussian sigma
  double level;

  bool operator==(const GainLobe&) const = default;
};

struct SpatialCalibration {
  double attenuation_per_mm;
  // Standing-wave wavelength at ChannelCalibration::standing_wave_ref_hz;
  // 0 disables the standing-wave factor (pure exponential decay).
  double wavelength_mm_at_ref;

  bool operator==(const SpatialCalibration&) const = default;
};

// Fitted constants of the channel model. Shipped alongside the code as
// config/calibration_v1.json; the values below must match that file.
struct ChannelCalibration {
  int version = 1;
  double gain_scale = 0.4;
  std::array<GainLobe, 3> lobes{{{1750.0, 180.0, 1.0}, {3000.0, 300.0, 0.9}, {4500.0, 300.0, 1.0}}};
  double floor_level = 0.35;
  double floor_decay_hz = 6000.0;
  double plateau_level = 0.5;
  double plateau_edge_hz = 60.0;
  double highpass_corner_hz = 1650.0;
  double highpass_order = 24.0;
  double harmonic_cutoff_hz = 1750.0;
  double standing_wave_ref_hz = 3000.0;
  SpatialCalibration supported{0.0012, 240.0};
  SpatialCalibration clamped{0.0016, 200.0};
  SpatialCalibration constrained{0.02, 0.0};

  const SpatialCalibration& spatial(BoundaryCondition bc) const noexcept;

  bool operator==(const ChannelCalibration&) const = default;
};

inline constexpr double kDefaultNoiseRms = 0.05;

struct MediumSpec {
  double length_mm = 620.0;
  double width_mm = 50.0;
  double thickness_mm = 1.0;
  BoundaryCondition boundary = BoundaryCondition::Supported;
  double noise_rms = kDefaultNoiseRms;
  double harmonic_leak = 0.6;
  double resonance_low_hz = 4100.0;
  double resonance_high_hz = 5100.0;
  ChannelCalibration calibration{};

  // Throws ContractViolation when an invariant does not hold.
  void validate() const;
};

struct TapPoint {
  double position_mm = 0.0;
};

// Frequency response of the driver/beam/sensor chain. Total function:
// gain_profile(0) == 0 and the result is finite for every f >= 0.
double gain_profile(double f_hz, const MediumSpec& medium);

// Relative amplitude at distance d_mm from the source, normalised to 1 at the
// source. Throws ContractViolation when d_mm is outside [0, length_mm].
double spatial_profile(double d_mm, double f_hz, const MediumSpec& medium);

// gain_profile * spatial_profile.
double channel_response(double d_mm, double f_hz, const MediumSpec& medium);

// Sends wave from src to dst: harmonic leak, per-frequency shaping, then
// seeded Gaussian noise of RMS medium.noise_rms. Pure in (wave, medium, src,
// dst, seed); output keeps the input rate and length.
Waveform propagate(const Waveform& wave, const MediumSpec& medium, TapPoint src, TapPoint dst,
                   std::uint64_t seed);

// Zero-mean Gaussian noise, identical to what propagate adds for a silent input.
Waveform channel_noise(std::size_t length, double sample_rate_hz, double noise_rms,
                       std::uint64_t seed);

// SplitMix64 step; used to derive independent RNG streams from a base seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept;

}  // namespace vdn
