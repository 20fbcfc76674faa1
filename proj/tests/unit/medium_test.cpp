#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "vdn/error.hpp"
#include "vdn/fft.hpp"
#include "vdn/harness.hpp"
#include "vdn/medium.hpp"
#include "vdn/modem.hpp"

using namespace vdn;

namespace {

Waveform sine(double f, std::size_t n, double rate, double amp = 1.0) {
  Waveform w{rate, std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) w.samples[i] = amp * std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i) / rate);
  return w;
}

MediumSpec quiet(BoundaryCondition bc = BoundaryCondition::Supported) {
  MediumSpec m;
  m.boundary = bc;
  m.noise_rms = 0.0;
  return m;
}

}  // namespace

TEST(Medium, BoundaryNamesRoundTrip) {
  for (auto bc : {BoundaryCondition::Supported, BoundaryCondition::ClampedAtEnds,
                  BoundaryCondition::ConstrainedThroughout}) {
    EXPECT_EQ(parse_boundary(to_string(bc)), bc);
  }
  EXPECT_EQ(parse_boundary("clamped-at-ends"), BoundaryCondition::ClampedAtEnds);
  EXPECT_EQ(parse_boundary("constrained-throughout"), BoundaryCondition::ConstrainedThroughout);
  EXPECT_FALSE(parse_boundary("Supported"));
}

TEST(Medium, GainProfileIsTotal) {
  const MediumSpec m;
  EXPECT_EQ(gain_profile(0.0, m), 0.0);
  EXPECT_EQ(gain_profile(-5.0, m), 0.0);
  for (double f = 1.0; f <= 40000.0; f += 37.0) {
    const double g = gain_profile(f, m);
    EXPECT_TRUE(std::isfinite(g));
    EXPECT_GE(g, 0.0);
  }
}

TEST(Medium, GainFavoursTheUsableBand) {
  const MediumSpec m;
  const double in_band = gain_profile(3000.0, m);
  EXPECT_GT(in_band, 10.0 * gain_profile(1000.0, m));
  EXPECT_GT(gain_profile(4500.0, m), gain_profile(300.0, m));
}

TEST(Medium, SpatialProfileIsNormalisedAndBounded) {
  for (auto bc : {BoundaryCondition::Supported, BoundaryCondition::ClampedAtEnds,
                  BoundaryCondition::ConstrainedThroughout}) {
    const MediumSpec m = quiet(bc);
    EXPECT_DOUBLE_EQ(spatial_profile(0.0, 3000.0, m), 1.0);
    for (double d = 0.0; d <= m.length_mm; d += 5.0) {
      const double s = spatial_profile(d, 3000.0, m);
      EXPECT_GT(s, 0.0);
      EXPECT_LE(s, 1.0);
    }
    EXPECT_THROW(spatial_profile(-1.0, 3000.0, m), ContractViolation);
    EXPECT_THROW(spatial_profile(m.length_mm + 1.0, 3000.0, m), ContractViolation);
  }
}

TEST(Medium, ConstrainedDecaysMonotonically) {
  const MediumSpec m = quiet(BoundaryCondition::ConstrainedThroughout);
  for (double f : {1750.0, 3000.0, 5000.0}) {
    double prev = spatial_profile(0.0, f, m);
    for (double d = 1.0; d <= m.length_mm; d += 1.0) {
      const double s = spatial_profile(d, f, m);
      EXPECT_LE(s, prev);
      prev = s;
    }
  }
}

TEST(Medium, SupportedHasStandingWaveDips) {
  const MediumSpec m = quiet();
  int maxima = 0;
  for (double d = 60.0; d < 540.0; d += 10.0) {
    const double s = spatial_profile(d, 3000.0, m);
    if (s > spatial_profile(d - 10.0, 3000.0, m) && s > spatial_profile(d + 10.0, 3000.0, m)) ++maxima;
  }
  EXPECT_GE(maxima, 1);
}

TEST(Medium, ValidateRejectsBadSpecs) {
  MediumSpec m;
  m.noise_rms = -0.1;
  EXPECT_THROW(m.validate(), ContractViolation);
  m = MediumSpec{};
  m.harmonic_leak = 1.5;
  EXPECT_THROW(m.validate(), ContractViolation);
  m = MediumSpec{};
  m.length_mm = 0.0;
  EXPECT_THROW(m.validate(), ContractViolation);
  EXPECT_NO_THROW(MediumSpec{}.validate());
}

TEST(Propagate, ScalesABinAlignedSineByTheChannelResponse) {
  // 4096 samples at 40 kHz: 9.765625 Hz bins, so 3007.8125 Hz is bin 308.
  const double f = 308 * 40000.0 / 4096.0;
  const MediumSpec m = quiet();
  const Waveform in = sine(f, 4096, 40000.0, 0.5);
  const Waveform out = propagate(in, m, TapPoint{0.0}, TapPoint{400.0}, 1);
  ASSERT_EQ(out.size(), in.size());
  EXPECT_EQ(out.sample_rate_hz, in.sample_rate_hz);
  EXPECT_NEAR(tone_magnitude(out, f), 0.5 * channel_response(400.0, f, m), 1e-9);
}

TEST(Propagate, DistanceIsSymmetric) {
  const MediumSpec m = quiet();
  const Waveform in = sine(2500.0, 2000, 40000.0);
  const Waveform a = propagate(in, m, TapPoint{100.0}, TapPoint{400.0}, 3);
  const Waveform b = propagate(in, m, TapPoint{400.0}, TapPoint{100.0}, 3);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.samples[i], b.samples[i], 1e-12);
}

TEST(Propagate, IsPureInItsSeed) {
  const MediumSpec m;
  const Waveform in = sine(2500.0, 2048, 40000.0);
  const Waveform a = propagate(in, m, TapPoint{0.0}, TapPoint{550.0}, 42);
  const Waveform b = propagate(in, m, TapPoint{0.0}, TapPoint{550.0}, 42);
  const Waveform c = propagate(in, m, TapPoint{0.0}, TapPoint{550.0}, 43);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_NE(a.samples, c.samples);
}

TEST(Propagate, SilenceYieldsNoiseOfTheRequestedRms) {
  MediumSpec m;
  m.noise_rms = 0.05;
  const Waveform silent{40000.0, std::vector<double>(40000, 0.0)};
  const Waveform out = propagate(silent, m, TapPoint{0.0}, TapPoint{300.0}, 9);
  EXPECT_NEAR(rms(out), 0.05, 0.05 * 0.03);
  double mean = 0.0;
  for (double s : out.samples) mean += s;
  EXPECT_NEAR(mean / static_cast<double>(out.size()), 0.0, 0.002);
  EXPECT_EQ(out.samples, channel_noise(40000, 40000.0, 0.05, 9).samples);
}

TEST(Propagate, LowToneLeaksIntoItsSecondHarmonic) {
  MediumSpec m = quiet();
  const double f = 82 * 40000.0 / 4096.0;  // ~800 Hz, bin aligned
  const Waveform in = sine(f, 4096, 40000.0);
  const Waveform leaky = propagate(in, m, TapPoint{0.0}, TapPoint{50.0}, 0);
  m.harmonic_leak = 0.0;
  const Waveform clean = propagate(in, m, TapPoint{0.0}, TapPoint{50.0}, 0);
  EXPECT_NEAR(tone_magnitude(clean, 2 * f), 0.0, 1e-9);
  EXPECT_NEAR(tone_magnitude(leaky, 2 * f), std::sqrt(0.6) * channel_response(50.0, 2 * f, m), 1e-9);
  EXPECT_NEAR(tone_magnitude(leaky, f), std::sqrt(0.4) * channel_response(50.0, f, m), 1e-9);
}

TEST(Propagate, InBandToneIsNotDistorted) {
  MediumSpec m = quiet();
  const double f = 180 * 40000.0 / 4096.0;  // ~1758 Hz
  const Waveform in = sine(f, 4096, 40000.0);
  const Waveform out = propagate(in, m, TapPoint{0.0}, TapPoint{50.0}, 0);
  EXPECT_NEAR(tone_magnitude(out, 2 * f), 0.0, 1e-9);
}

TEST(Propagate, RejectsTapsOffTheBeam) {
  const Waveform in = sine(2500.0, 64, 40000.0);
  EXPECT_THROW(propagate(in, MediumSpec{}, TapPoint{0.0}, TapPoint{700.0}, 0), ContractViolation);
  EXPECT_THROW(propagate(Waveform{40000.0, {}}, MediumSpec{}, TapPoint{0.0}, TapPoint{1.0}, 0), ContractViolation);
}

TEST(Medium, MixSeedSpreadsNeighbouringSeeds) {
  EXPECT_NE(mix_seed(1, 0), mix_seed(1, 1));
  EXPECT_NE(mix_seed(1, 0), mix_seed(2, 0));
  EXPECT_EQ(mix_seed(5, 7), mix_seed(5, 7));
}

TEST(Calibration, ShippedFileMatchesCompiledDefaults) {
  const ChannelCalibration file = harness::load_calibration(VDN_CONFIG_DIR "/calibration_v1.json");
  EXPECT_EQ(file, ChannelCalibration{});
}

TEST(Calibration, JsonRoundTrip) {
  ChannelCalibration cal;
  cal.gain_scale = 0.37;
  cal.supported.attenuation_per_mm = 0.002;
  EXPECT_EQ(harness::parse_calibration(harness::calibration_to_json(cal)), cal);
  EXPECT_THROW(harness::parse_calibration("{\"version\":1}"), ConfigError);
  EXPECT_THROW(harness::parse_calibration("not json"), ConfigError);
}
