#pragma once

// Tone modem: maps symbols onto a discrete frequency alphabet inside the
// usable band and recovers them with FFT peak detection.

#include <compare>
#include <cstddef>
#include <variant>

#include "vdn/medium.hpp"
#include "vdn/transducer.hpp"
#include "vdn/waveform.hpp"

namespace vdn {

inline constexpr std::size_t kDefaultWindowLen = 1024;
inline constexpr double kDefaultSymbolMs = 50.0;
inline constexpr double kUsableBandLowHz = 1750.0;
inline constexpr double kUsableBandHighHz = 5000.0;

// 6x the mean noise-floor bin magnitude for kDefaultNoiseRms over one
// default window (Rayleigh mean of a normalised bin is sigma*sqrt(pi/N)).
double default_detection_threshold() noexcept;

struct Alphabet {
  double base_hz = 2000.0;
  double spacing_hz = 250.0;
  int size = 13;

  double frequency(int index) const;
  bool contains(int index) const noexcept { return index >= 0 && index < size; }
  void validate() const;
};

struct Symbol {
  int index = 0;
  auto operator<=>(const Symbol&) const = default;
};

struct DetectorConfig {
  std::size_t window_len = kDefaultWindowLen;
  double threshold = default_detection_threshold();
};

struct DetectionResult {
  double frequency_hz = 0.0;
  double magnitude = 0.0;
  bool valid = false;
};

struct NoSignal {
  bool operator==(const NoSignal&) const = default;
};
struct UnknownFrequency {
  double frequency_hz = 0.0;
  bool operator==(const UnknownFrequency&) const = default;
};

using ReceiveResult = std::variant<Symbol, NoSignal, UnknownFrequency>;
using RelayResult = std::variant<ToneSpec, NoSignal>;

ToneSpec vibration_send(Symbol symbol, const Alphabet& alphabet,
                        double duration_ms = kDefaultSymbolMs);

// Strongest non-DC bin over the first window_len samples, rectangular window.
// Magnitude is the amplitude estimate of a sinusoid at that bin.
DetectionResult fft_peak(const Waveform& wave, std::size_t window_len = kDefaultWindowLen,
                         double threshold = default_detection_threshold());

// Amplitude of the component at exactly f_hz (single-bin DFT over the
// whole waveform).
double tone_magnitude(const Waveform& wave, double f_hz);

ReceiveResult vibration_receive(const Waveform& wave, const Alphabet& alphabet,
                                const DetectorConfig& detector = {});

double percent_error(double sent_hz, double detected_hz);

// Decode-and-forward: regenerates a full-amplitude tone at the exact alphabet
// frequency with the received waveform's duration. An off-alphabet peak
// cannot be regenerated and is reported as NoSignal.
RelayResult relay_hop(const Waveform& wave, const Alphabet& alphabet,
                      const DetectorConfig& detector = {});

}  // namespace vdn
