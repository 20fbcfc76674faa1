#include "vdn/modem.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <span>
#include <vector>

#include "vdn/error.hpp"
#include "vdn/fft.hpp"

namespace vdn {

double default_detection_threshold() noexcept {
  return 6.0 * kDefaultNoiseRms *
         std::sqrt(std::numbers::pi / static_cast<double>(kDefaultWindowLen));
}

double Alphabet::frequency(int index) const {
  if (!contains(index)) throw ContractViolation("alphabet: symbol index out of range");
  return base_hz + spacing_hz * static_cast<double>(index);
}

void Alphabet::validate() const {
  if (size < 1) throw ContractViolation("alphabet: size must be positive");
  if (!(base_hz >= kUsableBandLowHz)) throw ContractViolation("alphabet: base below the usable band");
  if (!(base_hz + spacing_hz * (size - 1) <= kUsableBandHighHz))
    throw ContractViolation("alphabet: top symbol above the usable band");
  const double bin_hz = kDefaultAdcRateHz / static_cast<double>(kDefaultWindowLen);
  if (!(spacing_hz >= 2.0 * bin_hz))
    throw ContractViolation("alphabet: spacing below two analysis bins");
}

ToneSpec vibration_send(Symbol symbol, const Alphabet& alphabet, double duration_ms) {
  if (!(duration_ms > 0.0)) throw ContractViolation("vibration_send: duration must be positive");
  return ToneSpec{alphabet.frequency(symbol.index), duration_ms, 1.0, 0.0};
}

namespace {

// Peak over bins 1..N/2 of a power-of-two window holding `used` real samples
// (the rest zero padding). Magnitudes are normalised by `used`.
DetectionResult analyze(std::span<const double> window, std::size_t used, double rate_hz,
                        double threshold) {
  const std::vector<dsp::Complex> spectrum = dsp::real_dft(window);
  const std::size_t n = window.size();
  const std::size_t half = n / 2;
  const double norm = 1.0 / static_cast<double>(used);

  DetectionResult best;
  std::size_t best_bin = 0;
  for (std::size_t k = 1; k <= half; ++k) {
    const double scale = (k == half && n % 2 == 0) ? norm : 2.0 * norm;
    const double mag = std::abs(spectrum[k]) * scale;
    if (mag > best.magnitude) {
      best.magnitude = mag;
      best_bin = k;
    }
  }
  best.frequency_hz = static_cast<double>(best_bin) * rate_hz / static_cast<double>(n);
  best.valid = best.magnitude > 0.0 && best.magnitude >= threshold;
  return best;
}

void check_window(std::size_t window_len) {
  if (window_len < 2 || !dsp::is_power_of_two(window_len))
    throw ContractViolation("window length must be a power of two >= 2");
}

ReceiveResult classify(const DetectionResult& peak, const Alphabet& alphabet) {
  if (!peak.valid) return NoSignal{};
  const long nearest = std::lround((peak.frequency_hz - alphabet.base_hz) / alphabet.spacing_hz);
  if (nearest < 0 || nearest >= alphabet.size) return UnknownFrequency{peak.frequency_hz};
  const int index = static_cast<int>(nearest);
  if (std::abs(peak.frequency_hz - alphabet.frequency(index)) > alphabet.spacing_hz / 2.0)
    return UnknownFrequency{peak.frequency_hz};
  return Symbol{index};
}

}  // namespace

DetectionResult fft_peak(const Waveform& wave, std::size_t window_len, double threshold) {
  check_window(window_len);
  if (wave.size() < window_len) throw ContractViolation("fft_peak: waveform shorter than the window");
  return analyze(std::span<const double>(wave.samples).first(window_len), window_len,
                 wave.sample_rate_hz, threshold);
}

double tone_magnitude(const Waveform& wave, double f_hz) {
  if (wave.empty()) return 0.0;
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < wave.size(); ++i) {
    const double cycles = std::fmod(f_hz * static_cast<double>(i) / wave.sample_rate_hz, 1.0);
    const double angle = 2.0 * std::numbers::pi * cycles;
    re += wave.samples[i] * std::cos(angle);
    im -= wave.samples[i] * std::sin(angle);
  }
  return 2.0 * std::hypot(re, im) / static_cast<double>(wave.size());
}

ReceiveResult vibration_receive(const Waveform& wave, const Alphabet& alphabet,
                                const DetectorConfig& detector) {
  check_window(detector.window_len);
  if (wave.empty()) return NoSignal{};
  const std::size_t window = detector.window_len;

  if (wave.size() < window) {
    // Short capture: zero-pad to one window. Noise bins of an L-sample
    // capture are sqrt(N/L) larger once renormalised, so the threshold
    // scales with them to hold the false-alarm rate.
    std::vector<double> padded(window, 0.0);
    std::copy(wave.samples.begin(), wave.samples.end(), padded.begin());
    const double threshold =
        detector.threshold * std::sqrt(static_cast<double>(window) / static_cast<double>(wave.size()));
    return classify(analyze(padded, wave.size(), wave.sample_rate_hz, threshold), alphabet);
  }

  // Majority vote across whole windows; ties go to the larger summed magnitude.
  struct Tally {
    int votes = 0;
    double magnitude = 0.0;
    double strongest = 0.0;
    double frequency_hz = 0.0;
  };
  std::map<int, Tally> tallies;  // key -1: off-alphabet
  const std::size_t windows = wave.size() / window;
  const std::span<const double> samples(wave.samples);
  for (std::size_t w = 0; w < windows; ++w) {
    const DetectionResult peak =
        analyze(samples.subspan(w * window, window), window, wave.sample_rate_hz, detector.threshold);
    const ReceiveResult outcome = classify(peak, alphabet);
    if (std::holds_alternative<NoSignal>(outcome)) continue;
    const int key = std::holds_alternative<Symbol>(outcome) ? std::get<Symbol>(outcome).index : -1;
    Tally& t = tallies[key];
    ++t.votes;
    t.magnitude += peak.magnitude;
    if (peak.magnitude > t.strongest) {
      t.strongest = peak.magnitude;
      t.frequency_hz = peak.frequency_hz;
    }
  }
  if (tallies.empty()) return NoSignal{};

  auto winner = tallies.begin();
  for (auto it = tallies.begin(); it != tallies.end(); ++it) {
    if (it->second.votes > winner->second.votes ||
        (it->second.votes == winner->second.votes && it->second.magnitude > winner->second.magnitude)) {
      winner = it;
    }
  }
  if (winner->first < 0) return UnknownFrequency{winner->second.frequency_hz};
  return Symbol{winner->first};
}

double percent_error(double sent_hz, double detected_hz) {
  if (!(sent_hz > 0.0)) throw ContractViolation("percent_error: sent frequency must be positive");
  return 100.0 * std::abs(detected_hz - sent_hz) / sent_hz;
}

RelayResult relay_hop(const Waveform& wave, const Alphabet& alphabet, const DetectorConfig& detector) {
  const ReceiveResult received = vibration_receive(wave, alphabet, detector);
  if (const auto* symbol = std::get_if<Symbol>(&received)) {
    return vibration_send(*symbol, alphabet, wave.duration_s() * 1000.0);
  }
  return NoSignal{};
}

}  // namespace vdn
