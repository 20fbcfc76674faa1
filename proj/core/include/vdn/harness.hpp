#pragma once

// Experiment harness: frequency and distance sweeps, the two-beam relay
// experiment, eavesdropper amplitude maps and end-to-end scenarios, with
// CSV output.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vdn/apps.hpp"
#include "vdn/controller.hpp"
#include "vdn/medium.hpp"
#include "vdn/modem.hpp"
#include "vdn/topology.hpp"
#include "vdn/transducer.hpp"

namespace vdn::harness {

// Sweep tone length: exactly one 1024-sample window at the 10 kHz ADC.
inline constexpr double kSweepToneMs = 102.4;
// Relay experiment tone length: two analysis windows.
inline constexpr double kMultihopToneMs = 204.8;

// 50..4450 Hz in 100 Hz steps, then 5000, 7500, 10000, 20000 Hz.
std::vector<double> reference_frequency_schedule();
// 3250..4500 Hz in 250 Hz steps.
std::vector<double> multihop_frequencies();
// 50..550 mm in 50 mm steps.
std::vector<double> distance_taps();

struct SweepConfig {
  std::vector<double> frequencies_hz = reference_frequency_schedule();
  std::vector<double> tap_positions_mm{50.0, 550.0};
  BoundaryCondition boundary = BoundaryCondition::Supported;
  int trials = 1;
  std::uint64_t seed = 1;

  MediumSpec medium{};
  AdcSpec adc{};
  DetectorConfig detector{};
  Alphabet alphabet{};
  double tone_ms = kSweepToneMs;
  double sim_rate_hz = kDefaultSimRateHz;
  double source_mm = 0.0;

  // Throws ConfigError.
  void validate() const;
};

struct FrequencyRow {
  double frequency_hz = 0.0;
  double tap_mm = 0.0;
  double detected_hz = 0.0;  // 0 when no valid peak
  double percent_error = 0.0;
  double magnitude = 0.0;
};

struct DistanceRow {
  double tap_mm = 0.0;
  BoundaryCondition boundary = BoundaryCondition::Supported;
  double magnitude = 0.0;
};

enum class Stage { Original, Hop };
std::string_view to_string(Stage stage) noexcept;

struct MultihopRow {
  double sent_hz = 0.0;
  Stage stage = Stage::Original;
  double detected_hz = 0.0;
  double magnitude = 0.0;
};

struct EavesdropRow {
  double tap_mm = 0.0;
  double magnitude = 0.0;
  bool above_threshold = false;
};

// One row per (frequency, tap, trial), in that order. Each point draws noise
// from a stream derived from (seed, point index), so rows do not depend on
// evaluation order.
std::vector<FrequencyRow> sweep_frequency(const SweepConfig& config);

// Noise-free amplitude of the tone at taps 50..550 mm for each boundary
// condition. Requires exactly one frequency.
std::vector<DistanceRow> sweep_distance(const SweepConfig& config);

// For each frequency and trial: detection at the relay on the first beam
// ("original"), then relay_hop and detection at the second beam's collector
// ("hop"). A hop that cannot be regenerated yields an invalid hop row.
std::vector<MultihopRow> multihop_experiment(const SweepConfig& config, const Topology& topology);
std::vector<MultihopRow> multihop_experiment(const SweepConfig& config);

struct EavesdropOptions {
  double amplitude = 1.0;
  double threshold = default_detection_threshold();
  double step_mm = 10.0;
  double tone_ms = kSweepToneMs;
  double sim_rate_hz = kDefaultSimRateHz;
};

// Noise-free amplitude every step_mm along the source's beam, flagged where a
// tap would see at least the detection threshold.
std::vector<EavesdropRow> eavesdrop_map(const Topology& topology, const std::string& source,
                                        double probe_hz, const EavesdropOptions& options = {});

void write_csv(std::ostream& out, const std::vector<FrequencyRow>& rows);
void write_csv(std::ostream& out, const std::vector<DistanceRow>& rows);
void write_csv(std::ostream& out, const std::vector<MultihopRow>& rows);
void write_csv(std::ostream& out, const std::vector<EavesdropRow>& rows);
void write_csv(std::ostream& out, const std::vector<EventReport>& reports);

// %.6g formatting used for every floating-point CSV field.
std::string format_number(double value);

struct ScenarioOptions {
  std::uint64_t threshold_bytes = 100000;
  std::int64_t window_ms = 1000;
  int ddos_k = 3;
  double ddos_window_ms = 5000.0;
  double heartbeat_period_ms = 0.0;  // 0 disables heartbeats
  double heartbeat_grace = 1.5;
  double horizon_ms = 0.0;           // 0: derived from the emissions
};

struct ScenarioResult {
  std::vector<apps::HeavyHitterEvent> heavy_hitters;
  std::vector<EventReport> reports;
  apps::DdosResult ddos;
  std::vector<apps::LivenessTransition> liveness;
  double end_time_ms = 0.0;
};

// Feeds flow records to the topology's first Monitor, signals heavy hitters
// (and optional heartbeats) over the vibration network, and runs the DDoS
// detector and heartbeat watchdog on what the first Collector senses.
ScenarioResult run_scenario(const Topology& topology, const std::vector<apps::FlowRecord>& flows,
                            const ScenarioOptions& options, const ControllerConfig& controller = {});

// JSON config mirroring SweepConfig plus optional "medium", "topology"
// (inline object) or "topology_path", and "calibration_path".
struct HarnessConfig {
  SweepConfig sweep{};
  std::optional<Topology> topology;
  bool seed_set = false;
};

HarnessConfig parse_config(std::string_view json_text);
HarnessConfig load_config(const std::string& path);

ChannelCalibration parse_calibration(std::string_view json_text);
ChannelCalibration load_calibration(const std::string& path);
std::string calibration_to_json(const ChannelCalibration& calibration);

}  // namespace vdn::harness
