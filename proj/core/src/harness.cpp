#include "vdn/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "vdn/error.hpp"
#include "vdn/fft.hpp"

namespace vdn::harness {

using nlohmann::json;

std::vector<double> reference_frequency_schedule() {
  std::vector<double> out;
  for (int f = 50; f <= 4450; f += 100) out.push_back(f);
  for (double f : {5000.0, 7500.0, 10000.0, 20000.0}) out.push_back(f);
  return out;
}

std::vector<double> multihop_frequencies() {
  std::vector<double> out;
  for (int f = 3250; f <= 4500; f += 250) out.push_back(f);
  return out;
}

std::vector<double> distance_taps() {
  std::vector<double> out;
  for (int d = 50; d <= 550; d += 50) out.push_back(d);
  return out;
}

void SweepConfig::validate() const {
  if (frequencies_hz.empty()) throw ConfigError("sweep: no frequencies");
  if (tap_positions_mm.empty()) throw ConfigError("sweep: no tap positions");
  if (trials < 1) throw ConfigError("sweep: trials must be >= 1");
  for (double f : frequencies_hz) {
    if (!(f > 0.0) || !std::isfinite(f)) throw ConfigError("sweep: frequencies must be positive");
  }
  try {
    medium.validate();
    adc.validate();
    alphabet.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("sweep: ") + e.what());
  }
  for (double tap : tap_positions_mm) {
    if (!(tap >= 0.0 && tap <= medium.length_mm)) throw ConfigError("sweep: tap outside the beam");
  }
  if (!(source_mm >= 0.0 && source_mm <= medium.length_mm)) throw ConfigError("sweep: source outside the beam");
  if (detector.window_len < 2 || !dsp::is_power_of_two(detector.window_len))
    throw ConfigError("sweep: window_len must be a power of two");
  if (!(detector.threshold >= 0.0)) throw ConfigError("sweep: threshold must be >= 0");
  if (!(sim_rate_hz >= adc.sample_rate_hz)) throw ConfigError("sweep: sim rate below the ADC rate");
  if (!(tone_ms > 0.0)) throw ConfigError("sweep: tone_ms must be positive");
  const double adc_samples = std::round(std::round(tone_ms / 1000.0 * sim_rate_hz) * adc.sample_rate_hz / sim_rate_hz);
  if (adc_samples < static_cast<double>(detector.window_len))
    throw ConfigError("sweep: tone shorter than one analysis window");
}

std::string_view to_string(Stage stage) noexcept { return stage == Stage::Original ? "original" : "hop"; }

namespace {

DetectionResult detect(const Waveform& received, const AdcSpec& adc, const DetectorConfig& detector) {
  return fft_peak(sample(received, adc), detector.window_len, detector.threshold);
}

}  // namespace

std::vector<FrequencyRow> sweep_frequency(const SweepConfig& config) {
  config.validate();
  MediumSpec medium = config.medium;
  medium.boundary = config.boundary;

  std::vector<FrequencyRow> rows;
  std::uint64_t point = 0;
  for (double f : config.frequencies_hz) {
    const Waveform tone = synthesize(ToneSpec{f, config.tone_ms}, config.sim_rate_hz);
    for (double tap : config.tap_positions_mm) {
      for (int trial = 0; trial < config.trials; ++trial, ++point) {
        const Waveform rx = propagate(tone, medium, TapPoint{config.source_mm}, TapPoint{tap},
                                      mix_seed(config.seed, point));
        const DetectionResult peak = detect(rx, config.adc, config.detector);
        const double detected = peak.valid ? peak.frequency_hz : 0.0;
        rows.push_back(FrequencyRow{f, tap, detected, percent_error(f, detected), peak.magnitude});
      }
    }
  }
  return rows;
}

std::vector<DistanceRow> sweep_distance(const SweepConfig& config) {
  config.validate();
  if (config.frequencies_hz.size() != 1) throw ConfigError("sweep_distance needs exactly one frequency");
  const double f = config.frequencies_hz.front();
  const Waveform tone = synthesize(ToneSpec{f, config.tone_ms}, config.sim_rate_hz);

  std::vector<DistanceRow> rows;
  for (BoundaryCondition bc : {BoundaryCondition::Supported, BoundaryCondition::ClampedAtEnds,
                               BoundaryCondition::ConstrainedThroughout}) {
    MediumSpec medium = config.medium;
    medium.boundary = bc;
    medium.noise_rms = 0.0;
    for (double tap : distance_taps()) {
      const Waveform rx = propagate(tone, medium, TapPoint{config.source_mm}, TapPoint{tap}, 0);
      rows.push_back(DistanceRow{tap, bc, tone_magnitude(rx, f)});
    }
  }
  return rows;
}

std::vector<MultihopRow> multihop_experiment(const SweepConfig& config, const Topology& topology) {
  config.validate();
  topology.validate();
  if (topology.relays.empty()) throw ConfigError("multihop: topology has no relay link");
  const RelayLink& link = topology.relays.front();
  const NodeSpec* relay = topology.find_node(link.node);
  const NodeSpec* source = nullptr;
  const NodeSpec* sink = nullptr;
  for (const NodeSpec& n : topology.nodes) {
    if (!source && n.role == Role::Monitor && n.beam == link.from_beam) source = &n;
    if (!sink && n.role == Role::Collector && n.beam == link.to_beam) sink = &n;
  }
  if (!source || !sink) throw ConfigError("multihop: need a monitor before and a collector after the relay");
  const MediumSpec& first = topology.find_beam(link.from_beam)->medium;
  const MediumSpec& second = topology.find_beam(link.to_beam)->medium;

  std::vector<MultihopRow> rows;
  std::uint64_t point = 0;
  for (double f : config.frequencies_hz) {
    const Waveform tone = synthesize(ToneSpec{f, config.tone_ms}, config.sim_rate_hz);
    for (int trial = 0; trial < config.trials; ++trial, ++point) {
      const Waveform at_relay = sample(propagate(tone, first, TapPoint{source->position_mm},
                                                 TapPoint{relay->position_mm}, mix_seed(config.seed, 2 * point)),
                                       config.adc);
      const DetectionResult original = fft_peak(at_relay, config.detector.window_len, config.detector.threshold);
      rows.push_back(MultihopRow{f, Stage::Original, original.valid ? original.frequency_hz : 0.0, original.magnitude});

      const RelayResult hop = relay_hop(at_relay, config.alphabet, config.detector);
      const auto* regenerated = std::get_if<ToneSpec>(&hop);
      if (!regenerated) {
        rows.push_back(MultihopRow{f, Stage::Hop, 0.0, 0.0});
        continue;
      }
      const Waveform out = synthesize(*regenerated, config.sim_rate_hz);
      const DetectionResult second_peak =
          detect(propagate(out, second, TapPoint{link.to_position_mm}, TapPoint{sink->position_mm},
                           mix_seed(config.seed, 2 * point + 1)),
                 config.adc, config.detector);
      rows.push_back(MultihopRow{f, Stage::Hop, second_peak.valid ? second_peak.frequency_hz : 0.0,
                                 second_peak.magnitude});
    }
  }
  return rows;
}

std::vector<MultihopRow> multihop_experiment(const SweepConfig& config) {
  Topology topology = two_beam_topology(config.medium.noise_rms);
  for (BeamSpec& beam : topology.beams) {
    beam.medium = config.medium;
    beam.medium.boundary = config.boundary;
  }
  return multihop_experiment(config, topology);
}

std::vector<EavesdropRow> eavesdrop_map(const Topology& topology, const std::string& source, double probe_hz,
                                        const EavesdropOptions& options) {
  topology.validate();
  const NodeSpec* node = topology.find_node(source);
  if (!node) throw UnknownNode(source);
  if (!(probe_hz > 0.0)) throw ContractViolation("eavesdrop_map: probe frequency must be positive");
  if (!(options.step_mm > 0.0)) throw ContractViolation("eavesdrop_map: step must be positive");
  MediumSpec medium = topology.find_beam(node->beam)->medium;
  medium.noise_rms = 0.0;

  const Waveform tone = synthesize(ToneSpec{probe_hz, options.tone_ms, options.amplitude}, options.sim_rate_hz);
  std::vector<EavesdropRow> rows;
  const auto steps = static_cast<long>(std::floor(medium.length_mm / options.step_mm + 1e-9));
  for (long i = 0; i <= steps; ++i) {
    const double tap = static_cast<double>(i) * options.step_mm;
    const Waveform rx = propagate(tone, medium, TapPoint{node->position_mm}, TapPoint{tap}, 0);
    const double magnitude = tone_magnitude(rx, probe_hz);
    rows.push_back(EavesdropRow{tap, magnitude, magnitude >= options.threshold});
  }
  return rows;
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<FrequencyRow>& rows) {
  out << "frequency_hz,tap_mm,detected_hz,percent_error,magnitude\n";
  for (const FrequencyRow& r : rows) {
    out << format_number(r.frequency_hz) << ',' << format_number(r.tap_mm) << ',' << format_number(r.detected_hz)
        << ',' << format_number(r.percent_error) << ',' << format_number(r.magnitude) << '\n';
  }
}

void write_csv(std::ostream& out, const std::vector<DistanceRow>& rows) {
  out << "tap_mm,boundary,magnitude\n";
  for (const DistanceRow& r : rows) {
    out << format_number(r.tap_mm) << ',' << to_string(r.boundary) << ',' << format_number(r.magnitude) << '\n';
  }
}

void write_csv(std::ostream& out, const std::vector<MultihopRow>& rows) {
  out << "sent_hz,stage,detected_hz,magnitude\n";
  for (const MultihopRow& r : rows) {
    out << format_number(r.sent_hz) << ',' << to_string(r.stage) << ',' << format_number(r.detected_hz) << ','
        << format_number(r.magnitude) << '\n';
  }
}

void write_csv(std::ostream& out, const std::vector<EavesdropRow>& rows) {
  out << "tap_mm,magnitude,above_threshold\n";
  for (const EavesdropRow& r : rows) {
    out << format_number(r.tap_mm) << ',' << format_number(r.magnitude) << ','
        << (r.above_threshold ? "true" : "false") << '\n';
  }
}

void write_csv(std::ostream& out, const std::vector<EventReport>& reports) {
  out << "event,node,sim_time_ms,payload_hex,frame_error\n";
  for (const EventReport& r : reports) {
    std::string hex;
    if (r.payload) {
      char buf[3];
      for (std::uint8_t b : r.payload->payload) {
        std::snprintf(buf, sizeof buf, "%02x", b);
        hex += buf;
      }
    }
    out << r.event.name << ',' << r.node << ',' << format_number(r.sim_time_ms) << ',' << hex << ','
        << (r.frame_error ? "true" : "false") << '\n';
  }
}

ScenarioResult run_scenario(const Topology& topology, const std::vector<apps::FlowRecord>& flows,
                            const ScenarioOptions& options, const ControllerConfig& controller_config) {
  topology.validate();
  const NodeSpec* monitor = nullptr;
  const NodeSpec* collector = nullptr;
  for (const NodeSpec& n : topology.nodes) {
    if (!monitor && n.role == Role::Monitor) monitor = &n;
    if (!collector && n.role == Role::Collector) collector = &n;
  }
  if (!monitor || !collector) throw ConfigError("scenario: topology needs a monitor and a collector");

  ScenarioResult result;
  result.heavy_hitters = apps::heavy_hitter_monitor(flows, options.threshold_bytes, options.window_ms);

  Controller controller(topology, default_registry(), controller_config);
  double last_emit = 0.0;
  std::size_t emissions = 0;
  for (const apps::HeavyHitterEvent& hh : result.heavy_hitters) {
    controller.schedule_emit(monitor->id, events::kHeavyHitter.name, hh.payload, hh.time_ms);
    last_emit = std::max(last_emit, hh.time_ms);
    ++emissions;
  }
  if (options.heartbeat_period_ms > 0.0) {
    const double until = flows.empty() ? 0.0 : flows.back().timestamp_ms;
    for (double t = 0.0; t <= until; t += options.heartbeat_period_ms) {
      controller.schedule_emit(monitor->id, events::kHeartbeat.name, std::nullopt, t);
      last_emit = std::max(last_emit, t);
      ++emissions;
    }
  }

  double horizon = options.horizon_ms;
  if (horizon <= 0.0) {
    // Worst case every transmission queues behind the others: ~22 symbols
    // each, plus slot waits at every hop.
    const double sym = controller_config.symbol_ms;
    const double per_hop = 30.0 * sym + 2.0 * controller_config.slot_ms * static_cast<double>(topology.nodes.size());
    horizon = last_emit + static_cast<double>(emissions) * 22.0 * sym +
              per_hop * static_cast<double>(topology.relays.size() + 1) + 1000.0;
  }
  result.reports = controller.sense_events(collector->id, horizon);
  result.end_time_ms = controller.now_ms();

  const apps::AddressBook book = apps::AddressBook::from_flows(flows);
  result.ddos = apps::ddos_detect(result.reports, options.ddos_k, options.ddos_window_ms, &book);
  if (options.heartbeat_period_ms > 0.0) {
    result.liveness = apps::heartbeat_watchdog(result.reports, options.heartbeat_period_ms, options.heartbeat_grace,
                                               result.end_time_ms);
  }
  return result;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
void read(const json& obj, const char* key, T& target, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    target = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": bad value for '" + key + "'");
  }
}

template <class T>
T need(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
  T value{};
  read(obj, key, value, where);
  return value;
}

ChannelCalibration calibration_from(const json& doc) {
  const std::string where = "calibration";
  reject_unknown(doc,
                 {"version", "gain_scale", "lobes", "floor_level", "floor_decay_hz", "plateau_level",
                  "plateau_edge_hz", "highpass_corner_hz", "highpass_order", "harmonic_cutoff_hz",
                  "standing_wave_ref_hz", "spatial"},
                 where);
  ChannelCalibration cal;
  cal.version = need<int>(doc, "version", where);
  cal.gain_scale = need<double>(doc, "gain_scale", where);
  const json& lobes = doc.at("lobes");
  if (!lobes.is_array() || lobes.size() != cal.lobes.size()) throw ConfigError(where + ": need exactly 3 lobes");
  for (std::size_t i = 0; i < cal.lobes.size(); ++i) {
    reject_unknown(lobes[i], {"center_hz", "width_hz", "level"}, where + " lobe");
    cal.lobes[i] = GainLobe{need<double>(lobes[i], "center_hz", where), need<double>(lobes[i], "width_hz", where),
                            need<double>(lobes[i], "level", where)};
  }
  cal.floor_level = need<double>(doc, "floor_level", where);
  cal.floor_decay_hz = need<double>(doc, "floor_decay_hz", where);
  cal.plateau_level = need<double>(doc, "plateau_level", where);
  cal.plateau_edge_hz = need<double>(doc, "plateau_edge_hz", where);
  cal.highpass_corner_hz = need<double>(doc, "highpass_corner_hz", where);
  cal.highpass_order = need<double>(doc, "highpass_order", where);
  cal.harmonic_cutoff_hz = need<double>(doc, "harmonic_cutoff_hz", where);
  cal.standing_wave_ref_hz = need<double>(doc, "standing_wave_ref_hz", where);
  if (!doc.contains("spatial")) throw ConfigError(where + ": missing 'spatial'");
  const json& spatial = doc.at("spatial");
  reject_unknown(spatial, {"supported", "clamped", "constrained"}, where + " spatial");
  const auto read_spatial = [&](const char* key) {
    if (!spatial.contains(key)) throw ConfigError(where + ": missing spatial." + key);
    const json& s = spatial.at(key);
    reject_unknown(s, {"attenuation_per_mm", "wavelength_mm_at_ref"}, where + " spatial");
    return SpatialCalibration{need<double>(s, "attenuation_per_mm", where), need<double>(s, "wavelength_mm_at_ref", where)};
  };
  cal.supported = read_spatial("supported");
  cal.clamped = read_spatial("clamped");
  cal.constrained = read_spatial("constrained");
  return cal;
}

}  // namespace

ChannelCalibration parse_calibration(std::string_view json_text) {
  return calibration_from(parse_json(json_text, "calibration"));
}

ChannelCalibration load_calibration(const std::string& path) { return parse_calibration(read_file(path)); }

std::string calibration_to_json(const ChannelCalibration& cal) {
  json lobes = json::array();
  for (const GainLobe& l : cal.lobes) lobes.push_back({{"center_hz", l.center_hz}, {"width_hz", l.width_hz}, {"level", l.level}});
  const auto spatial = [](const SpatialCalibration& s) {
    return json{{"attenuation_per_mm", s.attenuation_per_mm}, {"wavelength_mm_at_ref", s.wavelength_mm_at_ref}};
  };
  const json doc{{"version", cal.version},
                 {"gain_scale", cal.gain_scale},
                 {"lobes", lobes},
                 {"floor_level", cal.floor_level},
                 {"floor_decay_hz", cal.floor_decay_hz},
                 {"plateau_level", cal.plateau_level},
                 {"plateau_edge_hz", cal.plateau_edge_hz},
                 {"highpass_corner_hz", cal.highpass_corner_hz},
                 {"highpass_order", cal.highpass_order},
                 {"harmonic_cutoff_hz", cal.harmonic_cutoff_hz},
                 {"standing_wave_ref_hz", cal.standing_wave_ref_hz},
                 {"spatial",
                  {{"supported", spatial(cal.supported)},
                   {"clamped", spatial(cal.clamped)},
                   {"constrained", spatial(cal.constrained)}}}};
  return doc.dump(2);
}

namespace {

HarnessConfig config_from(const json& doc, const std::string& base_dir) {
  reject_unknown(doc,
                 {"frequencies_hz", "tap_positions_mm", "boundary", "trials", "seed", "tone_ms", "sim_rate_hz",
                  "source_mm", "medium", "adc", "detector", "alphabet", "calibration", "calibration_path", "topology",
                  "topology_path"},
                 "config");
  const std::string where = "config";
  const auto resolve = [&](const std::string& path) {
    if (base_dir.empty() || path.empty() || path.front() == '/') return path;
    return base_dir + "/" + path;
  };

  HarnessConfig cfg;
  SweepConfig& s = cfg.sweep;
  read(doc, "frequencies_hz", s.frequencies_hz, where);
  read(doc, "tap_positions_mm", s.tap_positions_mm, where);
  if (doc.contains("boundary")) {
    const auto bc = parse_boundary(need<std::string>(doc, "boundary", where));
    if (!bc) throw ConfigError("config: unknown boundary");
    s.boundary = *bc;
  }
  read(doc, "trials", s.trials, where);
  if (doc.contains("seed")) {
    s.seed = need<std::uint64_t>(doc, "seed", where);
    cfg.seed_set = true;
  }
  read(doc, "tone_ms", s.tone_ms, where);
  read(doc, "sim_rate_hz", s.sim_rate_hz, where);
  read(doc, "source_mm", s.source_mm, where);

  if (doc.contains("medium")) {
    const json& m = doc.at("medium");
    reject_unknown(m, {"length_mm", "width_mm", "thickness_mm", "noise_rms", "harmonic_leak", "resonance_low_hz",
                       "resonance_high_hz"},
                   "config medium");
    read(m, "length_mm", s.medium.length_mm, where);
    read(m, "width_mm", s.medium.width_mm, where);
    read(m, "thickness_mm", s.medium.thickness_mm, where);
    read(m, "noise_rms", s.medium.noise_rms, where);
    read(m, "harmonic_leak", s.medium.harmonic_leak, where);
    read(m, "resonance_low_hz", s.medium.resonance_low_hz, where);
    read(m, "resonance_high_hz", s.medium.resonance_high_hz, where);
  }
  if (doc.contains("adc")) {
    const json& a = doc.at("adc");
    reject_unknown(a, {"sample_rate_hz", "bits", "full_scale"}, "config adc");
    read(a, "sample_rate_hz", s.adc.sample_rate_hz, where);
    read(a, "bits", s.adc.bits, where);
    read(a, "full_scale", s.adc.full_scale, where);
  }
  if (doc.contains("detector")) {
    const json& d = doc.at("detector");
    reject_unknown(d, {"window_len", "threshold"}, "config detector");
    read(d, "window_len", s.detector.window_len, where);
    read(d, "threshold", s.detector.threshold, where);
  }
  if (doc.contains("alphabet")) {
    const json& a = doc.at("alphabet");
    reject_unknown(a, {"base_hz", "spacing_hz", "size"}, "config alphabet");
    read(a, "base_hz", s.alphabet.base_hz, where);
    read(a, "spacing_hz", s.alphabet.spacing_hz, where);
    read(a, "size", s.alphabet.size, where);
  }
  if (doc.contains("calibration") && doc.contains("calibration_path"))
    throw ConfigError("config: give either calibration or calibration_path");
  if (doc.contains("calibration")) s.medium.calibration = calibration_from(doc.at("calibration"));
  if (doc.contains("calibration_path"))
    s.medium.calibration = load_calibration(resolve(need<std::string>(doc, "calibration_path", where)));

  if (doc.contains("topology") && doc.contains("topology_path"))
    throw ConfigError("config: give either topology or topology_path");
  if (doc.contains("topology")) cfg.topology = parse_topology(doc.at("topology").dump());
  if (doc.contains("topology_path")) cfg.topology = load_topology(resolve(need<std::string>(doc, "topology_path", where)));
  if (cfg.topology) {
    for (BeamSpec& b : cfg.topology->beams) b.medium.calibration = s.medium.calibration;
  }

  s.validate();
  return cfg;
}

}  // namespace

HarnessConfig parse_config(std::string_view json_text) { return config_from(parse_json(json_text, "config"), ""); }

HarnessConfig load_config(const std::string& path) {
  const auto slash = path.find_last_of('/');
  const std::string dir = slash == std::string::npos ? std::string() : path.substr(0, slash);
  return config_from(parse_json(read_file(path), "config"), dir);
}

}  // namespace vdn::harness
