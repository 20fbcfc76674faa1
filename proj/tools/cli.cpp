#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "vdn/apps.hpp"
#include "vdn/error.hpp"
#include "vdn/harness.hpp"
#include "vdn/northbound.hpp"

namespace {

using namespace vdn;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string config_path;
  std::string out_path;
};

// Usage problems found after CLI11 accepted the command line.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

harness::HarnessConfig load(const Globals& g) {
  harness::HarnessConfig cfg = g.config_path.empty() ? harness::HarnessConfig{} : harness::load_config(g.config_path);
  if (g.seed) {
    cfg.sweep.seed = *g.seed;
  } else if (const char* env = std::getenv("VDN_SEED"); env && !cfg.seed_set) {
    try {
      std::size_t used = 0;
      cfg.sweep.seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw UsageError("VDN_SEED must be an unsigned integer");
    }
  }
  return cfg;
}

template <class Rows>
void emit(const Globals& g, const Rows& rows) {
  if (g.out_path.empty()) {
    harness::write_csv(std::cout, rows);
    return;
  }
  std::ofstream out(g.out_path, std::ios::binary);
  if (!out) throw IoError("cannot write " + g.out_path);
  harness::write_csv(out, rows);
  if (!out) throw IoError("write failed: " + g.out_path);
}

std::optional<BoundaryCondition> boundary_arg(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const auto bc = parse_boundary(text);
  if (!bc) throw UsageError("unknown boundary: " + text);
  return bc;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Vibration-defined networking simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  std::uint64_t seed_value = 1;
  auto* seed_opt = app.add_option("--seed", seed_value, "RNG seed (VDN_SEED is used when absent)");
  app.add_option("--config", g.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--out", g.out_path, "CSV output path (stdout when absent)");

  int trials = 0;
  std::string boundary;
  auto* sweep_freq = app.add_subcommand("sweep-freq", "Frequency sweep: detected frequency and error per tap");
  sweep_freq->add_option("--trials", trials, "Trials per (frequency, tap)")->check(CLI::PositiveNumber);
  sweep_freq->add_option("--boundary", boundary, "supported | clamped | constrained");

  double dist_hz = 3000.0;
  auto* sweep_dist = app.add_subcommand("sweep-dist", "Amplitude vs distance for every boundary condition");
  sweep_dist->add_option("--frequency", dist_hz, "Probe frequency in Hz")->check(CLI::PositiveNumber);

  auto* multihop = app.add_subcommand("multihop", "Two-beam relay experiment");
  multihop->add_option("--trials", trials, "Trials per frequency")->check(CLI::PositiveNumber);

  std::string source;
  double probe_hz = 3000.0;
  harness::EavesdropOptions eaves;
  auto* eavesdrop = app.add_subcommand("eavesdrop", "Amplitude map along the source's beam");
  eavesdrop->add_option("--source", source, "Source node (default: first monitor)");
  eavesdrop->add_option("--frequency", probe_hz, "Probe frequency in Hz")->check(CLI::PositiveNumber);
  eavesdrop->add_option("--amplitude", eaves.amplitude, "Probe amplitude")->check(CLI::PositiveNumber);
  eavesdrop->add_option("--threshold", eaves.threshold, "Detection threshold")->check(CLI::NonNegativeNumber);
  eavesdrop->add_option("--step", eaves.step_mm, "Map resolution in mm")->check(CLI::PositiveNumber);

  std::string flows_path;
  std::string actions_path;
  harness::ScenarioOptions scenario;
  auto* run = app.add_subcommand("run", "End-to-end scenario: flows -> heavy hitters -> DDoS alerts");
  run->add_option("--flows", flows_path, "Flow CSV (src,dst,bytes,timestamp_ms)")->required();
  run->add_option("--actions", actions_path, "Write the control-action log here");
  run->add_option("--threshold-bytes", scenario.threshold_bytes, "Heavy-hitter threshold");
  run->add_option("--window-ms", scenario.window_ms, "Heavy-hitter window")->check(CLI::PositiveNumber);
  run->add_option("--ddos-k", scenario.ddos_k, "Distinct sources per alert")->check(CLI::PositiveNumber);
  run->add_option("--ddos-window-ms", scenario.ddos_window_ms, "DDoS sliding window")->check(CLI::PositiveNumber);
  run->add_option("--heartbeat-ms", scenario.heartbeat_period_ms, "Heartbeat period (0 = off)");

  auto* northbound = app.add_subcommand("northbound", "Serve the JSON line protocol on stdin/stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (*seed_opt) g.seed = seed_value;

  try {
    harness::HarnessConfig cfg = load(g);
    harness::SweepConfig& sweep = cfg.sweep;
    const Topology topology = cfg.topology ? *cfg.topology : two_beam_topology(sweep.medium.noise_rms);

    if (*sweep_freq) {
      if (trials > 0) sweep.trials = trials;
      if (const auto bc = boundary_arg(boundary)) sweep.boundary = *bc;
      emit(g, harness::sweep_frequency(sweep));
    } else if (*sweep_dist) {
      sweep.frequencies_hz = {dist_hz};
      emit(g, harness::sweep_distance(sweep));
    } else if (*multihop) {
      sweep.frequencies_hz = harness::multihop_frequencies();
      sweep.tone_ms = harness::kMultihopToneMs;
      if (trials > 0) sweep.trials = trials;
      emit(g, cfg.topology ? harness::multihop_experiment(sweep, topology) : harness::multihop_experiment(sweep));
    } else if (*eavesdrop) {
      if (source.empty()) {
        for (const NodeSpec& n : topology.nodes) {
          if (n.role == Role::Monitor) {
            source = n.id;
            break;
          }
        }
      }
      emit(g, harness::eavesdrop_map(topology, source, probe_hz, eaves));
    } else if (*run) {
      ControllerConfig controller;
      controller.alphabet = sweep.alphabet;
      controller.detector = sweep.detector;
      controller.adc = sweep.adc;
      controller.seed = sweep.seed;
      const auto flows = apps::ingest_flows(flows_path);
      const harness::ScenarioResult result = harness::run_scenario(topology, flows, scenario, controller);
      emit(g, result.reports);
      if (!actions_path.empty()) {
        std::ofstream out(actions_path, std::ios::binary);
        if (!out) throw IoError("cannot write " + actions_path);
        apps::write_action_log(out, result.ddos.actions);
      }
      std::cerr << "heavy hitters: " << result.heavy_hitters.size() << ", reports: " << result.reports.size()
                << ", ddos alerts: " << result.ddos.alerts.size() << ", actions: " << result.ddos.actions.size()
                << '\n';
    } else if (*northbound) {
      ControllerConfig controller;
      controller.seed = sweep.seed;
      NorthboundServer server(controller);
      server.serve(std::cin, std::cout);
    }
  } catch (const UsageError& e) {
    std::cerr << "vdn: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "vdn: " << e.code() << ": " << e.what() << '\n';
    return 1;
  } catch (const ContractViolation& e) {
    std::cerr << "vdn: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
