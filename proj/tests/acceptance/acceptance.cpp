// Acceptance gate: one line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"
#include "vdn/apps.hpp"
#include "vdn/controller.hpp"
#include "vdn/error.hpp"
#include "vdn/harness.hpp"
#include "vdn/link.hpp"
#include "vdn/medium.hpp"
#include "vdn/modem.hpp"
#include "vdn/registry.hpp"
#include "vdn/topology.hpp"

using namespace vdn;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

harness::SweepConfig sweep_at_550(std::vector<double> freqs, int trials) {
  harness::SweepConfig cfg;
  cfg.frequencies_hz = std::move(freqs);
  cfg.tap_positions_mm = {550.0};
  cfg.trials = trials;
  return cfg;
}

Outcome in_band_accuracy() {
  std::vector<double> freqs;
  for (double f = 1750; f <= 5000; f += 250) freqs.push_back(f);
  const auto t0 = Clock::now();
  const auto rows = harness::sweep_frequency(sweep_at_550(freqs, 100));
  const double elapsed = seconds_since(t0);
  const auto ok = std::count_if(rows.begin(), rows.end(),
                                [](const harness::FrequencyRow& r) { return r.detected_hz > 0 && r.percent_error <= 5.0; });
  const double frac = static_cast<double>(ok) / static_cast<double>(rows.size());
  return {frac >= 0.95 && elapsed < 30.0, fmt("%.2f%% of %g trials within 5%%, %.2f s", 100 * frac, double(rows.size()), elapsed)};
}

Outcome out_of_band_failure() {
  std::vector<double> freqs;
  for (double f : harness::reference_frequency_schedule()) {
    if (f < 1750) freqs.push_back(f);
  }
  const auto rows = harness::sweep_frequency(sweep_at_550(freqs, 100));
  std::map<double, int> ok;
  for (const auto& r : rows) ok[r.frequency_hz] += (r.detected_hz > 0 && r.percent_error <= 5.0) ? 1 : 0;
  int worst = -1;
  double worst_f = 0;
  for (const auto& [f, n] : ok) {
    if (n > worst) worst = n, worst_f = f;
  }
  return {worst < 50, fmt("%g frequencies, worst %g Hz decodes in %g/100", double(ok.size()), worst_f, worst)};
}

Outcome nyquist_limit() {
  harness::SweepConfig cfg = sweep_at_550({7500, 10000, 20000}, 20);
  cfg.tap_positions_mm = {50.0, 550.0};
  bool pass = true;
  for (const auto& r : harness::sweep_frequency(cfg)) {
    const double want = oracle::folded_frequency(r.frequency_hz, cfg.adc.sample_rate_hz);
    pass &= r.detected_hz <= cfg.adc.nyquist_hz() && r.detected_hz == want;
  }
  return {pass, "7500->2500, 10000->0, 20000->0 at 50 and 550 mm"};
}

Outcome multihop_consistency() {
  const double bin = 10000.0 / 1024.0;
  const auto t0 = Clock::now();
  double worst = 0;
  bool pass = true;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    harness::SweepConfig cfg;
    cfg.frequencies_hz = harness::multihop_frequencies();
    cfg.tone_ms = harness::kMultihopToneMs;
    cfg.seed = seed;
    for (const auto& r : harness::multihop_experiment(cfg)) {
      if (r.stage != harness::Stage::Hop) continue;
      const double err = std::abs(r.detected_hz - r.sent_hz);
      worst = std::max(worst, err);
      pass &= r.detected_hz > 0 && err <= bin;
    }
  }
  const double elapsed = seconds_since(t0);
  return {pass && elapsed < 10.0, fmt("worst hop error %.3f Hz (bin %.3f), %.2f s", worst, bin, elapsed)};
}

Outcome boundary_ordering() {
  harness::SweepConfig cfg;
  cfg.frequencies_hz = {3000};
  std::map<BoundaryCondition, std::vector<double>> sweep;
  for (const auto& r : harness::sweep_distance(cfg)) sweep[r.boundary].push_back(r.magnitude);
  bool pass = true;
  const auto& ct = sweep[BoundaryCondition::ConstrainedThroughout];
  for (std::size_t i = 0; i < ct.size(); ++i) {
    pass &= sweep[BoundaryCondition::Supported][i] >= ct[i];
    pass &= sweep[BoundaryCondition::ClampedAtEnds][i] >= ct[i];
    if (i > 0) pass &= ct[i] <= ct[i - 1];
  }
  // Analytic: every band frequency, every millimetre.
  MediumSpec m;
  for (double f = 1750; f <= 5000; f += 50) {
    double prev = INFINITY;
    for (double d = 50; d <= 550; d += 1) {
      m.boundary = BoundaryCondition::ConstrainedThroughout;
      const double c = channel_response(d, f, m);
      m.boundary = BoundaryCondition::Supported;
      const double s = channel_response(d, f, m);
      m.boundary = BoundaryCondition::ClampedAtEnds;
      const double k = channel_response(d, f, m);
      pass &= s >= c && k >= c && c <= prev;
      prev = c;
    }
  }
  return {pass, "sweep at 3000 Hz plus 66 frequencies x 501 taps analytically"};
}

Outcome fft_oracle() {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(-1.0, 1.0), fq(10.0, 4990.0);
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    Waveform w{10000.0, std::vector<double>(1024)};
    const double f = fq(rng), a = u(rng);
    for (std::size_t t = 0; t < w.samples.size(); ++t) {
      const double tone = (i % 2 == 0) ? a * std::sin(2 * std::numbers::pi * f * static_cast<double>(t) / 10000.0) : 0.0;
      w.samples[t] = tone + 0.3 * n(rng);
    }
    const DetectionResult got = fft_peak(w, 1024, 0.0);
    const auto bin = static_cast<std::size_t>(std::lround(got.frequency_hz * 1024.0 / 10000.0));
    mismatches += (!got.valid || bin != oracle::argmax_bin(w.samples)) ? 1 : 0;
  }
  return {mismatches == 0, fmt("%g/1000 mismatches", mismatches)};
}

bool is_rejection(const FrameResult& r) {
  return std::holds_alternative<FramingError>(r) || std::holds_alternative<ChecksumError>(r);
}

Outcome link_round_trip() {
  const Alphabet a{};
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> len(0, 32), byte(0, 255);
  int bad = 0;
  for (int i = 0; i < 10000; ++i) {
    std::vector<std::uint8_t> p(static_cast<std::size_t>(len(rng)));
    for (auto& b : p) b = static_cast<std::uint8_t>(byte(rng));
    const FrameResult r = frame_decode(std::span<const Symbol>(frame_encode(p, a)), a);
    bad += (!std::holds_alternative<Frame>(r) || std::get<Frame>(r).payload != p) ? 1 : 0;
  }
  long corruptions = 0, accepted = 0;
  for (int n = 0; n <= 4; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<std::uint8_t> p(static_cast<std::size_t>(n));
      for (auto& b : p) b = static_cast<std::uint8_t>(byte(rng));
      const auto symbols = frame_encode(p, a);
      for (std::size_t pos = 0; pos < symbols.size(); ++pos) {
        std::vector<SymbolSlot> slots(symbols.begin(), symbols.end());
        slots[pos] = std::nullopt;
        ++corruptions;
        accepted += is_rejection(frame_decode(std::span<const SymbolSlot>(slots), a)) ? 0 : 1;
        for (int v = 0; v < a.size; ++v) {
          if (v == symbols[pos].index) continue;
          auto changed = symbols;
          changed[pos] = Symbol{v};
          ++corruptions;
          accepted += is_rejection(frame_decode(std::span<const Symbol>(changed), a)) ? 0 : 1;
        }
      }
    }
  }
  return {bad == 0 && accepted == 0,
          fmt("%g/10000 round-trip failures, %g of %g corruptions accepted", bad, double(accepted), double(corruptions))};
}

Outcome end_to_end() {
  const char* kinds[] = {"hop-probe", "heavy-hitter", "ddos-alert", "heartbeat"};
  Controller c(two_beam_topology(0.0), default_registry());
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> kind(0, 3), len(0, 8), byte(0, 254);
  std::vector<std::pair<std::string, std::vector<std::uint8_t>>> expected;
  for (int i = 0; i < 100; ++i) {
    const std::string k = kinds[kind(rng)];
    std::vector<std::uint8_t> p(static_cast<std::size_t>(k == "hop-probe" ? 1 + len(rng) % 8 : len(rng)));
    for (auto& b : p) b = static_cast<std::uint8_t>(byte(rng));
    c.schedule_emit("monitor", k, p, 2500.0 * i);
    if (k == "hop-probe") ++p[0];  // the relay counts itself
    expected.emplace_back(k, p);
  }
  const auto reports = c.sense_events("collector", 2500.0 * 100 + 5000.0);
  int matched = 0;
  for (std::size_t i = 0; i < std::min(reports.size(), expected.size()); ++i) {
    const auto& r = reports[i];
    matched += (r.event.name == expected[i].first && !r.frame_error && r.payload && r.payload->payload == expected[i].second &&
                (i == 0 || r.sim_time_ms >= reports[i - 1].sim_time_ms))
                   ? 1
                   : 0;
  }
  return {reports.size() == 100 && matched == 100, fmt("%g reports, %g matched in order", double(reports.size()), matched)};
}

Topology random_chain(std::mt19937_64& rng, int beams, std::vector<std::string>& path) {
  std::uniform_real_distribution<double> pos(150.0, 600.0);
  std::uniform_int_distribution<int> coin(0, 1), tag(0, 999);
  Topology t;
  for (int i = 0; i < beams; ++i) {
    BeamSpec b;
    b.id = "b" + std::to_string(tag(rng)) + "-" + std::to_string(i);
    b.medium.noise_rms = 0.0;
    b.medium.boundary = coin(rng) ? BoundaryCondition::Supported : BoundaryCondition::ClampedAtEnds;
    t.beams.push_back(b);
  }
  path = {"m" + std::to_string(tag(rng))};
  t.nodes.push_back({path[0], Role::Monitor, t.beams[0].id, 0.0});
  for (int i = 0; i + 1 < beams; ++i) {
    const std::string id = "r" + std::to_string(tag(rng)) + "-" + std::to_string(i);
    t.nodes.push_back({id, Role::Relay, t.beams[i].id, pos(rng)});
    t.relays.push_back({t.beams[i].id, t.beams[i + 1].id, id, 0.0});
    path.push_back(id);
  }
  path.push_back("c" + std::to_string(tag(rng)));
  t.nodes.push_back({path.back(), Role::Collector, t.beams.back().id, pos(rng)});
  std::shuffle(t.nodes.begin(), t.nodes.end(), rng);
  t.validate();
  return t;
}

Outcome app_scenarios() {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> beams(1, 5);
  int traces = 0, trace_ok = 0;
  for (int i = 0; i < 15; ++i) {
    std::vector<std::string> path;
    const Topology t = random_chain(rng, beams(rng), path);
    ++traces;
    try {
      trace_ok += apps::vibe_trace(t, path.front()) == path ? 1 : 0;
    } catch (const Error&) {
    }
  }

  int hh_ok = 0;
  for (int s = 0; s < 1000; ++s) {
    std::uniform_int_distribution<int> host(0, 4), bytes(0, 500), gap(0, 250), n(0, 80);
    const std::uint64_t threshold = 300 + static_cast<std::uint64_t>(s % 7) * 100;
    const std::int64_t window = 500 + (s % 5) * 250;
    std::vector<apps::FlowRecord> flows;
    std::vector<oracle::Flow> ref;
    double t = 0;
    for (int i = n(rng); i > 0; --i) {
      t += gap(rng);
      const std::string a = "s" + std::to_string(host(rng)), b = "d" + std::to_string(host(rng));
      const auto by = static_cast<std::uint64_t>(bytes(rng));
      flows.push_back({a, b, by, t});
      ref.push_back({a, b, by, t});
    }
    const auto got = apps::heavy_hitter_monitor(flows, threshold, window);
    const auto want = oracle::heavy_hitter_indices(ref, threshold, window);
    bool same = got.size() == want.size();
    for (std::size_t i = 0; same && i < got.size(); ++i) {
      same = got[i].time_ms == ref[want[i]].t && got[i].src == ref[want[i]].src && got[i].dst == ref[want[i]].dst;
    }
    hh_ok += same ? 1 : 0;
  }

  int dd_ok = 0;
  for (int s = 0; s < 1000; ++s) {
    std::uniform_int_distribution<int> host(0, 6), dst(0, 2), gap(0, 400), kd(1, 4), n(0, 60);
    const int k = kd(rng);
    const double window = 500.0 + 250.0 * (s % 4);
    std::vector<EventReport> reports;
    std::vector<oracle::Hit> hits;
    double t = 0;
    for (int i = n(rng); i > 0; --i) {
      t += gap(rng);
      const std::string a = "h" + std::to_string(host(rng)), b = "v" + std::to_string(dst(rng));
      reports.push_back({events::kHeavyHitter, "collector", t, Frame{apps::flow_hash(a, b), 0}, false});
      hits.push_back({apps::address_hash(a), apps::address_hash(b), t});
    }
    const auto want = oracle::ddos_alert_indices(hits, k, window);
    const auto got = apps::ddos_detect(reports, k, window);
    bool same = got.alerts.size() == want.size();
    for (std::size_t i = 0; same && i < want.size(); ++i) same = got.alerts[i].sim_time_ms == hits[want[i]].t;
    dd_ok += same ? 1 : 0;
  }
  return {trace_ok == traces && hh_ok == 1000 && dd_ok == 1000,
          fmt("traces %g ok, heavy-hitter %g/1000, ddos %g/1000", trace_ok, hh_ok, dd_ok) + " of " +
              std::to_string(traces) + " chains"};
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "vdn");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome cli_determinism() {
  const std::string dir = std::filesystem::temp_directory_path() / "vdn_acceptance";
  std::filesystem::create_directories(dir);
  const std::string flows = dir + "/flows.csv";
  std::ofstream(flows) << "src,dst,bytes,timestamp_ms\na,v,500000,0\nb,v,500000,10\nc,v,500000,20\nd,w,10,30\n";
  const std::vector<std::vector<std::string>> commands{
      {"sweep-freq", "--trials", "2"}, {"sweep-dist"}, {"multihop"}, {"eavesdrop"},
      {"run", "--flows", flows, "--heartbeat-ms", "1000"}};
  int identical = 0, total = 0;
  for (const auto& cmd : commands) {
    std::string outputs[2];
    for (int rep = 0; rep < 2; ++rep) {
      auto args = cmd;
      const std::string out = dir + "/" + cmd[0] + std::to_string(rep) + ".csv";
      for (const std::string& a : {std::string("--seed"), std::string("42"), std::string("--out"), out}) args.push_back(a);
      if (run_cli(args) != 0) outputs[rep] = "<failed " + std::to_string(rep) + ">";
      else outputs[rep] = slurp(out);
    }
    ++total;
    identical += (outputs[0] == outputs[1] && !outputs[0].empty()) ? 1 : 0;
  }
  return {identical == total, fmt("%g/%g subcommands byte-identical", identical, total)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"in-band accuracy", in_band_accuracy},
      {"out-of-band failure", out_of_band_failure},
      {"nyquist limit", nyquist_limit},
      {"multi-hop consistency", multihop_consistency},
      {"boundary-condition ordering", boundary_ordering},
      {"fft oracle equivalence", fft_oracle},
      {"link round-trip", link_round_trip},
      {"end-to-end protocol fidelity", end_to_end},
      {"app scenarios", app_scenarios},
      {"determinism", cli_determinism},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
