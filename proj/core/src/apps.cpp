#include "vdn/apps.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "vdn/error.hpp"

namespace vdn::apps {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string hex(std::span<const std::uint8_t> bytes) {
  std::string out;
  char buf[3];
  for (std::uint8_t b : bytes) {
    std::snprintf(buf, sizeof buf, "%02x", b);
    out += buf;
  }
  return out;
}

}  // namespace

std::vector<FlowRecord> parse_flows(std::istream& in) {
  std::vector<FlowRecord> flows;
  std::string line;
  std::size_t row = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (line.empty()) continue;
      if (line != "src,dst,bytes,timestamp_ms") throw ParseError(row, "expected header src,dst,bytes,timestamp_ms");
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv(line);
    if (f.size() != 4) throw ParseError(row, "expected 4 columns");
    if (f[0].empty() || f[1].empty()) throw ParseError(row, "empty address");

    FlowRecord rec{f[0], f[1], 0, 0.0};
    const char* first = f[2].data();
    const char* last = first + f[2].size();
    const auto [end, ec] = std::from_chars(first, last, rec.bytes);
    if (ec != std::errc{} || end != last) throw ParseError(row, "bytes must be a non-negative integer");

    try {
      std::size_t used = 0;
      rec.timestamp_ms = std::stod(f[3], &used);
      if (used != f[3].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError(row, "bad timestamp_ms");
    }
    if (!std::isfinite(rec.timestamp_ms)) throw ParseError(row, "bad timestamp_ms");
    if (!flows.empty() && rec.timestamp_ms < flows.back().timestamp_ms)
      throw ParseError(row, "timestamps must be non-decreasing");
    flows.push_back(std::move(rec));
  }
  return flows;
}

std::vector<FlowRecord> ingest_flows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open flow file: " + path);
  return parse_flows(in);
}

std::uint16_t address_hash(const std::string& address) noexcept {
  std::uint32_t h = 0x811c9dc5U;
  for (unsigned char c : address) {
    h ^= c;
    h *= 0x01000193U;
  }
  return static_cast<std::uint16_t>((h >> 16) ^ (h & 0xFFFFU));
}

std::vector<std::uint8_t> flow_hash(const std::string& src, const std::string& dst) {
  const std::uint16_t s = address_hash(src);
  const std::uint16_t d = address_hash(dst);
  return {static_cast<std::uint8_t>(s >> 8), static_cast<std::uint8_t>(s & 0xFF),
          static_cast<std::uint8_t>(d >> 8), static_cast<std::uint8_t>(d & 0xFF)};
}

void AddressBook::add(const std::string& address) { by_hash_.emplace(address_hash(address), address); }

AddressBook AddressBook::from_flows(const std::vector<FlowRecord>& flows) {
  AddressBook book;
  for (const FlowRecord& f : flows) {
    book.add(f.src);
    book.add(f.dst);
  }
  return book;
}

std::string AddressBook::resolve(std::uint16_t hash) const {
  const auto it = by_hash_.find(hash);
  if (it != by_hash_.end()) return it->second;
  char buf[16];
  std::snprintf(buf, sizeof buf, "hash:%04x", static_cast<unsigned>(hash));
  return buf;
}

std::vector<HeavyHitterEvent> heavy_hitter_monitor(const std::vector<FlowRecord>& flows,
                                                   std::uint64_t threshold_bytes, std::int64_t window_ms) {
  if (threshold_bytes == 0) throw ContractViolation("heavy_hitter_monitor: threshold must be positive");
  if (window_ms <= 0) throw ContractViolation("heavy_hitter_monitor: window must be positive");
  using Key = std::tuple<std::string, std::string, std::int64_t>;
  std::map<Key, std::uint64_t> sums;
  std::set<Key> fired;
  std::vector<HeavyHitterEvent> out;
  for (const FlowRecord& f : flows) {
    const auto window = static_cast<std::int64_t>(std::floor(f.timestamp_ms / static_cast<double>(window_ms)));
    const Key key{f.src, f.dst, window};
    std::uint64_t& sum = sums[key];
    sum += f.bytes;
    if (sum >= threshold_bytes && fired.insert(key).second) {
      out.push_back(HeavyHitterEvent{f.src, f.dst, window, f.timestamp_ms, sum, flow_hash(f.src, f.dst)});
    }
  }
  return out;
}

std::string to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::BlockSource: return "block-source";
    case ActionKind::RateLimit: return "rate-limit";
    case ActionKind::Annotate: return "annotate";
  }
  return "annotate";
}

DdosResult ddos_detect(const std::vector<EventReport>& reports, int k, double window_ms,
                       const AddressBook* addresses) {
  if (k < 1) throw ContractViolation("ddos_detect: k must be >= 1");
  if (!(window_ms > 0.0)) throw ContractViolation("ddos_detect: window must be positive");

  struct Entry {
    double time;
    std::uint16_t src;
    std::size_t index;
  };
  struct DestState {
    std::deque<Entry> entries;
    bool armed = true;
  };
  std::map<std::uint16_t, DestState> dests;

  const auto name = [&](std::uint16_t h) {
    if (addresses) return addresses->resolve(h);
    char buf[16];
    std::snprintf(buf, sizeof buf, "hash:%04x", static_cast<unsigned>(h));
    return std::string(buf);
  };
  const auto distinct = [](const std::deque<Entry>& entries) {
    std::set<std::uint16_t> s;
    for (const Entry& e : entries) s.insert(e.src);
    return s.size();
  };

  DdosResult result;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const EventReport& r = reports[i];
    if (r.event.name != events::kHeavyHitter.name || !r.payload || r.payload->payload.size() != 4) continue;
    const auto& p = r.payload->payload;
    const auto src = static_cast<std::uint16_t>((p[0] << 8) | p[1]);
    const auto dst = static_cast<std::uint16_t>((p[2] << 8) | p[3]);
    const double t = r.sim_time_ms;

    DestState& state = dests[dst];
    while (!state.entries.empty() && state.entries.front().time <= t - window_ms) state.entries.pop_front();
    // Counts only shrink between arrivals, so "fell below k since the last
    // alert" is visible right before this report is added.
    if (distinct(state.entries) < static_cast<std::size_t>(k)) state.armed = true;
    state.entries.push_back(Entry{t, src, i});
    if (!state.armed || distinct(state.entries) < static_cast<std::size_t>(k)) continue;
    state.armed = false;

    // Latest report per source inside the window.
    std::map<std::uint16_t, std::size_t> latest;
    for (const Entry& e : state.entries) latest[e.src] = e.index;
    DdosAlert alert{name(dst), t, {}, {}};
    for (const auto& [s, idx] : latest) {
      alert.sources.push_back(name(s));
      alert.reports.push_back(idx);
      result.actions.push_back(ControlAction{ActionKind::BlockSource, name(s), reports[idx].event, t, idx});
    }
    result.alerts.push_back(std::move(alert));
  }
  return result;
}

void write_action_log(std::ostream& out, const std::vector<ControlAction>& actions) {
  for (const ControlAction& a : actions) {
    const nlohmann::json line{{"kind", to_string(a.kind)},
                              {"target", a.target},
                              {"reason", a.reason.name},
                              {"sim_time_ms", a.sim_time_ms}};
    out << line.dump() << '\n';
  }
}

std::vector<LivenessTransition> heartbeat_watchdog(const std::vector<EventReport>& reports, double period_ms,
                                                   double grace, std::optional<double> horizon_ms) {
  if (!(period_ms > 0.0)) throw ContractViolation("heartbeat_watchdog: period must be positive");
  if (!(grace > 1.0)) throw ContractViolation("heartbeat_watchdog: grace must exceed 1");
  const double timeout = grace * period_ms;

  std::map<std::string, double> last;
  std::vector<LivenessTransition> out;
  for (const EventReport& r : reports) {
    if (r.event.name != events::kHeartbeat.name) continue;
    const std::string device = r.payload ? hex(r.payload->payload) : std::string();
    const auto it = last.find(device);
    if (it == last.end()) {
      out.push_back({device, Liveness::Up, r.sim_time_ms});
    } else if (r.sim_time_ms > it->second + timeout) {
      out.push_back({device, Liveness::Down, it->second + timeout});
      out.push_back({device, Liveness::Up, r.sim_time_ms});
    }
    last[device] = r.sim_time_ms;
  }
  for (const auto& [device, t] : last) {
    if (!horizon_ms || t + timeout <= *horizon_ms) out.push_back({device, Liveness::Down, t + timeout});
  }
  std::stable_sort(out.begin(), out.end(), [](const LivenessTransition& a, const LivenessTransition& b) {
    return a.time_ms < b.time_ms;
  });
  return out;
}

namespace {

// Relay paths from `beam` to a beam holding `collector`.
void find_paths(const Topology& topo, const std::string& beam, const std::string& collector,
                std::vector<std::string>& current, std::vector<std::vector<std::string>>& out) {
  const NodeSpec* c = topo.find_node(collector);
  if (c && c->beam == beam) out.push_back(current);
  for (const RelayLink& r : topo.relays) {
    if (r.from_beam != beam) continue;
    current.push_back(r.node);
    find_paths(topo, r.to_beam, collector, current, out);
    current.pop_back();
  }
}

std::vector<std::vector<std::string>> paths_to(const Topology& topo, const std::string& origin,
                                               const std::string& collector) {
  std::vector<std::string> current;
  std::vector<std::vector<std::string>> out;
  find_paths(topo, topo.find_node(origin)->beam, collector, current, out);
  return out;
}

}  // namespace

std::vector<std::string> vibe_trace(const Topology& topology, const std::string& origin,
                                    const TraceOptions& options) {
  topology.validate();
  const NodeSpec* start = topology.find_node(origin);
  if (!start) throw UnknownNode(origin);
  if (start->role != Role::Monitor) throw RoleViolation("vibe_trace origin must be a monitor: " + origin);

  // The path the probe should take: the shortest chain to any collector.
  std::vector<std::string> expected;
  std::string expected_collector;
  for (const NodeSpec& n : topology.nodes) {
    if (n.role != Role::Collector) continue;
    for (auto& p : paths_to(topology, origin, n.id)) {
      if (expected_collector.empty() || p.size() < expected.size()) {
        expected = p;
        expected_collector = n.id;
      }
    }
  }
  if (expected_collector.empty()) throw ConfigError("no collector reachable from " + origin);

  const ControllerConfig& cfg = options.controller;
  double horizon = options.horizon_ms;
  if (horizon <= 0.0) {
    // One probe is ~14 symbols; allow a full TDMA cycle of waiting per hop.
    std::size_t max_tx = 1;
    for (const BeamSpec& b : topology.beams) {
      std::size_t count = 0;
      for (const NodeSpec& n : topology.nodes) count += (n.beam == b.id && n.role == Role::Monitor);
      for (const RelayLink& r : topology.relays) count += (r.to_beam == b.id);
      max_tx = std::max(max_tx, count);
    }
    const double per_hop = 20.0 * cfg.symbol_ms + 2.0 * cfg.slot_ms * static_cast<double>(max_tx);
    horizon = per_hop * static_cast<double>(topology.relays.size() + 1) + 1000.0;
  }

  Controller controller(topology, default_registry(), cfg);
  controller.emit_event(origin, events::kHopProbe.name, std::vector<std::uint8_t>{1});
  controller.run_until(horizon);

  for (const EventReport& r : controller.take_all_reports()) {
    if (r.event.name != events::kHopProbe.name || !r.payload || r.payload->payload.size() != 1) continue;
    const std::size_t relays = r.payload->payload[0] - 1u;
    for (auto& p : paths_to(topology, origin, r.node)) {
      if (p.size() != relays) continue;
      std::vector<std::string> path{origin};
      path.insert(path.end(), p.begin(), p.end());
      path.push_back(r.node);
      return path;
    }
  }

  std::string after = origin;
  for (const std::string& relay : expected) {
    const auto& log = controller.relay_log(relay);
    const bool heard = std::any_of(log.begin(), log.end(), [](const EventReport& r) {
      return r.event.name == events::kHopProbe.name;
    });
    if (!heard) break;
    after = relay;
  }
  throw PathBroken(after);
}

}  // namespace vdn::apps
