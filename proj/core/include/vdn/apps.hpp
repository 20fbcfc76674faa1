#pragma once

// Network-management applications layered on the controller's report stream.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vdn/controller.hpp"
#include "vdn/topology.hpp"

namespace vdn::apps {

struct FlowRecord {
  std::string src;
  std::string dst;
  std::uint64_t bytes = 0;
  double timestamp_ms = 0.0;
};

// CSV with header `src,dst,bytes,timestamp_ms`. An empty file is an empty
// stream. Throws IoError, or ParseError carrying the 1-based line number.
std::vector<FlowRecord> ingest_flows(const std::string& path);
std::vector<FlowRecord> parse_flows(std::istream& in);

// 16-bit FNV-1a folded hash of an address.
std::uint16_t address_hash(const std::string& address) noexcept;

// hash(src) || hash(dst), big-endian: the heavy-hitter payload.
std::vector<std::uint8_t> flow_hash(const std::string& src, const std::string& dst);

// Maps address hashes back to addresses seen in the flow stream.
class AddressBook {
 public:
  void add(const std::string& address);
  static AddressBook from_flows(const std::vector<FlowRecord>& flows);
  // Known address, or "hash:XXXX" when the hash was never seen.
  std::string resolve(std::uint16_t hash) const;

 private:
  std::map<std::uint16_t, std::string> by_hash_;
};

struct HeavyHitterEvent {
  std::string src;
  std::string dst;
  std::int64_t window = 0;  // tumbling window index
  double time_ms = 0.0;     // timestamp of the record that crossed the threshold
  std::uint64_t window_bytes = 0;
  std::vector<std::uint8_t> payload;
};

// Tumbling windows [k*window_ms, (k+1)*window_ms). A (src,dst) pair fires
// when its window sum first reaches threshold_bytes; at most once per window.
std::vector<HeavyHitterEvent> heavy_hitter_monitor(const std::vector<FlowRecord>& flows,
                                                   std::uint64_t threshold_bytes,
                                                   std::int64_t window_ms);

enum class ActionKind { BlockSource, RateLimit, Annotate };
std::string to_string(ActionKind kind);

struct ControlAction {
  ActionKind kind = ActionKind::BlockSource;
  std::string target;
  EventKind reason;           // kind of the triggering report
  double sim_time_ms = 0.0;
  std::size_t trigger = 0;    // index of the triggering report in the input
};

struct DdosAlert {
  std::string destination;
  double sim_time_ms = 0.0;
  std::vector<std::string> sources;
  std::vector<std::size_t> reports;  // contributing report indices
};

struct DdosResult {
  std::vector<DdosAlert> alerts;
  std::vector<ControlAction> actions;
};

// Sliding window (t - window_ms, t] per destination over heavy-hitter
// reports. An alert fires when the count of distinct sources rises to k, and
// re-arms once it falls below k again.
DdosResult ddos_detect(const std::vector<EventReport>& reports, int k, double window_ms,
                       const AddressBook* addresses = nullptr);

// One JSON object per line: kind, target, reason, sim_time_ms.
void write_action_log(std::ostream& out, const std::vector<ControlAction>& actions);

enum class Liveness { Up, Down };

struct LivenessTransition {
  std::string device;  // hex of the heartbeat payload; empty without payload
  Liveness state = Liveness::Up;
  double time_ms = 0.0;
};

// A device is Up from its first heartbeat and Down once grace * period_ms
// passes without one. Without a horizon, every device ends Down.
std::vector<LivenessTransition> heartbeat_watchdog(const std::vector<EventReport>& reports,
                                                   double period_ms, double grace,
                                                   std::optional<double> horizon_ms = std::nullopt);

struct TraceOptions {
  ControllerConfig controller{};
  double horizon_ms = 0.0;  // 0: derived from the chain length
};

// traceroute-style path discovery: the origin sends a hop-probe carrying a
// hop count, every relay increments it, and the collector matches the final
// count against the topology. Throws PathBroken(after) when a hop goes silent.
std::vector<std::string> vibe_trace(const Topology& topology, const std::string& origin,
                                    const TraceOptions& options = {});

}  // namespace vdn::apps
