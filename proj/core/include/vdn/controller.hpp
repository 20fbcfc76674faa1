#pragma once

// Deterministic, single-threaded simulation of a VDN deployment in simulated
// time. Time advances in symbol-length ticks; every tick each transmitter
// granted by its beam's TDMA schedule sends one queued symbol (or a silent
// guard slot) and every listening tap decodes what reached it.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vdn/link.hpp"
#include "vdn/modem.hpp"
#include "vdn/registry.hpp"
#include "vdn/topology.hpp"
#include "vdn/transducer.hpp"

namespace vdn {

inline constexpr double kDefaultSimRateHz = 40000.0;

struct ControllerConfig {
  Alphabet alphabet{};
  DetectorConfig detector{};
  AdcSpec adc{};
  double symbol_ms = kDefaultSymbolMs;
  double sim_rate_hz = kDefaultSimRateHz;
  double slot_ms = 500.0;
  std::uint64_t seed = 1;
};

struct EventReport {
  EventKind event;
  std::string node;  // detecting node
  double sim_time_ms = 0.0;
  std::optional<Frame> payload;
  bool frame_error = false;  // symbols followed the pattern but no valid frame
};

struct ControllerStats {
  std::size_t symbols_sent = 0;
  std::size_t symbols_decoded = 0;
  std::size_t unknown_frequency = 0;
  std::size_t unmatched_symbols = 0;
  std::size_t frame_errors = 0;
};

class Controller {
 public:
  // Roles in the registry are filled from the topology.
  Controller(Topology topology, Registry registry, ControllerConfig config = {});
  ~Controller();
  Controller(Controller&&) noexcept;
  Controller& operator=(Controller&&) noexcept;

  double now_ms() const noexcept;
  const Topology& topology() const noexcept;
  const Registry& registry() const noexcept;
  const ControllerConfig& config() const noexcept;
  const ControllerStats& stats() const noexcept;
  const MacSchedule& schedule(const std::string& beam) const;

  void bind_event(const EventKind& event, const SignalPattern& pattern);

  // Queues the event's pattern (and framed payload) on a Monitor at the
  // current time. Throws UnknownNode, RoleViolation, UnboundEvent, or
  // ContractViolation for an oversize payload.
  void emit_event(const std::string& node, const std::string& event,
                  std::optional<std::vector<std::uint8_t>> payload = std::nullopt);
  // Same checks as emit_event; the transmission is queued once time reaches at_ms.
  void schedule_emit(const std::string& node, const std::string& event,
                     std::optional<std::vector<std::uint8_t>> payload, double at_ms);

  // Processes every tick that starts before t_ms.
  void run_until(double t_ms);

  // Runs for horizon_ms more and returns (and drains) the collector's reports.
  // Throws RoleViolation for non-Collector nodes.
  std::vector<EventReport> sense_events(const std::string& collector, double horizon_ms);

  // Drains reports collected so far, for one collector or all of them,
  // ordered by time.
  std::vector<EventReport> take_reports(const std::string& collector);
  std::vector<EventReport> take_all_reports();

  // Events decoded by a relay before forwarding.
  const std::vector<EventReport>& relay_log(const std::string& relay) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace vdn
