#include "vdn/controller.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <tuple>

#include "vdn/error.hpp"

namespace vdn {

namespace {

std::uint64_t fnv1a64(const std::string& text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// nullopt = silent guard slot.
using QueueItem = std::optional<Symbol>;

struct Transmitter {
  std::string node;
  double position_mm = 0.0;
  std::deque<QueueItem> queue;
  double window_end_ms = -1.0;
};

struct Receiver {
  std::string node;
  double position_mm = 0.0;
  Role role = Role::Collector;
  // Per transmitting slot owner: symbols since the last silence.
  std::map<std::string, std::vector<SymbolSlot>> bursts;
  std::map<std::string, double> last_end_ms;
};

struct BeamState {
  const BeamSpec* spec = nullptr;
  MacSchedule schedule;
  std::vector<Transmitter> transmitters;
  std::vector<Receiver> receivers;
};

struct PendingEmit {
  double at_ms;
  std::size_t order;
  std::string node;
  std::string event;
  std::optional<std::vector<std::uint8_t>> payload;
};

}  // namespace

struct Controller::Impl {
  Topology topology;
  Registry registry;
  ControllerConfig config;
  ControllerStats stats;

  std::map<std::string, BeamState> beams;
  std::vector<PendingEmit> pending;
  std::size_t pending_order = 0;
  std::uint64_t tick = 0;

  // Relay retransmissions decided during a tick; queued once the tick ends
  // so nothing is re-sent within the tick it was heard in.
  struct Forward {
    Transmitter* tx;
    const Binding* binding;
    std::optional<std::vector<std::uint8_t>> payload;
  };
  std::vector<Forward> forwards;

  std::map<std::string, std::vector<EventReport>> reports;    // per collector
  std::map<std::string, std::vector<EventReport>> relay_logs;  // per relay

  // Noise-free received tone, keyed by (beam, src, dst, symbol).
  std::map<std::tuple<std::string, double, double, int>, Waveform> tone_cache;

  double now() const noexcept { return static_cast<double>(tick) * config.symbol_ms; }

  Transmitter* transmitter_for(const std::string& beam, const std::string& node) {
    auto it = beams.find(beam);
    if (it == beams.end()) return nullptr;
    for (Transmitter& t : it->second.transmitters) {
      if (t.node == node) return &t;
    }
    return nullptr;
  }

  const NodeSpec& node_or_throw(const std::string& id) const {
    const NodeSpec* n = topology.find_node(id);
    if (!n) throw UnknownNode(id);
    return *n;
  }

  void check_emit(const std::string& node, const std::string& event,
                  const std::optional<std::vector<std::uint8_t>>& payload) const {
    const NodeSpec& n = node_or_throw(node);
    if (n.role != Role::Monitor)
      throw RoleViolation("node '" + node + "' is a " + std::string(to_string(n.role)) + ", not a monitor");
    if (!registry.find(event)) throw UnboundEvent(event);
    if (payload && payload->size() > kMaxPayload) throw ContractViolation("emit: payload longer than 32 bytes");
  }

  void enqueue(Transmitter& tx, const Binding& binding, const std::optional<std::vector<std::uint8_t>>& payload) {
    const std::vector<Symbol> symbols =
        encode_transmission(binding.pattern, payload ? &*payload : nullptr, config.alphabet);
    for (Symbol s : symbols) tx.queue.emplace_back(s);
    tx.queue.emplace_back(std::nullopt);
  }

  void queue_emit(const std::string& node, const std::string& event,
                  const std::optional<std::vector<std::uint8_t>>& payload) {
    const NodeSpec& n = node_or_throw(node);
    enqueue(*transmitter_for(n.beam, node), *registry.find(event), payload);
  }

  const Waveform& received_tone(const BeamState& beam, const Transmitter& tx, const Receiver& rx, Symbol s) {
    const auto key = std::make_tuple(beam.spec->id, tx.position_mm, rx.position_mm, s.index);
    auto it = tone_cache.find(key);
    if (it != tone_cache.end()) return it->second;
    MediumSpec clean = beam.spec->medium;
    clean.noise_rms = 0.0;
    const Waveform tone = synthesize(vibration_send(s, config.alphabet, config.symbol_ms), config.sim_rate_hz);
    Waveform out = propagate(tone, clean, TapPoint{tx.position_mm}, TapPoint{rx.position_mm}, 0);
    return tone_cache.emplace(key, std::move(out)).first->second;
  }

  void step();
  void finish_burst(Receiver& rx, const std::string& owner);
};

void Controller::Impl::step() {
  const double t = now();
  const double eps = 1e-9 * std::max(1.0, t);

  // Release scheduled emissions in (time, call) order.
  std::stable_sort(pending.begin(), pending.end(), [](const PendingEmit& a, const PendingEmit& b) {
    return std::tie(a.at_ms, a.order) < std::tie(b.at_ms, b.order);
  });
  std::size_t released = 0;
  while (released < pending.size() && pending[released].at_ms <= t + eps) {
    queue_emit(pending[released].node, pending[released].event, pending[released].payload);
    ++released;
  }
  pending.erase(pending.begin(), pending.begin() + static_cast<std::ptrdiff_t>(released));

  for (auto& [beam_id, beam] : beams) {
    if (beam.transmitters.empty()) continue;

    // Who sends what this tick.
    std::vector<std::pair<const Transmitter*, Symbol>> active;
    for (Transmitter& tx : beam.transmitters) {
      if (tx.queue.empty()) continue;
      if (!(t + config.symbol_ms <= tx.window_end_ms + eps)) {
        const MacGrant grant = mac_grant(tx.node, t, beam.schedule);
        const auto* window = std::get_if<TransmitWindow>(&grant);
        if (!window) continue;
        tx.window_end_ms = window->end_ms;
        if (!(t + config.symbol_ms <= tx.window_end_ms + eps)) continue;
      }
      const QueueItem item = tx.queue.front();
      tx.queue.pop_front();
      if (item) {
        active.emplace_back(&tx, *item);
        ++stats.symbols_sent;
      }
    }

    const double noise = beam.spec->medium.noise_rms;
    const std::string owner = beam.schedule.slots[beam.schedule.owner_at(t)];
    for (Receiver& rx : beam.receivers) {
      ReceiveResult result = NoSignal{};
      if (!active.empty() || noise > 0.0) {
        const std::size_t n = static_cast<std::size_t>(std::llround(config.symbol_ms / 1000.0 * config.sim_rate_hz));
        const std::uint64_t seed = mix_seed(mix_seed(config.seed, tick), fnv1a64(rx.node));
        Waveform wave = channel_noise(n, config.sim_rate_hz, noise, seed);
        for (const auto& [tx, sym] : active) {
          const Waveform& tone = received_tone(beam, *tx, rx, sym);
          for (std::size_t i = 0; i < n && i < tone.size(); ++i) wave.samples[i] += tone.samples[i];
        }
        result = vibration_receive(sample(wave, config.adc), config.alphabet, config.detector);
      }

      std::vector<SymbolSlot>& burst = rx.bursts[owner];
      if (const auto* sym = std::get_if<Symbol>(&result)) {
        ++stats.symbols_decoded;
        burst.emplace_back(*sym);
        rx.last_end_ms[owner] = t + config.symbol_ms;
      } else if (std::holds_alternative<UnknownFrequency>(result)) {
        ++stats.unknown_frequency;
        burst.emplace_back(std::nullopt);
        rx.last_end_ms[owner] = t + config.symbol_ms;
      } else if (!burst.empty()) {
        finish_burst(rx, owner);
      }
    }
  }
  for (Forward& f : forwards) enqueue(*f.tx, *f.binding, f.payload);
  forwards.clear();
  ++tick;
}

void Controller::Impl::finish_burst(Receiver& rx, const std::string& owner) {
  std::vector<SymbolSlot> burst = std::move(rx.bursts[owner]);
  rx.bursts[owner].clear();
  const ParsedBurst parsed = parse_burst(burst, registry, config.alphabet);
  stats.unmatched_symbols += parsed.unmatched;
  if (parsed.frame_error) ++stats.frame_errors;
  if (!parsed.event) return;

  EventReport report{*parsed.event, rx.node, rx.last_end_ms[owner], parsed.frame, parsed.frame_error};
  if (rx.role == Role::Collector) {
    reports[rx.node].push_back(std::move(report));
    return;
  }

  // Relay: decode and forward onto the next beam.
  relay_logs[rx.node].push_back(report);
  const RelayLink* link = topology.relay_for(rx.node);
  const Binding* binding = registry.find(report.event.name);
  if (!link || !binding) return;
  std::optional<std::vector<std::uint8_t>> payload;
  if (report.payload) {
    payload = report.payload->payload;
    if (report.event.name == events::kHopProbe.name && !payload->empty() && (*payload)[0] < 0xFF) ++(*payload)[0];
  }
  forwards.push_back(Forward{transmitter_for(link->to_beam, rx.node), binding, std::move(payload)});
}

Controller::Controller(Topology topology, Registry registry, ControllerConfig config)
    : impl_(std::make_unique<Impl>()) {
  topology.validate();
  config.alphabet.validate();
  config.adc.validate();
  if (!(config.symbol_ms > 0.0)) throw ContractViolation("controller: symbol_ms must be positive");
  if (!(config.sim_rate_hz >= config.adc.sample_rate_hz)) throw ContractViolation("controller: sim rate below ADC rate");
  if (!(config.slot_ms >= config.symbol_ms)) throw ContractViolation("controller: slot shorter than a symbol");

  for (const NodeSpec& n : topology.nodes) registry = assign_role(registry, n.id, n.role);
  impl_->topology = std::move(topology);
  impl_->registry = std::move(registry);
  impl_->config = config;

  const Topology& topo = impl_->topology;
  for (const BeamSpec& b : topo.beams) {
    BeamState& state = impl_->beams[b.id];
    state.spec = &b;
    state.schedule.slot_ms = config.slot_ms;
  }
  for (const NodeSpec& n : topo.nodes) {
    BeamState& home = impl_->beams.at(n.beam);
    if (n.role == Role::Monitor) {
      home.transmitters.push_back(Transmitter{n.id, n.position_mm, {}, -1.0});
    } else {
      home.receivers.push_back(Receiver{n.id, n.position_mm, n.role, {}, {}});
    }
    if (n.role == Role::Relay) {
      const RelayLink* link = topo.relay_for(n.id);
      impl_->beams.at(link->to_beam).transmitters.push_back(Transmitter{n.id, link->to_position_mm, {}, -1.0});
    }
  }
  for (auto& [id, beam] : impl_->beams) {
    for (const Transmitter& tx : beam.transmitters) beam.schedule.slots.push_back(tx.node);
  }
}

Controller::~Controller() = default;
Controller::Controller(Controller&&) noexcept = default;
Controller& Controller::operator=(Controller&&) noexcept = default;

double Controller::now_ms() const noexcept { return impl_->now(); }
const Topology& Controller::topology() const noexcept { return impl_->topology; }
const Registry& Controller::registry() const noexcept { return impl_->registry; }
const ControllerConfig& Controller::config() const noexcept { return impl_->config; }
const ControllerStats& Controller::stats() const noexcept { return impl_->stats; }

const MacSchedule& Controller::schedule(const std::string& beam) const {
  const auto it = impl_->beams.find(beam);
  if (it == impl_->beams.end()) throw ContractViolation("unknown beam: " + beam);
  return it->second.schedule;
}

void Controller::bind_event(const EventKind& event, const SignalPattern& pattern) {
  impl_->registry = vdn::bind_event(impl_->registry, event, pattern);
}

void Controller::emit_event(const std::string& node, const std::string& event,
                            std::optional<std::vector<std::uint8_t>> payload) {
  impl_->check_emit(node, event, payload);
  impl_->queue_emit(node, event, payload);
}

void Controller::schedule_emit(const std::string& node, const std::string& event,
                               std::optional<std::vector<std::uint8_t>> payload, double at_ms) {
  impl_->check_emit(node, event, payload);
  if (!std::isfinite(at_ms)) throw ContractViolation("schedule_emit: time must be finite");
  impl_->pending.push_back(PendingEmit{at_ms, impl_->pending_order++, node, event, std::move(payload)});
}

void Controller::run_until(double t_ms) {
  while (impl_->now() < t_ms - 1e-9) impl_->step();
}

std::vector<EventReport> Controller::sense_events(const std::string& collector, double horizon_ms) {
  if (!(horizon_ms >= 0.0)) throw ContractViolation("sense_events: negative horizon");
  take_reports(collector);  // validates the role; drops nothing new
  run_until(now_ms() + horizon_ms);
  return take_reports(collector);
}

std::vector<EventReport> Controller::take_reports(const std::string& collector) {
  const NodeSpec& n = impl_->node_or_throw(collector);
  if (n.role != Role::Collector) throw RoleViolation("node '" + collector + "' is not a collector");
  std::vector<EventReport> out = std::move(impl_->reports[collector]);
  impl_->reports[collector].clear();
  return out;
}

std::vector<EventReport> Controller::take_all_reports() {
  std::vector<EventReport> out;
  for (auto& [node, list] : impl_->reports) {
    out.insert(out.end(), std::make_move_iterator(list.begin()), std::make_move_iterator(list.end()));
    list.clear();
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const EventReport& a, const EventReport& b) { return a.sim_time_ms < b.sim_time_ms; });
  return out;
}

const std::vector<EventReport>& Controller::relay_log(const std::string& relay) const {
  const NodeSpec& n = impl_->node_or_throw(relay);
  if (n.role != Role::Relay) throw RoleViolation("node '" + relay + "' is not a relay");
  static const std::vector<EventReport> empty;
  const auto it = impl_->relay_logs.find(relay);
  return it == impl_->relay_logs.end() ? empty : it->second;
}

}  // namespace vdn
