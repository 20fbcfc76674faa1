#pragma once

// Event/signal bindings of the VDN protocol: which symbol pattern announces
// which management event, which role each device plays, and how a received
// symbol burst is turned back into an event.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vdn/link.hpp"
#include "vdn/modem.hpp"

namespace vdn {

struct EventKind {
  std::string name;
  int id = 0;
  bool operator==(const EventKind&) const = default;
};

namespace events {
// Well-known kinds with fixed ids.
inline const EventKind kHopProbe{"hop-probe", 0};
inline const EventKind kHeavyHitter{"heavy-hitter", 1};
inline const EventKind kDdosAlert{"ddos-alert", 2};
inline const EventKind kHeartbeat{"heartbeat", 3};
}  // namespace events

struct SignalPattern {
  std::vector<Symbol> symbols;
  int repeat = 1;

  void validate() const;
  bool operator==(const SignalPattern&) const = default;
};

enum class Role { Monitor, Collector, Relay };

std::string_view to_string(Role role) noexcept;
std::optional<Role> parse_role(std::string_view text) noexcept;

struct Binding {
  EventKind event;
  SignalPattern pattern;
};

class Registry {
 public:
  // Sorted by event id.
  const std::vector<Binding>& bindings() const noexcept { return bindings_; }
  std::size_t size() const noexcept { return bindings_.size(); }

  const Binding* find(std::string_view event_name) const noexcept;
  const Binding* find(int event_id) const noexcept;
  int next_free_id() const noexcept;

  const std::map<std::string, Role>& roles() const noexcept { return roles_; }
  std::optional<Role> role(const std::string& node) const;

 private:
  friend Registry bind_event(const Registry&, const EventKind&, const SignalPattern&);
  friend Registry assign_role(const Registry&, const std::string&, Role);

  std::vector<Binding> bindings_;
  std::map<std::string, Role> roles_;
};

// Throws DuplicateEvent (name or id already bound) or AmbiguousPattern
// (pattern equal to, prefix of, or extension of a bound pattern).
Registry bind_event(const Registry& registry, const EventKind& event, const SignalPattern& pattern);

// Throws RoleViolation when the node already holds a different role.
Registry assign_role(const Registry& registry, const std::string& node, Role role);

// Well-known kinds keep their id; other names take the next free id.
EventKind event_kind_for(const Registry& registry, std::string_view name);

// hop-probe [8], heavy-hitter [9], ddos-alert [10], heartbeat [11]: the
// symbols the default 13-symbol alphabet keeps out of frame data.
Registry default_registry();

// Canonical pattern bytes: [count][repeat][symbol...], one byte each.
std::vector<std::uint8_t> serialize_pattern(const SignalPattern& pattern);
// Throws DecodeError on empty, truncated, or over-long input.
SignalPattern deserialize_pattern(std::span<const std::uint8_t> bytes);

// Registry bindings in id order: [u16 count] then per binding
// [u16 id][u8 name length][name][pattern bytes]. Roles are not serialised.
std::vector<std::uint8_t> serialize_registry(const Registry& registry);
Registry deserialize_registry(std::span<const std::uint8_t> bytes);

struct PatternMatch {
  EventKind event;
  std::size_t begin = 0;
  std::size_t end = 0;  // one past the last symbol
};

struct MatchResult {
  std::vector<PatternMatch> matches;
  std::size_t unmatched = 0;
};

// Left-to-right scan of a symbol stream. Relies on the registry being
// prefix-free, so at most one pattern can complete at any position.
MatchResult match_patterns(std::span<const Symbol> stream, const Registry& registry);

// Symbols of one transmission: pattern x repeat, then the frame if a payload
// is given. The silent guard slot is added by the sender.
std::vector<Symbol> encode_transmission(const SignalPattern& pattern,
                                        const std::vector<std::uint8_t>* payload,
                                        const Alphabet& alphabet);

struct ParsedBurst {
  std::optional<EventKind> event;
  std::optional<Frame> frame;
  bool frame_error = false;
  std::size_t unmatched = 0;
};

// One burst (symbols between two silent slots) -> at most one event.
ParsedBurst parse_burst(std::span<const SymbolSlot> burst, const Registry& registry,
                        const Alphabet& alphabet);

}  // namespace vdn
