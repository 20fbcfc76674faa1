#include "vdn/registry.hpp"

#include <algorithm>

#include "vdn/error.hpp"

namespace vdn {

void SignalPattern::validate() const {
  if (symbols.empty()) throw ContractViolation("pattern: no symbols");
  if (symbols.size() > 255) throw ContractViolation("pattern: more than 255 symbols");
  if (repeat < 1 || repeat > 255) throw ContractViolation("pattern: repeat must be in 1..255");
  for (Symbol s : symbols) {
    if (s.index < 0 || s.index > 255) throw ContractViolation("pattern: symbol index out of range");
  }
}

std::string_view to_string(Role role) noexcept {
  switch (role) {
    case Role::Monitor: return "monitor";
    case Role::Collector: return "collector";
    case Role::Relay: return "relay";
  }
  return "monitor";
}

std::optional<Role> parse_role(std::string_view text) noexcept {
  if (text == "monitor") return Role::Monitor;
  if (text == "collector") return Role::Collector;
  if (text == "relay") return Role::Relay;
  return std::nullopt;
}

const Binding* Registry::find(std::string_view event_name) const noexcept {
  for (const Binding& b : bindings_) {
    if (b.event.name == event_name) return &b;
  }
  return nullptr;
}

const Binding* Registry::find(int event_id) const noexcept {
  for (const Binding& b : bindings_) {
    if (b.event.id == event_id) return &b;
  }
  return nullptr;
}

int Registry::next_free_id() const noexcept {
  int id = events::kHeartbeat.id + 1;
  for (const Binding& b : bindings_) id = std::max(id, b.event.id + 1);
  return id;
}

std::optional<Role> Registry::role(const std::string& node) const {
  const auto it = roles_.find(node);
  if (it == roles_.end()) return std::nullopt;
  return it->second;
}

namespace {

bool is_prefix(const std::vector<Symbol>& a, const std::vector<Symbol>& b) {
  return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

}  // namespace

Registry bind_event(const Registry& registry, const EventKind& event, const SignalPattern& pattern) {
  pattern.validate();
  if (event.name.empty()) throw ContractViolation("bind_event: empty event name");
  if (event.id < 0) throw ContractViolation("bind_event: negative event id");
  for (const Binding& b : registry.bindings_) {
    if (b.event.name == event.name || b.event.id == event.id) throw DuplicateEvent(event.name);
  }
  for (const Binding& b : registry.bindings_) {
    if (is_prefix(b.pattern.symbols, pattern.symbols) || is_prefix(pattern.symbols, b.pattern.symbols))
      throw AmbiguousPattern(event.name);
  }
  Registry next = registry;
  const auto at = std::upper_bound(next.bindings_.begin(), next.bindings_.end(), event.id,
                                   [](int id, const Binding& b) { return id < b.event.id; });
  next.bindings_.insert(at, Binding{event, pattern});
  return next;
}

Registry assign_role(const Registry& registry, const std::string& node, Role role) {
  if (node.empty()) throw ContractViolation("assign_role: empty node id");
  const auto it = registry.roles_.find(node);
  if (it != registry.roles_.end()) {
    if (it->second == role) return registry;
    throw RoleViolation("node '" + node + "' is already a " + std::string(to_string(it->second)));
  }
  Registry next = registry;
  next.roles_.emplace(node, role);
  return next;
}

EventKind event_kind_for(const Registry& registry, std::string_view name) {
  if (const Binding* b = registry.find(name)) return b->event;
  for (const EventKind* known :
       {&events::kHopProbe, &events::kHeavyHitter, &events::kDdosAlert, &events::kHeartbeat}) {
    if (known->name == name) return *known;
  }
  return EventKind{std::string(name), registry.next_free_id()};
}

Registry default_registry() {
  Registry reg;
  reg = bind_event(reg, events::kHopProbe, SignalPattern{{Symbol{8}}, 1});
  reg = bind_event(reg, events::kHeavyHitter, SignalPattern{{Symbol{9}}, 1});
  reg = bind_event(reg, events::kDdosAlert, SignalPattern{{Symbol{10}}, 1});
  reg = bind_event(reg, events::kHeartbeat, SignalPattern{{Symbol{11}}, 1});
  return reg;
}

std::vector<std::uint8_t> serialize_pattern(const SignalPattern& pattern) {
  pattern.validate();
  std::vector<std::uint8_t> out;
  out.reserve(pattern.symbols.size() + 2);
  out.push_back(static_cast<std::uint8_t>(pattern.symbols.size()));
  out.push_back(static_cast<std::uint8_t>(pattern.repeat));
  for (Symbol s : pattern.symbols) out.push_back(static_cast<std::uint8_t>(s.index));
  return out;
}

namespace {

// Parses one pattern starting at pos; advances pos past it.
SignalPattern read_pattern(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  if (bytes.size() - pos < 2) throw DecodeError("pattern: truncated header");
  const std::size_t count = bytes[pos];
  const int repeat = bytes[pos + 1];
  if (count == 0) throw DecodeError("pattern: empty symbol list");
  if (repeat == 0) throw DecodeError("pattern: zero repeat");
  if (bytes.size() - pos - 2 < count) throw DecodeError("pattern: truncated symbol list");
  SignalPattern pattern;
  pattern.repeat = repeat;
  for (std::size_t i = 0; i < count; ++i) pattern.symbols.push_back(Symbol{bytes[pos + 2 + i]});
  pos += 2 + count;
  return pattern;
}

void put_u16(std::vector<std::uint8_t>& out, unsigned v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v & 0xFFU));
}

unsigned get_u16(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  if (bytes.size() - pos < 2) throw DecodeError("registry: truncated");
  const unsigned v = (static_cast<unsigned>(bytes[pos]) << 8) | bytes[pos + 1];
  pos += 2;
  return v;
}

}  // namespace

SignalPattern deserialize_pattern(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  SignalPattern pattern = read_pattern(bytes, pos);
  if (pos != bytes.size()) throw DecodeError("pattern: trailing bytes");
  return pattern;
}

std::vector<std::uint8_t> serialize_registry(const Registry& registry) {
  std::vector<std::uint8_t> out;
  put_u16(out, static_cast<unsigned>(registry.size()));
  for (const Binding& b : registry.bindings()) {
    if (b.event.id > 0xFFFF) throw ContractViolation("serialize_registry: event id above 65535");
    if (b.event.name.size() > 255) throw ContractViolation("serialize_registry: event name too long");
    put_u16(out, static_cast<unsigned>(b.event.id));
    out.push_back(static_cast<std::uint8_t>(b.event.name.size()));
    out.insert(out.end(), b.event.name.begin(), b.event.name.end());
    const auto pattern = serialize_pattern(b.pattern);
    out.insert(out.end(), pattern.begin(), pattern.end());
  }
  return out;
}

Registry deserialize_registry(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  const unsigned count = get_u16(bytes, pos);
  Registry reg;
  int last_id = -1;
  for (unsigned i = 0; i < count; ++i) {
    const int id = static_cast<int>(get_u16(bytes, pos));
    if (id <= last_id) throw DecodeError("registry: bindings not in id order");
    last_id = id;
    if (pos >= bytes.size()) throw DecodeError("registry: truncated name");
    const std::size_t len = bytes[pos++];
    if (len == 0 || bytes.size() - pos < len) throw DecodeError("registry: bad name length");
    std::string name(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                     bytes.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
    SignalPattern pattern = read_pattern(bytes, pos);
    try {
      reg = bind_event(reg, EventKind{std::move(name), id}, pattern);
    } catch (const Error& e) {
      throw DecodeError(std::string("registry: ") + e.what());
    }
  }
  if (pos != bytes.size()) throw DecodeError("registry: trailing bytes");
  return reg;
}

namespace {

template <class Get>
const Binding* match_at(std::size_t pos, std::size_t n, Get get, const Registry& registry) {
  for (const Binding& b : registry.bindings()) {
    const auto& syms = b.pattern.symbols;
    if (n - pos < syms.size()) continue;
    bool hit = true;
    for (std::size_t j = 0; j < syms.size() && hit; ++j) {
      const std::optional<Symbol> s = get(pos + j);
      hit = s.has_value() && *s == syms[j];
    }
    if (hit) return &b;
  }
  return nullptr;
}

}  // namespace

MatchResult match_patterns(std::span<const Symbol> stream, const Registry& registry) {
  MatchResult result;
  const auto get = [&](std::size_t i) -> std::optional<Symbol> { return stream[i]; };
  std::size_t pos = 0;
  while (pos < stream.size()) {
    if (const Binding* b = match_at(pos, stream.size(), get, registry)) {
      const std::size_t end = pos + b->pattern.symbols.size();
      result.matches.push_back(PatternMatch{b->event, pos, end});
      pos = end;
    } else {
      ++result.unmatched;
      ++pos;
    }
  }
  return result;
}

std::vector<Symbol> encode_transmission(const SignalPattern& pattern,
                                        const std::vector<std::uint8_t>* payload,
                                        const Alphabet& alphabet) {
  pattern.validate();
  for (Symbol s : pattern.symbols) {
    if (!alphabet.contains(s.index)) throw ContractViolation("pattern symbol outside the alphabet");
  }
  std::vector<Symbol> out;
  for (int r = 0; r < pattern.repeat; ++r) out.insert(out.end(), pattern.symbols.begin(), pattern.symbols.end());
  if (payload) {
    const auto frame = frame_encode(*payload, alphabet);
    out.insert(out.end(), frame.begin(), frame.end());
  }
  return out;
}

ParsedBurst parse_burst(std::span<const SymbolSlot> burst, const Registry& registry,
                        const Alphabet& alphabet) {
  ParsedBurst parsed;
  const auto get = [&](std::size_t i) { return burst[i]; };
  std::size_t pos = 0;
  const Binding* hit = nullptr;
  while (pos < burst.size() && !(hit = match_at(pos, burst.size(), get, registry))) {
    ++parsed.unmatched;
    ++pos;
  }
  if (!hit) return parsed;

  parsed.event = hit->event;
  const std::size_t len = hit->pattern.symbols.size();
  pos += len;
  for (int r = 1; r < hit->pattern.repeat; ++r) {
    if (match_at(pos, burst.size(), get, registry) != hit) break;
    pos += len;
  }
  if (pos == burst.size()) return parsed;

  FrameResult frame = frame_decode(burst.subspan(pos), alphabet);
  if (auto* f = std::get_if<Frame>(&frame)) {
    parsed.frame = std::move(*f);
  } else {
    parsed.frame_error = true;
  }
  return parsed;
}

}  // namespace vdn
