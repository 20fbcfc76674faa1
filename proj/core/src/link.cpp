#include "vdn/link.hpp"

#include <algorithm>
#include <cmath>

#include "vdn/error.hpp"

namespace vdn {

std::uint8_t crc8(std::span<const std::uint8_t> bytes) noexcept {
  std::uint8_t crc = 0;
  for (std::uint8_t byte : bytes) {
    crc ^= byte;
    for (int bit = 0; bit < 8; ++bit) {
      crc = (crc & 0x80U) ? static_cast<std::uint8_t>((crc << 1) ^ 0x07U)
                          : static_cast<std::uint8_t>(crc << 1);
    }
  }
  return crc;
}

int bits_per_symbol(const Alphabet& alphabet) {
  if (alphabet.size >= 16) return 4;
  if (alphabet.size >= 9) return 3;
  throw ContractViolation("framing needs an alphabet of at least 9 symbols");
}

std::vector<Symbol> frame_preamble(const Alphabet& alphabet) {
  bits_per_symbol(alphabet);
  const int top = alphabet.size - 1;
  return {Symbol{top}, Symbol{0}, Symbol{top}};
}

namespace {

int symbols_for_bits(std::size_t bits, int b) {
  return static_cast<int>((bits + static_cast<std::size_t>(b) - 1) / static_cast<std::size_t>(b));
}

// Appends the bits of `bytes` MSB first, b bits per symbol, zero padded.
void pack(std::span<const std::uint8_t> bytes, int b, std::vector<Symbol>& out) {
  std::uint32_t acc = 0;
  int held = 0;
  for (std::uint8_t byte : bytes) {
    acc = (acc << 8) | byte;
    held += 8;
    while (held >= b) {
      held -= b;
      out.push_back(Symbol{static_cast<int>((acc >> held) & ((1U << b) - 1U))});
    }
    acc &= (1U << held) - 1U;
  }
  if (held > 0) out.push_back(Symbol{static_cast<int>((acc << (b - held)) & ((1U << b) - 1U))});
}

// Reads `count` bytes packed as above. Returns a reason on failure.
std::optional<std::string> unpack(std::span<const SymbolSlot> syms, std::size_t& pos,
                                  std::size_t count, int b, std::vector<std::uint8_t>& out) {
  const int n = symbols_for_bits(count * 8, b);
  if (syms.size() - pos < static_cast<std::size_t>(n)) return "truncated frame";
  std::uint32_t acc = 0;
  int held = 0;
  for (int i = 0; i < n; ++i) {
    const SymbolSlot& slot = syms[pos + static_cast<std::size_t>(i)];
    if (!slot) return "erased symbol";
    if (slot->index < 0 || slot->index >= (1 << b)) return "invalid data symbol";
    acc = (acc << b) | static_cast<std::uint32_t>(slot->index);
    held += b;
    if (held >= 8 && out.size() < count) {
      held -= 8;
      out.push_back(static_cast<std::uint8_t>((acc >> held) & 0xFFU));
      acc &= (1U << held) - 1U;
    }
  }
  if (acc != 0) return "non-zero pad bits";
  pos += static_cast<std::size_t>(n);
  return std::nullopt;
}

}  // namespace

std::vector<Symbol> frame_encode(std::span<const std::uint8_t> payload, const Alphabet& alphabet) {
  if (payload.size() > kMaxPayload) throw ContractViolation("frame_encode: payload longer than 32 bytes");
  const int b = bits_per_symbol(alphabet);
  std::vector<std::uint8_t> covered;
  covered.reserve(payload.size() + 1);
  covered.push_back(static_cast<std::uint8_t>(payload.size()));
  covered.insert(covered.end(), payload.begin(), payload.end());
  const std::uint8_t crc = crc8(covered);

  std::vector<Symbol> out = frame_preamble(alphabet);
  pack(std::span<const std::uint8_t>(covered).first(1), b, out);
  pack(payload, b, out);
  pack(std::span<const std::uint8_t>(&crc, 1), b, out);
  return out;
}

FrameResult frame_decode(std::span<const SymbolSlot> syms, const Alphabet& alphabet) {
  const int b = bits_per_symbol(alphabet);
  const std::vector<Symbol> preamble = frame_preamble(alphabet);

  std::size_t pos = syms.size();
  for (std::size_t i = 0; i + preamble.size() <= syms.size(); ++i) {
    bool hit = true;
    for (std::size_t j = 0; j < preamble.size() && hit; ++j) {
      hit = syms[i + j].has_value() && *syms[i + j] == preamble[j];
    }
    if (hit) {
      pos = i + preamble.size();
      break;
    }
  }
  if (pos == syms.size()) return FramingError{"no preamble"};

  std::vector<std::uint8_t> length;
  if (auto err = unpack(syms, pos, 1, b, length)) return FramingError{*err};
  if (length[0] > kMaxPayload) return FramingError{"length field above 32"};

  std::vector<std::uint8_t> payload;
  if (auto err = unpack(syms, pos, length[0], b, payload)) return FramingError{*err};
  std::vector<std::uint8_t> crc;
  if (auto err = unpack(syms, pos, 1, b, crc)) return FramingError{*err};
  if (pos != syms.size()) return FramingError{"trailing symbols after frame"};

  std::vector<std::uint8_t> covered = length;
  covered.insert(covered.end(), payload.begin(), payload.end());
  const std::uint8_t computed = crc8(covered);
  if (computed != crc[0]) return ChecksumError{std::move(payload), crc[0], computed};
  return Frame{std::move(payload), computed};
}

FrameResult frame_decode(std::span<const Symbol> symbols, const Alphabet& alphabet) {
  std::vector<SymbolSlot> slots(symbols.begin(), symbols.end());
  return frame_decode(std::span<const SymbolSlot>(slots), alphabet);
}

std::size_t MacSchedule::owner_at(double now_ms) const {
  validate();
  if (now_ms < 0.0) throw ContractViolation("mac: negative time");
  const double in_cycle = std::fmod(now_ms, cycle_ms());
  const auto slot = static_cast<std::size_t>(std::floor(in_cycle / slot_ms));
  return std::min(slot, slots.size() - 1);
}

void MacSchedule::validate() const {
  if (!(slot_ms > 0.0)) throw ContractViolation("mac: slot length must be positive");
  if (slots.empty()) throw ContractViolation("mac: schedule has no slots");
}

MacGrant mac_grant(const std::string& node, double now_ms, const MacSchedule& schedule) {
  schedule.validate();
  if (!(now_ms >= 0.0)) throw ContractViolation("mac: negative time");
  const auto it = std::find(schedule.slots.begin(), schedule.slots.end(), node);
  if (it == schedule.slots.end()) throw ContractViolation("mac: node has no slot on this beam");
  const double offset = schedule.slot_ms * static_cast<double>(it - schedule.slots.begin());
  const double cycle = schedule.cycle_ms();

  const double cycles = std::floor((now_ms - offset) / cycle);
  double start = offset + cycles * cycle;
  // Tolerate float drift from tick accumulation.
  const double eps = 1e-9 * std::max(1.0, now_ms);
  if (std::abs(now_ms - start) <= eps) return TransmitWindow{now_ms, now_ms + schedule.slot_ms};
  if (start < now_ms) start += cycle;
  if (std::abs(now_ms - start) <= eps) return TransmitWindow{now_ms, now_ms + schedule.slot_ms};
  return DeferUntil{start};
}

}  // namespace vdn
