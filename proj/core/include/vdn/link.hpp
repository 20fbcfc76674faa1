#pragma once

// Framing of byte payloads onto symbol sequences, and slot-aligned TDMA.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vdn/modem.hpp"

namespace vdn {

inline constexpr std::size_t kMaxPayload = 32;

// CRC-8, polynomial 0x07, init 0x00, no reflection, no final xor.
std::uint8_t crc8(std::span<const std::uint8_t> bytes) noexcept;

struct Frame {
  std::vector<std::uint8_t> payload;
  std::uint8_t checksum = 0;

  bool operator==(const Frame&) const = default;
};

struct FramingError {
  std::string reason;
};

struct ChecksumError {
  std::vector<std::uint8_t> payload;
  std::uint8_t received = 0;
  std::uint8_t computed = 0;
};

using FrameResult = std::variant<Frame, FramingError, ChecksumError>;

// nullopt marks an erased slot (unknown frequency).
using SymbolSlot = std::optional<Symbol>;

// 4 for alphabets of 16+ symbols, 3 for 9..15. Throws ContractViolation for
// smaller alphabets, which cannot keep the preamble symbol out of the data.
int bits_per_symbol(const Alphabet& alphabet);

std::vector<Symbol> frame_preamble(const Alphabet& alphabet);

// preamble || length || payload bits || CRC, fields MSB first, zero padded.
std::vector<Symbol> frame_encode(std::span<const std::uint8_t> payload, const Alphabet& alphabet);

// Decodes the first frame found; the frame must end the sequence.
FrameResult frame_decode(std::span<const SymbolSlot> symbols, const Alphabet& alphabet);
FrameResult frame_decode(std::span<const Symbol> symbols, const Alphabet& alphabet);

struct MacSchedule {
  double slot_ms = 500.0;
  std::vector<std::string> slots;

  double cycle_ms() const noexcept { return slot_ms * static_cast<double>(slots.size()); }
  // Index of the slot owner at time t (t >= 0).
  std::size_t owner_at(double now_ms) const;
  void validate() const;
};

struct TransmitWindow {
  double start_ms = 0.0;
  double end_ms = 0.0;
  bool operator==(const TransmitWindow&) const = default;
};

struct DeferUntil {
  double time_ms = 0.0;
  bool operator==(const DeferUntil&) const = default;
};

using MacGrant = std::variant<TransmitWindow, DeferUntil>;

// Windows are granted only at the start of the node's own slot; any other
// instant defers to the next start of that slot.
MacGrant mac_grant(const std::string& node, double now_ms, const MacSchedule& schedule);

}  // namespace vdn
