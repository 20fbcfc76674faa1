#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "vdn/error.hpp"
#include "vdn/link.hpp"

using namespace vdn;

namespace {

std::vector<std::uint8_t> random_bytes(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> byte(0, 255);
  std::vector<std::uint8_t> out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(byte(rng));
  return out;
}

bool is_frame(const FrameResult& r, const std::vector<std::uint8_t>& payload) {
  const auto* f = std::get_if<Frame>(&r);
  return f && f->payload == payload;
}

}  // namespace

TEST(Crc8, KnownVectors) {
  const std::string check = "123456789";
  EXPECT_EQ(crc8(std::vector<std::uint8_t>(check.begin(), check.end())), 0xF4);
  EXPECT_EQ(crc8(std::vector<std::uint8_t>{0x00}), 0x00);
  EXPECT_EQ(crc8({}), 0x00);
}

TEST(Crc8, MatchesBitwiseOracle) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 500; ++i) {
    const auto bytes = random_bytes(rng, static_cast<std::size_t>(i % 40));
    EXPECT_EQ(crc8(bytes), oracle::crc8_bitwise(bytes));
  }
}

TEST(Frame, BitsPerSymbolDependsOnAlphabetSize) {
  EXPECT_EQ(bits_per_symbol(Alphabet{}), 3);
  EXPECT_EQ(bits_per_symbol(Alphabet{1750.0, 150.0, 16}), 4);
  EXPECT_THROW(bits_per_symbol(Alphabet{2000.0, 250.0, 8}), ContractViolation);
}

TEST(Frame, EmptyPayloadLayout) {
  const auto syms = frame_encode({}, Alphabet{});
  // preamble 12,0,12 | length 0x00 -> 000 000 00(0) | crc 0x00 likewise
  const std::vector<Symbol> expect{{12}, {0}, {12}, {0}, {0}, {0}, {0}, {0}, {0}};
  EXPECT_EQ(syms, expect);
  EXPECT_TRUE(is_frame(frame_decode(syms, Alphabet{}), {}));
}

TEST(Frame, BitsArePackedMsbFirst) {
  const std::vector<std::uint8_t> payload{0xA5};  // 101 001 01(0)
  const auto syms = frame_encode(payload, Alphabet{});
  ASSERT_EQ(syms.size(), 12u);
  EXPECT_EQ(syms[6].index, 5);
  EXPECT_EQ(syms[7].index, 1);
  EXPECT_EQ(syms[8].index, 2);
  for (std::size_t i = 3; i < syms.size(); ++i) EXPECT_LT(syms[i].index, 8);
}

TEST(Frame, RoundTripsRandomPayloadsInBothModes) {
  std::mt19937_64 rng(2);
  for (const Alphabet& a : {Alphabet{}, Alphabet{1750.0, 150.0, 16}, Alphabet{1750.0, 150.0, 20}}) {
    for (int i = 0; i < 300; ++i) {
      const auto p = random_bytes(rng, static_cast<std::size_t>(i % 33));
      EXPECT_TRUE(is_frame(frame_decode(frame_encode(p, a), a), p));
    }
  }
}

TEST(Frame, RejectsOversizePayload) {
  EXPECT_THROW(frame_encode(std::vector<std::uint8_t>(33), Alphabet{}), ContractViolation);
}

TEST(Frame, NoPreambleIsAFramingError) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> sym(0, 11);
  for (int i = 0; i < 100; ++i) {
    std::vector<Symbol> noise(40);
    for (auto& s : noise) s.index = sym(rng);
    EXPECT_TRUE(std::holds_alternative<FramingError>(frame_decode(noise, Alphabet{})));
  }
}

TEST(Frame, TruncationAndTrailingSymbolsAreFramingErrors) {
  const std::vector<std::uint8_t> p{1, 2, 3};
  auto syms = frame_encode(p, Alphabet{});
  auto cut = syms;
  cut.pop_back();
  EXPECT_TRUE(std::holds_alternative<FramingError>(frame_decode(cut, Alphabet{})));
  auto longer = syms;
  longer.push_back(Symbol{0});
  EXPECT_TRUE(std::holds_alternative<FramingError>(frame_decode(longer, Alphabet{})));
}

TEST(Frame, LeadingJunkBeforeThePreambleIsSkipped) {
  const std::vector<std::uint8_t> p{9, 8};
  auto syms = frame_encode(p, Alphabet{});
  syms.insert(syms.begin(), {Symbol{3}, Symbol{9}});
  EXPECT_TRUE(is_frame(frame_decode(syms, Alphabet{}), p));
}

TEST(Frame, ErasureIsAFramingError) {
  const auto syms = frame_encode(std::vector<std::uint8_t>{7}, Alphabet{});
  std::vector<SymbolSlot> slots(syms.begin(), syms.end());
  slots[7] = std::nullopt;
  EXPECT_TRUE(std::holds_alternative<FramingError>(frame_decode(slots, Alphabet{})));
}

TEST(Frame, ChecksumErrorCarriesThePayload) {
  const std::vector<std::uint8_t> p{0x10, 0x20};
  auto syms = frame_encode(p, Alphabet{});
  syms.back().index ^= 2;  // bit 0 of the last symbol is padding
  const FrameResult r = frame_decode(syms, Alphabet{});
  ASSERT_TRUE(std::holds_alternative<ChecksumError>(r));
  EXPECT_EQ(std::get<ChecksumError>(r).payload, p);
  EXPECT_NE(std::get<ChecksumError>(r).received, std::get<ChecksumError>(r).computed);
}

TEST(Frame, EverySingleSymbolCorruptionIsDetected) {
  const Alphabet a;
  std::mt19937_64 rng(4);
  for (std::size_t len = 0; len <= 2; ++len) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto p = random_bytes(rng, len);
      const auto syms = frame_encode(p, a);
      std::vector<SymbolSlot> base(syms.begin(), syms.end());
      for (std::size_t pos = 0; pos < base.size(); ++pos) {
        for (int v = -1; v < a.size; ++v) {
          auto bad = base;
          if (v < 0) bad[pos] = std::nullopt;
          else if (v == base[pos]->index) continue;
          else bad[pos] = Symbol{v};
          EXPECT_FALSE(std::holds_alternative<Frame>(frame_decode(bad, a))) << "len " << len << " pos " << pos;
        }
      }
    }
  }
}

TEST(Mac, SpecExamples) {
  const MacSchedule s{500.0, {"A", "B"}};
  EXPECT_EQ(mac_grant("A", 0.0, s), (MacGrant{TransmitWindow{0.0, 500.0}}));
  EXPECT_EQ(mac_grant("B", 0.0, s), (MacGrant{DeferUntil{500.0}}));
  EXPECT_EQ(mac_grant("A", 1200.0, s), (MacGrant{DeferUntil{2000.0}}));
  EXPECT_EQ(mac_grant("B", 500.0, s), (MacGrant{TransmitWindow{500.0, 1000.0}}));
  EXPECT_EQ(mac_grant("B", 1600.0, s), (MacGrant{DeferUntil{2500.0}}));
}

TEST(Mac, WindowsNeverOverlapAcrossNodes) {
  const MacSchedule s{250.0, {"A", "B", "C"}};
  for (double t = 0.0; t < 5000.0; t += 50.0) {
    int granted = 0;
    for (const char* node : {"A", "B", "C"}) {
      const MacGrant g = mac_grant(node, t, s);
      if (const auto* w = std::get_if<TransmitWindow>(&g)) {
        ++granted;
        EXPECT_EQ(s.slots[s.owner_at(t)], node);
        EXPECT_DOUBLE_EQ(w->end_ms - w->start_ms, 250.0);
      } else {
        EXPECT_GT(std::get<DeferUntil>(g).time_ms, t);
      }
    }
    EXPECT_LE(granted, 1);
  }
}

TEST(Mac, RejectsUnknownNodesAndEmptySchedules) {
  EXPECT_THROW(mac_grant("Z", 0.0, MacSchedule{500.0, {"A"}}), ContractViolation);
  EXPECT_THROW(mac_grant("A", 0.0, MacSchedule{500.0, {}}), ContractViolation);
  EXPECT_THROW(mac_grant("A", -1.0, MacSchedule{500.0, {"A"}}), ContractViolation);
}
