#include <gtest/gtest.h>

#include <fstream>

#include "vdn/error.hpp"
#include "vdn/topology.hpp"

using namespace vdn;

namespace {

const char* kTwoBeam = R"({
  "beams": [
    {"id": "b1", "length_mm": 620, "boundary": "supported", "noise_rms": 0.05},
    {"id": "b2", "length_mm": 500, "boundary": "clamped", "noise_rms": 0.0, "harmonic_leak": 0.2}
  ],
  "nodes": [
    {"id": "m", "role": "monitor", "beam": "b1", "position_mm": 0},
    {"id": "r", "role": "relay", "beam": "b1", "position_mm": 550},
    {"id": "c", "role": "collector", "beam": "b2", "position_mm": 450}
  ],
  "relays": [{"from_beam": "b1", "to_beam": "b2", "node": "r", "to_position_mm": 10}]
})";

std::string with(std::string text, const std::string& from, const std::string& to) {
  text.replace(text.find(from), from.size(), to);
  return text;
}

}  // namespace

TEST(Topology, ParsesTheFileFormat) {
  const Topology t = parse_topology(kTwoBeam);
  ASSERT_EQ(t.beams.size(), 2u);
  EXPECT_EQ(t.find_beam("b2")->medium.boundary, BoundaryCondition::ClampedAtEnds);
  EXPECT_EQ(t.find_beam("b2")->medium.length_mm, 500.0);
  EXPECT_EQ(t.find_beam("b2")->medium.harmonic_leak, 0.2);
  EXPECT_EQ(t.find_node("c")->role, Role::Collector);
  EXPECT_EQ(t.relay_for("r")->to_position_mm, 10.0);
  EXPECT_EQ(t.relay_for("m"), nullptr);
}

TEST(Topology, JsonRoundTrip) {
  const Topology t = parse_topology(kTwoBeam);
  const Topology back = parse_topology(topology_to_json(t));
  EXPECT_EQ(topology_to_json(back), topology_to_json(t));
}

TEST(Topology, RejectsBrokenReferences) {
  EXPECT_THROW(parse_topology(with(kTwoBeam, R"("beam": "b2")", R"("beam": "b9")")), ConfigError);
  EXPECT_THROW(parse_topology(with(kTwoBeam, R"("position_mm": 450)", R"("position_mm": 501)")), ConfigError);
  EXPECT_THROW(parse_topology(with(kTwoBeam, R"("id": "c")", R"("id": "m")")), ConfigError);
  EXPECT_THROW(parse_topology(with(kTwoBeam, R"("role": "relay")", R"("role": "monitor")")), ConfigError);
  EXPECT_THROW(parse_topology(with(kTwoBeam, R"("boundary": "clamped")", R"("boundary": "glued")")), ConfigError);
  EXPECT_THROW(parse_topology(with(kTwoBeam, R"("noise_rms": 0.0,)", "")), ConfigError);
  EXPECT_THROW(parse_topology("{"), ConfigError);
  EXPECT_THROW(parse_topology("[]"), ConfigError);
}

TEST(Topology, RejectsCyclicRelayChains) {
  Topology t = chain_topology(3, 0.0);
  t.nodes.push_back({"back", Role::Relay, "beam-3", 100.0});
  t.relays.push_back({"beam-3", "beam-1", "back", 0.0});
  EXPECT_THROW(t.validate(), ConfigError);
}

TEST(Topology, RelayMustTapItsSourceBeam) {
  Topology t = two_beam_topology(0.0);
  t.relays[0].from_beam = "beam-2";
  EXPECT_THROW(t.validate(), ConfigError);
}

TEST(Topology, LoadReportsMissingFiles) {
  EXPECT_THROW(load_topology("/nonexistent/topology.json"), IoError);
  const std::string path = ::testing::TempDir() + "/topo_test.json";
  std::ofstream(path) << kTwoBeam;
  EXPECT_EQ(load_topology(path).nodes.size(), 3u);
}

TEST(Topology, Builders) {
  const Topology two = two_beam_topology();
  EXPECT_EQ(two.nodes.size(), 3u);
  EXPECT_EQ(two.find_beam("beam-1")->medium.noise_rms, kDefaultNoiseRms);

  for (int n = 1; n <= 5; ++n) {
    const Topology c = chain_topology(n, 0.0);
    EXPECT_EQ(c.beams.size(), static_cast<std::size_t>(n));
    EXPECT_EQ(c.relays.size(), static_cast<std::size_t>(n - 1));
    EXPECT_EQ(c.find_node("collector")->beam, "beam-" + std::to_string(n));
  }
  EXPECT_THROW(chain_topology(0), ContractViolation);
}
