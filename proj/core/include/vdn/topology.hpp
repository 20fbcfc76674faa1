#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "vdn/medium.hpp"
#include "vdn/registry.hpp"

namespace vdn {

struct NodeSpec {
  std::string id;
  Role role = Role::Monitor;
  std::string beam;
  double position_mm = 0.0;
};

struct BeamSpec {
  std::string id;
  MediumSpec medium;
};

// A relay node listens on from_beam at its own tap and re-emits into to_beam
// at to_position_mm.
struct RelayLink {
  std::string from_beam;
  std::string to_beam;
  std::string node;
  double to_position_mm = 0.0;
};

struct Topology {
  std::vector<NodeSpec> nodes;
  std::vector<BeamSpec> beams;
  std::vector<RelayLink> relays;

  const NodeSpec* find_node(std::string_view id) const noexcept;
  const BeamSpec* find_beam(std::string_view id) const noexcept;
  const RelayLink* relay_for(std::string_view node) const noexcept;

  // Throws ConfigError: dangling references, taps off the beam, duplicate
  // ids, relay nodes without a link, or cyclic relay chains.
  void validate() const;
};

// JSON text with keys nodes[{id, role, beam, position_mm}],
// beams[{id, length_mm, boundary, noise_rms}], relays[{from_beam, to_beam,
// node}]. Beams may also carry width_mm, thickness_mm, harmonic_leak;
// relays may carry to_position_mm. Throws ConfigError.
Topology parse_topology(std::string_view json_text);
Topology load_topology(const std::string& path);
std::string topology_to_json(const Topology& topology);

// Monitor at 0 mm -> relay at 550 mm of beam-1, re-emitting at 0 mm of
// beam-2 -> collector at 550 mm. The two-beam multi-hop apparatus.
Topology two_beam_topology(double noise_rms = kDefaultNoiseRms);

// Monitor on the first beam, one relay per junction, collector on the last.
// beams >= 1. Node ids: "origin", "relay-1".., "collector".
Topology chain_topology(int beams, double noise_rms = kDefaultNoiseRms);

}  // namespace vdn
