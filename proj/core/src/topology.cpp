#include "vdn/topology.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "vdn/error.hpp"

namespace vdn {

using nlohmann::json;

const NodeSpec* Topology::find_node(std::string_view id) const noexcept {
  for (const NodeSpec& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

const BeamSpec* Topology::find_beam(std::string_view id) const noexcept {
  for (const BeamSpec& b : beams) {
    if (b.id == id) return &b;
  }
  return nullptr;
}

const RelayLink* Topology::relay_for(std::string_view node) const noexcept {
  for (const RelayLink& r : relays) {
    if (r.node == node) return &r;
  }
  return nullptr;
}

namespace {

bool on_beam(double position_mm, const BeamSpec& beam) {
  return position_mm >= 0.0 && position_mm <= beam.medium.length_mm;
}

}  // namespace

void Topology::validate() const {
  std::set<std::string> beam_ids;
  for (const BeamSpec& b : beams) {
    if (b.id.empty()) throw ConfigError("beam with empty id");
    if (!beam_ids.insert(b.id).second) throw ConfigError("duplicate beam id: " + b.id);
    try {
      b.medium.validate();
    } catch (const ContractViolation& e) {
      throw ConfigError("beam " + b.id + ": " + e.what());
    }
  }

  std::set<std::string> node_ids;
  for (const NodeSpec& n : nodes) {
    if (n.id.empty()) throw ConfigError("node with empty id");
    if (!node_ids.insert(n.id).second) throw ConfigError("duplicate node id: " + n.id);
    const BeamSpec* beam = find_beam(n.beam);
    if (!beam) throw ConfigError("node " + n.id + " references unknown beam " + n.beam);
    if (!on_beam(n.position_mm, *beam)) throw ConfigError("node " + n.id + " taps outside its beam");
    if (n.role == Role::Relay && !relay_for(n.id)) throw ConfigError("relay node " + n.id + " has no link");
  }

  std::set<std::string> linked;
  std::map<std::string, std::vector<std::string>> edges;
  for (const RelayLink& r : relays) {
    const NodeSpec* node = find_node(r.node);
    if (!node) throw ConfigError("relay link references unknown node " + r.node);
    if (node->role != Role::Relay) throw ConfigError("relay link node " + r.node + " is not a relay");
    if (!linked.insert(r.node).second) throw ConfigError("node " + r.node + " has two relay links");
    if (node->beam != r.from_beam) throw ConfigError("relay " + r.node + " does not tap its from_beam");
    const BeamSpec* to = find_beam(r.to_beam);
    if (!to) throw ConfigError("relay link references unknown beam " + r.to_beam);
    if (r.to_beam == r.from_beam) throw ConfigError("relay " + r.node + " loops onto its own beam");
    if (!on_beam(r.to_position_mm, *to)) throw ConfigError("relay " + r.node + " emits outside its beam");
    edges[r.from_beam].push_back(r.to_beam);
  }

  // Cycle check over the beam graph.
  std::map<std::string, int> state;  // 1 visiting, 2 done
  std::function<void(const std::string&)> visit = [&](const std::string& beam) {
    state[beam] = 1;
    for (const std::string& next : edges[beam]) {
      if (state[next] == 1) throw ConfigError("relay chain is cyclic at beam " + next);
      if (state[next] == 0) visit(next);
    }
    state[beam] = 2;
  };
  for (const BeamSpec& b : beams) {
    if (state[b.id] == 0) visit(b.id);
  }
}

namespace {

template <class T>
T field(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(where + ": missing '" + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": bad type for '" + key + "'");
  }
}

template <class T>
T field_or(const json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return field<T>(obj, key, where);
}

const json& array_at(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end() || !it->is_array()) throw ConfigError(std::string("topology: '") + key + "' must be an array");
  return *it;
}

}  // namespace

Topology parse_topology(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("topology: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("topology: document must be an object");

  Topology topo;
  for (const json& b : array_at(doc, "beams")) {
    BeamSpec beam;
    beam.id = field<std::string>(b, "id", "beam");
    const std::string where = "beam " + beam.id;
    beam.medium.length_mm = field<double>(b, "length_mm", where);
    const auto boundary = parse_boundary(field<std::string>(b, "boundary", where));
    if (!boundary) throw ConfigError(where + ": unknown boundary");
    beam.medium.boundary = *boundary;
    beam.medium.noise_rms = field<double>(b, "noise_rms", where);
    beam.medium.width_mm = field_or(b, "width_mm", beam.medium.width_mm, where);
    beam.medium.thickness_mm = field_or(b, "thickness_mm", beam.medium.thickness_mm, where);
    beam.medium.harmonic_leak = field_or(b, "harmonic_leak", beam.medium.harmonic_leak, where);
    topo.beams.push_back(std::move(beam));
  }
  for (const json& n : array_at(doc, "nodes")) {
    NodeSpec node;
    node.id = field<std::string>(n, "id", "node");
    const std::string where = "node " + node.id;
    const auto role = parse_role(field<std::string>(n, "role", where));
    if (!role) throw ConfigError(where + ": unknown role");
    node.role = *role;
    node.beam = field<std::string>(n, "beam", where);
    node.position_mm = field<double>(n, "position_mm", where);
    topo.nodes.push_back(std::move(node));
  }
  if (doc.contains("relays")) {
    for (const json& r : array_at(doc, "relays")) {
      RelayLink link;
      link.node = field<std::string>(r, "node", "relay");
      const std::string where = "relay " + link.node;
      link.from_beam = field<std::string>(r, "from_beam", where);
      link.to_beam = field<std::string>(r, "to_beam", where);
      link.to_position_mm = field_or(r, "to_position_mm", 0.0, where);
      topo.relays.push_back(std::move(link));
    }
  }
  topo.validate();
  return topo;
}

Topology load_topology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open topology file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_topology(text.str());
}

std::string topology_to_json(const Topology& topology) {
  json doc;
  doc["beams"] = json::array();
  for (const BeamSpec& b : topology.beams) {
    doc["beams"].push_back({{"id", b.id},
                            {"length_mm", b.medium.length_mm},
                            {"width_mm", b.medium.width_mm},
                            {"thickness_mm", b.medium.thickness_mm},
                            {"boundary", std::string(to_string(b.medium.boundary))},
                            {"noise_rms", b.medium.noise_rms},
                            {"harmonic_leak", b.medium.harmonic_leak}});
  }
  doc["nodes"] = json::array();
  for (const NodeSpec& n : topology.nodes) {
    doc["nodes"].push_back({{"id", n.id},
                            {"role", std::string(to_string(n.role))},
                            {"beam", n.beam},
                            {"position_mm", n.position_mm}});
  }
  doc["relays"] = json::array();
  for (const RelayLink& r : topology.relays) {
    doc["relays"].push_back({{"from_beam", r.from_beam},
                             {"to_beam", r.to_beam},
                             {"node", r.node},
                             {"to_position_mm", r.to_position_mm}});
  }
  return doc.dump(2);
}

Topology two_beam_topology(double noise_rms) {
  Topology topo;
  for (const char* id : {"beam-1", "beam-2"}) {
    BeamSpec beam;
    beam.id = id;
    beam.medium.noise_rms = noise_rms;
    topo.beams.push_back(beam);
  }
  topo.nodes = {{"monitor", Role::Monitor, "beam-1", 0.0},
                {"relay", Role::Relay, "beam-1", 550.0},
                {"collector", Role::Collector, "beam-2", 550.0}};
  topo.relays = {{"beam-1", "beam-2", "relay", 0.0}};
  topo.validate();
  return topo;
}

Topology chain_topology(int beams, double noise_rms) {
  if (beams < 1) throw ContractViolation("chain_topology: need at least one beam");
  Topology topo;
  for (int i = 1; i <= beams; ++i) {
    BeamSpec beam;
    beam.id = "beam-" + std::to_string(i);
    beam.medium.noise_rms = noise_rms;
    topo.beams.push_back(beam);
  }
  topo.nodes.push_back({"origin", Role::Monitor, "beam-1", 0.0});
  for (int i = 1; i < beams; ++i) {
    const std::string id = "relay-" + std::to_string(i);
    topo.nodes.push_back({id, Role::Relay, "beam-" + std::to_string(i), 550.0});
    topo.relays.push_back({"beam-" + std::to_string(i), "beam-" + std::to_string(i + 1), id, 0.0});
  }
  topo.nodes.push_back({"collector", Role::Collector, "beam-" + std::to_string(beams), 550.0});
  topo.validate();
  return topo;
}

}  // namespace vdn
