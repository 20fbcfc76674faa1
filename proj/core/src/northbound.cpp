#include "vdn/northbound.hpp"

#include <cstdio>
#include <istream>
#include <ostream>

#include "json.hpp"

#include "vdn/error.hpp"

namespace vdn {

using nlohmann::json;

namespace {

// A request that is well-formed JSON but unusable as given.
struct RequestError {
  std::string code;
};

const json& require(const json& req, const char* key) {
  const auto it = req.find(key);
  if (it == req.end() || it->is_null()) throw RequestError{"missing-field"};
  return *it;
}

template <class T>
T get_as(const json& value) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    throw RequestError{"invalid-argument"};
  }
}

std::vector<std::uint8_t> parse_hex(const std::string& hex) {
  if (hex.size() % 2 != 0) throw RequestError{"invalid-argument"};
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    unsigned value = 0;
    for (std::size_t j = i; j < i + 2; ++j) {
      const char c = hex[j];
      unsigned digit = 0;
      if (c >= '0' && c <= '9') digit = static_cast<unsigned>(c - '0');
      else if (c >= 'a' && c <= 'f') digit = static_cast<unsigned>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') digit = static_cast<unsigned>(c - 'A' + 10);
      else throw RequestError{"invalid-argument"};
      value = value * 16 + digit;
    }
    out.push_back(static_cast<std::uint8_t>(value));
  }
  return out;
}

std::string to_hex(const std::vector<std::uint8_t>& bytes) {
  std::string out;
  char buf[3];
  for (std::uint8_t b : bytes) {
    std::snprintf(buf, sizeof buf, "%02x", b);
    out += buf;
  }
  return out;
}

json report_json(const EventReport& r) {
  json out{{"event", r.event.name}, {"node", r.node}, {"sim_time_ms", r.sim_time_ms},
           {"frame_error", r.frame_error}};
  if (r.payload) out["payload_hex"] = to_hex(r.payload->payload);
  return out;
}

json failure(const std::string& code) { return json{{"ok", false}, {"error", code}}; }

}  // namespace

NorthboundServer::NorthboundServer(ControllerConfig config) : config_(config) {}

std::string NorthboundServer::handle(std::string_view line) {
  json response;
  try {
    const json req = json::parse(line);
    if (!req.is_object()) throw RequestError{"parse"};
    const std::string op = get_as<std::string>(require(req, "op"));
    response = json{{"ok", true}};

    if (op == "bind") {
      const std::string name = get_as<std::string>(require(req, "event"));
      const json& syms = require(req, "pattern");
      if (!syms.is_array()) throw RequestError{"invalid-argument"};
      SignalPattern pattern;
      for (const json& s : syms) pattern.symbols.push_back(Symbol{get_as<int>(s)});
      if (req.contains("repeat")) pattern.repeat = get_as<int>(req["repeat"]);
      for (Symbol s : pattern.symbols) {
        if (!config_.alphabet.contains(s.index)) throw RequestError{"invalid-argument"};
      }
      const EventKind kind = event_kind_for(registry_, name);
      Registry next = bind_event(registry_, kind, pattern);
      if (controller_) controller_->bind_event(kind, pattern);
      registry_ = std::move(next);
    } else if (op == "list-bindings") {
      json list = json::array();
      for (const Binding& b : registry_.bindings()) {
        json pattern = json::array();
        for (Symbol s : b.pattern.symbols) pattern.push_back(s.index);
        list.push_back({{"event", b.event.name}, {"id", b.event.id}, {"pattern", pattern},
                        {"repeat", b.pattern.repeat}});
      }
      response["result"] = json{{"bindings", list}};
    } else if (op == "load-topology") {
      const std::string path = get_as<std::string>(require(req, "path"));
      controller_.emplace(load_topology(path), registry_, config_);
      response["result"] = json{{"nodes", controller_->topology().nodes.size()},
                                {"beams", controller_->topology().beams.size()}};
    } else if (op == "emit") {
      const std::string node = get_as<std::string>(require(req, "node"));
      const std::string event = get_as<std::string>(require(req, "event"));
      std::optional<std::vector<std::uint8_t>> payload;
      if (req.contains("payload_hex")) payload = parse_hex(get_as<std::string>(req["payload_hex"]));
      if (!controller_) throw RequestError{"no-topology"};
      controller_->emit_event(node, event, std::move(payload));
    } else if (op == "run") {
      const double horizon = get_as<double>(require(req, "horizon_ms"));
      if (!(horizon >= 0.0)) throw RequestError{"invalid-argument"};
      if (!controller_) throw RequestError{"no-topology"};
      controller_->run_until(controller_->now_ms() + horizon);
      response["result"] = json{{"now_ms", controller_->now_ms()}};
    } else if (op == "poll-reports") {
      if (!controller_) throw RequestError{"no-topology"};
      const std::vector<EventReport> reports =
          req.contains("node") ? controller_->take_reports(get_as<std::string>(req["node"]))
                               : controller_->take_all_reports();
      json list = json::array();
      for (const EventReport& r : reports) list.push_back(report_json(r));
      response["result"] = json{{"reports", list}};
    } else {
      throw RequestError{"unknown-op"};
    }
  } catch (const json::parse_error&) {
    response = failure("parse");
  } catch (const RequestError& e) {
    response = failure(e.code);
  } catch (const Error& e) {
    response = failure(e.code());
  } catch (const ContractViolation&) {
    response = failure("invalid-argument");
  } catch (const std::exception&) {
    response = failure("internal");
  }
  return response.dump();
}

void NorthboundServer::serve(std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out << handle(line) << '\n' << std::flush;
  }
}

}  // namespace vdn
