#pragma once

// Line-oriented northbound command surface: one JSON object per line in,
// one {ok, error?, result?} object per line out.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "vdn/controller.hpp"
#include "vdn/registry.hpp"

namespace vdn {

class NorthboundServer {
 public:
  explicit NorthboundServer(ControllerConfig config = {});

  // Never throws; failures come back as {"ok":false,"error":...}.
  std::string handle(std::string_view line);

  // Reads commands until EOF, answering each on its own line.
  void serve(std::istream& in, std::ostream& out);

  const Registry& registry() const noexcept { return registry_; }
  const Controller* controller() const noexcept {
    return controller_ ? &*controller_ : nullptr;
  }

 private:
  ControllerConfig config_;
  Registry registry_;
  std::optional<Controller> controller_;
};

}  // namespace vdn
