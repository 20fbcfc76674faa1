#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace vdn {

// Thrown when a caller breaks an operation's precondition.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Recoverable domain error. code() is a stable, machine-readable tag that the
// northbound surface and the CLI report verbatim.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class DuplicateEvent : public Error {
 public:
  explicit DuplicateEvent(const std::string& event)
      : Error("duplicate-event", "event already bound: " + event) {}
};

class AmbiguousPattern : public Error {
 public:
  explicit AmbiguousPattern(const std::string& event)
      : Error("ambiguous-pattern",
              "pattern for '" + event + "' collides with an existing binding") {}
};

class UnboundEvent : public Error {
 public:
  explicit UnboundEvent(const std::string& event)
      : Error("unbound-event", "event is not bound: " + event) {}
};

class RoleViolation : public Error {
 public:
  explicit RoleViolation(const std::string& message) : Error("role-violation", message) {}
};

class UnknownNode : public Error {
 public:
  explicit UnknownNode(const std::string& node) : Error("unknown-node", "unknown node: " + node) {}
};

class DecodeError : public Error {
 public:
  explicit DecodeError(const std::string& message) : Error("decode", message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("io", message) {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t row, const std::string& message)
      : Error("parse", "row " + std::to_string(row) + ": " + message), row_(row) {}

  // 1-based line number in the source file (the header is line 1).
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message) : Error("config", message) {}
};

class PathBroken : public Error {
 public:
  explicit PathBroken(std::string after_node)
      : Error("path-broken", "path broken after " + after_node), after_(std::move(after_node)) {}

  // Last node that demonstrably handled the probe.
  const std::string& after() const noexcept { return after_; }

 private:
  std::string after_;
};

}  // namespace vdn
