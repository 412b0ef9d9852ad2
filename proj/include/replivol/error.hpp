#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace replivol {

/// How an error maps onto process exit status in the CLI.
enum class ErrorClass {
  Input = 2,     // malformed or invalid input
  Domain = 3,    // well-formed input the theory refuses (uncertified, non-hyperbolic)
  Internal = 4,  // an internal assertion failed
};

/// Base of every error thrown by the library. `name()` is the stable
/// identifier printed by the CLI (e.g. "DeltaOutOfRange").
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& message, ErrorClass cls)
      : std::runtime_error(message), name_(std::move(name)), class_(cls) {}

  const std::string& name() const noexcept { return name_; }
  ErrorClass error_class() const noexcept { return class_; }

 private:
  std::string name_;
  ErrorClass class_;
};

}  // namespace replivol
