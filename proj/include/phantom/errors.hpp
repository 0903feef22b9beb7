#pragma once

#include <stdexcept>
#include <string>

namespace phantom {

// Bad user input: malformed files, incompatible shapes, invalid configs.
// The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A broken internal invariant (a simulator bug, not a user error).
// The CLI maps this to exit code 3.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace phantom
