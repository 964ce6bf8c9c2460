#pragma once

#include <stdexcept>
#include <string>

namespace audit {

/// Bad user input: unreadable files, malformed rows, unknown ids,
/// out-of-range parameters. Maps to CLI exit code 1.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// A violated internal invariant. Reaching this is a bug, not a usage
/// problem. Maps to CLI exit code 2.
class InvariantError : public std::logic_error {
 public:
  explicit InvariantError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace audit
