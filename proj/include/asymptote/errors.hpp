#pragma once

#include <stdexcept>
#include <string>

namespace asymptote {

// Malformed input files / JSON shapes. CLI maps this to exit code 2.
struct parse_error : std::runtime_error {
  explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

// Violated operation preconditions or domain invariants. CLI maps this to
// exit code 3. Failed numeric checks are not exceptions; they are reported
// results (CLI exit code 1).
struct precondition_error : std::runtime_error {
  explicit precondition_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace asymptote
