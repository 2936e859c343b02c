#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chaoslab {

// Invalid experiment or scheme configuration. CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Piece-count budget exhausted while composing maps. CLI exit code 3.
// `iteration` is the composition step that blew the budget (0 when the error
// was raised by a single compose call outside an iteration loop).
class BudgetError : public std::runtime_error {
 public:
  BudgetError(const std::string& what, int iteration, long pieces)
      : std::runtime_error(what), iteration(iteration), pieces(pieces) {}
  int iteration;
  long pieces;
};

// Malformed input file; `offset` is the byte position of the offending field.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : std::runtime_error(what), offset(offset) {}
  std::size_t offset;
};

// Filesystem-level failure (cannot open/write). CLI exit code 4.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace chaoslab
