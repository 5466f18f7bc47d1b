#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace latticefbm {

/// Thrown when an argument violates a documented precondition.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a request reaches outside the sampled window of a path.
/// Paths are never extrapolated.
class HorizonError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Configuration text that could not be parsed.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline void require(bool ok, const std::string& message) {
  if (!ok) throw DomainError(message);
}

}  // namespace latticefbm
