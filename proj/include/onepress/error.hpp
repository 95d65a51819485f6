#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace onepress {

/// Input data violates a documented invariant (bad script, unsorted trace,
/// duplicate binding, ...). The CLI maps this to exit code 1.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// A text document failed to parse. `line()` is 1-based; 0 when unknown.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace onepress
