#pragma once

#include <stdexcept>
#include <string>

namespace facloc {

// Malformed input file; message names the offending line or field.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed input that violates a data invariant (negative distance,
// infeasible LP, ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Problem too large for an exhaustive routine.
class SizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internal invariant the algorithm relies on did not hold.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace facloc
