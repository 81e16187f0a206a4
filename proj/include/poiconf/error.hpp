#pragma once

#include <stdexcept>
#include <string>

namespace poiconf {

// Bad input text (WKT, CSV, numbers). Message carries the offending position.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value outside its documented domain (coordinates, scores).
class RangeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration supplied by the caller (flags, radii, thresholds).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An input file whose header does not satisfy the expected schema.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Data that violates a cross-record invariant (e.g. one id, two coordinates).
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an API precondition; a bug, not an input problem.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace poiconf
