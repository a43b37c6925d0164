#pragma once

#include <stdexcept>
#include <string>

namespace angsparse {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ModeError : public Error {
 public:
  using Error::Error;
};

class PriorError : public Error {
 public:
  using Error::Error;
};

class WeightError : public Error {
 public:
  using Error::Error;
};

class SynthesisError : public Error {
 public:
  using Error::Error;
};

class FeasibilityError : public Error {
 public:
  using Error::Error;
};

class DegenerateBoundError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent experiment configuration. The CLI maps this to
// exit code 1, every other Error to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace angsparse
