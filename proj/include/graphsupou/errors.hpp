#pragma once

#include <stdexcept>
#include <string>

namespace graphsupou {

// Bad input files, malformed configuration, I/O failures.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation that cannot proceed: unstable drift, singular systems,
// ill-conditioned eigenbases.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace graphsupou
