#pragma once

#include <stdexcept>
#include <string>

namespace pnp {

/// Runtime failure while computing (solver divergence, CG stall, subprocess
/// failure, malformed data encountered mid-run).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid usage: bad configuration, schema violation, precondition failure.
/// The CLI maps this to exit code 2, everything else to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pnp
