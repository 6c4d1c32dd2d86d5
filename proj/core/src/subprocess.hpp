#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pnp::detail {

struct SubprocessResult {
  int exit_code = -1;
  bool timed_out = false;
  std::vector<std::uint8_t> stdout_bytes;
  std::string stderr_text;
};

/// Runs argv[0] with the given arguments, writes `input` to its stdin, and
/// collects stdout/stderr until exit or timeout. On timeout the child is
/// killed with SIGKILL. The child is always reaped. Throws pnp::Error on
/// spawn failure.
SubprocessResult run_subprocess(const std::vector<std::string>& argv,
                                const std::vector<std::uint8_t>& input,
                                double timeout_sec);

}  // namespace pnp::detail
