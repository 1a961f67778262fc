#pragma once

// Helpers shared by the unit and acceptance tests.

#include <sys/wait.h>

#include <cstdio>
#include <string>
#include <utility>

#include "profilest/pml_exact.hpp"

namespace profilest::testing {

// PML over the full support range. Profiles with singletons have no finite
// upper bound, so the range [1, hi] starts at 2m + 4 and doubles while the
// best support size sits on its edge.
inline PmlResult exhaustive_pml(const Profile& f, SearchConfig cfg = {}, int* k_searched = nullptr) {
  if (is_trivial(f) || f.mu_min() > 1) {
    if (k_searched) {
      const auto up = bounds_report(f).support_upper;
      *k_searched = up ? static_cast<int>(*up) : 1;
    }
    return pml_search(f, cfg);
  }
  int hi = 2 * f.m() + 4;
  for (;;) {
    cfg.k_range_override = std::pair{1, hi};
    PmlResult r = pml_search(f, cfg);
    if (r.distribution.discrete_size() < hi || hi >= 64) {
      if (k_searched) *k_searched = hi;
      return r;
    }
    hi *= 2;
  }
}

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

// Runs a shell command and captures its standard output.
inline CommandResult run_command(const std::string& command) {
  CommandResult r;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace profilest::testing
