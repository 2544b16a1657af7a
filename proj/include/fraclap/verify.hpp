#ifndef FRACLAP_VERIFY_HPP
#define FRACLAP_VERIFY_HPP

#include <optional>
#include <string>
#include <vector>

// The identity battery: every integral identity the library's kernels rest
// on, each checked numerically against its closed form on a fixed parameter
// grid.  Shared by the verify CLI command and the acceptance suite.

namespace fraclap::verify {

struct IdentityRow {
  std::string name;
  std::string params;
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;
  double tol = 0.0;  // relative when rhs != 0, absolute otherwise
  bool pass = false;
};

// All identity names, in battery order.
std::vector<std::string> identity_names();

// Runs the battery.  `filter` is a comma-separated list of name prefixes
// (empty = everything); `tol_override` replaces every per-identity
// tolerance; rows are evaluated on `threads` threads with a fixed
// assignment, so output order and content do not depend on scheduling.
std::vector<IdentityRow> run_identities(const std::string& filter,
                                        std::optional<double> tol_override,
                                        int threads);

}  // namespace fraclap::verify

#endif
