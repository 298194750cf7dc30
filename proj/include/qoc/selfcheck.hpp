#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qoc {

struct CheckOptions {
  int n = 3;          // spin count for randomized instances, 1..kDimCap
  int path_sign = 1;  // mutation hook: -1 perturbs the sampled-gradient
                      // combination so the path-equivalence check must fail
  std::uint64_t seed = 12345;
};

struct CheckReport {
  std::string name;
  bool pass = false;
  double worst = 0.0;  // worst-case metric the tolerance was applied to
  std::string note;
};

// Built-in invariant suite over small seeded instances: Pauli orthonormality,
// propagator unitarity, the rotation/commutator identity, exact-vs-sampled
// gradient path equivalence, finite-difference consistency, query accounting.
std::vector<CheckReport> run_self_checks(const CheckOptions& opts);

bool all_passed(const std::vector<CheckReport>& reports);

}  // namespace qoc
