#pragma once

#include <utility>

#include <Eigen/Dense>

namespace qoc {

// One oracle reply: fitness, gradient over the flat [ux; uy] layout, and the
// number of emulated experiments this call consumed (0 for the exact backend).
struct OracleAnswer {
  double f = 0.0;
  Eigen::VectorXd g;
  long queries = 0;
};

// What the optimizer needs from an oracle. Implementations work on the flat
// 2M amplitude vector; test doubles can expose any landscape.
class OracleIface {
 public:
  virtual ~OracleIface() = default;

  // Fitness plus gradient.
  virtual OracleAnswer evaluate(const Eigen::VectorXd& u) = 0;

  // Fitness alone (line-search probes); returns (f, queries).
  virtual std::pair<double, long> fitness_only(const Eigen::VectorXd& u) = 0;

  // Total invocations so far, both kinds; the benchmark's evaluation budget
  // is counted in these.
  virtual long calls() const = 0;
};

}  // namespace qoc
