#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "qoc/oracle_iface.hpp"
#include "qoc/pauli.hpp"
#include "qoc/propagation.hpp"
#include "qoc/pulse.hpp"
#include "qoc/rng.hpp"
#include "qoc/spin_system.hpp"

namespace qoc {

enum class MeasureKind { kExact, kGaussian, kBorn };

// How a single expectation estimate is degraded. gaussian adds N(0, sigma^2)
// per estimate; born draws `shots` +/-1 outcomes.
struct MeasurementModel {
  MeasureKind kind = MeasureKind::kExact;
  double sigma = 0.0;
  long shots = 1;
};

struct MeasurementConfig {
  MeasurementModel model;
  std::uint64_t master_seed = 0;
};

// JSON form {"kind": "exact"|"gaussian"|"born", "sigma": f?, "shots": n?,
// "master_seed": u64?}.
MeasurementConfig measurement_config_from_json(const nlohmann::json& doc);

// Everything an oracle call depends on besides the pulse amplitudes.
struct OracleConfig {
  SpinSystem sys;
  Mat rho_i;
  SparsePauliState target;
  double tau = 0.0;
  int m = 0;  // slice count
  MeasurementModel model;
  std::uint64_t master_seed = 0;
};

// Checks dimensions, pulse geometry, that rho_i and the target share a
// spectrum (unitary reachability requirement), and born-model admissibility.
void validate_oracle_config(const OracleConfig& cfg);

// (4nM + 1)|S|: the emulated-experiment cost of one sampled full evaluation.
long sampled_query_count(int n, int m, int s);

// exact -> v; gaussian -> v + sigma * N(0,1); born -> mean of `shots` +/-1
// draws with P(+1) = (1+v)/2 (requires |v| <= 1).
double estimate_expectation(double true_value, const MeasurementModel& model,
                            SplitMix& stream);

// i [R_+ rho R_+^dag - R_- rho R_-^dag] with R_+- = exp(-+ i pi/4 sigma_axis^k);
// algebraically equal to [sigma_axis^k, rho].
Mat commutator_by_rotation(const Mat& rho, int n, int k, int axis);

// Fitness under the configured measurement model; call_index separates the
// noise streams of repeated evaluations.
double fitness(const ControlPulse& pulse, const OracleConfig& cfg,
               std::uint64_t call_index = 0);

// First-order gradient from the forward/backward cache; exact classical
// computation, queries = 0.
OracleAnswer gradient_exact(const ControlPulse& pulse, const OracleConfig& cfg);

// Measurement-protocol gradient: for each (axis, slice, spin, +/-) insert the
// +/- pi/2 rotation after the slice prefix and estimate the target expectation
// per term. combine_sign is a test hook: it must stay +1; flipping it breaks
// the equivalence with gradient_exact, which the self-check mutation test
// relies on to prove the check can fail.
OracleAnswer gradient_sampled(const ControlPulse& pulse, const OracleConfig& cfg,
                              std::uint64_t call_index = 0, int combine_sign = 1);

// Classical-simulation backend: exact values, zero queries.
class ExactOracle : public OracleIface {
 public:
  explicit ExactOracle(OracleConfig cfg);

  OracleAnswer evaluate(const Eigen::VectorXd& u) override;
  std::pair<double, long> fitness_only(const Eigen::VectorXd& u) override;
  long calls() const override { return calls_; }

 private:
  OracleConfig cfg_;
  ControlPulse proto_;
  long calls_ = 0;
};

// Emulated-experiment backend with per-experiment noise and query accounting;
// every public call advances the call counter that labels its noise streams.
class SampledOracle : public OracleIface {
 public:
  explicit SampledOracle(OracleConfig cfg);

  OracleAnswer evaluate(const Eigen::VectorXd& u) override;
  std::pair<double, long> fitness_only(const Eigen::VectorXd& u) override;
  long calls() const override { return calls_; }

 private:
  OracleConfig cfg_;
  ControlPulse proto_;
  long calls_ = 0;
};

}  // namespace qoc
