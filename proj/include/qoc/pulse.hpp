#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qoc {

// M piecewise-constant slices of duration tau with collective x/y amplitudes
// in rad/s.
struct ControlPulse {
  double tau = 0.0;
  std::vector<double> ux, uy;

  int slices() const { return static_cast<int>(ux.size()); }
};

// Throws ConfigError unless M >= 1, tau > 0, all amplitudes finite, and (when
// given) |u| <= u_max.
void validate_pulse(const ControlPulse& pulse,
                    std::optional<double> u_max = std::nullopt);

// Round(t/tau) with exact halves rounded away from zero.
long discretize_duration(double t_s, double tau_s);

ControlPulse zeros_pulse(double tau, int m);

// Uniform amplitudes in [lo, hi]; each (channel, slice) draw comes from its
// own labeled sub-seed, so the result is independent of fill order.
ControlPulse random_pulse(double tau, int m, double lo, double hi,
                          std::uint64_t seed);

// Flat layout [ux(1..M); uy(1..M)] shared with oracle gradients.
Eigen::VectorXd flatten(const ControlPulse& pulse);
ControlPulse with_amplitudes(const ControlPulse& like, const Eigen::VectorXd& u);

// CSV with header "m,ux,uy" (1-based m) plus a JSON sidecar
// {"tau_s": ..., "M": ...} next to it (same stem, .json extension).
void write_pulse_csv(const std::string& csv_path, const ControlPulse& pulse);
std::string pulse_sidecar_path(const std::string& csv_path);

// Reads the CSV; tau comes from tau_override when given, otherwise from the
// sidecar. A sidecar "M" is cross-checked against the row count.
ControlPulse read_pulse_csv(const std::string& csv_path,
                            std::optional<double> tau_override = std::nullopt);

}  // namespace qoc
