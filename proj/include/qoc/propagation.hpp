#pragma once

#include <vector>

#include "qoc/pauli.hpp"
#include "qoc/pulse.hpp"
#include "qoc/spin_system.hpp"

namespace qoc {

// exp(-i (h + ux gx + uy gy) tau) via Hermitian eigendecomposition, which
// keeps the result unitary to roundoff.
Mat slice_propagator(const Mat& h, const ControlGenerators& gens, double ux,
                     double uy, double tau);

// One propagator per slice, in order m = 1..M.
std::vector<Mat> slice_propagators(const Mat& h, const ControlGenerators& gens,
                                   const ControlPulse& pulse);

// rho_f = U_M ... U_1 rho_i (U_M ... U_1)^dag.
Mat propagate(const Mat& rho_i, const ControlPulse& pulse, const SpinSystem& sys);

// forward[m] = U_1^m rho_i (U_1^m)^dag        (forward[0] = rho_i)
// backward[m] = (U_{m+1}^M)^dag obs U_{m+1}^M (backward[M] = obs)
std::vector<Mat> forward_chain(const std::vector<Mat>& unitaries, const Mat& rho_i);
std::vector<Mat> backward_chain(const std::vector<Mat>& unitaries, const Mat& obs);

// The two chains plus the slice propagators; makes the first-order gradient
// an O(M) pass instead of O(M^2) re-propagation.
struct PropagationCache {
  std::vector<Mat> forward;    // M+1 states
  std::vector<Mat> backward;   // M+1 conjugated targets
  std::vector<Mat> unitaries;  // M slice propagators
};

PropagationCache build_cache(const Mat& rho_i, const Mat& target,
                             const ControlPulse& pulse, const SpinSystem& sys);

}  // namespace qoc
