#include "qoc/propagation.hpp"

#include <cmath>

namespace qoc {

Mat slice_propagator(const Mat& h, const ControlGenerators& gens, double ux,
                     double uy, double tau) {
  if (!std::isfinite(ux) || !std::isfinite(uy)) {
    throw ConfigError("slice_propagator: non-finite amplitude");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw ConfigError("slice_propagator: tau must be > 0");
  }
  if (h.rows() != h.cols() || gens.gx.rows() != h.rows() || gens.gy.rows() != h.rows()) {
    throw std::invalid_argument("slice_propagator: dimension mismatch");
  }
  const Mat a = h + ux * gens.gx + uy * gens.gy;
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("slice_propagator: eigendecomposition failed");
  }
  const Eigen::VectorXd& lam = es.eigenvalues();
  Eigen::VectorXcd phases(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    phases[i] = std::exp(Complex(0.0, -lam[i] * tau));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

std::vector<Mat> slice_propagators(const Mat& h, const ControlGenerators& gens,
                                   const ControlPulse& pulse) {
  validate_pulse(pulse);
  std::vector<Mat> u;
  u.reserve(static_cast<std::size_t>(pulse.slices()));
  for (int m = 0; m < pulse.slices(); ++m) {
    u.push_back(slice_propagator(h, gens, pulse.ux[static_cast<std::size_t>(m)],
                                 pulse.uy[static_cast<std::size_t>(m)], pulse.tau));
  }
  return u;
}

Mat propagate(const Mat& rho_i, const ControlPulse& pulse, const SpinSystem& sys) {
  const Mat h = build_drift(sys);
  if (rho_i.rows() != h.rows() || rho_i.cols() != h.cols()) {
    throw std::invalid_argument("propagate: state dimension does not match the system");
  }
  const ControlGenerators gens = build_controls(sys.n);
  Mat rho = rho_i;
  for (int m = 0; m < pulse.slices(); ++m) {
    const Mat u = slice_propagator(h, gens, pulse.ux[static_cast<std::size_t>(m)],
                                   pulse.uy[static_cast<std::size_t>(m)], pulse.tau);
    rho = u * rho * u.adjoint();
  }
  return rho;
}

std::vector<Mat> forward_chain(const std::vector<Mat>& unitaries, const Mat& rho_i) {
  std::vector<Mat> fwd;
  fwd.reserve(unitaries.size() + 1);
  fwd.push_back(rho_i);
  for (const Mat& u : unitaries) {
    fwd.push_back(u * fwd.back() * u.adjoint());
  }
  return fwd;
}

std::vector<Mat> backward_chain(const std::vector<Mat>& unitaries, const Mat& obs) {
  const std::size_t m = unitaries.size();
  std::vector<Mat> back(m + 1);
  back[m] = obs;
  for (std::size_t i = m; i > 0; --i) {
    back[i - 1] = unitaries[i - 1].adjoint() * back[i] * unitaries[i - 1];
  }
  return back;
}

PropagationCache build_cache(const Mat& rho_i, const Mat& target,
                             const ControlPulse& pulse, const SpinSystem& sys) {
  const Mat h = build_drift(sys);
  if (rho_i.rows() != h.rows() || target.rows() != h.rows()) {
    throw std::invalid_argument("build_cache: state dimension does not match the system");
  }
  PropagationCache cache;
  cache.unitaries = slice_propagators(h, build_controls(sys.n), pulse);
  cache.forward = forward_chain(cache.unitaries, rho_i);
  cache.backward = backward_chain(cache.unitaries, target);
  return cache;
}

}  // namespace qoc
