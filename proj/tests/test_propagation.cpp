#include <doctest.h>

#include <limits>

#include "qoc/propagation.hpp"
#include "test_util.hpp"

using qoc::Complex;
using qoc::Mat;

namespace {

qoc::SpinSystem driftless(int n) {
  return qoc::make_term_system(n, {{0.0, qoc::parse_label(std::string(
                                             static_cast<std::size_t>(n), 'I'),
                                         n)}});
}

}  // namespace

TEST_CASE("slice propagator: single-axis rotation") {
  const qoc::ControlGenerators g = qoc::build_controls(1);
  const Mat h0 = Mat::Zero(2, 2);
  const double uy = std::numbers::pi / 4;
  const Mat u = qoc::slice_propagator(h0, g, 0.0, uy, 1.0);
  const Mat want = tutil::expm(Complex(0, -uy) * qoc::to_matrix(qoc::parse_label("Y", 1)));
  CHECK(tutil::max_abs(u - want) <= 1e-12);
}

TEST_CASE("slice propagator: free precession is diagonal phases") {
  const double omega = 2.2, t = 0.7;
  const qoc::ControlGenerators g = qoc::build_controls(1);
  const Mat h = omega / 2 * qoc::to_matrix(qoc::parse_label("Z", 1));
  const Mat u = qoc::slice_propagator(h, g, 0.0, 0.0, t);
  CHECK(std::abs(u(0, 0) - std::exp(Complex(0, -omega * t / 2))) <= 1e-12);
  CHECK(std::abs(u(1, 1) - std::exp(Complex(0, omega * t / 2))) <= 1e-12);
  CHECK(std::abs(u(0, 1)) <= 1e-14);
}

TEST_CASE("slice propagator: zz coupling at tau = 1/(2J)") {
  const qoc::ControlGenerators g = qoc::build_controls(2);
  const Mat h = std::numbers::pi / 2 * qoc::to_matrix(qoc::parse_label("ZZ", 2));
  const Mat u = qoc::slice_propagator(h, g, 0.0, 0.0, 0.5);
  const Complex e_m = std::exp(Complex(0, -std::numbers::pi / 4));
  const Complex e_p = std::exp(Complex(0, std::numbers::pi / 4));
  CHECK(std::abs(u(0, 0) - e_m) <= 1e-12);
  CHECK(std::abs(u(1, 1) - e_p) <= 1e-12);
  CHECK(std::abs(u(2, 2) - e_p) <= 1e-12);
  CHECK(std::abs(u(3, 3) - e_m) <= 1e-12);
}

TEST_CASE("slice propagator guards") {
  const qoc::ControlGenerators g = qoc::build_controls(1);
  const Mat h = Mat::Zero(2, 2);
  CHECK_THROWS_AS(qoc::slice_propagator(h, g, 0.0, 0.0, 0.0), qoc::ConfigError);
  CHECK_THROWS_AS(
      qoc::slice_propagator(h, g, std::numeric_limits<double>::quiet_NaN(), 0.0, 0.1),
      qoc::ConfigError);
  CHECK_THROWS_AS(qoc::slice_propagator(Mat::Zero(4, 4), g, 0.0, 0.0, 0.1),
                  std::invalid_argument);
}

TEST_CASE("unitarity holds for extreme amplitudes") {
  qoc::SplitMix rng(21);
  for (int n = 1; n <= 6; n += 5) {
    const tutil::Instance inst = tutil::random_instance(rng, n, 1, 1, 0.1);
    const Mat h = qoc::build_drift(inst.cfg.sys);
    const qoc::ControlGenerators g = qoc::build_controls(n);
    const Mat eye = Mat::Identity(h.rows(), h.cols());
    for (double amp : {0.0, 5.0, 1e3, 1e5}) {
      const Mat u = qoc::slice_propagator(h, g, amp, -amp, 1e-3);
      CHECK(tutil::max_abs(u.adjoint() * u - eye) <= 1e-10);
    }
  }
}

TEST_CASE("propagate: identity, rotation, and norm preservation") {
  const qoc::SpinSystem sys = driftless(1);
  const Mat z = qoc::to_matrix(qoc::parse_label("Z", 1));
  const Mat x = qoc::to_matrix(qoc::parse_label("X", 1));

  CHECK(tutil::max_abs(qoc::propagate(z, qoc::zeros_pulse(1.0, 3), sys) - z) <=
        1e-12);

  qoc::ControlPulse quarter = qoc::zeros_pulse(1.0, 1);
  quarter.uy[0] = std::numbers::pi / 4;
  CHECK(tutil::max_abs(qoc::propagate(z, quarter, sys) - x) <= 1e-12);

  qoc::SplitMix rng(31);
  const tutil::Instance inst = tutil::random_instance(rng, 3, 6, 2, 0.07);
  const Mat rho_f = qoc::propagate(inst.cfg.rho_i, inst.pulse, inst.cfg.sys);
  CHECK(std::abs(rho_f.norm() - inst.cfg.rho_i.norm()) <= 1e-9);
  CHECK(std::abs((rho_f.trace() - inst.cfg.rho_i.trace()).real()) <= 1e-9);

  // Spectrum preservation (sorted eigenvalues).
  Eigen::SelfAdjointEigenSolver<Mat> ei(inst.cfg.rho_i), ef(rho_f);
  CHECK((ei.eigenvalues() - ef.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("composition: chained slices equal the product unitary") {
  qoc::SplitMix rng(32);
  const tutil::Instance inst = tutil::random_instance(rng, 2, 5, 1, 0.09);
  const Mat h = qoc::build_drift(inst.cfg.sys);
  const qoc::ControlGenerators g = qoc::build_controls(2);
  const std::vector<Mat> us = qoc::slice_propagators(h, g, inst.pulse);
  Mat total = Mat::Identity(4, 4);
  for (const Mat& u : us) total = u * total;
  const Mat direct = total * inst.cfg.rho_i * total.adjoint();
  CHECK((direct - qoc::propagate(inst.cfg.rho_i, inst.pulse, inst.cfg.sys)).norm() <=
        1e-9);
}

TEST_CASE("cache structure at M=1 and the backward sign") {
  const qoc::SpinSystem sys = driftless(1);
  const Mat z = qoc::to_matrix(qoc::parse_label("Z", 1));
  const Mat x = qoc::to_matrix(qoc::parse_label("X", 1));
  qoc::ControlPulse quarter = qoc::zeros_pulse(1.0, 1);
  quarter.uy[0] = std::numbers::pi / 4;

  const qoc::PropagationCache cache = qoc::build_cache(z, x, quarter, sys);
  REQUIRE(cache.forward.size() == 2);
  REQUIRE(cache.backward.size() == 2);
  REQUIRE(cache.unitaries.size() == 1);
  CHECK(tutil::max_abs(cache.forward[0] - z) <= 1e-14);
  CHECK(tutil::max_abs(cache.forward[1] - x) <= 1e-12);
  CHECK(tutil::max_abs(cache.backward[1] - x) <= 1e-14);

  // Conjugating the target back through the slice gives +sigma_z; pinned
  // against the independent dense conjugation rather than trusting algebra.
  const Mat u = cache.unitaries[0];
  const Mat dense = u.adjoint() * x * u;
  CHECK(tutil::max_abs(cache.backward[0] - dense) <= 1e-12);
  CHECK(tutil::max_abs(cache.backward[0] - z) <= 1e-12);
}

TEST_CASE("gradient-caching identity holds at every slice") {
  qoc::SplitMix rng(33);
  for (int rep = 0; rep < 3; ++rep) {
    const tutil::Instance inst = tutil::random_instance(rng, 3, 8, 2, 0.06);
    const Mat target = qoc::state_matrix(inst.cfg.target);
    const qoc::PropagationCache cache =
        qoc::build_cache(inst.cfg.rho_i, target, inst.pulse, inst.cfg.sys);
    const double f = qoc::hs_inner(cache.forward.back(), target);
    for (std::size_t m = 0; m < cache.forward.size(); ++m) {
      CHECK(std::abs(qoc::hs_inner(cache.forward[m], cache.backward[m]) - f) <=
            1e-9);
    }
  }
}
