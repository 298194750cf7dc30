#include "qoc/selfcheck.hpp"

#include <algorithm>
#include <cmath>

#include "qoc/oracle.hpp"

namespace qoc {

namespace {

double max_abs(const Mat& a) { return a.cwiseAbs().maxCoeff(); }

double spectral_norm(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

void enumerate_labels(int n, std::string& cur, std::vector<std::string>& out) {
  if (static_cast<int>(cur.size()) == n) {
    out.push_back(cur);
    return;
  }
  for (char c : {'I', 'X', 'Y', 'Z'}) {
    cur.push_back(c);
    enumerate_labels(n, cur, out);
    cur.pop_back();
  }
}

PauliString random_label(SplitMix& rng, int n, int max_weight) {
  const int w = 1 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(
                                         std::min(max_weight, n)));
  std::string letters(static_cast<std::size_t>(n), 'I');
  int placed = 0;
  while (placed < w) {
    const int site = static_cast<int>(rng.next() % static_cast<std::uint64_t>(n));
    if (letters[static_cast<std::size_t>(site)] != 'I') continue;
    letters[static_cast<std::size_t>(site)] =
        "XYZ"[rng.next() % 3];
    ++placed;
  }
  return parse_label(letters, n);
}

Mat random_unitary(SplitMix& rng, int dim) {
  Mat a(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      a(r, c) = Complex(rng.normal(), rng.normal());
    }
  }
  Eigen::HouseholderQR<Mat> qr(a);
  return qr.householderQ() * Mat::Identity(dim, dim);
}

Mat random_hermitian(SplitMix& rng, int dim) {
  Mat a(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      a(r, c) = Complex(rng.normal(), rng.normal());
    }
  }
  return 0.5 * (a + a.adjoint());
}

struct Instance {
  OracleConfig cfg;
  ControlPulse pulse;
};

// Random drift + target + pulse. The initial state is a scrambled copy of the
// target so the two always share a spectrum. When tau <= 0 it is set to
// 0.003 / max slice-generator norm, small enough for first-order tests.
Instance random_instance(SplitMix& rng, int n, int m, int n_terms, double tau) {
  Instance inst;
  std::vector<LocalTerm> drift;
  const int n_drift = 1 + static_cast<int>(rng.next() % 2);
  for (int t = 0; t < n_drift; ++t) {
    drift.push_back({(rng.uniform01() * 3.0 + 0.5) * (rng.pm_one(0.5) > 0 ? 1 : -1),
                     random_label(rng, n, 2)});
  }
  inst.cfg.sys = make_term_system(n, drift);

  SparsePauliState target;
  target.n = n;
  while (target.size() < n_terms) {
    const PauliString p = random_label(rng, n, n);
    bool seen = false;
    for (const auto& [q, x] : target.terms) {
      (void)x;
      if (q == p) seen = true;
    }
    if (seen) continue;
    const double x = (0.2 + rng.uniform01() * 1.3) * (rng.pm_one(0.5) > 0 ? 1 : -1);
    target.terms.emplace_back(p, x);
  }
  inst.cfg.target = target;

  const int dim = 1 << n;
  const Mat q = random_unitary(rng, dim);
  inst.cfg.rho_i = q * state_matrix(target) * q.adjoint();
  inst.cfg.rho_i = 0.5 * (inst.cfg.rho_i + inst.cfg.rho_i.adjoint());

  inst.pulse.tau = 1.0;  // placeholder while sizing the generators
  for (int i = 0; i < m; ++i) {
    inst.pulse.ux.push_back(rng.uniform01() * 2.0 - 1.0);
    inst.pulse.uy.push_back(rng.uniform01() * 2.0 - 1.0);
  }
  if (tau <= 0.0) {
    const Mat h0 = build_drift(inst.cfg.sys);
    const ControlGenerators gens = build_controls(n);
    double gnorm = 0.0;
    for (int i = 0; i < m; ++i) {
      const Mat h = h0 + inst.pulse.ux[static_cast<std::size_t>(i)] * gens.gx +
                    inst.pulse.uy[static_cast<std::size_t>(i)] * gens.gy;
      gnorm = std::max(gnorm, spectral_norm(h));
    }
    tau = 0.003 / std::max(gnorm, 1e-6);
  }
  inst.pulse.tau = tau;
  inst.cfg.tau = tau;
  inst.cfg.m = m;
  return inst;
}

CheckReport check_orthonormality(const CheckOptions& opts) {
  CheckReport rep{"pauli-orthonormality", false, 0.0, {}};
  const int n = std::min(opts.n, 3);
  std::vector<std::string> labels;
  std::string cur;
  enumerate_labels(n, cur, labels);
  std::vector<Mat> mats;
  mats.reserve(labels.size());
  for (const auto& l : labels) mats.push_back(to_matrix(parse_label(l, n)));
  for (std::size_t a = 0; a < mats.size(); ++a) {
    for (std::size_t b = 0; b < mats.size(); ++b) {
      const double want = a == b ? 1.0 : 0.0;
      rep.worst = std::max(rep.worst, std::abs(hs_inner(mats[a], mats[b]) - want));
    }
  }
  rep.pass = rep.worst <= 1e-12;
  rep.note = std::to_string(labels.size()) + "^2 inner products at n=" +
             std::to_string(n);
  return rep;
}

CheckReport check_unitarity(const CheckOptions& opts) {
  CheckReport rep{"propagator-unitarity", false, 0.0, {}};
  const int n = std::min(opts.n, 4);
  SplitMix rng(derive_seed({opts.seed, 2}));
  const Instance inst = random_instance(rng, n, 1, 1, 0.02);
  const Mat drift = build_drift(inst.cfg.sys);
  const ControlGenerators gens = build_controls(n);
  const Mat eye = Mat::Identity(drift.rows(), drift.cols());
  const double amps[][2] = {{0.0, 0.0},   {3.7, -1.2},  {-4.9, 4.9},
                            {1e5, -1e5},  {2e4, 3e4},   {0.3, 0.0}};
  for (const auto& a : amps) {
    const Mat u = slice_propagator(drift, gens, a[0], a[1], 0.02);
    rep.worst = std::max(rep.worst, max_abs(u.adjoint() * u - eye));
  }
  rep.pass = rep.worst <= 1e-10;
  rep.note = "amplitudes up to 1e5 at n=" + std::to_string(n);
  return rep;
}

CheckReport check_commutator_rotation(const CheckOptions& opts) {
  CheckReport rep{"commutator-rotation", false, 0.0, {}};
  const int n = std::min(opts.n, 4);
  SplitMix rng(derive_seed({opts.seed, 3}));
  const Mat rho = random_hermitian(rng, 1 << n);
  const double scale = std::max(1.0, max_abs(rho));
  for (int k = 0; k < n; ++k) {
    for (int axis : {kAxisX, kAxisY, kAxisZ}) {
      const Mat sigma = embed_site(n, k, axis);
      const Mat ref = sigma * rho - rho * sigma;
      rep.worst = std::max(
          rep.worst, max_abs(commutator_by_rotation(rho, n, k, axis) - ref) / scale);
      rep.worst = std::max(
          rep.worst, max_abs(site_commutator(rho, n, k, axis) - ref) / scale);
    }
  }
  rep.pass = rep.worst <= 1e-10;
  rep.note = "all sites/axes at n=" + std::to_string(n);
  return rep;
}

CheckReport check_path_equivalence(const CheckOptions& opts) {
  CheckReport rep{"path-equivalence", false, 0.0, {}};
  const int n_max = std::min(opts.n, 4);
  SplitMix rng(derive_seed({opts.seed, 4}));
  int done = 0, attempts = 0;
  while (done < 5 && attempts < 60) {
    ++attempts;
    const int n = 1 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(n_max));
    const int m = 1 + static_cast<int>(rng.next() % 4);
    const int s = 1 + static_cast<int>(rng.next() % 2);
    Instance inst = random_instance(rng, n, m, s, 0.05 + 0.25 * rng.uniform01());
    const OracleAnswer exact = gradient_exact(inst.pulse, inst.cfg);
    const double ref = exact.g.cwiseAbs().maxCoeff();
    if (ref < 1e-6) continue;  // too flat for the sign hook to matter
    const OracleAnswer sampled =
        gradient_sampled(inst.pulse, inst.cfg, 0, opts.path_sign);
    rep.worst = std::max(rep.worst,
                         (sampled.g - exact.g).cwiseAbs().maxCoeff() /
                             std::max(1.0, ref));
    ++done;
  }
  rep.pass = done == 5 && rep.worst <= 1e-10;
  rep.note = std::to_string(done) + " instances, exact measurement";
  return rep;
}

CheckReport check_finite_difference(const CheckOptions& opts) {
  CheckReport rep{"finite-difference", false, 0.0, {}};
  const int n_max = std::min(opts.n, 3);
  SplitMix rng(derive_seed({opts.seed, 5}));
  int done = 0, attempts = 0;
  while (done < 3 && attempts < 60) {
    ++attempts;
    const int n = 1 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(n_max));
    const int m = 1 + static_cast<int>(rng.next() % 3);
    Instance inst = random_instance(rng, n, m, 1, 0.0);  // tau sized to the generators
    const OracleAnswer exact = gradient_exact(inst.pulse, inst.cfg);
    if (exact.g.cwiseAbs().maxCoeff() < 0.05 * inst.pulse.tau * n) continue;
    Eigen::VectorXd u = flatten(inst.pulse);
    Eigen::VectorXd fd(u.size());
    for (Eigen::Index j = 0; j < u.size(); ++j) {
      const double h = 1e-6 * std::max(1.0, std::abs(u[j]));
      Eigen::VectorXd up = u, dn = u;
      up[j] += h;
      dn[j] -= h;
      fd[j] = (fitness(with_amplitudes(inst.pulse, up), inst.cfg) -
               fitness(with_amplitudes(inst.pulse, dn), inst.cfg)) /
              (2.0 * h);
    }
    rep.worst = std::max(rep.worst, (exact.g - fd).cwiseAbs().maxCoeff() /
                                        fd.cwiseAbs().maxCoeff());
    ++done;
  }
  rep.pass = done == 3 && rep.worst <= 2e-2;
  rep.note = std::to_string(done) + " short-slice instances";
  return rep;
}

CheckReport check_query_accounting(const CheckOptions& opts) {
  CheckReport rep{"query-accounting", false, 0.0, {}};
  const int n_max = std::min(opts.n, 3);
  SplitMix rng(derive_seed({opts.seed, 6}));
  long worst = 0;
  for (int i = 0; i < 4; ++i) {
    const int n = 1 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(n_max));
    const int m = 1 + static_cast<int>(rng.next() % 5);
    const int s = 1 + static_cast<int>(rng.next() % 2);
    Instance inst = random_instance(rng, n, m, s, 0.1);
    inst.cfg.model.kind = MeasureKind::kGaussian;
    inst.cfg.model.sigma = 0.01;
    inst.cfg.master_seed = rng.next();
    const Eigen::VectorXd u = flatten(inst.pulse);

    SampledOracle sampled(inst.cfg);
    worst = std::max(worst, std::abs(sampled.evaluate(u).queries -
                                     sampled_query_count(n, m, s)));
    worst = std::max(worst, std::abs(sampled.fitness_only(u).second - s));

    OracleConfig exact_cfg = inst.cfg;
    exact_cfg.model = MeasurementModel{};
    ExactOracle exact(exact_cfg);
    worst = std::max(worst, std::abs(exact.evaluate(u).queries));
    worst = std::max(worst, std::abs(exact.fitness_only(u).second));
  }
  rep.worst = static_cast<double>(worst);
  rep.pass = worst == 0;
  rep.note = "sampled = (4nM+1)|S| full, |S| fitness-only; exact = 0";
  return rep;
}

}  // namespace

std::vector<CheckReport> run_self_checks(const CheckOptions& opts) {
  if (opts.n < 1 || opts.n > kDimCap) {
    throw ConfigError("check: n must be in [1, " + std::to_string(kDimCap) +
                      "], got " + std::to_string(opts.n));
  }
  if (opts.path_sign != 1 && opts.path_sign != -1) {
    throw ConfigError("check: path-sign must be +1 or -1");
  }
  std::vector<CheckReport> reports;
  reports.push_back(check_orthonormality(opts));
  reports.push_back(check_unitarity(opts));
  reports.push_back(check_commutator_rotation(opts));
  reports.push_back(check_path_equivalence(opts));
  reports.push_back(check_finite_difference(opts));
  reports.push_back(check_query_accounting(opts));
  return reports;
}

bool all_passed(const std::vector<CheckReport>& reports) {
  return std::all_of(reports.begin(), reports.end(),
                     [](const CheckReport& r) { return r.pass; });
}

}  // namespace qoc
