#include "qoc/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace qoc {

namespace {

// Prebuilt matrices an oracle call needs besides the pulse.
struct Work {
  Mat drift;
  ControlGenerators gens;
  std::vector<Mat> term_mats;
  Mat target_mat;
};

Work make_work(const OracleConfig& cfg) {
  Work w{build_drift(cfg.sys), build_controls(cfg.sys.n), {}, {}};
  w.term_mats.reserve(cfg.target.terms.size());
  for (const auto& [p, x] : cfg.target.terms) {
    (void)x;
    w.term_mats.push_back(to_matrix(p));
  }
  const std::int64_t dim = std::int64_t{1} << cfg.sys.n;
  w.target_mat = Mat::Zero(dim, dim);
  for (std::size_t s = 0; s < w.term_mats.size(); ++s) {
    w.target_mat += cfg.target.terms[s].second * w.term_mats[s];
  }
  return w;
}

void check_pulse_matches(const OracleConfig& cfg, const ControlPulse& pulse) {
  validate_pulse(pulse);
  if (pulse.slices() != cfg.m) {
    throw ConfigError("oracle: pulse has " + std::to_string(pulse.slices()) +
                      " slices but the config says M=" + std::to_string(cfg.m));
  }
  if (pulse.tau != cfg.tau) {
    throw ConfigError("oracle: pulse tau " + std::to_string(pulse.tau) +
                      " does not match the config tau " + std::to_string(cfg.tau));
  }
}

// Estimated fitness; appends the per-term experiment count to *queries when
// the caller accounts for emulated experiments.
double fitness_core(const Work& w, const OracleConfig& cfg, const Mat& rho_f,
                    std::uint64_t call_index, long* queries) {
  double f = 0.0;
  for (std::size_t s = 0; s < w.term_mats.size(); ++s) {
    const double v = hs_inner(rho_f, w.term_mats[s]);
    SplitMix stream(derive_seed({cfg.master_seed, call_index, kSeedFitness,
                                 static_cast<std::uint64_t>(s)}));
    f += cfg.target.terms[s].second * estimate_expectation(v, cfg.model, stream);
    if (queries) ++*queries;
  }
  return f;
}

Mat final_state(const Work& w, const OracleConfig& cfg, const ControlPulse& pulse) {
  Mat rho = cfg.rho_i;
  for (int m = 0; m < pulse.slices(); ++m) {
    const Mat u = slice_propagator(w.drift, w.gens, pulse.ux[static_cast<std::size_t>(m)],
                                   pulse.uy[static_cast<std::size_t>(m)], pulse.tau);
    rho = u * rho * u.adjoint();
  }
  return rho;
}

OracleAnswer exact_core(const Work& w, const OracleConfig& cfg,
                        const ControlPulse& pulse) {
  const int n = cfg.sys.n;
  const int m_total = pulse.slices();
  const std::vector<Mat> u = slice_propagators(w.drift, w.gens, pulse);
  const std::vector<Mat> fwd = forward_chain(u, cfg.rho_i);
  const std::vector<Mat> lam = backward_chain(u, w.target_mat);

  OracleAnswer ans;
  ans.f = hs_inner(fwd[static_cast<std::size_t>(m_total)], w.target_mat);
  ans.g = Eigen::VectorXd::Zero(2 * m_total);
  ans.queries = 0;
  const Complex min_i_tau(0.0, -pulse.tau);
  for (int mi = 1; mi <= m_total; ++mi) {
    const Mat& rho_m = fwd[static_cast<std::size_t>(mi)];
    const Mat& lam_m = lam[static_cast<std::size_t>(mi)];
    for (int axis = 0; axis < 2; ++axis) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) {
        // g_axis[m] += Tr(-i tau [sigma_axis^k, rho_m] lam_m) / 2^n
        acc += hs_inner(min_i_tau * site_commutator(rho_m, n, k, axis), lam_m);
      }
      ans.g[axis * m_total + (mi - 1)] = acc;
    }
  }
  return ans;
}

OracleAnswer sampled_core(const Work& w, const OracleConfig& cfg,
                          const ControlPulse& pulse, std::uint64_t call_index,
                          int combine_sign) {
  const int n = cfg.sys.n;
  const int m_total = pulse.slices();
  const std::size_t n_terms = w.term_mats.size();
  const std::vector<Mat> u = slice_propagators(w.drift, w.gens, pulse);
  const std::vector<Mat> fwd = forward_chain(u, cfg.rho_i);
  std::vector<std::vector<Mat>> back(n_terms);
  for (std::size_t s = 0; s < n_terms; ++s) {
    back[s] = backward_chain(u, w.term_mats[s]);
  }

  OracleAnswer ans;
  ans.g = Eigen::VectorXd::Zero(2 * m_total);
  ans.queries = 0;
  ans.f = fitness_core(w, cfg, fwd[static_cast<std::size_t>(m_total)], call_index,
                       &ans.queries);

  for (int mi = 1; mi <= m_total; ++mi) {
    const Mat& rho_m = fwd[static_cast<std::size_t>(mi)];
    for (int k = 0; k < n; ++k) {
      for (int axis = 0; axis < 2; ++axis) {
        const Mat plus = site_pi2_conjugate(rho_m, n, k, axis, +1);
        const Mat minus = site_pi2_conjugate(rho_m, n, k, axis, -1);
        double acc = 0.0;
        for (std::size_t s = 0; s < n_terms; ++s) {
          const Mat& lam_s = back[s][static_cast<std::size_t>(mi)];
          double est[2];
          const Mat* states[2] = {&plus, &minus};
          for (int sign_idx = 0; sign_idx < 2; ++sign_idx) {
            SplitMix stream(derive_seed(
                {cfg.master_seed, call_index, kSeedGradient,
                 static_cast<std::uint64_t>(mi), static_cast<std::uint64_t>(k),
                 static_cast<std::uint64_t>(axis),
                 static_cast<std::uint64_t>(sign_idx),
                 static_cast<std::uint64_t>(s)}));
            est[sign_idx] = estimate_expectation(hs_inner(*states[sign_idx], lam_s),
                                                 cfg.model, stream);
            ++ans.queries;
          }
          acc += cfg.target.terms[s].second * (est[0] - est[1]);
        }
        ans.g[axis * m_total + (mi - 1)] += combine_sign * pulse.tau * acc;
      }
    }
  }
  return ans;
}

}  // namespace

MeasurementConfig measurement_config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string()) {
    throw ConfigError("measurement config: expected an object with a \"kind\" string");
  }
  MeasurementConfig out;
  const std::string kind = doc["kind"].get<std::string>();
  if (kind == "exact") {
    out.model.kind = MeasureKind::kExact;
  } else if (kind == "gaussian") {
    out.model.kind = MeasureKind::kGaussian;
  } else if (kind == "born") {
    out.model.kind = MeasureKind::kBorn;
  } else {
    throw ConfigError("measurement config: unknown kind \"" + kind + "\"");
  }
  if (doc.contains("sigma")) {
    if (!doc["sigma"].is_number()) {
      throw ConfigError("measurement config: sigma must be a number");
    }
    out.model.sigma = doc["sigma"].get<double>();
  }
  if (doc.contains("shots")) {
    if (!doc["shots"].is_number_integer()) {
      throw ConfigError("measurement config: shots must be an integer");
    }
    out.model.shots = doc["shots"].get<long>();
  }
  if (doc.contains("master_seed")) {
    if (!doc["master_seed"].is_number_unsigned() && !doc["master_seed"].is_number_integer()) {
      throw ConfigError("measurement config: master_seed must be an integer");
    }
    out.master_seed = doc["master_seed"].get<std::uint64_t>();
  }
  if (out.model.kind == MeasureKind::kGaussian &&
      (!(out.model.sigma >= 0.0) || !std::isfinite(out.model.sigma))) {
    throw ConfigError("measurement config: gaussian requires sigma >= 0");
  }
  if (out.model.kind == MeasureKind::kBorn && out.model.shots < 1) {
    throw ConfigError("measurement config: born requires shots >= 1");
  }
  return out;
}

void validate_oracle_config(const OracleConfig& cfg) {
  validate_system(cfg.sys);
  const std::int64_t dim = std::int64_t{1} << cfg.sys.n;
  if (cfg.rho_i.rows() != dim || cfg.rho_i.cols() != dim) {
    throw ConfigError("oracle config: rho_i is " + std::to_string(cfg.rho_i.rows()) +
                      "x" + std::to_string(cfg.rho_i.cols()) + ", expected " +
                      std::to_string(dim) + "x" + std::to_string(dim));
  }
  if ((cfg.rho_i - cfg.rho_i.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ConfigError("oracle config: rho_i is not Hermitian");
  }
  if (cfg.target.n != cfg.sys.n) {
    throw ConfigError("oracle config: target has n=" + std::to_string(cfg.target.n) +
                      " but the system has n=" + std::to_string(cfg.sys.n));
  }
  if (cfg.target.terms.empty()) {
    throw ConfigError("oracle config: target has no terms");
  }
  if (!(cfg.tau > 0.0) || !std::isfinite(cfg.tau)) {
    throw ConfigError("oracle config: tau must be > 0");
  }
  if (cfg.m < 1) {
    throw ConfigError("oracle config: M must be >= 1");
  }
  switch (cfg.model.kind) {
    case MeasureKind::kGaussian:
      if (!(cfg.model.sigma >= 0.0) || !std::isfinite(cfg.model.sigma)) {
        throw ConfigError("oracle config: gaussian model requires sigma >= 0");
      }
      break;
    case MeasureKind::kBorn: {
      if (cfg.model.shots < 1) {
        throw ConfigError("oracle config: born model requires shots >= 1");
      }
      Eigen::SelfAdjointEigenSolver<Mat> es(cfg.rho_i);
      if (es.eigenvalues().minCoeff() < -1e-9 ||
          std::abs(cfg.rho_i.trace().real() - 1.0) > 1e-9) {
        throw ConfigError("oracle config: born model requires a positive "
                          "semidefinite, trace-one initial state");
      }
      break;
    }
    case MeasureKind::kExact:
      break;
  }
  // Unitary evolution preserves the spectrum, so the target is reachable only
  // if it shares rho_i's eigenvalues.
  Eigen::SelfAdjointEigenSolver<Mat> es_i(cfg.rho_i);
  Eigen::SelfAdjointEigenSolver<Mat> es_t(state_matrix(cfg.target));
  const double mismatch =
      (es_i.eigenvalues() - es_t.eigenvalues()).cwiseAbs().maxCoeff();
  if (mismatch > 1e-6) {
    throw ConfigError("oracle config: rho_i and target spectra differ by " +
                      std::to_string(mismatch) +
                      " (states are not unitarily convertible)");
  }
}

long sampled_query_count(int n, int m, int s) {
  return (4L * n * m + 1L) * s;
}

double estimate_expectation(double true_value, const MeasurementModel& model,
                            SplitMix& stream) {
  switch (model.kind) {
    case MeasureKind::kExact:
      return true_value;
    case MeasureKind::kGaussian:
      return true_value + model.sigma * stream.normal();
    case MeasureKind::kBorn: {
      if (std::abs(true_value) > 1.0 + 1e-9) {
        throw std::runtime_error("estimate_expectation: born sampling needs "
                                 "|value| <= 1, got " + std::to_string(true_value));
      }
      const double p_plus = std::min(1.0, std::max(0.0, (1.0 + true_value) / 2.0));
      long sum = 0;
      for (long i = 0; i < model.shots; ++i) {
        sum += stream.pm_one(p_plus);
      }
      return static_cast<double>(sum) / static_cast<double>(model.shots);
    }
  }
  throw std::logic_error("estimate_expectation: unknown model kind");
}

Mat commutator_by_rotation(const Mat& rho, int n, int k, int axis) {
  const Mat plus = site_pi2_conjugate(rho, n, k, axis, +1);
  const Mat minus = site_pi2_conjugate(rho, n, k, axis, -1);
  return Complex(0.0, 1.0) * (plus - minus);
}

double fitness(const ControlPulse& pulse, const OracleConfig& cfg,
               std::uint64_t call_index) {
  validate_oracle_config(cfg);
  check_pulse_matches(cfg, pulse);
  const Work w = make_work(cfg);
  return fitness_core(w, cfg, final_state(w, cfg, pulse), call_index, nullptr);
}

OracleAnswer gradient_exact(const ControlPulse& pulse, const OracleConfig& cfg) {
  validate_oracle_config(cfg);
  check_pulse_matches(cfg, pulse);
  return exact_core(make_work(cfg), cfg, pulse);
}

OracleAnswer gradient_sampled(const ControlPulse& pulse, const OracleConfig& cfg,
                              std::uint64_t call_index, int combine_sign) {
  validate_oracle_config(cfg);
  check_pulse_matches(cfg, pulse);
  return sampled_core(make_work(cfg), cfg, pulse, call_index, combine_sign);
}

ExactOracle::ExactOracle(OracleConfig cfg) : cfg_(std::move(cfg)) {
  validate_oracle_config(cfg_);
  proto_ = zeros_pulse(cfg_.tau, cfg_.m);
}

OracleAnswer ExactOracle::evaluate(const Eigen::VectorXd& u) {
  ++calls_;
  return exact_core(make_work(cfg_), cfg_, with_amplitudes(proto_, u));
}

std::pair<double, long> ExactOracle::fitness_only(const Eigen::VectorXd& u) {
  ++calls_;
  const Work w = make_work(cfg_);
  const Mat rho_f = final_state(w, cfg_, with_amplitudes(proto_, u));
  double f = 0.0;
  for (std::size_t s = 0; s < w.term_mats.size(); ++s) {
    f += cfg_.target.terms[s].second * hs_inner(rho_f, w.term_mats[s]);
  }
  return {f, 0};
}

SampledOracle::SampledOracle(OracleConfig cfg) : cfg_(std::move(cfg)) {
  validate_oracle_config(cfg_);
  proto_ = zeros_pulse(cfg_.tau, cfg_.m);
}

OracleAnswer SampledOracle::evaluate(const Eigen::VectorXd& u) {
  const std::uint64_t call_index = static_cast<std::uint64_t>(calls_++);
  return sampled_core(make_work(cfg_), cfg_, with_amplitudes(proto_, u),
                      call_index, 1);
}

std::pair<double, long> SampledOracle::fitness_only(const Eigen::VectorXd& u) {
  const std::uint64_t call_index = static_cast<std::uint64_t>(calls_++);
  const Work w = make_work(cfg_);
  const Mat rho_f = final_state(w, cfg_, with_amplitudes(proto_, u));
  long queries = 0;
  const double f = fitness_core(w, cfg_, rho_f, call_index, &queries);
  return {f, queries};
}

}  // namespace qoc
