#include "qoc/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <vector>

namespace qoc {

namespace fs = std::filesystem;

namespace {

struct BuiltJob {
  OracleConfig cfg;
  ControlPulse pulse;
};

BuiltJob build_job(const RunManifest& m) {
  BuiltJob b;
  if (m.system_path.empty()) throw ConfigError("missing system file (--system)");
  b.cfg.sys = load_system_file(m.system_path);
  if (m.target_spec.empty()) throw ConfigError("missing target state (--target)");
  b.cfg.target = load_state_spec(m.target_spec, b.cfg.sys.n);
  if (m.initial_spec.empty()) throw ConfigError("missing initial state (--initial)");
  b.cfg.rho_i = state_matrix(load_state_spec(m.initial_spec, b.cfg.sys.n));
  b.cfg.model = m.model;
  b.cfg.master_seed = m.seed;

  if (m.init.kind == "file") {
    b.pulse = read_pulse_csv(
        m.init.path, m.tau > 0.0 ? std::optional<double>(m.tau) : std::nullopt);
    if (m.slices > 0 && m.slices != b.pulse.slices()) {
      throw ConfigError("--slices " + std::to_string(m.slices) +
                        " does not match the pulse file's " +
                        std::to_string(b.pulse.slices()) + " slices");
    }
  } else {
    if (!(m.tau > 0.0)) throw ConfigError("missing or non-positive --tau");
    if (m.slices < 1) throw ConfigError("missing or non-positive --slices");
    b.pulse = m.init.kind == "random"
                  ? random_pulse(m.tau, m.slices, m.init.lo, m.init.hi, m.seed)
                  : zeros_pulse(m.tau, m.slices);
  }
  b.cfg.tau = b.pulse.tau;
  b.cfg.m = b.pulse.slices();
  return b;
}

std::unique_ptr<OracleIface> make_oracle(const std::string& kind,
                                         const OracleConfig& cfg) {
  if (kind == "exact") return std::make_unique<ExactOracle>(cfg);
  if (kind == "sampled") return std::make_unique<SampledOracle>(cfg);
  throw ConfigError("unknown oracle \"" + kind + "\" (expected exact|sampled)");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

}  // namespace

SparsePauliState load_state_spec(const std::string& spec, int n_expected) {
  if (fs::exists(spec)) {
    std::ifstream in(spec);
    if (!in) throw ConfigError("cannot open state file: " + spec);
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("state file " + spec + ": " + e.what());
    }
    return parse_state_json(doc, n_expected);
  }
  if (spec.size() > 5 && spec.compare(spec.size() - 5, 5, ".json") == 0) {
    throw ConfigError("state file not found: " + spec);
  }
  return parse_state_inline(spec, n_expected);
}

nlohmann::json manifest_to_json(const RunManifest& m) {
  nlohmann::json init{{"kind", m.init.kind}};
  if (m.init.kind == "random") {
    init["lo"] = m.init.lo;
    init["hi"] = m.init.hi;
  } else if (m.init.kind == "file") {
    init["path"] = m.init.path;
  }
  nlohmann::json measurement;
  switch (m.model.kind) {
    case MeasureKind::kExact:
      measurement = {{"kind", "exact"}};
      break;
    case MeasureKind::kGaussian:
      measurement = {{"kind", "gaussian"}, {"sigma", m.model.sigma}};
      break;
    case MeasureKind::kBorn:
      measurement = {{"kind", "born"}, {"shots", m.model.shots}};
      break;
  }
  nlohmann::json stop{{"max_iters", m.stop.max_iters},
                      {"grad_tol", m.stop.grad_tol},
                      {"query_budget", m.stop.query_budget}};
  if (std::isfinite(m.stop.target_f)) {
    stop["target_f"] = m.stop.target_f;
  } else {
    stop["target_f"] = nullptr;  // disabled
  }
  return nlohmann::json{{"system", m.system_path},
                        {"target", m.target_spec},
                        {"initial", m.initial_spec},
                        {"init", init},
                        {"tau_s", m.tau},
                        {"slices", m.slices},
                        {"oracle", m.oracle},
                        {"measurement", measurement},
                        {"seed", m.seed},
                        {"method", m.method},
                        {"line_search", m.line_search},
                        {"stop", stop},
                        {"avg_shots_f", m.avg_shots_f},
                        {"out", m.out_dir}};
}

RunArtifacts run_job(const RunManifest& m) {
  const auto t0 = std::chrono::steady_clock::now();
  BuiltJob b = build_job(m);

  OptParams params;
  params.method = method_from_string(m.method);
  params.line_search = line_search_from_string(m.line_search);
  params.stop = m.stop;
  params.avg_shots_f = m.avg_shots_f;

  if (m.out_dir.empty()) throw ConfigError("missing output directory (--out)");
  const fs::path out(m.out_dir);
  fs::create_directories(out);
  if (fs::exists(out / "manifest.json")) {
    throw ConfigError("refusing to overwrite an existing run: " +
                      (out / "manifest.json").string());
  }
  write_text(out / "manifest.json", manifest_to_json(m).dump(2) + "\n");

  auto oracle = make_oracle(m.oracle, b.cfg);
  const RunResult res = run_optimizer(*oracle, flatten(b.pulse), params);

  std::string csv = "iter,f,grad_norm,alpha,queries_cum\n";
  char buf[200];
  for (const IterRow& r : res.history) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%ld\n", r.iter, r.f,
                  r.grad_norm, r.alpha, r.queries_cum);
    csv += buf;
  }
  write_text(out / "convergence.csv", csv);
  write_pulse_csv((out / "final_pulse.csv").string(),
                  with_amplitudes(b.pulse, res.u));

  // Report the final fitness from a fresh oracle (call index 0) so that
  // re-evaluating final_pulse.csv under the same seed reproduces it exactly;
  // this re-measurement is not part of the run's query total.
  const double final_f = make_oracle(m.oracle, b.cfg)->fitness_only(res.u).first;

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const nlohmann::json result{{"status", res.status},
                              {"final_f", final_f},
                              {"iterations", static_cast<int>(res.history.size())},
                              {"total_queries", res.total_queries},
                              {"wall_time_s", wall},
                              {"manifest", manifest_to_json(m)}};
  write_text(out / "result.json", result.dump(2) + "\n");

  RunArtifacts art;
  art.status = res.status;
  art.final_f = final_f;
  art.iterations = static_cast<int>(res.history.size());
  art.total_queries = res.total_queries;
  art.exit_code = res.status == "stalled" ? 2 : 0;
  return art;
}

int eval_job(const RunManifest& m, std::ostream& os) {
  BuiltJob b = build_job(m);
  auto oracle = make_oracle(m.oracle, b.cfg);
  const OracleAnswer ans = oracle->evaluate(flatten(b.pulse));
  const nlohmann::json out{
      {"f", ans.f},
      {"g", std::vector<double>(ans.g.data(), ans.g.data() + ans.g.size())},
      {"queries", ans.queries}};
  os << out.dump(2) << "\n";
  return 0;
}

}  // namespace qoc
