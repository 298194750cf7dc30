#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qoc/runner.hpp"
#include "qoc/selfcheck.hpp"

namespace {

// Flags shared by `run` and `eval`, gathered before manifest finalization.
struct CommonFlags {
  qoc::RunManifest m;
  std::string pulse_path;
  std::string random_init;
  double noise_sigma = 0.0;
  long shots = 0;
  CLI::Option* sigma_opt = nullptr;
  CLI::Option* shots_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonFlags& c) {
  cmd->add_option("--system", c.m.system_path,
                  "spin-system JSON file (required)");
  cmd->add_option("--target", c.m.target_spec,
                  "target state: inline \"LABEL:coeff,...\" or JSON file");
  cmd->add_option("--initial", c.m.initial_spec,
                  "initial state, same grammar as --target");
  auto* pulse = cmd->add_option("--pulse", c.pulse_path, "initial pulse CSV");
  auto* rand_init = cmd->add_option(
      "--random-init", c.random_init,
      "draw initial amplitudes uniformly from \"lo,hi\" (else zeros)");
  pulse->excludes(rand_init);
  cmd->add_option("--tau", c.m.tau, "slice duration in seconds");
  cmd->add_option("--slices", c.m.slices, "number of pulse slices M");
  cmd->add_option("--oracle", c.m.oracle, "oracle backend: exact|sampled")
      ->check(CLI::IsMember({"exact", "sampled"}));
  c.sigma_opt = cmd->add_option("--noise-sigma", c.noise_sigma,
                                "gaussian noise per expectation estimate");
  c.shots_opt = cmd->add_option("--shots", c.shots,
                                "projective shots per expectation estimate");
  cmd->add_option("--seed", c.m.seed, "master seed for all randomness");
}

void finalize(CommonFlags& c) {
  if (!c.pulse_path.empty()) {
    c.m.init = {"file", 0.0, 0.0, c.pulse_path};
  } else if (!c.random_init.empty()) {
    double lo = 0.0, hi = 0.0;
    int used = 0;
    if (std::sscanf(c.random_init.c_str(), "%lf,%lf%n", &lo, &hi, &used) != 2 ||
        used != static_cast<int>(c.random_init.size())) {
      throw qoc::ConfigError("--random-init expects \"lo,hi\", got \"" +
                             c.random_init + "\"");
    }
    if (!(lo <= hi)) throw qoc::ConfigError("--random-init needs lo <= hi");
    c.m.init = {"random", lo, hi, ""};
  }  // else: zeros (default)

  const bool has_sigma = c.sigma_opt->count() > 0;
  const bool has_shots = c.shots_opt->count() > 0;
  if (has_sigma && has_shots) {
    throw qoc::ConfigError("--noise-sigma and --shots are mutually exclusive");
  }
  if ((has_sigma || has_shots) && c.m.oracle != "sampled") {
    throw qoc::ConfigError("noise flags require --oracle sampled");
  }
  if (has_shots) {
    c.m.model.kind = qoc::MeasureKind::kBorn;
    c.m.model.shots = c.shots;
  } else if (has_sigma) {
    c.m.model.kind = qoc::MeasureKind::kGaussian;
    c.m.model.sigma = c.noise_sigma;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pulse-level quantum control: optimize, evaluate, self-check"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "optimize a pulse and write artifacts");
  add_common(run, run_flags);
  run->add_option("--method", run_flags.m.method,
                  "ga|cg-fr|cg-pr|cg-hs|qn-dfp|qn-bfgs");
  run->add_option("--line-search", run_flags.m.line_search,
                  "backtracking|wolfe");
  run->add_option("--max-iters", run_flags.m.stop.max_iters, "iteration cap");
  run->add_option("--grad-tol", run_flags.m.stop.grad_tol,
                  "stop when the gradient inf-norm drops this low");
  run->add_option("--target-f", run_flags.m.stop.target_f,
                  "stop once the fitness reaches this value");
  run->add_option("--query-budget", run_flags.m.stop.query_budget,
                  "cumulative oracle-query cap (-1 = unlimited)");
  run->add_option("--avg-shots-f", run_flags.m.avg_shots_f,
                  "average this many fitness estimates per line-search probe");
  run->add_option("--out", run_flags.m.out_dir, "output directory (required)");

  CommonFlags eval_flags;
  CLI::App* eval = app.add_subcommand("eval", "single oracle call, JSON output");
  add_common(eval, eval_flags);

  int check_n = 3;
  int check_path_sign = 1;
  std::uint64_t check_seed = 12345;
  CLI::App* check = app.add_subcommand("check", "built-in invariant suite");
  check->add_option("--n", check_n, "spin count for randomized checks");
  check->add_option("--path-sign", check_path_sign,
                    "mutation hook; -1 must fail the path-equivalence check");
  check->add_option("--seed", check_seed, "seed for the check instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) {
      finalize(run_flags);
      const qoc::RunArtifacts art = qoc::run_job(run_flags.m);
      std::cout << "status=" << art.status << " final_f=" << art.final_f
                << " iterations=" << art.iterations
                << " total_queries=" << art.total_queries
                << " out=" << run_flags.m.out_dir << "\n";
      return art.exit_code;
    }
    if (eval->parsed()) {
      finalize(eval_flags);
      return qoc::eval_job(eval_flags.m, std::cout);
    }
    // check
    qoc::CheckOptions opts;
    opts.n = check_n;
    opts.path_sign = check_path_sign;
    opts.seed = check_seed;
    const auto reports = qoc::run_self_checks(opts);
    bool ok = true;
    for (const auto& r : reports) {
      std::printf("%-22s %s  worst=%.3g  %s\n", r.name.c_str(),
                  r.pass ? "PASS" : "FAIL", r.worst, r.note.c_str());
      ok = ok && r.pass;
    }
    std::printf("%s\n", ok ? "all checks passed" : "CHECK FAILURES");
    return ok ? 0 : 1;
  } catch (const qoc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
