#include "qoc/optimize.hpp"

#include <cmath>
#include <stdexcept>

#include "qoc/pauli.hpp"

namespace qoc {

namespace {

double inf_norm(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

// Thrown (and caught inside run_optimizer) when the query budget is reached
// mid-iteration; the in-flight iteration is abandoned.
struct BudgetExhausted {};

class BudgetGate final : public OracleIface {
 public:
  BudgetGate(OracleIface& inner, long budget, long& cum)
      : inner_(inner), budget_(budget), cum_(cum) {}

  OracleAnswer evaluate(const Eigen::VectorXd& u) override {
    gate();
    OracleAnswer ans = inner_.evaluate(u);
    cum_ += ans.queries;
    return ans;
  }

  std::pair<double, long> fitness_only(const Eigen::VectorXd& u) override {
    gate();
    auto pr = inner_.fitness_only(u);
    cum_ += pr.second;
    return pr;
  }

  long calls() const override { return inner_.calls(); }

 private:
  void gate() const {
    if (budget_ >= 0 && cum_ >= budget_) throw BudgetExhausted{};
  }

  OracleIface& inner_;
  long budget_;
  long& cum_;
};

double averaged_fitness(OracleIface& oracle, const Eigen::VectorXd& u, int k,
                        LineSearchOutcome& out) {
  double acc = 0.0;
  for (int i = 0; i < k; ++i) {
    auto [f, q] = oracle.fitness_only(u);
    acc += f;
    out.queries += q;
    ++out.calls;
  }
  return acc / k;
}

}  // namespace

Method method_from_string(const std::string& name) {
  if (name == "ga") return Method::kGa;
  if (name == "cg-fr") return Method::kCgFr;
  if (name == "cg-pr") return Method::kCgPr;
  if (name == "cg-hs") return Method::kCgHs;
  if (name == "qn-dfp") return Method::kQnDfp;
  if (name == "qn-bfgs") return Method::kQnBfgs;
  throw ConfigError("unknown method \"" + name +
                    "\" (expected ga|cg-fr|cg-pr|cg-hs|qn-dfp|qn-bfgs)");
}

std::string method_to_string(Method m) {
  switch (m) {
    case Method::kGa: return "ga";
    case Method::kCgFr: return "cg-fr";
    case Method::kCgPr: return "cg-pr";
    case Method::kCgHs: return "cg-hs";
    case Method::kQnDfp: return "qn-dfp";
    case Method::kQnBfgs: return "qn-bfgs";
  }
  throw std::logic_error("method_to_string: bad enum");
}

LineSearchKind line_search_from_string(const std::string& name) {
  if (name == "backtracking") return LineSearchKind::kBacktracking;
  if (name == "wolfe") return LineSearchKind::kWolfe;
  throw ConfigError("unknown line search \"" + name +
                    "\" (expected backtracking|wolfe)");
}

std::string line_search_to_string(LineSearchKind k) {
  return k == LineSearchKind::kBacktracking ? "backtracking" : "wolfe";
}

bool is_cg(Method m) {
  return m == Method::kCgFr || m == Method::kCgPr || m == Method::kCgHs;
}

bool is_qn(Method m) {
  return m == Method::kQnDfp || m == Method::kQnBfgs;
}

Eigen::VectorXd direction(Method method, const Eigen::VectorXd& g,
                          const OptimizerState& state, double powell_threshold) {
  if (!g.allFinite()) {
    throw std::invalid_argument("direction: gradient has non-finite entries");
  }
  if (!state.has_prev || method == Method::kGa) return g;

  if (is_cg(method)) {
    if (state.g_prev.size() != g.size() || state.p_prev.size() != g.size()) {
      throw std::invalid_argument("direction: state dimension mismatch");
    }
    double beta = 0.0;
    const double gg = g.squaredNorm();
    // Powell restart: successive gradients far from orthogonal.
    if (std::abs(g.dot(state.g_prev)) < powell_threshold * gg) {
      const Eigen::VectorXd y = g - state.g_prev;
      const double gg_prev = state.g_prev.squaredNorm();
      switch (method) {
        case Method::kCgFr:
          beta = gg_prev > 0.0 ? gg / gg_prev : 0.0;
          break;
        case Method::kCgPr:
          beta = gg_prev > 0.0 ? std::max(0.0, g.dot(y) / gg_prev) : 0.0;
          break;
        case Method::kCgHs: {
          const double denom = state.p_prev.dot(state.g_prev - g);
          beta = std::abs(denom) > 1e-300 ? g.dot(y) / denom : 0.0;
          break;
        }
        default:
          break;
      }
    }
    Eigen::VectorXd p = g + beta * state.p_prev;
    if (g.dot(p) <= 0.0) p = g;  // keep ascent
    return p;
  }

  // quasi-Newton
  if (state.h.size() == 0) return g;  // identity until the first update
  if (state.h.rows() != g.size() || state.h.cols() != g.size()) {
    throw std::invalid_argument("direction: inverse-Hessian dimension mismatch");
  }
  Eigen::VectorXd p = state.h * g;
  if (g.dot(p) <= 0.0) p = g;
  return p;
}

bool hessian_update(Method method, Eigen::MatrixXd& h, const Eigen::VectorXd& du,
                    const Eigen::VectorXd& y) {
  if (!is_qn(method)) {
    throw std::invalid_argument("hessian_update: method has no Hessian");
  }
  const Eigen::Index n = du.size();
  if (y.size() != n || h.rows() != n || h.cols() != n) {
    throw std::invalid_argument("hessian_update: dimension mismatch");
  }
  const double dy = du.dot(y);
  if (std::abs(dy) < 1e-12 * du.norm() * y.norm()) return false;  // curvature skip

  if (method == Method::kQnDfp) {
    const Eigen::VectorXd hy = h * y;
    h += du * du.transpose() / dy - hy * hy.transpose() / y.dot(hy);
  } else {
    const double r = 1.0 / dy;
    const Eigen::MatrixXd a =
        Eigen::MatrixXd::Identity(n, n) - r * du * y.transpose();
    h = a * h * a.transpose() + r * du * du.transpose();
  }
  // Strip round-off asymmetry; the temporary avoids aliasing h with its own
  // transpose during the assignment.
  const Eigen::MatrixXd sym = 0.5 * (h + h.transpose());
  h = sym;
  return true;
}

LineSearchOutcome line_search(OracleIface& oracle, const Eigen::VectorXd& u,
                              double f0, const Eigen::VectorXd& g,
                              const Eigen::VectorXd& p, LineSearchKind kind,
                              const OptParams& params, double alpha0) {
  const double gp = g.dot(p);
  if (!(gp > 0.0)) {
    throw std::invalid_argument("line_search: need an ascent direction (g.p > 0)");
  }
  if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) {
    throw std::invalid_argument("line_search: alpha0 must be positive and finite");
  }
  const int k = std::max(1, params.avg_shots_f);
  LineSearchOutcome out;
  const auto armijo = [&](double alpha, double f) {
    return f >= f0 + params.c1 * alpha * gp;
  };

  if (kind == LineSearchKind::kBacktracking) {
    double alpha = alpha0;
    for (int j = 0; j <= params.max_backtracks; ++j) {
      const double f_try = averaged_fitness(oracle, u + alpha * p, k, out);
      if (armijo(alpha, f_try)) {
        out.alpha = alpha;
        out.f = f_try;
        return out;
      }
      alpha *= params.rho;
    }
    return out;  // alpha = 0: stall
  }

  // Strong-Wolfe bracket and zoom, maximizing. Each probe needs the local
  // slope, so it spends a full evaluate (plus k-1 fitness repeats).
  const double c2 = is_qn(params.method) ? params.c2_qn : params.c2_cg;
  struct Probe {
    double f;
    double slope;  // d f(u + a p) / d a
  };
  double best_alpha = 0.0, best_f = 0.0;
  const auto probe = [&](double alpha) {
    OracleAnswer ans = oracle.evaluate(u + alpha * p);
    out.queries += ans.queries;
    ++out.calls;
    double f = ans.f;
    if (k > 1) {
      LineSearchOutcome extra;
      f = (f + (k - 1) * averaged_fitness(oracle, u + alpha * p, k - 1, extra)) / k;
      out.queries += extra.queries;
      out.calls += extra.calls;
    }
    if (armijo(alpha, f) && (best_alpha == 0.0 || f > best_f)) {
      best_alpha = alpha;
      best_f = f;
    }
    return Probe{f, ans.g.dot(p)};
  };
  const auto finish = [&](double alpha, double f) {
    out.alpha = alpha;
    out.f = f;
    return out;
  };
  const auto fallback = [&] { return finish(best_alpha, best_f); };

  int probes_left = params.max_line_search_calls;
  const auto zoom = [&](double lo, double f_lo, double hi) -> LineSearchOutcome {
    while (probes_left-- > 0) {
      const double alpha = 0.5 * (lo + hi);
      const Probe pr = probe(alpha);
      if (!armijo(alpha, pr.f) || pr.f <= f_lo) {
        hi = alpha;
      } else {
        if (std::abs(pr.slope) <= c2 * gp) return finish(alpha, pr.f);
        if (pr.slope * (hi - lo) <= 0.0) hi = lo;
        lo = alpha;
        f_lo = pr.f;
      }
    }
    return fallback();
  };

  double alpha_prev = 0.0, f_prev = f0;
  double alpha = alpha0;
  bool first = true;
  while (probes_left-- > 0) {
    const Probe pr = probe(alpha);
    if (!armijo(alpha, pr.f) || (!first && pr.f <= f_prev)) {
      return zoom(alpha_prev, f_prev, alpha);
    }
    if (std::abs(pr.slope) <= c2 * gp) return finish(alpha, pr.f);
    if (pr.slope <= 0.0) return zoom(alpha, pr.f, alpha_prev);
    alpha_prev = alpha;
    f_prev = pr.f;
    first = false;
    alpha *= 2.0;
  }
  return fallback();
}

RunResult run_optimizer(OracleIface& oracle, const Eigen::VectorXd& u0,
                        const OptParams& params, const RunObserver& observer) {
  const StopRule& stop = params.stop;
  RunResult res;
  res.u = u0;
  long cum = 0;
  OptimizerState state;

  // Initial evaluation: always allowed, even with a zero budget.
  OracleAnswer ans = oracle.evaluate(res.u);
  cum += ans.queries;
  double f = ans.f;
  Eigen::VectorXd g = ans.g;
  res.history.push_back({0, f, inf_norm(g), 0.0, cum});
  if (observer) observer(res.history.back(), state);

  BudgetGate gate(oracle, stop.query_budget, cum);
  int iter = 0;
  int stall = 0;
  double last_alpha = 0.0;

  while (true) {
    if (f >= stop.target_f) {
      res.status = "converged";
      break;
    }
    if (stop.grad_tol > 0.0 && inf_norm(g) <= stop.grad_tol) {
      res.status = "converged";
      break;
    }
    if (stop.query_budget >= 0 && cum >= stop.query_budget) {
      res.status = "budget";
      break;
    }
    if (iter >= stop.max_iters) {
      res.status = "max_iters";
      break;
    }

    const Eigen::VectorXd p =
        direction(params.method, g, state, params.powell_threshold);
    LineSearchOutcome ls;
    bool exhausted = false;
    if (g.dot(p) > 0.0) {
      double alpha0;
      if (is_qn(params.method) && state.h_updated) {
        alpha0 = 1.0;  // natural quasi-Newton step
      } else if (last_alpha > 0.0) {
        alpha0 = 2.0 * last_alpha;
      } else {
        alpha0 = 1.0 / std::max(inf_norm(g), 1e-12);
      }
      try {
        ls = line_search(gate, res.u, f, g, p, params.line_search, params, alpha0);
      } catch (const BudgetExhausted&) {
        exhausted = true;
      }
    }
    if (exhausted) {
      res.status = "budget";
      break;
    }

    if (ls.alpha == 0.0) {
      // No acceptable step. Record the event, drop direction memory, retry
      // from steepest ascent; a second failure in a row ends the run.
      ++stall;
      if (stall >= 2) {
        res.status = "stalled";
        break;
      }
      state.g_prev.resize(0);
      state.p_prev.resize(0);
      state.h.resize(0, 0);
      state.has_prev = false;
      state.h_updated = false;
      last_alpha = 0.0;
      ++iter;
      res.history.push_back({iter, f, inf_norm(g), 0.0, cum});
      if (observer) observer(res.history.back(), state);
      continue;
    }
    stall = 0;

    const Eigen::VectorXd u_new = res.u + ls.alpha * p;
    OracleAnswer next;
    try {
      next = gate.evaluate(u_new);
    } catch (const BudgetExhausted&) {
      res.status = "budget";  // step abandoned: keep the last evaluated iterate
      break;
    }

    if (is_qn(params.method)) {
      const Eigen::VectorXd du = ls.alpha * p;
      // Pairing y = g_old - g_new keeps du.y > 0 on concave stretches, which
      // the updates need to stay positive definite when maximizing.
      const Eigen::VectorXd y = g - next.g;
      const double dy = du.dot(y);
      if (dy > 1e-12 * du.norm() * y.norm()) {
        if (state.h.size() == 0) {
          state.h = Eigen::MatrixXd::Identity(u0.size(), u0.size());
        }
        if (!state.h_updated) state.h *= dy / y.squaredNorm();  // scale before first update
        if (hessian_update(params.method, state.h, du, y)) state.h_updated = true;
      } else {
        ++state.curvature_skips;
      }
    }

    state.g_prev = g;
    state.p_prev = p;
    state.has_prev = true;
    res.u = u_new;
    f = next.f;
    g = next.g;
    last_alpha = ls.alpha;
    ++iter;
    res.history.push_back({iter, f, inf_norm(g), ls.alpha, cum});
    if (observer) observer(res.history.back(), state);
  }

  res.total_queries = cum;
  res.curvature_skips = state.curvature_skips;
  return res;
}

}  // namespace qoc
