#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qoc/oracle_iface.hpp"

namespace qoc {

enum class Method { kGa, kCgFr, kCgPr, kCgHs, kQnDfp, kQnBfgs };
enum class LineSearchKind { kBacktracking, kWolfe };

Method method_from_string(const std::string& name);
std::string method_to_string(Method m);
LineSearchKind line_search_from_string(const std::string& name);
std::string line_search_to_string(LineSearchKind k);

bool is_cg(Method m);
bool is_qn(Method m);

// Termination thresholds; a disabled criterion is its sentinel default.
struct StopRule {
  int max_iters = 200;
  double grad_tol = 0.0;  // stop when the gradient inf-norm drops to this; 0 disables
  double target_f = std::numeric_limits<double>::infinity();
  long query_budget = -1;  // cumulative oracle queries; -1 disables
};

struct OptParams {
  Method method = Method::kGa;
  LineSearchKind line_search = LineSearchKind::kBacktracking;
  StopRule stop;
  double c1 = 1e-4;             // Armijo slope fraction
  double rho = 0.5;             // backtracking shrink factor
  int max_backtracks = 30;
  double c2_cg = 0.4;           // strong curvature bound, cg/ga
  double c2_qn = 0.9;           // strong curvature bound, quasi-Newton
  int max_line_search_calls = 30;
  int avg_shots_f = 1;          // average this many fitness estimates per probe
  double powell_threshold = 0.1;
};

// Cross-iteration memory for the direction rules. h is the inverse-Hessian
// approximation; empty means "identity, never touched".
struct OptimizerState {
  Eigen::VectorXd g_prev;
  Eigen::VectorXd p_prev;
  Eigen::MatrixXd h;
  bool has_prev = false;
  bool h_updated = false;
  long curvature_skips = 0;
};

// Ascent direction for the current gradient. First iteration is always p = g.
// cg-*: p = g + beta p_prev with the named beta formula (pr clamped at 0);
// a Powell restart (|g.g_prev| >= threshold ||g||^2) or a non-ascent result
// (g.p <= 0) falls back to p = g. qn-*: p = h g.
Eigen::VectorXd direction(Method method, const Eigen::VectorXd& g,
                          const OptimizerState& state,
                          double powell_threshold = 0.1);

// Rank-two inverse-Hessian update (dfp or bfgs), in place. Returns false and
// leaves h untouched when |du.y| < 1e-12 ||du|| ||y|| (curvature too small).
bool hessian_update(Method method, Eigen::MatrixXd& h,
                    const Eigen::VectorXd& du, const Eigen::VectorXd& y);

struct LineSearchOutcome {
  double alpha = 0.0;  // 0 means no acceptable step (stall)
  double f = 0.0;      // fitness at the accepted point
  long queries = 0;
  int calls = 0;       // oracle invocations spent
};

// Step-size search along p from u, maximizing. f0/g are the current iterate's
// oracle values; alpha0 is the first trial step. Backtracking accepts the
// first alpha0 rho^j meeting the Armijo bound; wolfe brackets and bisects for
// the strong curvature condition, falling back to the best Armijo point if
// the call cap is hit. Throws std::invalid_argument unless g.p > 0.
LineSearchOutcome line_search(OracleIface& oracle, const Eigen::VectorXd& u,
                              double f0, const Eigen::VectorXd& g,
                              const Eigen::VectorXd& p, LineSearchKind kind,
                              const OptParams& params, double alpha0);

struct IterRow {
  int iter = 0;
  double f = 0.0;
  double grad_norm = 0.0;  // inf-norm
  double alpha = 0.0;
  long queries_cum = 0;
};

struct RunResult {
  Eigen::VectorXd u;
  std::vector<IterRow> history;  // row 0 is the initial evaluation
  std::string status;            // converged | budget | stalled | max_iters
  long total_queries = 0;
  long curvature_skips = 0;
};

using RunObserver = std::function<void(const IterRow&, const OptimizerState&)>;

// Full iteration loop: evaluate, direction, line search, step, repeat until a
// StopRule criterion fires or the search stalls twice in a row. The initial
// evaluation always runs (even under query_budget = 0) and is history row 0;
// afterwards no oracle call starts once the budget is reached, so cumulative
// queries overshoot by at most one call.
RunResult run_optimizer(OracleIface& oracle, const Eigen::VectorXd& u0,
                        const OptParams& params,
                        const RunObserver& observer = {});

}  // namespace qoc
