#include <cmath>
#include <queue>
#include <vector>

#include "rcep/lp.hpp"
#include "simplex.hpp"

namespace rcep {

namespace {

struct Node {
  double bound;
  long id;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::optional<Basis> basis;
  int branch = -1;
};

struct WorseBound {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

// Index of the most fractional binary, -1 when all are integral.
int branching_variable(const LinearProgram& problem, const Eigen::VectorXd& x,
                       double tol_int) {
  int chosen = -1;
  double best = tol_int;
  for (int j = 0; j < problem.num_variables(); ++j) {
    if (problem.variable(j).kind != VarKind::Binary) continue;
    const double frac = std::abs(x(j) - std::round(x(j)));
    if (frac > best) {
      best = frac;
      chosen = j;
    }
  }
  return chosen;
}

void snap_binaries(const LinearProgram& problem, LpSolution& sol) {
  for (int j = 0; j < problem.num_variables(); ++j) {
    if (problem.variable(j).kind == VarKind::Binary) sol.primal(j) = std::round(sol.primal(j));
  }
}

}  // namespace

LpSolution solve_mip(const LinearProgram& problem, const SolverOptions& options) {
  if (!problem.has_integers()) return solve_lp(problem, options);

  const detail::SimplexModel model(problem);
  Node root{-kInfinity, 0, Eigen::VectorXd(problem.num_variables()),
            Eigen::VectorXd(problem.num_variables()), std::nullopt};
  for (int j = 0; j < problem.num_variables(); ++j) {
    const auto& v = problem.variable(j);
    root.lower(j) = v.lower;
    root.upper(j) = v.upper;
    if (v.kind == VarKind::Binary) {
      root.lower(j) = std::max(std::ceil(v.lower - options.tol_int), 0.0);
      root.upper(j) = std::min(std::floor(v.upper + options.tol_int), 1.0);
    }
  }

  long total_pivots = 0;
  long nodes = 0;
  long next_id = 1;
  LpSolution incumbent;
  incumbent.status = LpStatus::Infeasible;
  double best = kInfinity;

  auto prune_threshold = [&]() {
    return best - 1e-9 * std::max(1.0, std::abs(best));
  };

  std::priority_queue<Node, std::vector<Node>, WorseBound> open;

  auto evaluate = [&](Node node, const Basis* warm) -> std::optional<LpStatus> {
    LpSolution sol = detail::run_simplex(model, problem, node.lower, node.upper, options, warm);
    total_pivots += sol.iterations;
    if (sol.status == LpStatus::Unbounded) return LpStatus::Unbounded;
    if (sol.status != LpStatus::Optimal) return std::nullopt;
    if (sol.objective >= prune_threshold()) return std::nullopt;
    const int branch = branching_variable(problem, sol.primal, options.tol_int);
    if (branch < 0) {
      best = sol.objective;
      incumbent = std::move(sol);
      return std::nullopt;
    }
    node.bound = sol.objective;
    node.branch = branch;
    node.basis = std::move(sol.basis);
    open.push(std::move(node));
    return std::nullopt;
  };

  if (evaluate(root, nullptr) == LpStatus::Unbounded) {
    LpSolution sol;
    sol.status = LpStatus::Unbounded;
    sol.iterations = total_pivots;
    return sol;
  }

  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (node.bound >= prune_threshold()) break;

    const int branch = node.branch;

    for (const double value : {0.0, 1.0}) {
      if (nodes >= options.max_nodes) {
        if (incumbent.optimal()) snap_binaries(problem, incumbent);
        incumbent.nodes = nodes;
        throw NodeLimitError("branch and bound exceeded " +
                                 std::to_string(options.max_nodes) + " nodes",
                             incumbent);
      }
      ++nodes;
      Node child{node.bound, next_id++, node.lower, node.upper, std::nullopt};
      child.lower(branch) = value;
      child.upper(branch) = value;
      evaluate(std::move(child), node.basis ? &*node.basis : nullptr);
    }
  }

  if (incumbent.optimal()) snap_binaries(problem, incumbent);
  incumbent.iterations = total_pivots;
  incumbent.nodes = nodes;
  return incumbent;
}

}  // namespace rcep
