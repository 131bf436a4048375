#include "rcep/operation.hpp"

#include "rcep/numeric.hpp"

namespace rcep {

OperationResult solve_operation(const SystemSpec& spec, const Eigen::MatrixXd& x, int period,
                                const SolverOptions& options) {
  check_plan_shape(spec, x);
  if (period < 0 || period >= spec.periods()) throw InstanceError("period out of range");
  const int n = spec.num_generators();

  LinearProgram lp;
  std::vector<Term> balance;
  for (int j = 0; j < n; ++j) {
    lp.add_variable(spec.generator(j).var_cost);
    balance.push_back({j, 1.0});
  }
  const int r = lp.add_variable(spec.shed_cost());
  balance.push_back({r, 1.0});
  lp.add_row(balance, Relation::Equal, spec.demand(period));
  for (int j = 0; j < n; ++j) {
    const int c = spec.candidate_slot(j);
    const double in_service = c < 0 ? 1.0 : x(c, period);
    lp.add_row({{j, 1.0}}, Relation::LessEqual, spec.generator(j).derated_capacity() * in_service);
  }

  const LpSolution sol = solve_lp(lp, options);
  if (!sol.optimal()) {
    throw SolverError(std::string("operation subproblem ended ") + to_string(sol.status));
  }
  OperationResult out;
  out.period = period;
  out.cost = sol.objective;
  out.dispatch = sol.primal.head(n);
  out.shed = sol.primal(r);
  out.cap_duals = sol.duals.tail(n);
  return out;
}

OperationResult solve_operation(const SystemSpec& spec, const InvestmentPlan& plan, int period,
                                const SolverOptions& options) {
  return solve_operation(spec, plan.relaxed(), period, options);
}

std::vector<OperationResult> solve_operations(const SystemSpec& spec, const Eigen::MatrixXd& x,
                                              const SolverOptions& options) {
  check_plan_shape(spec, x);
  std::vector<OperationResult> out(static_cast<std::size_t>(spec.periods()));
  parallel_chunks(spec.periods(), 4, [&](Eigen::Index begin, Eigen::Index end) {
    for (Eigen::Index t = begin; t < end; ++t) {
      out[static_cast<std::size_t>(t)] = solve_operation(spec, x, static_cast<int>(t), options);
    }
  });
  return out;
}

double total_operation_cost(const std::vector<OperationResult>& results) {
  CompensatedSum total;
  for (const auto& r : results) total.add(r.cost);
  return total.value();
}

BendersCut operation_cut(const SystemSpec& spec, const Eigen::MatrixXd& x,
                         const std::vector<OperationResult>& results, int iteration) {
  check_plan_shape(spec, x);
  if (static_cast<int>(results.size()) != spec.periods()) {
    throw InstanceError("operation cut needs one result per period");
  }
  BendersCut cut;
  cut.kind = CutKind::Optimality;
  cut.iteration = iteration;
  cut.coeffs = Eigen::MatrixXd::Zero(spec.num_candidates(), spec.periods());
  for (const auto& r : results) {
    for (int c = 0; c < spec.num_candidates(); ++c) {
      const int j = spec.candidate_generator(c);
      cut.coeffs(c, r.period) = r.cap_duals(j) * spec.generator(j).derated_capacity();
    }
  }
  cut.intercept = total_operation_cost(results) - (cut.coeffs.array() * x.array()).sum();
  return cut;
}

}  // namespace rcep
