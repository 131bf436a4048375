#include "rcep/benders.hpp"

#include <chrono>
#include <string>

#include "rcep/operation.hpp"

namespace rcep {

MasterResult solve_master(const SystemSpec& spec, const std::vector<BendersCut>& cuts,
                          const std::optional<InvestmentPlan::Matrix>& floor,
                          const SolverOptions& options) {
  const int nc = spec.num_candidates();
  const int periods = spec.periods();
  if (floor && (floor->rows() != nc || floor->cols() != periods)) {
    throw InstanceError("floor plan shape does not match the system");
  }
  LinearProgram p;
  Eigen::MatrixXi col(nc, periods);
  for (int c = 0; c < nc; ++c) {
    const auto& g = spec.candidate(c);
    for (int t = 0; t < periods; ++t) {
      col(c, t) = p.add_binary(t == periods - 1 ? g.invest_cost : 0.0);
      double lo = 0.0;
      double hi = 1.0;
      if (t + 1 < g.earliest_period) hi = 0.0;
      if (floor && (*floor)(c, t) != 0) lo = 1.0;
      if (lo > hi) throw InstanceError("floor builds " + g.id + " too early");
      p.set_bounds(col(c, t), lo, hi);
    }
    for (int t = 0; t + 1 < periods; ++t) {
      p.add_row({{col(c, t), 1.0}, {col(c, t + 1), -1.0}}, Relation::LessEqual, 0.0);
    }
  }
  const int theta = p.add_variable(1.0, 0.0, kInfinity);

  for (const auto& cut : cuts) {
    if (cut.coeffs.rows() != nc || cut.coeffs.cols() != periods) {
      throw InstanceError("cut shape does not match the system");
    }
    std::vector<Term> terms;
    for (int c = 0; c < nc; ++c) {
      for (int t = 0; t < periods; ++t) {
        if (cut.coeffs(c, t) != 0.0) terms.push_back({col(c, t), cut.coeffs(c, t)});
      }
    }
    if (cut.kind == CutKind::Optimality) {
      // theta >= intercept + a'x
      for (auto& term : terms) term.coef = -term.coef;
      terms.push_back({theta, 1.0});
      p.add_row(terms, Relation::GreaterEqual, cut.intercept);
    } else {
      p.add_row(terms, Relation::LessEqual, cut.bound - cut.intercept);
    }
  }

  const LpSolution sol = solve_mip(p, options);
  if (sol.status == LpStatus::Infeasible) {
    throw InfeasibleCriterionError(
        "no plan built from the available candidates satisfies the reliability criterion");
  }
  if (!sol.optimal()) {
    throw SolverError(std::string("master problem ended ") + to_string(sol.status));
  }
  Eigen::MatrixXd x(nc, periods);
  for (int c = 0; c < nc; ++c) {
    for (int t = 0; t < periods; ++t) x(c, t) = sol.primal(col(c, t));
  }
  return {InvestmentPlan::from_relaxed(spec, x), sol.objective, sol.primal(theta), sol.nodes};
}

RiskEvaluation evaluate_criterion(const SystemSpec& spec, const Eigen::MatrixXd& x, int period,
                                  const StateSet& states, const ReliabilityCriterion& criterion,
                                  CvarMethod method) {
  switch (criterion.metric) {
    case Metric::Epns: return epns_eval(spec, x, period, states);
    case Metric::Cvar: return cvar_eval(spec, x, period, states, criterion.alpha, method);
    case Metric::Lolp:
    case Metric::Var: break;
  }
  throw InstanceError(std::string(to_string(criterion.metric)) +
                      " is not convex in the plan; use the monolithic model");
}

PlanReport evaluate_plan(const SystemSpec& spec, const InvestmentPlan& plan,
                         const std::optional<ReliabilityCriterion>& criterion,
                         const StateSet& states, double tol_feas) {
  if (criterion) criterion->validate();
  const Eigen::MatrixXd x = plan.relaxed();
  check_plan_shape(spec, x);
  const auto ops = solve_operations(spec, x);
  PlanReport report;
  report.alpha = criterion ? criterion->alpha : 0.05;
  report.invest_cost = plan_invest_cost(spec, plan);
  report.oper_cost = total_operation_cost(ops);
  report.total_cost = report.invest_cost + report.oper_cost;
  for (int t = 0; t < spec.periods(); ++t) {
    const Eigen::VectorXd shed = shedding_vector(spec, x, t, states);
    const Eigen::VectorXd& w = states.weights();
    PeriodMetrics m;
    m.demand = spec.demand(t);
    m.oper_cost = ops[static_cast<std::size_t>(t)].cost;
    m.epns = weighted_sum(shed, w);
    CompensatedSum lolp;
    for (Eigen::Index s = 0; s < shed.size(); ++s) {
      if (shed(s) > kShedZeroTol) lolp.add(w(s));
    }
    m.lolp = lolp.value();
    m.var = var_alpha(shed, w, report.alpha);
    m.cvar = cvar_alpha(shed, w, report.alpha);
    if (criterion) {
      m.limit = criterion->limit(spec, t);
      double value = 0.0;
      switch (criterion->metric) {
        case Metric::Epns: value = m.epns; break;
        case Metric::Cvar: value = m.cvar; break;
        case Metric::Lolp: value = m.lolp; break;
        case Metric::Var: value = m.var; break;
      }
      m.violated = value > m.limit + tol_feas * std::max(1.0, m.limit);
      if (m.violated) ++report.violated_periods;
    }
    report.periods.push_back(m);
  }
  return report;
}

BendersResult run_benders(const SystemSpec& spec,
                          const std::optional<ReliabilityCriterion>& criterion,
                          const StateSet& states, const BendersOptions& options) {
  if (criterion) {
    criterion->validate();
    if (criterion->metric != Metric::Epns && criterion->metric != Metric::Cvar) {
      throw InstanceError(std::string("Benders needs a convex metric, got ") +
                          to_string(criterion->metric));
    }
    if (states.num_generators() != spec.num_generators()) {
      throw InstanceError("state set was built for a different generator list");
    }
  }
  if (options.max_iter < 1) throw InstanceError("max_iter must be at least 1");

  using Clock = std::chrono::steady_clock;
  std::vector<BendersCut> cuts;
  BendersLog log;
  std::optional<InvestmentPlan> incumbent;
  double lower = -kInfinity;
  double upper = kInfinity;

  for (int it = 1; it <= options.max_iter; ++it) {
    const auto start = Clock::now();
    const MasterResult master = solve_master(spec, cuts, options.floor, options.lp);
    lower = std::max(lower, master.lower_bound);
    const Eigen::MatrixXd x = master.plan.relaxed();

    BendersIteration rec;
    rec.iteration = it;
    rec.plan = master.plan.matrix();
    rec.invest_cost = plan_invest_cost(spec, master.plan);

    const auto ops = solve_operations(spec, x, options.lp);
    rec.oper_cost = total_operation_cost(ops);

    if (criterion) {
      for (int t = 0; t < spec.periods(); ++t) {
        const auto eval = evaluate_criterion(spec, x, t, states, *criterion, options.cvar_method);
        rec.metric.push_back(eval.value);
        const double limit = criterion->limit(spec, t);
        if (eval.value <= limit + options.tol_feas * std::max(1.0, limit)) continue;
        rec.feasible = false;
        BendersCut cut;
        cut.kind = CutKind::Feasibility;
        cut.period = t;
        cut.iteration = it;
        cut.bound = limit;
        cut.coeffs = Eigen::MatrixXd::Zero(spec.num_candidates(), spec.periods());
        cut.coeffs.col(t) = eval.subgradient;
        cut.intercept = eval.value - eval.subgradient.dot(x.col(t));
        cuts.push_back(std::move(cut));
        ++rec.feasibility_cuts;
      }
    }

    const double total = rec.invest_cost + rec.oper_cost;
    if (rec.feasible && total < upper) {
      upper = total;
      incumbent = master.plan;
    }
    if (rec.oper_cost > master.theta + options.tol_opt * std::max(1.0, std::abs(rec.oper_cost))) {
      cuts.push_back(operation_cut(spec, x, ops, it));
      ++rec.optimality_cuts;
    }

    rec.lower_bound = lower;
    rec.upper_bound = upper;
    rec.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    log.iterations.push_back(rec);

    const bool closed = incumbent && (upper - lower) / std::max(1.0, std::abs(upper)) <= options.tol_gap;
    const bool stalled = rec.optimality_cuts == 0 && rec.feasibility_cuts == 0;
    if (closed || (stalled && incumbent)) {
      log.converged = true;
      auto report = evaluate_plan(spec, *incumbent, criterion, states, options.tol_feas);
      return {*incumbent, std::move(report), std::move(log), std::move(cuts)};
    }
  }
  throw IterationLimitError("Benders stopped after " + std::to_string(options.max_iter) +
                                " iterations without closing the gap",
                            incumbent, std::move(log));
}

}  // namespace rcep
