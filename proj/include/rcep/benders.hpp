#pragma once

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "rcep/cut.hpp"
#include "rcep/lp.hpp"
#include "rcep/model.hpp"
#include "rcep/reliability.hpp"

namespace rcep {

struct MasterResult {
  InvestmentPlan plan;
  double lower_bound = 0.0;  // invest cost + theta
  double theta = 0.0;
  long nodes = 0;
};

/// min sum c_j * built_j + theta over monotone plans, theta >= 0, theta above
/// every optimality cut and every feasibility cut <= its bound. Throws
/// InfeasibleCriterionError when no plan satisfies the cuts.
MasterResult solve_master(const SystemSpec& spec, const std::vector<BendersCut>& cuts,
                          const std::optional<InvestmentPlan::Matrix>& floor = {},
                          const SolverOptions& options = {});

struct BendersOptions {
  double tol_gap = 1e-6;
  int max_iter = 200;
  double tol_feas = 1e-7;
  double tol_opt = 1e-7;
  CvarMethod cvar_method = CvarMethod::Auto;
  SolverOptions lp;
  std::optional<InvestmentPlan::Matrix> floor;  // builds that may not be removed
};

struct BendersIteration {
  int iteration = 0;
  InvestmentPlan::Matrix plan;
  double lower_bound = 0.0;
  double upper_bound = kInfinity;
  double invest_cost = 0.0;
  double oper_cost = 0.0;
  std::vector<double> metric;  // criterion metric per period, empty without one
  bool feasible = true;
  int optimality_cuts = 0;
  int feasibility_cuts = 0;
  double seconds = 0.0;
};

struct BendersLog {
  std::vector<BendersIteration> iterations;
  bool converged = false;
};

struct BendersResult {
  InvestmentPlan plan;
  PlanReport report;
  BendersLog log;
  std::vector<BendersCut> cuts;
};

class IterationLimitError : public ResourceError {
 public:
  IterationLimitError(const std::string& what, std::optional<InvestmentPlan> incumbent,
                      BendersLog log)
      : ResourceError(what), incumbent_(std::move(incumbent)), log_(std::move(log)) {}
  const std::optional<InvestmentPlan>& incumbent() const { return incumbent_; }
  const BendersLog& log() const { return log_; }

 private:
  std::optional<InvestmentPlan> incumbent_;
  BendersLog log_;
};

/// Risk metric of the criterion and its subgradient in one period.
RiskEvaluation evaluate_criterion(const SystemSpec& spec, const Eigen::MatrixXd& x, int period,
                                  const StateSet& states, const ReliabilityCriterion& criterion,
                                  CvarMethod method = CvarMethod::Auto);

/// Investment plus operation costs and every per-period metric of a plan.
/// Without a criterion nothing is flagged and the VaR/CVaR level is 0.05.
PlanReport evaluate_plan(const SystemSpec& spec, const InvestmentPlan& plan,
                         const std::optional<ReliabilityCriterion>& criterion,
                         const StateSet& states, double tol_feas = 1e-7);

/// Benders decomposition over a fixed state set. The criterion metric must be
/// EPNS or CVaR; nullopt runs economic planning.
BendersResult run_benders(const SystemSpec& spec,
                          const std::optional<ReliabilityCriterion>& criterion,
                          const StateSet& states, const BendersOptions& options = {});

}  // namespace rcep
