#pragma once

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "rcep/lp.hpp"
#include "rcep/model.hpp"
#include "rcep/reliability.hpp"

namespace rcep {

/// States x periods above this are refused by the extensive-form builders.
inline constexpr Eigen::Index kMonolithicMaxStatePeriods = 4096;

/// Extensive-form planning MIP plus the column map needed to read a plan back.
struct MonolithicModel {
  LinearProgram program;
  Eigen::MatrixXi build;             // candidates x periods -> column of x_{c,t}
  std::vector<int> threshold;        // per period: column of b (CVaR) or -1
  Eigen::Index merged_states = 0;    // distinct reliability states per period

  InvestmentPlan extract_plan(const SystemSpec& spec, const LpSolution& solution) const;
};

/// Investment + derated-dispatch operation cost with no reliability rows.
/// `floor` (candidates x periods, 0/1) forces builds that must stay in place.
MonolithicModel build_economic_mip(const SystemSpec& spec,
                                   const std::optional<InvestmentPlan::Matrix>& floor = {});

MonolithicModel build_lolp_mip(const SystemSpec& spec, const StateSet& states,
                               const ReliabilityCriterion& criterion,
                               const std::optional<InvestmentPlan::Matrix>& floor = {});
MonolithicModel build_epns_mip(const SystemSpec& spec, const StateSet& states,
                               const ReliabilityCriterion& criterion,
                               const std::optional<InvestmentPlan::Matrix>& floor = {});
MonolithicModel build_var_mip(const SystemSpec& spec, const StateSet& states,
                              const ReliabilityCriterion& criterion,
                              const std::optional<InvestmentPlan::Matrix>& floor = {});
MonolithicModel build_cvar_mip(const SystemSpec& spec, const StateSet& states,
                               const ReliabilityCriterion& criterion,
                               const std::optional<InvestmentPlan::Matrix>& floor = {});

/// Dispatches on criterion.metric; nullopt builds the economic MIP.
MonolithicModel build_planning_mip(const SystemSpec& spec, const StateSet& states,
                                   const std::optional<ReliabilityCriterion>& criterion,
                                   const std::optional<InvestmentPlan::Matrix>& floor = {});

struct MonolithicResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::optional<InvestmentPlan> plan;
  std::vector<double> thresholds;  // optimal b per period (CVaR only)
  long nodes = 0;
};

MonolithicResult solve_monolithic(const SystemSpec& spec, const StateSet& states,
                                  const std::optional<ReliabilityCriterion>& criterion,
                                  const SolverOptions& options = {},
                                  const std::optional<InvestmentPlan::Matrix>& floor = {});

}  // namespace rcep
