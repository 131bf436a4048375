#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rcep/benders.hpp"
#include "rcep/model.hpp"
#include "rcep/reliability.hpp"

namespace rcep {

/// Economic planning: Benders without a reliability criterion. The report is
/// evaluated against `criterion` when one is given, to expose violations.
BendersResult run_ep(const SystemSpec& spec, const StateSet& states,
                     const std::optional<ReliabilityCriterion>& criterion = {},
                     const BendersOptions& options = {});

/// Hierarchical planning: the economic plan first, then reinforcements on top
/// of it (economic builds fixed) until the criterion holds.
BendersResult run_hp(const SystemSpec& spec, const ReliabilityCriterion& criterion,
                     const StateSet& states, const BendersOptions& options = {});

/// Integrated planning: one Benders run with the criterion.
BendersResult run_ip(const SystemSpec& spec, const ReliabilityCriterion& criterion,
                     const StateSet& states, const BendersOptions& options = {});

/// Largest CVaR_alpha / demand over the periods of a plan; the limit fraction
/// at which that plan is exactly CVaR-feasible.
double cvar_limit_frac(const SystemSpec& spec, const InvestmentPlan& plan,
                       const StateSet& states, double alpha);

struct ComparisonRow {
  std::string method;  // EP, HP, IP-EPNS, IP-CVaR
  InvestmentPlan plan;
  PlanReport report;   // evaluated against the row's own criterion
  std::vector<double> added_mw;  // MW first in service per period
  BendersLog log;
};

struct ComparisonReport {
  ReliabilityCriterion epns_criterion;
  ReliabilityCriterion cvar_criterion;  // limit derived from the IP-EPNS plan
  std::vector<ComparisonRow> rows;
};

class ComparisonError : public Error {
 public:
  ComparisonError(const std::string& what, ComparisonReport partial, int exit_kind)
      : Error(what), partial_(std::move(partial)), kind_(exit_kind) {}
  const ComparisonReport& partial() const { return partial_; }
  /// 3 infeasible criterion, 4 resource limit, 5 numeric failure, 1 other.
  int kind() const { return kind_; }

 private:
  ComparisonReport partial_;
  int kind_;
};

std::vector<double> added_capacity(const SystemSpec& spec, const InvestmentPlan& plan);

/// EP, HP, IP-EPNS and IP-CVaR on one instance. `criterion` supplies the EPNS
/// limit fraction and the CVaR level alpha.
ComparisonReport compare(const SystemSpec& spec, const ReliabilityCriterion& criterion,
                         const StateSet& states, const BendersOptions& options = {});

}  // namespace rcep
