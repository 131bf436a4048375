#include "rcep/monolithic.hpp"

#include <map>
#include <string>
#include <utility>

namespace rcep {

namespace {

// States whose shedding depends on the plan identically: same up pattern over
// candidates and same existing capacity available. Weights are summed in
// first-seen order so the model is independent of map ordering.
struct MergedState {
  std::vector<int> up_candidates;
  double existing_up = 0.0;
  double weight = 0.0;
};

std::vector<MergedState> merge_states(const SystemSpec& spec, const StateSet& states) {
  std::map<std::pair<std::vector<int>, double>, std::size_t> seen;
  std::vector<MergedState> out;
  for (Eigen::Index s = 0; s < states.size(); ++s) {
    MergedState m;
    for (int j = 0; j < spec.num_generators(); ++j) {
      if (states.up()(s, j) == 0) continue;
      const int c = spec.candidate_slot(j);
      if (c < 0) {
        m.existing_up += spec.generator(j).capacity_mw;
      } else {
        m.up_candidates.push_back(c);
      }
    }
    auto key = std::make_pair(m.up_candidates, m.existing_up);
    const auto it = seen.find(key);
    if (it == seen.end()) {
      m.weight = states.weights()(s);
      seen.emplace(std::move(key), out.size());
      out.push_back(std::move(m));
    } else {
      out[it->second].weight += states.weights()(s);
    }
  }
  return out;
}

std::string indexed(const char* stem, int a, int b = -1) {
  std::string s = std::string(stem) + "_" + std::to_string(a);
  if (b >= 0) s += "_" + std::to_string(b);
  return s;
}

MonolithicModel economic_core(const SystemSpec& spec,
                              const std::optional<InvestmentPlan::Matrix>& floor) {
  const int nc = spec.num_candidates();
  const int periods = spec.periods();
  if (floor && (floor->rows() != nc || floor->cols() != periods)) {
    throw InstanceError("floor plan shape does not match the system");
  }
  MonolithicModel m;
  LinearProgram& p = m.program;
  m.build.resize(nc, periods);
  m.threshold.assign(static_cast<std::size_t>(periods), -1);

  for (int c = 0; c < nc; ++c) {
    const auto& g = spec.candidate(c);
    for (int t = 0; t < periods; ++t) {
      // The one-time charge sits on the last period's column; monotonicity
      // makes it the "built at all" indicator.
      const double cost = t == periods - 1 ? g.invest_cost : 0.0;
      const int col = p.add_binary(cost, indexed(("x_" + g.id).c_str(), t + 1));
      m.build(c, t) = col;
      const bool too_early = t + 1 < g.earliest_period;
      const bool forced = floor && (*floor)(c, t) != 0;
      if (too_early && forced) throw InstanceError("floor builds " + g.id + " too early");
      if (too_early) p.set_bounds(col, 0.0, 0.0);
      if (forced) p.set_bounds(col, 1.0, 1.0);
    }
    for (int t = 0; t + 1 < periods; ++t) {
      p.add_row({{m.build(c, t), 1.0}, {m.build(c, t + 1), -1.0}}, Relation::LessEqual, 0.0,
                indexed(("mono_" + g.id).c_str(), t + 1));
    }
  }

  for (int t = 0; t < periods; ++t) {
    std::vector<Term> balance;
    for (int j = 0; j < spec.num_generators(); ++j) {
      const auto& g = spec.generator(j);
      const int c = spec.candidate_slot(j);
      const double cap = g.derated_capacity();
      const int col = p.add_variable(g.var_cost, 0.0, c < 0 ? cap : kInfinity,
                                     VarKind::Continuous, indexed(("g_" + g.id).c_str(), t + 1));
      balance.push_back({col, 1.0});
      if (c >= 0) {
        p.add_row({{col, 1.0}, {m.build(c, t), -cap}}, Relation::LessEqual, 0.0,
                  indexed(("cap_" + g.id).c_str(), t + 1));
      }
    }
    const int r = p.add_variable(spec.shed_cost(), 0.0, kInfinity, VarKind::Continuous,
                                 indexed("shed", t + 1));
    balance.push_back({r, 1.0});
    p.add_row(balance, Relation::Equal, spec.demand(t), indexed("balance", t + 1));
  }
  return m;
}

// Per-state shedding columns r^s_t in [0, D_t] with
// r^s_t + sum_{c up} cap_c x_{c,t} >= D_t - existing_up.
std::vector<int> shedding_block(const SystemSpec& spec, MonolithicModel& m,
                                const std::vector<MergedState>& merged, int t) {
  LinearProgram& p = m.program;
  const double demand = spec.demand(t);
  std::vector<int> r(merged.size());
  for (std::size_t s = 0; s < merged.size(); ++s) {
    r[s] = p.add_variable(0.0, 0.0, demand, VarKind::Continuous,
                          indexed("r", static_cast<int>(s), t + 1));
    std::vector<Term> terms{{r[s], 1.0}};
    for (const int c : merged[s].up_candidates) {
      terms.push_back({m.build(c, t), spec.candidate(c).capacity_mw});
    }
    p.add_row(terms, Relation::GreaterEqual, demand - merged[s].existing_up,
              indexed("short", static_cast<int>(s), t + 1));
  }
  return r;
}

std::vector<MergedState> checked_states(const SystemSpec& spec, const StateSet& states,
                                        const ReliabilityCriterion& criterion) {
  criterion.validate();
  if (states.mode() != StateMode::Exact) {
    throw InstanceError("monolithic oracles need an exactly enumerated state set");
  }
  if (states.num_generators() != spec.num_generators()) {
    throw InstanceError("state set was built for a different generator list");
  }
  auto merged = merge_states(spec, states);
  if (static_cast<Eigen::Index>(merged.size()) * spec.periods() > kMonolithicMaxStatePeriods) {
    throw ResourceError("extensive form too large: " + std::to_string(merged.size()) +
                        " states x " + std::to_string(spec.periods()) + " periods");
  }
  return merged;
}

// Indicator rows phi^s >= (r^s - slack) / D shared by the LOLP and VaR forms:
// r^s - D phi^s <= slack, sum_s p^s phi^s <= mass.
void indicator_block(const SystemSpec& spec, MonolithicModel& m,
                     const std::vector<MergedState>& merged, const std::vector<int>& r, int t,
                     double slack, double mass) {
  LinearProgram& p = m.program;
  const double demand = spec.demand(t);
  std::vector<Term> count;
  for (std::size_t s = 0; s < merged.size(); ++s) {
    const int phi = p.add_binary(0.0, indexed("phi", static_cast<int>(s), t + 1));
    p.add_row({{r[s], 1.0}, {phi, -demand}}, Relation::LessEqual, slack,
              indexed("ind", static_cast<int>(s), t + 1));
    count.push_back({phi, merged[s].weight});
  }
  p.add_row(count, Relation::LessEqual, mass, indexed("risk", t + 1));
}

}  // namespace

InvestmentPlan MonolithicModel::extract_plan(const SystemSpec& spec,
                                             const LpSolution& solution) const {
  Eigen::MatrixXd x(build.rows(), build.cols());
  for (Eigen::Index c = 0; c < build.rows(); ++c) {
    for (Eigen::Index t = 0; t < build.cols(); ++t) x(c, t) = solution.primal(build(c, t));
  }
  return InvestmentPlan::from_relaxed(spec, x);
}

MonolithicModel build_economic_mip(const SystemSpec& spec,
                                   const std::optional<InvestmentPlan::Matrix>& floor) {
  return economic_core(spec, floor);
}

MonolithicModel build_lolp_mip(const SystemSpec& spec, const StateSet& states,
                               const ReliabilityCriterion& criterion,
                               const std::optional<InvestmentPlan::Matrix>& floor) {
  if (criterion.metric != Metric::Lolp) throw InstanceError("LOLP model needs an LOLP criterion");
  const auto merged = checked_states(spec, states, criterion);
  auto m = economic_core(spec, floor);
  m.merged_states = static_cast<Eigen::Index>(merged.size());
  for (int t = 0; t < spec.periods(); ++t) {
    if (spec.demand(t) <= 0.0) continue;
    const auto r = shedding_block(spec, m, merged, t);
    indicator_block(spec, m, merged, r, t, 0.0, criterion.limit(spec, t));
  }
  return m;
}

MonolithicModel build_epns_mip(const SystemSpec& spec, const StateSet& states,
                               const ReliabilityCriterion& criterion,
                               const std::optional<InvestmentPlan::Matrix>& floor) {
  if (criterion.metric != Metric::Epns) throw InstanceError("EPNS model needs an EPNS criterion");
  const auto merged = checked_states(spec, states, criterion);
  auto m = economic_core(spec, floor);
  m.merged_states = static_cast<Eigen::Index>(merged.size());
  for (int t = 0; t < spec.periods(); ++t) {
    const auto r = shedding_block(spec, m, merged, t);
    std::vector<Term> mean;
    for (std::size_t s = 0; s < merged.size(); ++s) mean.push_back({r[s], merged[s].weight});
    m.program.add_row(mean, Relation::LessEqual, criterion.limit(spec, t), indexed("risk", t + 1));
  }
  return m;
}

MonolithicModel build_var_mip(const SystemSpec& spec, const StateSet& states,
                              const ReliabilityCriterion& criterion,
                              const std::optional<InvestmentPlan::Matrix>& floor) {
  if (criterion.metric != Metric::Var) throw InstanceError("VaR model needs a VaR criterion");
  const auto merged = checked_states(spec, states, criterion);
  auto m = economic_core(spec, floor);
  m.merged_states = static_cast<Eigen::Index>(merged.size());
  for (int t = 0; t < spec.periods(); ++t) {
    if (spec.demand(t) <= 0.0) continue;
    const auto r = shedding_block(spec, m, merged, t);
    indicator_block(spec, m, merged, r, t, criterion.limit(spec, t), criterion.alpha);
  }
  return m;
}

MonolithicModel build_cvar_mip(const SystemSpec& spec, const StateSet& states,
                               const ReliabilityCriterion& criterion,
                               const std::optional<InvestmentPlan::Matrix>& floor) {
  if (criterion.metric != Metric::Cvar) throw InstanceError("CVaR model needs a CVaR criterion");
  const auto merged = checked_states(spec, states, criterion);
  auto m = economic_core(spec, floor);
  m.merged_states = static_cast<Eigen::Index>(merged.size());
  LinearProgram& p = m.program;
  for (int t = 0; t < spec.periods(); ++t) {
    const auto r = shedding_block(spec, m, merged, t);
    const int b = p.add_variable(0.0, 0.0, kInfinity, VarKind::Continuous, indexed("b", t + 1));
    m.threshold[static_cast<std::size_t>(t)] = b;
    std::vector<Term> tail{{b, 1.0}};
    for (std::size_t s = 0; s < merged.size(); ++s) {
      const int y = p.add_variable(0.0, 0.0, kInfinity, VarKind::Continuous,
                                   indexed("y", static_cast<int>(s), t + 1));
      p.add_row({{y, 1.0}, {r[s], -1.0}, {b, 1.0}}, Relation::GreaterEqual, 0.0,
                indexed("excess", static_cast<int>(s), t + 1));
      tail.push_back({y, merged[s].weight / criterion.alpha});
    }
    p.add_row(tail, Relation::LessEqual, criterion.limit(spec, t), indexed("risk", t + 1));
  }
  return m;
}

MonolithicModel build_planning_mip(const SystemSpec& spec, const StateSet& states,
                                   const std::optional<ReliabilityCriterion>& criterion,
                                   const std::optional<InvestmentPlan::Matrix>& floor) {
  if (!criterion) return build_economic_mip(spec, floor);
  switch (criterion->metric) {
    case Metric::Epns: return build_epns_mip(spec, states, *criterion, floor);
    case Metric::Cvar: return build_cvar_mip(spec, states, *criterion, floor);
    case Metric::Lolp: return build_lolp_mip(spec, states, *criterion, floor);
    case Metric::Var: return build_var_mip(spec, states, *criterion, floor);
  }
  throw InstanceError("unknown metric");
}

MonolithicResult solve_monolithic(const SystemSpec& spec, const StateSet& states,
                                  const std::optional<ReliabilityCriterion>& criterion,
                                  const SolverOptions& options,
                                  const std::optional<InvestmentPlan::Matrix>& floor) {
  const auto model = build_planning_mip(spec, states, criterion, floor);
  const auto sol = solve_mip(model.program, options);
  MonolithicResult out;
  out.status = sol.status;
  out.nodes = sol.nodes;
  if (!sol.optimal()) return out;
  out.objective = sol.objective;
  out.plan = model.extract_plan(spec, sol);
  for (const int b : model.threshold) out.thresholds.push_back(b < 0 ? 0.0 : sol.primal(b));
  return out;
}

}  // namespace rcep
