#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "random_specs.hpp"
#include "rcep/monolithic.hpp"

namespace rcep {
namespace {

using testing::instance_a;

double plan_cost(const SystemSpec& spec, const InvestmentPlan& plan) {
  double total = plan_invest_cost(spec, plan);
  for (int t = 0; t < spec.periods(); ++t) {
    std::vector<bool> in_service(spec.num_generators());
    for (int j = 0; j < spec.num_generators(); ++j) {
      const int c = spec.candidate_slot(j);
      in_service[j] = c < 0 || plan.built(c, t);
    }
    total += oracle::merit_order_cost(spec, in_service, spec.demand(t));
  }
  return total;
}

// Instance A plus a 50 MW perfectly reliable candidate.
SystemSpec instance_a_large_candidate() {
  return SystemSpec({{"G1", GeneratorKind::Existing, 80.0, 0.1, 10.0, 0.0, 1},
                     {"G2", GeneratorKind::Existing, 50.0, 0.2, 20.0, 0.0, 1},
                     {"C1", GeneratorKind::Candidate, 50.0, 0.0, 40.0, 500.0, 1}},
                    {100.0}, 1000.0);
}

TEST(LolpMip, BuildsCandidateToMeetLimit) {
  const auto spec = instance_a_large_candidate();
  const auto states = enumerate_states(spec);
  const ReliabilityCriterion crit{Metric::Lolp, 0.05, 0.05};
  const auto res = solve_monolithic(spec, states, crit);
  ASSERT_EQ(res.status, LpStatus::Optimal);
  ASSERT_TRUE(res.plan->is_built(0));
  EXPECT_NEAR(lolp(spec, *res.plan, 0, states), 0.02, 1e-12);
  EXPECT_NEAR(lolp(spec, InvestmentPlan::empty(spec), 0, states), 0.28, 1e-12);
  EXPECT_NEAR(res.objective, plan_cost(spec, *res.plan), 1e-6);

  // The 30 MW candidate still leaves state (G1 down, G2 up) short: LOLP 0.10.
  const auto small = instance_a(true);
  const auto small_states = enumerate_states(small);
  EXPECT_EQ(solve_monolithic(small, small_states, crit).status, LpStatus::Infeasible);
  const ReliabilityCriterion looser{Metric::Lolp, 0.10, 0.05};
  const auto built = solve_monolithic(small, small_states, looser);
  ASSERT_EQ(built.status, LpStatus::Optimal);
  EXPECT_TRUE(built.plan->is_built(0));
}

TEST(LolpMip, VacuousAndImpossibleLimits) {
  const auto spec = instance_a(true);
  const auto states = enumerate_states(spec);
  const auto ep = solve_monolithic(spec, states, std::nullopt);
  const auto vacuous = solve_monolithic(spec, states, ReliabilityCriterion{Metric::Lolp, 1.0});
  ASSERT_EQ(vacuous.status, LpStatus::Optimal);
  EXPECT_NEAR(vacuous.objective, ep.objective, 1e-7);
  EXPECT_EQ(solve_monolithic(spec, states, ReliabilityCriterion{Metric::Lolp, 0.0}).status,
            LpStatus::Infeasible);
}

TEST(EpnsMip, VacuousImpossibleAndInstanceA) {
  const auto spec = instance_a(true);
  const auto states = enumerate_states(spec);
  const auto ep = solve_monolithic(spec, states, std::nullopt);
  EXPECT_FALSE(ep.plan->is_built(0));
  EXPECT_NEAR(ep.objective, 1280.0, 1e-7);
  const auto vacuous = solve_monolithic(spec, states, ReliabilityCriterion{Metric::Epns, 1.0});
  EXPECT_NEAR(vacuous.objective, ep.objective, 1e-7);
  EXPECT_EQ(solve_monolithic(spec, states, ReliabilityCriterion{Metric::Epns, 0.0}).status,
            LpStatus::Infeasible);
  // EPNS with the candidate built is 3.0 MW: 1% of demand is out of reach,
  // 5% is met by building.
  EXPECT_EQ(solve_monolithic(spec, states, ReliabilityCriterion{Metric::Epns, 0.01}).status,
            LpStatus::Infeasible);
  const auto five = solve_monolithic(spec, states, ReliabilityCriterion{Metric::Epns, 0.05});
  ASSERT_EQ(five.status, LpStatus::Optimal);
  EXPECT_TRUE(five.plan->is_built(0));
  EXPECT_NEAR(epns(spec, *five.plan, 0, states), 3.0, 1e-12);
  EXPECT_NEAR(five.objective, plan_cost(spec, *five.plan), 1e-6);
}

TEST(VarMip, VacuousImpossibleAndInstanceA) {
  const auto spec = instance_a(true);
  const auto states = enumerate_states(spec);
  const auto ep = solve_monolithic(spec, states, std::nullopt);
  EXPECT_NEAR(solve_monolithic(spec, states, ReliabilityCriterion{Metric::Var, 1.0, 0.05}).objective,
              ep.objective, 1e-7);
  EXPECT_EQ(solve_monolithic(spec, states, ReliabilityCriterion{Metric::Var, 0.0, 0.01}).status,
            LpStatus::Infeasible);
  // Unbuilt VaR_5% is 50; built it is 20.
  const auto res = solve_monolithic(spec, states, ReliabilityCriterion{Metric::Var, 0.3, 0.05});
  ASSERT_EQ(res.status, LpStatus::Optimal);
  EXPECT_TRUE(res.plan->is_built(0));
}

TEST(CvarMip, ThresholdIsTheQuantile) {
  const auto spec = instance_a(true);
  const auto states = enumerate_states(spec);
  EXPECT_NEAR(solve_monolithic(spec, states, ReliabilityCriterion{Metric::Cvar, 1.0, 0.05}).objective,
              1280.0, 1e-7);
  // Built: shedding 70 (.02), 20 (.08), 0 (.90); CVaR_5% = 40, VaR_5% = 20.
  const auto res = solve_monolithic(spec, states, ReliabilityCriterion{Metric::Cvar, 0.4, 0.05});
  ASSERT_EQ(res.status, LpStatus::Optimal);
  EXPECT_TRUE(res.plan->is_built(0));
  EXPECT_NEAR(res.thresholds[0], 20.0, 1e-7);
  const auto shed = shedding_vector(spec, res.plan->relaxed(), 0, states);
  EXPECT_NEAR(res.thresholds[0], var_alpha(shed, states.weights(), 0.05), 1e-7);
  EXPECT_EQ(solve_monolithic(spec, states, ReliabilityCriterion{Metric::Cvar, 0.39, 0.05}).status,
            LpStatus::Infeasible);
}

TEST(Monolithic, RejectsSampledAndOversizedStateSets) {
  const auto spec = instance_a(true);
  const auto sampled = sample_states(spec, 100, 1);
  EXPECT_THROW(build_epns_mip(spec, sampled, {Metric::Epns, 0.05}), InstanceError);
  EXPECT_THROW(build_cvar_mip(spec, enumerate_states(spec), {Metric::Epns, 0.05}), InstanceError);

  std::vector<Generator> gens;
  for (int j = 0; j < 13; ++j) {
    gens.push_back({"G" + std::to_string(j), GeneratorKind::Existing,
                    static_cast<double>(1 << j), 0.1, 1.0, 0.0, 1});
  }
  const SystemSpec big(gens, {50.0}, 100.0);
  EXPECT_THROW(build_epns_mip(big, enumerate_states(big), {Metric::Epns, 0.05}), ResourceError);
}

TEST(Monolithic, FloorForcesBuilds) {
  const auto spec = instance_a(true);
  InvestmentPlan::Matrix floor = InvestmentPlan::Matrix::Ones(1, 1);
  const auto res = solve_monolithic(spec, enumerate_states(spec), std::nullopt, {}, floor);
  ASSERT_EQ(res.status, LpStatus::Optimal);
  EXPECT_TRUE(res.plan->is_built(0));
}

TEST(Monolithic, WritesLpFormat) {
  const auto spec = instance_a(true);
  const auto model = build_cvar_mip(spec, enumerate_states(spec), {Metric::Cvar, 0.4, 0.05});
  std::ostringstream out;
  write_lp_format(model.program, out);
  const auto text = out.str();
  EXPECT_NE(text.find("Minimize"), std::string::npos);
  EXPECT_NE(text.find("Binaries"), std::string::npos);
  EXPECT_NE(text.find("x_C1_1"), std::string::npos);
}

// Every metric's MIP optimum equals the cheapest plan found by enumerating
// all monotone plans with merit-order costs and brute-force risk; the optimal
// plan meets the criterion; relaxing the limit never raises the cost.
TEST(Monolithic, MatchesPlanEnumeration) {
  std::mt19937_64 rng(21);
  const std::vector<std::pair<Metric, std::vector<double>>> grid = {
      {Metric::Epns, {0.005, 0.02, 0.08}},
      {Metric::Cvar, {0.1, 0.3, 0.6}},
      {Metric::Lolp, {0.02, 0.1, 0.3}},
      {Metric::Var, {0.05, 0.2, 0.5}},
  };
  int feasible = 0;
  for (int trial = 0; trial < 8; ++trial) {
    const auto spec = testing::random_spec(rng, {3, 2 + trial % 2, 1 + trial % 2});
    const auto states = enumerate_states(spec);
    for (const auto& [metric, limits] : grid) {
      double previous = kInfinity;
      for (auto it = limits.begin(); it != limits.end(); ++it) {
        const ReliabilityCriterion crit{metric, *it, 0.1};
        const auto expected = oracle::best_plan_cost(spec, crit);
        const auto res = solve_monolithic(spec, states, crit);
        SCOPED_TRACE(std::string(to_string(metric)) + " trial " + std::to_string(trial));
        ASSERT_EQ(res.status == LpStatus::Optimal, expected.has_value());
        if (!expected) continue;
        ++feasible;
        EXPECT_NEAR(res.objective, *expected, 1e-7 * std::max(1.0, *expected));
        EXPECT_NEAR(plan_cost(spec, *res.plan), res.objective, 1e-6 * std::max(1.0, *expected));
        const Eigen::MatrixXd x = res.plan->relaxed();
        for (int t = 0; t < spec.periods(); ++t) {
          const auto shed = shedding_vector(spec, x, t, states);
          double value = 0.0;
          switch (metric) {
            case Metric::Epns: value = epns(spec, *res.plan, t, states); break;
            case Metric::Cvar: value = cvar_alpha(shed, states.weights(), 0.1); break;
            case Metric::Lolp: value = lolp(spec, *res.plan, t, states); break;
            case Metric::Var: value = var_alpha(shed, states.weights(), 0.1); break;
          }
          EXPECT_LE(value, crit.limit(spec, t) + 1e-7);
        }
        EXPECT_LE(res.objective, previous + 1e-7 * std::max(1.0, previous));
        previous = res.objective;
      }
    }
  }
  EXPECT_GT(feasible, 20);
}

}  // namespace
}  // namespace rcep
