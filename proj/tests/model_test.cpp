#include <gtest/gtest.h>

#include "random_specs.hpp"
#include "rcep/model.hpp"

namespace rcep {
namespace {

SystemSpec three_period_spec() {
  std::vector<Generator> gens = {
      {"G1", GeneratorKind::Existing, 80.0, 0.1, 10.0, 0.0, 1},
      {"G2", GeneratorKind::Existing, 50.0, 0.2, 20.0, 0.0, 1},
      {"C1", GeneratorKind::Candidate, 30.0, 0.0, 40.0, 5e6, 1},
      {"C2", GeneratorKind::Candidate, 45.0, 0.05, 30.0, 7e6, 2},
  };
  return SystemSpec(gens, {100.0, 110.0, 120.0}, 1000.0);
}

InvestmentPlan::Matrix builds(std::initializer_list<std::initializer_list<int>> rows) {
  InvestmentPlan::Matrix m(static_cast<Eigen::Index>(rows.size()),
                           static_cast<Eigen::Index>(rows.begin()->size()));
  int r = 0;
  for (const auto& row : rows) {
    int c = 0;
    for (int v : row) m(r, c++) = static_cast<std::int8_t>(v);
    ++r;
  }
  return m;
}

TEST(SystemSpec, RejectsInvariantViolations) {
  const Generator ok{"G", GeneratorKind::Existing, 10.0, 0.1, 5.0, 0.0, 1};
  EXPECT_NO_THROW(SystemSpec({ok}, {5.0}, 100.0));

  auto bad = ok;
  bad.capacity_mw = 0.0;
  EXPECT_THROW(SystemSpec({bad}, {5.0}, 100.0), InstanceError);
  bad = ok;
  bad.outage_prob = 1.5;
  EXPECT_THROW(SystemSpec({bad}, {5.0}, 100.0), InstanceError);
  bad = ok;
  bad.invest_cost = 3.0;
  EXPECT_THROW(SystemSpec({bad}, {5.0}, 100.0), InstanceError);
  bad = ok;
  bad.kind = GeneratorKind::Candidate;
  EXPECT_THROW(SystemSpec({bad}, {5.0}, 100.0), InstanceError);
  bad = ok;
  bad.var_cost = 100.0;
  EXPECT_THROW(SystemSpec({bad}, {5.0}, 100.0), InstanceError);
  EXPECT_THROW(SystemSpec({ok, ok}, {5.0}, 100.0), InstanceError);
  EXPECT_THROW(SystemSpec({ok}, {-1.0}, 100.0), InstanceError);
  EXPECT_THROW(SystemSpec({ok}, {}, 100.0), InstanceError);
  auto late = ok;
  late.kind = GeneratorKind::Candidate;
  late.invest_cost = 1.0;
  late.earliest_period = 3;
  EXPECT_THROW(SystemSpec({late}, {5.0, 6.0}, 100.0), InstanceError);
}

TEST(SystemSpec, CandidateSlots) {
  const auto spec = three_period_spec();
  EXPECT_EQ(spec.num_candidates(), 2);
  EXPECT_EQ(spec.candidate_generator(1), 3);
  EXPECT_EQ(spec.candidate_slot(0), -1);
  EXPECT_EQ(spec.candidate_slot(2), 0);
  EXPECT_DOUBLE_EQ(spec.generator(0).derated_capacity(), 72.0);
}

TEST(InvestmentPlan, RejectsNonMonotoneAndEarlyBuilds) {
  const auto spec = three_period_spec();
  EXPECT_NO_THROW(InvestmentPlan(spec, builds({{0, 1, 1}, {0, 0, 1}})));
  EXPECT_THROW(InvestmentPlan(spec, builds({{1, 0, 1}, {0, 0, 0}})), InstanceError);
  EXPECT_THROW(InvestmentPlan(spec, builds({{0, 0, 0}, {1, 1, 1}})), InstanceError);
  EXPECT_THROW(InvestmentPlan(spec, builds({{0, 0}, {0, 0}})), InstanceError);
  EXPECT_THROW(InvestmentPlan(spec, builds({{0, 2, 2}, {0, 0, 0}})), InstanceError);
}

TEST(PlanInvestCost, OneTimeCharges) {
  const auto spec = three_period_spec();
  EXPECT_EQ(plan_invest_cost(spec, InvestmentPlan::empty(spec)), 0.0);
  EXPECT_EQ(plan_invest_cost(spec, InvestmentPlan(spec, builds({{0, 1, 1}, {0, 0, 0}}))), 5e6);
  EXPECT_EQ(plan_invest_cost(spec, InvestmentPlan(spec, builds({{1, 1, 1}, {0, 1, 1}}))), 12e6);

  const auto other = testing::instance_a(true);
  EXPECT_THROW(plan_invest_cost(other, InvestmentPlan::empty(spec)), InstanceError);
}

TEST(PlanInvestCost, MonotoneUnderAddedBuilds) {
  const auto spec = three_period_spec();
  const InvestmentPlan base(spec, builds({{0, 0, 1}, {0, 0, 0}}));
  const InvestmentPlan more(spec, builds({{0, 1, 1}, {0, 1, 1}}));
  EXPECT_TRUE(more.contains(base));
  EXPECT_FALSE(base.contains(more));
  EXPECT_LE(plan_invest_cost(spec, base), plan_invest_cost(spec, more));
}

TEST(AvailableCapacity, SumsUnitsInService) {
  const auto spec = testing::instance_a(true);
  const auto none = InvestmentPlan::empty(spec);
  EXPECT_DOUBLE_EQ(available_capacity(spec, none, 0, OutageState{{1, 1, 1}, 1.0}), 130.0);
  EXPECT_DOUBLE_EQ(available_capacity(spec, none, 0, OutageState{{1, 0, 1}, 1.0}), 80.0);
  const InvestmentPlan built(spec, builds({{1}}));
  EXPECT_DOUBLE_EQ(available_capacity(spec, built, 0, OutageState{{1, 1, 0}, 1.0}), 130.0);
  EXPECT_DOUBLE_EQ(available_capacity(spec, built, 0, OutageState{{1, 1, 1}, 1.0}), 160.0);
  EXPECT_THROW(available_capacity(spec, built, 0, OutageState{{1, 1}, 1.0}), InstanceError);
}

TEST(AvailableCapacity, MonotoneInStateAndBuilds) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto spec = testing::random_spec(rng, {3, 3, 1});
    std::vector<std::uint8_t> up(spec.num_generators());
    for (auto& u : up) u = rng() & 1U;
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 1);
    for (int c = 0; c < 3; ++c) x(c, 0) = (rng() & 1U) ? 1.0 : 0.0;
    const double base = available_capacity(spec, x, 0, up);
    for (int j = 0; j < spec.num_generators(); ++j) {
      auto more = up;
      more[j] = 1;
      EXPECT_GE(available_capacity(spec, x, 0, more), base);
    }
    for (int c = 0; c < 3; ++c) {
      Eigen::MatrixXd y = x;
      y(c, 0) = 1.0;
      EXPECT_GE(available_capacity(spec, y, 0, up), base);
    }
  }
}

TEST(ReliabilityCriterion, LimitsScaleWithDemand) {
  const auto spec = three_period_spec();
  const ReliabilityCriterion epns{Metric::Epns, 0.01, 0.05};
  EXPECT_DOUBLE_EQ(epns.limit(spec, 2), 1.2);
  const ReliabilityCriterion lolp{Metric::Lolp, 0.05, 0.05};
  EXPECT_DOUBLE_EQ(lolp.limit(spec, 2), 0.05);
  EXPECT_THROW((ReliabilityCriterion{Metric::Cvar, 0.1, 0.0}.validate()), InstanceError);
  EXPECT_THROW((ReliabilityCriterion{Metric::Cvar, 1.1, 0.5}.validate()), InstanceError);
}

}  // namespace
}  // namespace rcep
