#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "random_specs.hpp"
#include "rcep/operation.hpp"

namespace rcep {
namespace {

using testing::instance_a;

// Instance A with unit G1 offered as a candidate instead of existing.
SystemSpec g1_candidate() {
  return SystemSpec({{"G1", GeneratorKind::Candidate, 80.0, 0.1, 10.0, 1e4, 1},
                     {"G2", GeneratorKind::Existing, 50.0, 0.2, 20.0, 0.0, 1}},
                    {100.0}, 1000.0);
}

TEST(SolveOperation, MeritOrderDispatch) {
  const auto spec = instance_a();
  const auto r = solve_operation(spec, InvestmentPlan::empty(spec), 0);
  EXPECT_NEAR(r.cost, 1280.0, 1e-7);
  EXPECT_NEAR(r.dispatch(0), 72.0, 1e-9);
  EXPECT_NEAR(r.dispatch(1), 28.0, 1e-9);
  EXPECT_NEAR(r.shed, 0.0, 1e-9);
  EXPECT_NEAR(r.cap_duals(0), -10.0, 1e-9);
  EXPECT_NEAR(r.cap_duals(1), 0.0, 1e-9);
}

TEST(SolveOperation, PureSheddingAndZeroDemand) {
  const SystemSpec nothing({}, {100.0}, 1000.0);
  const auto r = solve_operation(nothing, InvestmentPlan::empty(nothing), 0);
  EXPECT_NEAR(r.cost, 100.0 * 1000.0, 1e-6);
  EXPECT_NEAR(r.shed, 100.0, 1e-9);

  const SystemSpec idle({{"G", GeneratorKind::Existing, 10.0, 0.1, 5.0, 0.0, 1}}, {0.0}, 100.0);
  const auto z = solve_operation(idle, InvestmentPlan::empty(idle), 0);
  EXPECT_EQ(z.cost, 0.0);
  EXPECT_EQ(z.shed, 0.0);
  EXPECT_EQ(z.dispatch(0), 0.0);
}

TEST(OperationCut, DualTimesDeratedCapacity) {
  const auto spec = g1_candidate();
  const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(1, 1);
  const auto results = solve_operations(spec, x);
  const auto cut = operation_cut(spec, x, results);
  EXPECT_NEAR(results[0].cost, 1280.0, 1e-7);
  EXPECT_NEAR(cut.coeffs(0, 0), -720.0, 1e-7);
  EXPECT_NEAR(cut.evaluate(x), 1280.0, 1e-7);
}

TEST(OperationCut, SlackSystemHasZeroCoefficients) {
  const SystemSpec spec({{"G", GeneratorKind::Existing, 500.0, 0.1, 5.0, 0.0, 1},
                         {"C", GeneratorKind::Candidate, 50.0, 0.1, 30.0, 10.0, 1}},
                        {100.0}, 1000.0);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(1, 1);
  const auto cut = operation_cut(spec, x, solve_operations(spec, x));
  EXPECT_EQ(cut.coeffs(0, 0), 0.0);
}

// The merit-order oracle agrees with the LP on random plans, the cut is a
// global under-estimator on relaxed plans, dispatch respects builds, and
// adding builds never raises cost.
TEST(OperationCut, ValidOnRandomPlans) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto spec = testing::random_spec(rng, {3, 3, 2});
    const int nc = spec.num_candidates();
    Eigen::MatrixXd base(nc, 2);
    for (int c = 0; c < nc; ++c) {
      for (int t = 0; t < 2; ++t) base(c, t) = unit(rng);
    }
    const auto results = solve_operations(spec, base);
    const auto cut = operation_cut(spec, base, results);
    EXPECT_NEAR(cut.evaluate(base), total_operation_cost(results), 1e-7);

    for (int k = 0; k < 50; ++k) {
      Eigen::MatrixXd other(nc, 2);
      for (int c = 0; c < nc; ++c) {
        for (int t = 0; t < 2; ++t) other(c, t) = unit(rng);
      }
      const double cost = total_operation_cost(solve_operations(spec, other));
      EXPECT_GE(cost, cut.evaluate(other) - 1e-7 * std::max(1.0, cost));
    }

    const auto plan = InvestmentPlan::empty(spec);
    double previous = kInfinity;
    InvestmentPlan::Matrix m = plan.matrix();
    for (int c = 0; c <= nc; ++c) {
      if (c > 0) {
        const int from = spec.candidate(c - 1).earliest_period - 1;
        for (int t = from; t < 2; ++t) m(c - 1, t) = 1;
      }
      const InvestmentPlan p(spec, m);
      double cost = 0.0;
      for (int t = 0; t < 2; ++t) {
        const auto r = solve_operation(spec, p, t);
        std::vector<bool> in_service(spec.num_generators());
        for (int j = 0; j < spec.num_generators(); ++j) {
          const int slot = spec.candidate_slot(j);
          in_service[j] = slot < 0 || p.built(slot, t);
          if (!in_service[j]) EXPECT_EQ(r.dispatch(j), 0.0);
        }
        EXPECT_NEAR(r.cost, oracle::merit_order_cost(spec, in_service, spec.demand(t)),
                    1e-7 * std::max(1.0, r.cost));
        EXPECT_NEAR(r.dispatch.sum() + r.shed, spec.demand(t), 1e-7);
        cost += r.cost;
      }
      EXPECT_LE(cost, previous + 1e-7);
      previous = cost;
    }
  }
}

}  // namespace
}  // namespace rcep
