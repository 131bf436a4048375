#pragma once

#include <Eigen/Core>

#include <vector>

#include "rcep/cut.hpp"
#include "rcep/lp.hpp"
#include "rcep/model.hpp"

namespace rcep {

/// Economic dispatch of one period under derated capacities.
struct OperationResult {
  int period = 0;
  double cost = 0.0;
  Eigen::VectorXd dispatch;   // MW per generator
  double shed = 0.0;
  Eigen::VectorXd cap_duals;  // dual of g_j <= derated_j * x_j, <= 0
};

/// min sum d_j g_j + h r  s.t.  sum g_j + r = D_t,  g_j <= derated_j * x_{j,t}.
OperationResult solve_operation(const SystemSpec& spec, const Eigen::MatrixXd& x, int period,
                                const SolverOptions& options = {});
OperationResult solve_operation(const SystemSpec& spec, const InvestmentPlan& plan, int period,
                                const SolverOptions& options = {});

/// Every period, solved concurrently and returned in period order.
std::vector<OperationResult> solve_operations(const SystemSpec& spec, const Eigen::MatrixXd& x,
                                              const SolverOptions& options = {});

double total_operation_cost(const std::vector<OperationResult>& results);

/// Aggregated optimality cut at base plan x: coefficient (c, t) is the
/// capacity dual of period t times the candidate's derated capacity.
BendersCut operation_cut(const SystemSpec& spec, const Eigen::MatrixXd& x,
                         const std::vector<OperationResult>& results, int iteration = 0);

}  // namespace rcep
