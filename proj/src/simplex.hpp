#pragma once

#include <Eigen/Core>

#include <vector>

#include "rcep/lp.hpp"

namespace rcep::detail {

/// Column-compressed copy of a LinearProgram, built once and re-solved with
/// different column bounds (branch and bound).
struct SimplexModel {
  int num_structural = 0;
  int num_rows = 0;                   // non-empty rows only
  std::vector<int> row_of_internal;   // internal row -> original row
  std::vector<int> col_start;
  std::vector<int> col_row;
  std::vector<double> col_val;
  Eigen::VectorXd cost;               // structural costs
  Eigen::VectorXd row_lower;          // bounds of the logical a_i'x
  Eigen::VectorXd row_upper;
  bool empty_rows_infeasible = false;
  int original_rows = 0;

  explicit SimplexModel(const LinearProgram& problem);
};

LpSolution run_simplex(const SimplexModel& model, const LinearProgram& problem,
                       const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                       const SolverOptions& options, const Basis* warm_start);

}  // namespace rcep::detail
