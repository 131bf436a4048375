#pragma once

#include <Eigen/Core>

namespace rcep {

enum class CutKind { Optimality, Feasibility };

/// Hyperplane over the relaxed build matrix (candidates x periods).
/// Optimality cuts under-estimate total operation cost; feasibility cuts
/// approximate one period's risk metric, which must stay <= bound.
struct BendersCut {
  CutKind kind = CutKind::Optimality;
  int period = -1;  // -1 for cuts spanning every period
  double intercept = 0.0;
  Eigen::MatrixXd coeffs;
  double bound = 0.0;  // feasibility cuts only
  int iteration = 0;

  double evaluate(const Eigen::MatrixXd& x) const {
    return intercept + (coeffs.array() * x.array()).sum();
  }
};

}  // namespace rcep
