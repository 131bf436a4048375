#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rcep/error.hpp"

namespace rcep {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { LessEqual, GreaterEqual, Equal };
enum class VarKind { Continuous, Binary };

struct Term {
  int var;
  double coef;
};

struct Row {
  std::vector<Term> terms;
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
  std::string name;
};

struct Variable {
  double cost = 0.0;
  double lower = 0.0;
  double upper = kInfinity;
  VarKind kind = VarKind::Continuous;
  std::string name;
};

/// Minimization problem `min c'x + offset` over sparse rows and bounded
/// columns. Binary columns are only honoured by solve_mip.
class LinearProgram {
 public:
  int add_variable(double cost, double lower = 0.0, double upper = kInfinity,
                   VarKind kind = VarKind::Continuous, std::string name = {});
  int add_binary(double cost, std::string name = {});
  int add_row(std::vector<Term> terms, Relation relation, double rhs,
              std::string name = {});

  void set_bounds(int var, double lower, double upper);
  void set_objective_offset(double offset) { offset_ = offset; }

  int num_variables() const { return static_cast<int>(vars_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  int num_binaries() const;
  bool has_integers() const { return num_binaries() > 0; }

  const Variable& variable(int j) const { return vars_.at(j); }
  const Row& row(int i) const { return rows_.at(i); }
  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Row>& rows() const { return rows_; }
  double objective_offset() const { return offset_; }

  /// Throws InstanceError on non-finite rhs, crossed bounds or bad indices.
  void validate() const;

  double objective_value(const Eigen::VectorXd& x) const;
  /// Row activities a_i'x.
  Eigen::VectorXd activities(const Eigen::VectorXd& x) const;

 private:
  std::vector<Variable> vars_;
  std::vector<Row> rows_;
  double offset_ = 0.0;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus status);

/// Basis snapshot used to warm-start a re-solve after bound changes.
struct Basis {
  std::vector<int> basic;             // one variable index per row position
  std::vector<std::int8_t> at_upper;  // per column (structural then logical)
};

/// Row duals follow the sensitivity convention d(objective)/d(rhs): for a
/// minimization, duals of <= rows are <= 0 and duals of >= rows are >= 0.
struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  double dual_objective = 0.0;
  Eigen::VectorXd primal;
  Eigen::VectorXd duals;
  Eigen::VectorXd reduced_costs;
  long iterations = 0;
  long nodes = 0;  // branch-and-bound nodes created beyond the root
  std::optional<Basis> basis;

  bool optimal() const { return status == LpStatus::Optimal; }
};

struct SolverOptions {
  double tol_feas = 1e-7;
  double tol_opt = 1e-7;
  double tol_int = 1e-6;
  double tol_pivot = 1e-9;
  int degenerate_streak = 50;  // switch to Bland's rule after this many
  int refactor_interval = 64;
  long max_pivots = 0;  // 0: 50 * (rows + cols) + 10000
  long max_nodes = 200000;
};

LpSolution solve_lp(const LinearProgram& problem,
                    const SolverOptions& options = {},
                    const Basis* warm_start = nullptr);

/// Branch-and-bound over binary columns: best-bound node selection, branch on
/// the most fractional binary (lowest index on ties).
LpSolution solve_mip(const LinearProgram& problem,
                     const SolverOptions& options = {});

/// Node limit hit; carries the best incumbent found (status Infeasible when
/// there was none).
class NodeLimitError : public ResourceError {
 public:
  NodeLimitError(const std::string& what, LpSolution incumbent)
      : ResourceError(what), incumbent_(std::move(incumbent)) {}
  const LpSolution& incumbent() const { return incumbent_; }

 private:
  LpSolution incumbent_;
};

/// CPLEX-LP text dump for cross-checking with external solvers.
void write_lp_format(const LinearProgram& problem, std::ostream& out);

}  // namespace rcep
