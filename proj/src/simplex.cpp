// Bounded revised primal simplex.
//
// Every row i gets a logical column s_i = a_i'x, so the constraint system is
// A x - s = 0 with bounds on both x and s. The basis is factored with Eigen's
// SparseLU and updated in product form between refactorizations. Phase 1
// minimizes the sum of bound violations of basic variables starting from any
// basis, which also serves warm starts after bound changes.

#include "simplex.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <sstream>
#include <string>

namespace rcep::detail {

SimplexModel::SimplexModel(const LinearProgram& problem) {
  problem.validate();
  num_structural = problem.num_variables();
  original_rows = problem.num_rows();
  cost.resize(num_structural);
  for (int j = 0; j < num_structural; ++j) cost(j) = problem.variable(j).cost;

  std::vector<std::vector<std::pair<int, double>>> columns(num_structural);
  std::vector<double> lo;
  std::vector<double> hi;
  for (int i = 0; i < problem.num_rows(); ++i) {
    const auto& row = problem.row(i);
    // Merge duplicate column references and drop zeros.
    std::vector<std::pair<int, double>> merged;
    for (const auto& t : row.terms) merged.emplace_back(t.var, t.coef);
    std::sort(merged.begin(), merged.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<int, double>> terms;
    for (const auto& [j, c] : merged) {
      if (!terms.empty() && terms.back().first == j) {
        terms.back().second += c;
      } else {
        terms.emplace_back(j, c);
      }
    }
    std::erase_if(terms, [](const auto& t) { return t.second == 0.0; });

    double l = -kInfinity;
    double u = kInfinity;
    switch (row.relation) {
      case Relation::LessEqual: u = row.rhs; break;
      case Relation::GreaterEqual: l = row.rhs; break;
      case Relation::Equal: l = u = row.rhs; break;
    }
    if (terms.empty()) {
      if (l > 1e-9 || u < -1e-9) empty_rows_infeasible = true;
      continue;
    }
    const int internal = num_rows++;
    row_of_internal.push_back(i);
    lo.push_back(l);
    hi.push_back(u);
    for (const auto& [j, c] : terms) columns[j].emplace_back(internal, c);
  }
  row_lower = Eigen::Map<Eigen::VectorXd>(lo.data(), static_cast<Eigen::Index>(lo.size()));
  row_upper = Eigen::Map<Eigen::VectorXd>(hi.data(), static_cast<Eigen::Index>(hi.size()));
  col_start.reserve(num_structural + 1);
  col_start.push_back(0);
  for (const auto& col : columns) {
    for (const auto& [r, c] : col) {
      col_row.push_back(r);
      col_val.push_back(c);
    }
    col_start.push_back(static_cast<int>(col_row.size()));
  }
}

namespace {

enum class State : std::int8_t { Basic, AtLower, AtUpper, Free };

struct Eta {
  int position;
  double pivot;
  std::vector<std::pair<int, double>> others;
};

class Simplex {
 public:
  Simplex(const SimplexModel& model, const Eigen::VectorXd& lower,
          const Eigen::VectorXd& upper, const SolverOptions& options)
      : model_(model),
        options_(options),
        m_(model.num_rows),
        n_(model.num_structural),
        total_(model.num_structural + model.num_rows) {
    lower_.resize(total_);
    upper_.resize(total_);
    cost_ = Eigen::VectorXd::Zero(total_);
    lower_.head(n_) = lower;
    upper_.head(n_) = upper;
    lower_.tail(m_) = model.row_lower;
    upper_.tail(m_) = model.row_upper;
    cost_.head(n_) = model.cost;
    cost_scale_ = std::max(1.0, cost_.cwiseAbs().maxCoeff());
    if (total_ == 0) cost_scale_ = 1.0;
    x_ = Eigen::VectorXd::Zero(total_);
    state_.assign(total_, State::AtLower);
    position_.assign(total_, -1);
    max_pivots_ = options.max_pivots > 0 ? options.max_pivots
                                         : 50L * (m_ + total_) + 10000L;
  }

  void start(const Basis* warm) {
    if (warm != nullptr && try_warm_start(*warm)) return;
    slack_start();
  }

  LpStatus run();
  LpSolution extract(const LinearProgram& problem, LpStatus status) const;
  long pivots() const { return pivots_; }

 private:
  double primal_tol(double bound) const {
    return 1e-9 * std::max(1.0, std::abs(bound));
  }

  void place_nonbasic(int k, bool prefer_upper) {
    const double l = lower_(k);
    const double u = upper_(k);
    if (std::isfinite(l) && std::isfinite(u)) {
      state_[k] = prefer_upper ? State::AtUpper : State::AtLower;
    } else if (std::isfinite(l)) {
      state_[k] = State::AtLower;
    } else if (std::isfinite(u)) {
      state_[k] = State::AtUpper;
    } else {
      state_[k] = State::Free;
    }
    x_(k) = state_[k] == State::AtLower ? l : state_[k] == State::AtUpper ? u : 0.0;
    position_[k] = -1;
  }

  void slack_start() {
    basic_.resize(m_);
    for (int k = 0; k < n_; ++k) {
      const bool prefer_upper = cost_(k) < 0.0 && std::isfinite(upper_(k));
      place_nonbasic(k, prefer_upper);
    }
    for (int i = 0; i < m_; ++i) {
      basic_[i] = n_ + i;
      state_[n_ + i] = State::Basic;
      position_[n_ + i] = i;
    }
    refactor();
    compute_basic_values();
  }

  bool try_warm_start(const Basis& warm) {
    if (static_cast<int>(warm.basic.size()) != m_ ||
        static_cast<int>(warm.at_upper.size()) != total_) {
      return false;
    }
    std::vector<char> seen(total_, 0);
    for (int k : warm.basic) {
      if (k < 0 || k >= total_ || seen[k]) return false;
      seen[k] = 1;
    }
    basic_ = warm.basic;
    for (int k = 0; k < total_; ++k) {
      if (!seen[k]) place_nonbasic(k, warm.at_upper[k] != 0);
    }
    for (int i = 0; i < m_; ++i) {
      state_[basic_[i]] = State::Basic;
      position_[basic_[i]] = i;
    }
    try {
      refactor();
    } catch (const SolverError&) {
      return false;
    }
    compute_basic_values();
    return true;
  }

  // Column k of [A  -I] accumulated into dense v with scale.
  void add_column(int k, double scale, Eigen::VectorXd& v) const {
    if (k < n_) {
      for (int p = model_.col_start[k]; p < model_.col_start[k + 1]; ++p) {
        v(model_.col_row[p]) += scale * model_.col_val[p];
      }
    } else {
      v(k - n_) -= scale;
    }
  }

  double column_dot(int k, const Eigen::VectorXd& y) const {
    if (k >= n_) return -y(k - n_);
    double s = 0.0;
    for (int p = model_.col_start[k]; p < model_.col_start[k + 1]; ++p) {
      s += model_.col_val[p] * y(model_.col_row[p]);
    }
    return s;
  }

  void refactor() {
    etas_.clear();
    since_refactor_ = 0;
    if (m_ == 0) return;
    std::vector<Eigen::Triplet<double>> triplets;
    for (int p = 0; p < m_; ++p) {
      const int k = basic_[p];
      if (k < n_) {
        for (int q = model_.col_start[k]; q < model_.col_start[k + 1]; ++q) {
          triplets.emplace_back(model_.col_row[q], p, model_.col_val[q]);
        }
      } else {
        triplets.emplace_back(k - n_, p, -1.0);
      }
    }
    Eigen::SparseMatrix<double> basis(m_, m_);
    basis.setFromTriplets(triplets.begin(), triplets.end());
    basis.makeCompressed();
    lu_.analyzePattern(basis);
    lu_.factorize(basis);
    if (lu_.info() != Eigen::Success) {
      throw SolverError("basis factorization failed: " + lu_.lastErrorMessage(), log());
    }
  }

  void ftran(Eigen::VectorXd& v) const {
    if (m_ == 0) return;
    v = lu_.solve(v);
    for (const auto& e : etas_) {
      const double vr = v(e.position) / e.pivot;
      if (vr != 0.0) {
        for (const auto& [i, w] : e.others) v(i) -= w * vr;
      }
      v(e.position) = vr;
    }
  }

  void btran(Eigen::VectorXd& u) const {
    if (m_ == 0) return;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = u(it->position);
      for (const auto& [i, w] : it->others) s -= w * u(i);
      u(it->position) = s / it->pivot;
    }
    u = lu_.transpose().solve(u);
  }

  void compute_basic_values() {
    if (m_ == 0) return;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
    for (int k = 0; k < total_; ++k) {
      if (state_[k] != State::Basic && x_(k) != 0.0) add_column(k, -x_(k), rhs);
    }
    ftran(rhs);
    for (int p = 0; p < m_; ++p) x_(basic_[p]) = rhs(p);
  }

  // Sum of bound violations over basic variables.
  double infeasibility() const {
    double total = 0.0;
    for (int p = 0; p < m_; ++p) {
      const int k = basic_[p];
      if (x_(k) < lower_(k) - primal_tol(lower_(k))) total += lower_(k) - x_(k);
      if (x_(k) > upper_(k) + primal_tol(upper_(k))) total += x_(k) - upper_(k);
    }
    return total;
  }

  void note(const std::string& line) {
    recent_.push_back(line);
    if (recent_.size() > 25) recent_.pop_front();
  }

  std::string log() const {
    std::ostringstream os;
    for (const auto& line : recent_) os << line << '\n';
    return os.str();
  }

  const SimplexModel& model_;
  SolverOptions options_;
  int m_;
  int n_;
  int total_;
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
  Eigen::VectorXd cost_;
  double cost_scale_ = 1.0;
  Eigen::VectorXd x_;
  std::vector<State> state_;
  std::vector<int> position_;
  std::vector<int> basic_;
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
  int since_refactor_ = 0;
  long pivots_ = 0;
  long max_pivots_ = 0;
  std::deque<std::string> recent_;
  Eigen::VectorXd duals_;
};

LpStatus Simplex::run() {
  int degenerate_streak = 0;
  bool bland = false;
  bool verified = false;
  Eigen::VectorXd y(m_);
  Eigen::VectorXd w(m_);
  Eigen::VectorXd cb(m_);

  for (;;) {
    if (since_refactor_ >= options_.refactor_interval) {
      refactor();
      compute_basic_values();
    }
    const bool phase1 = infeasibility() > 0.0;

    for (int p = 0; p < m_; ++p) {
      const int k = basic_[p];
      if (phase1) {
        if (x_(k) < lower_(k) - primal_tol(lower_(k))) {
          cb(p) = -1.0;
        } else if (x_(k) > upper_(k) + primal_tol(upper_(k))) {
          cb(p) = 1.0;
        } else {
          cb(p) = 0.0;
        }
      } else {
        cb(p) = cost_(k);
      }
    }
    y = cb;
    btran(y);

    const double dual_tol = phase1 ? 1e-9 : 1e-9 * cost_scale_;
    int entering = -1;
    double best = 0.0;
    double entering_d = 0.0;
    for (int k = 0; k < total_; ++k) {
      const State s = state_[k];
      if (s == State::Basic || lower_(k) == upper_(k)) continue;
      const double d = (phase1 ? 0.0 : cost_(k)) - column_dot(k, y);
      bool eligible = false;
      if (s == State::AtLower) {
        eligible = d < -dual_tol;
      } else if (s == State::AtUpper) {
        eligible = d > dual_tol;
      } else {
        eligible = std::abs(d) > dual_tol;
      }
      if (!eligible) continue;
      if (bland) {
        entering = k;
        entering_d = d;
        break;
      }
      if (std::abs(d) > best) {
        best = std::abs(d);
        entering = k;
        entering_d = d;
      }
    }

    if (entering < 0) {
      // Confirm on a fresh factorization before declaring termination.
      if (!verified) {
        refactor();
        compute_basic_values();
        verified = true;
        continue;
      }
      if (phase1) return LpStatus::Infeasible;
      duals_ = y;
      return LpStatus::Optimal;
    }
    verified = false;

    if (++pivots_ > max_pivots_) {
      throw SolverError("simplex exceeded " + std::to_string(max_pivots_) +
                            " pivots (possible cycling)",
                        log());
    }

    const double direction = entering_d < 0.0 ? 1.0 : -1.0;
    w.setZero();
    add_column(entering, 1.0, w);
    ftran(w);

    // Harris two-pass ratio test. Basic k moves at rate -direction * w(p).
    const double pivot_tol = options_.tol_pivot;
    double relaxed = kInfinity;
    for (int p = 0; p < m_; ++p) {
      const double rate = -direction * w(p);
      if (std::abs(rate) <= pivot_tol) continue;
      const int k = basic_[p];
      const double v = x_(k);
      const double l = lower_(k);
      const double u = upper_(k);
      const bool below = v < l - primal_tol(l);
      const bool above = v > u + primal_tol(u);
      double limit = kInfinity;
      if (rate < 0.0) {
        if (above) {
          limit = (v - u + primal_tol(u)) / -rate;
        } else if (!below && std::isfinite(l)) {
          limit = (v - l + primal_tol(l)) / -rate;
        }
      } else {
        if (below) {
          limit = (l - v + primal_tol(l)) / rate;
        } else if (!above && std::isfinite(u)) {
          limit = (u - v + primal_tol(u)) / rate;
        }
      }
      relaxed = std::min(relaxed, limit);
    }

    int leave_pos = -1;
    bool leave_to_upper = false;
    double step = kInfinity;
    double best_rate = 0.0;
    for (int p = 0; p < m_; ++p) {
      const double rate = -direction * w(p);
      if (std::abs(rate) <= pivot_tol) continue;
      const int k = basic_[p];
      const double v = x_(k);
      const double l = lower_(k);
      const double u = upper_(k);
      const bool below = v < l - primal_tol(l);
      const bool above = v > u + primal_tol(u);
      double ratio = kInfinity;
      bool to_upper = false;
      if (rate < 0.0) {
        if (above) {
          ratio = (v - u) / -rate;
          to_upper = true;
        } else if (!below && std::isfinite(l)) {
          ratio = (v - l) / -rate;
        }
      } else {
        if (below) {
          ratio = (l - v) / rate;
        } else if (!above && std::isfinite(u)) {
          ratio = (u - v) / rate;
          to_upper = true;
        }
      }
      if (!(ratio <= relaxed)) continue;
      ratio = std::max(ratio, 0.0);
      const bool better = bland ? (leave_pos < 0 || k < basic_[leave_pos])
                                : std::abs(rate) > best_rate;
      if (better) {
        best_rate = std::abs(rate);
        leave_pos = p;
        leave_to_upper = to_upper;
        step = ratio;
      }
    }

    const double range = upper_(entering) - lower_(entering);
    const bool flip = std::isfinite(range) && (leave_pos < 0 || range <= step);
    if (flip) step = range;

    if (!std::isfinite(step)) {
      if (phase1) {
        throw SolverError("phase 1 direction without a breakpoint", log());
      }
      return LpStatus::Unbounded;
    }

    if (step <= 1e-12) {
      if (++degenerate_streak > options_.degenerate_streak) bland = true;
    } else {
      degenerate_streak = 0;
      bland = false;
    }

    x_(entering) += direction * step;
    if (step != 0.0) {
      for (int p = 0; p < m_; ++p) {
        if (w(p) != 0.0) x_(basic_[p]) -= direction * step * w(p);
      }
    }

    if (flip) {
      state_[entering] = direction > 0 ? State::AtUpper : State::AtLower;
      x_(entering) = direction > 0 ? upper_(entering) : lower_(entering);
      note("pivot " + std::to_string(pivots_) + " flip " + std::to_string(entering));
      continue;
    }

    const int leaving = basic_[leave_pos];
    state_[leaving] = leave_to_upper ? State::AtUpper : State::AtLower;
    x_(leaving) = leave_to_upper ? upper_(leaving) : lower_(leaving);
    position_[leaving] = -1;
    basic_[leave_pos] = entering;
    state_[entering] = State::Basic;
    position_[entering] = leave_pos;

    Eta eta{leave_pos, w(leave_pos), {}};
    for (int p = 0; p < m_; ++p) {
      if (p != leave_pos && w(p) != 0.0) eta.others.emplace_back(p, w(p));
    }
    etas_.push_back(std::move(eta));
    ++since_refactor_;

    std::ostringstream os;
    os << "pivot " << pivots_ << (phase1 ? " p1" : " p2") << " in " << entering
       << " out " << leaving << " step " << step << (bland ? " bland" : "");
    note(os.str());
  }
}

LpSolution Simplex::extract(const LinearProgram& problem, LpStatus status) const {
  LpSolution sol;
  sol.status = status;
  sol.iterations = pivots_;
  sol.primal = x_.head(n_);
  sol.duals = Eigen::VectorXd::Zero(model_.original_rows);
  sol.reduced_costs = Eigen::VectorXd::Zero(n_);
  if (status != LpStatus::Optimal) return sol;

  for (int i = 0; i < m_; ++i) sol.duals(model_.row_of_internal[i]) = duals_(i);
  double dual_obj = problem.objective_offset();
  for (int i = 0; i < m_; ++i) {
    const int k = n_ + i;
    if (state_[k] != State::Basic) dual_obj += duals_(i) * x_(k);
  }
  for (int j = 0; j < n_; ++j) {
    if (state_[j] == State::Basic) continue;
    const double d = cost_(j) - column_dot(j, duals_);
    sol.reduced_costs(j) = d;
    dual_obj += d * x_(j);
  }
  sol.objective = problem.objective_offset() + cost_.head(n_).dot(x_.head(n_));
  sol.dual_objective = dual_obj;

  Basis basis;
  basis.basic = basic_;
  basis.at_upper.resize(total_);
  for (int k = 0; k < total_; ++k) basis.at_upper[k] = state_[k] == State::AtUpper ? 1 : 0;
  sol.basis = std::move(basis);
  return sol;
}

}  // namespace

LpSolution run_simplex(const SimplexModel& model, const LinearProgram& problem,
                       const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                       const SolverOptions& options, const Basis* warm_start) {
  if (model.empty_rows_infeasible) {
    LpSolution sol;
    sol.status = LpStatus::Infeasible;
    sol.primal = Eigen::VectorXd::Zero(model.num_structural);
    sol.duals = Eigen::VectorXd::Zero(model.original_rows);
    return sol;
  }
  for (int j = 0; j < model.num_structural; ++j) {
    if (lower(j) > upper(j)) {
      LpSolution sol;
      sol.status = LpStatus::Infeasible;
      sol.primal = Eigen::VectorXd::Zero(model.num_structural);
      sol.duals = Eigen::VectorXd::Zero(model.original_rows);
      return sol;
    }
  }
  Simplex simplex(model, lower, upper, options);
  simplex.start(warm_start);
  const LpStatus status = simplex.run();
  return simplex.extract(problem, status);
}

}  // namespace rcep::detail

namespace rcep {

LpSolution solve_lp(const LinearProgram& problem, const SolverOptions& options,
                    const Basis* warm_start) {
  const detail::SimplexModel model(problem);
  Eigen::VectorXd lower(problem.num_variables());
  Eigen::VectorXd upper(problem.num_variables());
  for (int j = 0; j < problem.num_variables(); ++j) {
    lower(j) = problem.variable(j).lower;
    upper(j) = problem.variable(j).upper;
  }
  return detail::run_simplex(model, problem, lower, upper, options, warm_start);
}

}  // namespace rcep
