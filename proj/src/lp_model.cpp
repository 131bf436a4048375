#include <cmath>
#include <ostream>
#include <sstream>

#include "rcep/lp.hpp"

namespace rcep {

int LinearProgram::add_variable(double cost, double lower, double upper,
                                VarKind kind, std::string name) {
  vars_.push_back(Variable{cost, lower, upper, kind, std::move(name)});
  return static_cast<int>(vars_.size()) - 1;
}

int LinearProgram::add_binary(double cost, std::string name) {
  return add_variable(cost, 0.0, 1.0, VarKind::Binary, std::move(name));
}

int LinearProgram::add_row(std::vector<Term> terms, Relation relation,
                           double rhs, std::string name) {
  rows_.push_back(Row{std::move(terms), relation, rhs, std::move(name)});
  return static_cast<int>(rows_.size()) - 1;
}

void LinearProgram::set_bounds(int var, double lower, double upper) {
  auto& v = vars_.at(var);
  v.lower = lower;
  v.upper = upper;
}

int LinearProgram::num_binaries() const {
  int count = 0;
  for (const auto& v : vars_) count += v.kind == VarKind::Binary ? 1 : 0;
  return count;
}

void LinearProgram::validate() const {
  const int n = num_variables();
  for (int j = 0; j < n; ++j) {
    const auto& v = vars_[j];
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper ||
        v.lower == kInfinity || v.upper == -kInfinity) {
      throw InstanceError("variable " + std::to_string(j) + " has invalid bounds");
    }
    if (!std::isfinite(v.cost)) {
      throw InstanceError("variable " + std::to_string(j) + " has non-finite cost");
    }
  }
  for (int i = 0; i < num_rows(); ++i) {
    const auto& r = rows_[i];
    if (!std::isfinite(r.rhs)) {
      throw InstanceError("row " + std::to_string(i) + " has non-finite rhs");
    }
    for (const auto& t : r.terms) {
      if (t.var < 0 || t.var >= n) {
        throw InstanceError("row " + std::to_string(i) + " references column " +
                            std::to_string(t.var) + " out of range");
      }
      if (!std::isfinite(t.coef)) {
        throw InstanceError("row " + std::to_string(i) + " has a non-finite coefficient");
      }
    }
  }
}

double LinearProgram::objective_value(const Eigen::VectorXd& x) const {
  double total = offset_;
  for (int j = 0; j < num_variables(); ++j) total += vars_[j].cost * x(j);
  return total;
}

Eigen::VectorXd LinearProgram::activities(const Eigen::VectorXd& x) const {
  Eigen::VectorXd act = Eigen::VectorXd::Zero(num_rows());
  for (int i = 0; i < num_rows(); ++i) {
    for (const auto& t : rows_[i].terms) act(i) += t.coef * x(t.var);
  }
  return act;
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

std::string column_name(const LinearProgram& p, int j) {
  const auto& name = p.variable(j).name;
  return name.empty() ? "x" + std::to_string(j) : name;
}

std::string number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void write_linear(std::ostream& out, const LinearProgram& p,
                  const std::vector<std::pair<int, double>>& terms) {
  if (terms.empty()) {
    out << " 0 " << column_name(p, 0);
    return;
  }
  bool first = true;
  int on_line = 0;
  for (const auto& [j, c] : terms) {
    if (first) {
      out << (c < 0 ? " - " : " ");
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    out << number(std::abs(c)) << ' ' << column_name(p, j);
    first = false;
    if (++on_line == 8) {
      out << "\n  ";
      on_line = 0;
    }
  }
}

}  // namespace

void write_lp_format(const LinearProgram& p, std::ostream& out) {
  out << "\\ rcep debug dump: " << p.num_variables() << " columns, "
      << p.num_rows() << " rows\n";
  if (p.objective_offset() != 0.0) {
    out << "\\ objective offset " << number(p.objective_offset()) << "\n";
  }
  out << "Minimize\n obj:";
  std::vector<std::pair<int, double>> obj;
  for (int j = 0; j < p.num_variables(); ++j) {
    if (p.variable(j).cost != 0.0) obj.emplace_back(j, p.variable(j).cost);
  }
  if (p.num_variables() > 0) write_linear(out, p, obj);
  out << "\nSubject To\n";
  for (int i = 0; i < p.num_rows(); ++i) {
    const auto& r = p.row(i);
    if (r.terms.empty()) continue;
    out << ' ' << (r.name.empty() ? "c" + std::to_string(i) : r.name) << ':';
    std::vector<std::pair<int, double>> terms;
    for (const auto& t : r.terms) terms.emplace_back(t.var, t.coef);
    write_linear(out, p, terms);
    switch (r.relation) {
      case Relation::LessEqual: out << " <= "; break;
      case Relation::GreaterEqual: out << " >= "; break;
      case Relation::Equal: out << " = "; break;
    }
    out << number(r.rhs) << '\n';
  }
  out << "Bounds\n";
  for (int j = 0; j < p.num_variables(); ++j) {
    const auto& v = p.variable(j);
    if (v.kind == VarKind::Binary && v.lower == 0.0 && v.upper == 1.0) continue;
    const auto name = column_name(p, j);
    if (v.lower == -kInfinity && v.upper == kInfinity) {
      out << ' ' << name << " free\n";
    } else if (v.lower == v.upper) {
      out << ' ' << name << " = " << number(v.lower) << '\n';
    } else {
      out << ' ' << (v.lower == -kInfinity ? std::string("-inf") : number(v.lower))
          << " <= " << name << " <= "
          << (v.upper == kInfinity ? std::string("+inf") : number(v.upper)) << '\n';
    }
  }
  if (p.num_binaries() > 0) {
    out << "Binaries\n";
    for (int j = 0; j < p.num_variables(); ++j) {
      if (p.variable(j).kind == VarKind::Binary) out << ' ' << column_name(p, j) << '\n';
    }
  }
  out << "End\n";
}

}  // namespace rcep
