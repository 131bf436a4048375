#include "rcep/model.hpp"

#include <cmath>
#include <set>

namespace rcep {

SystemSpec::SystemSpec(std::vector<Generator> generators, std::vector<double> demand_mw,
                       double shed_cost)
    : generators_(std::move(generators)), demand_(std::move(demand_mw)), shed_cost_(shed_cost) {
  if (demand_.empty()) throw InstanceError("at least one period is required");
  for (std::size_t t = 0; t < demand_.size(); ++t) {
    if (!std::isfinite(demand_[t]) || demand_[t] < 0.0) {
      throw InstanceError("demand of period " + std::to_string(t + 1) + " must be >= 0");
    }
  }
  if (!std::isfinite(shed_cost_) || shed_cost_ <= 0.0) {
    throw InstanceError("shed_cost must be positive");
  }
  std::set<std::string> ids;
  slot_.assign(generators_.size(), -1);
  for (std::size_t j = 0; j < generators_.size(); ++j) {
    const auto& g = generators_[j];
    const std::string where = "generator '" + g.id + "'";
    if (g.id.empty()) throw InstanceError("generator " + std::to_string(j) + " has an empty id");
    if (!ids.insert(g.id).second) throw InstanceError("duplicate generator id '" + g.id + "'");
    if (!(g.capacity_mw > 0.0) || !std::isfinite(g.capacity_mw)) {
      throw InstanceError(where + ": capacity_mw must be > 0");
    }
    if (!(g.outage_prob >= 0.0 && g.outage_prob <= 1.0)) {
      throw InstanceError(where + ": outage_prob must lie in [0, 1]");
    }
    if (!(g.var_cost >= 0.0) || !std::isfinite(g.var_cost)) {
      throw InstanceError(where + ": var_cost must be >= 0");
    }
    if (!(g.invest_cost >= 0.0) || !std::isfinite(g.invest_cost)) {
      throw InstanceError(where + ": invest_cost must be >= 0");
    }
    if (g.is_candidate() != (g.invest_cost > 0.0)) {
      throw InstanceError(where + ": invest_cost must be 0 exactly for existing units");
    }
    if (g.var_cost >= shed_cost_) {
      throw InstanceError(where + ": var_cost must be below shed_cost");
    }
    if (g.is_candidate()) {
      if (g.earliest_period < 1 || g.earliest_period > periods()) {
        throw InstanceError(where + ": earliest_period must lie in [1, periods]");
      }
      slot_[j] = static_cast<int>(candidates_.size());
      candidates_.push_back(static_cast<int>(j));
    }
  }
}

Eigen::VectorXd SystemSpec::capacities() const {
  Eigen::VectorXd cap(num_generators());
  for (int j = 0; j < num_generators(); ++j) cap(j) = generators_[j].capacity_mw;
  return cap;
}

const char* to_string(Metric metric) {
  switch (metric) {
    case Metric::Epns: return "epns";
    case Metric::Cvar: return "cvar";
    case Metric::Lolp: return "lolp";
    case Metric::Var: return "var";
  }
  return "unknown";
}

std::optional<Metric> metric_from_string(std::string_view name) {
  if (name == "epns") return Metric::Epns;
  if (name == "cvar") return Metric::Cvar;
  if (name == "lolp") return Metric::Lolp;
  if (name == "var") return Metric::Var;
  return std::nullopt;
}

void ReliabilityCriterion::validate() const {
  if (!(limit_frac >= 0.0 && limit_frac <= 1.0)) {
    throw InstanceError("limit_frac must lie in [0, 1]");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InstanceError("alpha must lie in (0, 1]");
}

double ReliabilityCriterion::limit(const SystemSpec& spec, int period) const {
  return metric == Metric::Lolp ? limit_frac : limit_frac * spec.demand(period);
}

InvestmentPlan::InvestmentPlan(const SystemSpec& spec, Matrix built) : built_(std::move(built)) {
  if (built_.rows() != spec.num_candidates() || built_.cols() != spec.periods()) {
    throw InstanceError("plan is " + std::to_string(built_.rows()) + "x" +
                        std::to_string(built_.cols()) + ", expected " +
                        std::to_string(spec.num_candidates()) + "x" +
                        std::to_string(spec.periods()));
  }
  for (int c = 0; c < built_.rows(); ++c) {
    const auto& g = spec.candidate(c);
    for (int t = 0; t < built_.cols(); ++t) {
      const auto v = built_(c, t);
      if (v != 0 && v != 1) throw InstanceError("plan entries must be 0 or 1");
      if (v == 1 && t + 1 < g.earliest_period) {
        throw InstanceError("candidate '" + g.id + "' built before its earliest period");
      }
      if (t > 0 && built_(c, t - 1) > v) {
        throw InstanceError("candidate '" + g.id + "' is removed after being built");
      }
    }
  }
}

InvestmentPlan InvestmentPlan::empty(const SystemSpec& spec) {
  return InvestmentPlan(spec, Matrix::Zero(spec.num_candidates(), spec.periods()));
}

InvestmentPlan InvestmentPlan::from_relaxed(const SystemSpec& spec, const Eigen::MatrixXd& x,
                                            double tol) {
  check_plan_shape(spec, x);
  Matrix built(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double r = std::round(x(i));
    if (std::abs(x(i) - r) > tol || (r != 0.0 && r != 1.0)) {
      throw InstanceError("relaxed plan entry is not integral");
    }
    built(i) = static_cast<std::int8_t>(r);
  }
  return InvestmentPlan(spec, std::move(built));
}

std::optional<int> InvestmentPlan::first_period(int c) const {
  for (int t = 0; t < built_.cols(); ++t) {
    if (built_(c, t) != 0) return t;
  }
  return std::nullopt;
}

bool InvestmentPlan::contains(const InvestmentPlan& other) const {
  if (other.built_.rows() != built_.rows() || other.built_.cols() != built_.cols()) return false;
  return (other.built_.array() <= built_.array()).all();
}

void check_plan_shape(const SystemSpec& spec, const Eigen::MatrixXd& x) {
  if (x.rows() != spec.num_candidates() || x.cols() != spec.periods()) {
    throw InstanceError("plan/system index mismatch");
  }
}

double plan_invest_cost(const SystemSpec& spec, const InvestmentPlan& plan) {
  if (plan.num_candidates() != spec.num_candidates() || plan.periods() != spec.periods()) {
    throw InstanceError("plan/system index mismatch");
  }
  double total = 0.0;
  for (int c = 0; c < spec.num_candidates(); ++c) {
    if (plan.is_built(c)) total += spec.candidate(c).invest_cost;
  }
  return total;
}

Eigen::VectorXd capacity_in_service(const SystemSpec& spec, const Eigen::MatrixXd& x,
                                    int period) {
  check_plan_shape(spec, x);
  if (period < 0 || period >= spec.periods()) throw InstanceError("period out of range");
  Eigen::VectorXd cap = spec.capacities();
  for (int c = 0; c < spec.num_candidates(); ++c) {
    cap(spec.candidate_generator(c)) *= x(c, period);
  }
  return cap;
}

double available_capacity(const SystemSpec& spec, const Eigen::MatrixXd& x, int period,
                          std::span<const std::uint8_t> up) {
  if (static_cast<int>(up.size()) != spec.num_generators()) {
    throw InstanceError("outage state size does not match the generator count");
  }
  const Eigen::VectorXd cap = capacity_in_service(spec, x, period);
  double total = 0.0;
  for (int j = 0; j < spec.num_generators(); ++j) {
    if (up[j] != 0) total += cap(j);
  }
  return total;
}

double available_capacity(const SystemSpec& spec, const InvestmentPlan& plan, int period,
                          const OutageState& state) {
  return available_capacity(spec, plan.relaxed(), period, state.up);
}

}  // namespace rcep
