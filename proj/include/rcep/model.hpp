#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rcep/error.hpp"

namespace rcep {

enum class GeneratorKind { Existing, Candidate };

/// A two-state generating unit. Capacities in MW, var_cost in $/MW per
/// period, invest_cost in $ (one-time).
struct Generator {
  std::string id;
  GeneratorKind kind = GeneratorKind::Existing;
  double capacity_mw = 0.0;
  double outage_prob = 0.0;
  double var_cost = 0.0;
  double invest_cost = 0.0;
  int earliest_period = 1;  // 1-based, candidates only

  bool is_candidate() const { return kind == GeneratorKind::Candidate; }
  /// Capacity scaled by average availability, (1 - p) * capacity.
  double derated_capacity() const { return (1.0 - outage_prob) * capacity_mw; }
};

/// The planning instance. Immutable once constructed; the constructor
/// enforces every invariant and throws InstanceError otherwise.
class SystemSpec {
 public:
  SystemSpec(std::vector<Generator> generators, std::vector<double> demand_mw,
             double shed_cost);

  int periods() const { return static_cast<int>(demand_.size()); }
  int num_generators() const { return static_cast<int>(generators_.size()); }
  int num_candidates() const { return static_cast<int>(candidates_.size()); }

  const std::vector<Generator>& generators() const { return generators_; }
  const Generator& generator(int j) const { return generators_.at(j); }
  /// Generator index of candidate slot c.
  int candidate_generator(int c) const { return candidates_.at(c); }
  /// Candidate slot of generator j, or -1 for existing units.
  int candidate_slot(int j) const { return slot_.at(j); }
  const Generator& candidate(int c) const { return generators_.at(candidates_.at(c)); }

  double demand(int period) const { return demand_.at(period); }
  const std::vector<double>& demand() const { return demand_; }
  double shed_cost() const { return shed_cost_; }

  /// Installed capacities of all generators.
  Eigen::VectorXd capacities() const;

 private:
  std::vector<Generator> generators_;
  std::vector<double> demand_;
  double shed_cost_;
  std::vector<int> candidates_;
  std::vector<int> slot_;
};

enum class Metric { Epns, Cvar, Lolp, Var };

const char* to_string(Metric metric);
std::optional<Metric> metric_from_string(std::string_view name);

/// Per-period reliability limit. For EPNS, CVaR and VaR the limit is
/// limit_frac * demand (MW); for LOLP limit_frac is the probability itself.
struct ReliabilityCriterion {
  Metric metric = Metric::Epns;
  double limit_frac = 0.01;
  double alpha = 0.05;

  void validate() const;
  double limit(const SystemSpec& spec, int period) const;
};

/// Binary build matrix, candidates x periods, 0-based period columns.
/// Entry (c, t) = 1 when candidate c is in service in period t.
class InvestmentPlan {
 public:
  using Matrix = Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic>;

  InvestmentPlan(const SystemSpec& spec, Matrix built);
  static InvestmentPlan empty(const SystemSpec& spec);
  /// Rounds a relaxed matrix (entries within tol of 0/1) and validates it.
  static InvestmentPlan from_relaxed(const SystemSpec& spec, const Eigen::MatrixXd& x,
                                     double tol = 1e-6);

  int num_candidates() const { return static_cast<int>(built_.rows()); }
  int periods() const { return static_cast<int>(built_.cols()); }
  bool built(int c, int t) const { return built_(c, t) != 0; }
  /// Built in any period (equivalently the last one).
  bool is_built(int c) const { return built_.cols() > 0 && built_(c, built_.cols() - 1) != 0; }
  /// 0-based first period in service, nullopt when never built.
  std::optional<int> first_period(int c) const;

  const Matrix& matrix() const { return built_; }
  Eigen::MatrixXd relaxed() const { return built_.cast<double>(); }

  /// Every build of `other` is also present here.
  bool contains(const InvestmentPlan& other) const;
  bool operator==(const InvestmentPlan& other) const { return built_ == other.built_; }

 private:
  Matrix built_;
};

/// One outage state: up[j] = 1 when generator j is available.
struct OutageState {
  std::vector<std::uint8_t> up;
  double weight = 1.0;
};

struct PeriodMetrics {
  double demand = 0.0;
  double limit = 0.0;  // in the unit of the criterion metric
  double epns = 0.0;
  double lolp = 0.0;
  double var = 0.0;
  double cvar = 0.0;
  double oper_cost = 0.0;
  bool violated = false;
};

struct PlanReport {
  double invest_cost = 0.0;
  double oper_cost = 0.0;
  double total_cost = 0.0;
  double alpha = 0.05;  // level used for the VaR / CVaR columns
  std::vector<PeriodMetrics> periods;
  int violated_periods = 0;
};

/// Sum of one-time investment charges of every candidate built in any period.
double plan_invest_cost(const SystemSpec& spec, const InvestmentPlan& plan);

/// Per-generator capacity in service in `period` under relaxed builds x
/// (candidates x periods); existing units always count in full.
Eigen::VectorXd capacity_in_service(const SystemSpec& spec, const Eigen::MatrixXd& x,
                                    int period);

double available_capacity(const SystemSpec& spec, const InvestmentPlan& plan, int period,
                          const OutageState& state);
double available_capacity(const SystemSpec& spec, const Eigen::MatrixXd& x, int period,
                          std::span<const std::uint8_t> up);

/// Throws InstanceError unless x is candidates x periods for this spec.
void check_plan_shape(const SystemSpec& spec, const Eigen::MatrixXd& x);

}  // namespace rcep
