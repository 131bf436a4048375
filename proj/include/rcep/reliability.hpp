#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "rcep/lp.hpp"
#include "rcep/model.hpp"
#include "rcep/numeric.hpp"

namespace rcep {

/// States with shedding above this many MW count as loss-of-load states.
inline constexpr double kShedZeroTol = 1e-9;

enum class StateMode { Exact, Sampled };

/// Weighted collection of outage states. Row s of up() is the availability
/// vector of state s over all generators of the spec it was built from.
class StateSet {
 public:
  using UpMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  StateSet(UpMatrix up, Eigen::VectorXd weights, StateMode mode, std::uint64_t seed = 0);

  Eigen::Index size() const { return up_.rows(); }
  int num_generators() const { return static_cast<int>(up_.cols()); }
  StateMode mode() const { return mode_; }
  std::uint64_t seed() const { return seed_; }
  const UpMatrix& up() const { return up_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  OutageState state(Eigen::Index s) const;

 private:
  UpMatrix up_;
  Eigen::VectorXd weights_;
  StateMode mode_;
  std::uint64_t seed_;
};

inline constexpr int kDefaultMaxStochasticGenerators = 22;

/// All 2^n combinations of the n stochastic generators (0 < p < 1); units with
/// p = 0 or p = 1 are folded in as always up / always down. The last
/// stochastic unit varies fastest, up before down.
StateSet enumerate_states(const SystemSpec& spec,
                          int max_stochastic = kDefaultMaxStochasticGenerators);

/// Draws availability vectors with xi_j ~ Bernoulli(1 - p_j), reproducibly
/// from a seed.
class StateSampler {
 public:
  StateSampler(const SystemSpec& spec, std::uint64_t seed);
  void draw(std::span<std::uint8_t> up);

 private:
  std::vector<double> outage_;
  std::mt19937_64 engine_;
};

StateSet sample_states(const SystemSpec& spec, Eigen::Index n, std::uint64_t seed);

struct StateOptions {
  enum class Mode { Auto, Exact, Sampled } mode = Mode::Auto;
  Eigen::Index samples = 20000;
  std::uint64_t seed = 1;
  int max_stochastic = kDefaultMaxStochasticGenerators;
};

/// Exact enumeration when it fits under max_stochastic (Auto / Exact), one
/// seeded sample otherwise.
StateSet make_states(const SystemSpec& spec, const StateOptions& options);
int count_stochastic(const SystemSpec& spec);

/// Load shed in every state for relaxed builds x in `period`.
Eigen::VectorXd shedding_vector(const SystemSpec& spec, const Eigen::MatrixXd& x, int period,
                                const StateSet& states);

double shedding(const SystemSpec& spec, const InvestmentPlan& plan, int period,
                const OutageState& state);

double lolp(const SystemSpec& spec, const InvestmentPlan& plan, int period,
            const StateSet& states);
double epns(const SystemSpec& spec, const InvestmentPlan& plan, int period,
            const StateSet& states);
double epns(const SystemSpec& spec, const Eigen::MatrixXd& x, int period, const StateSet& states);

/// Smallest v with P(R > v) <= alpha over the discrete distribution given by
/// (shedding, weight) pairs.
template <typename DerivedR, typename DerivedW>
double var_alpha(const Eigen::DenseBase<DerivedR>& shed, const Eigen::DenseBase<DerivedW>& weights,
                 double alpha) {
  if (shed.size() == 0) throw InstanceError("VaR of an empty state set");
  if (shed.size() != weights.size()) throw InstanceError("shedding/weight size mismatch");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InstanceError("alpha must lie in (0, 1]");
  const auto order = descending_order(shed);
  const double slack = 1e-12;
  CompensatedSum above;
  double value = shed(order.front());
  std::size_t i = 0;
  while (i < order.size()) {
    const double v = shed(order[i]);
    if (above.value() > alpha + slack) break;
    value = v;
    while (i < order.size() && shed(order[i]) == v) above.add(weights(order[i++]));
  }
  return value;
}

/// Mean of the worst alpha probability mass; the atom at the quantile is
/// split so that alpha = 1 gives the plain mean.
template <typename DerivedR, typename DerivedW>
double cvar_alpha(const Eigen::DenseBase<DerivedR>& shed, const Eigen::DenseBase<DerivedW>& weights,
                  double alpha) {
  if (shed.size() == 0) throw InstanceError("CVaR of an empty state set");
  if (shed.size() != weights.size()) throw InstanceError("shedding/weight size mismatch");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InstanceError("alpha must lie in (0, 1]");
  const auto order = descending_order(shed);
  CompensatedSum mass;
  CompensatedSum tail;
  for (const auto s : order) {
    const double room = alpha - mass.value();
    if (room <= 0.0) break;
    const double take = std::min(weights(s), room);
    tail.add(take * shed(s));
    mass.add(take);
  }
  // Weights of a sampled or rounded set may sum to slightly less than alpha.
  return tail.value() / std::min(alpha, std::max(mass.value(), 1e-300));
}

/// Metric value plus a subgradient with respect to the candidates' build
/// variables of the evaluated period.
struct RiskEvaluation {
  double value = 0.0;
  Eigen::VectorXd subgradient;  // one entry per candidate, <= 0
  double standard_error = 0.0;
  Eigen::Index samples = 0;
};

RiskEvaluation epns_eval(const SystemSpec& spec, const Eigen::MatrixXd& x, int period,
                         const StateSet& states);

struct CvarLpResult {
  double value = 0.0;
  double threshold = 0.0;            // optimal b
  Eigen::VectorXd capacity_duals;    // one per state, >= 0
  LpSolution solution;
};

/// CVaR as the linear program min b + alpha^-1 sum p_s y_s subject to
/// y_s + b >= D - available_s, y, b >= 0. capacity_duals are the row duals,
/// zero for states that do not shed.
CvarLpResult cvar_lp(const SystemSpec& spec, const Eigen::MatrixXd& x, int period,
                     const StateSet& states, double alpha, const SolverOptions& options = {});

enum class CvarMethod { Auto, Lp, Analytic };
inline constexpr Eigen::Index kCvarLpMaxStates = 2048;

/// CVaR value and subgradient. Lp assembles the subgradient from cvar_lp
/// duals; Analytic builds the same dual in closed form from the sorted tail;
/// Auto picks Lp up to kCvarLpMaxStates states.
RiskEvaluation cvar_eval(const SystemSpec& spec, const Eigen::MatrixXd& x, int period,
                         const StateSet& states, double alpha,
                         CvarMethod method = CvarMethod::Auto);

struct McOptions {
  double cov_target = 0.05;
  Eigen::Index batch = 1000;
  Eigen::Index min_samples = 10000;  // floor before a zero estimate is accepted
  Eigen::Index max_samples = 10'000'000;
};

/// EPNS by Monte Carlo, growing the sample in batches until the coefficient
/// of variation of the estimator reaches cov_target.
RiskEvaluation mc_epns_converged(const SystemSpec& spec, const Eigen::MatrixXd& x, int period,
                                 std::uint64_t seed, const McOptions& options = {});

class SampleLimitError : public ResourceError {
 public:
  SampleLimitError(const std::string& what, RiskEvaluation partial)
      : ResourceError(what), partial_(std::move(partial)) {}
  const RiskEvaluation& partial() const { return partial_; }

 private:
  RiskEvaluation partial_;
};

/// Probability of each available-capacity level (index k = k * resolution MW)
/// by convolving the two-state units. Capacities must be multiples of the
/// resolution.
Eigen::VectorXd capacity_outage_table(const SystemSpec& spec, const Eigen::MatrixXd& x,
                                      int period, double resolution = 1.0);

/// EPNS computed from the capacity outage table.
double epns_from_table(const Eigen::VectorXd& table, double demand, double resolution = 1.0);

}  // namespace rcep
