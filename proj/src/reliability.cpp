#include "rcep/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rcep {

StateSet::StateSet(UpMatrix up, Eigen::VectorXd weights, StateMode mode, std::uint64_t seed)
    : up_(std::move(up)), weights_(std::move(weights)), mode_(mode), seed_(seed) {
  if (up_.rows() != weights_.size()) throw InstanceError("state/weight count mismatch");
  if (up_.rows() == 0) throw InstanceError("a state set needs at least one state");
  if ((weights_.array() <= 0.0).any() || (weights_.array() > 1.0).any()) {
    throw InstanceError("state weights must lie in (0, 1]");
  }
}

OutageState StateSet::state(Eigen::Index s) const {
  OutageState out;
  out.up.assign(up_.row(s).data(), up_.row(s).data() + up_.cols());
  out.weight = weights_(s);
  return out;
}

int count_stochastic(const SystemSpec& spec) {
  int n = 0;
  for (const auto& g : spec.generators()) n += (g.outage_prob > 0.0 && g.outage_prob < 1.0) ? 1 : 0;
  return n;
}

StateSet enumerate_states(const SystemSpec& spec, int max_stochastic) {
  std::vector<int> stochastic;
  const int num_gen = spec.num_generators();
  for (int j = 0; j < num_gen; ++j) {
    const double p = spec.generator(j).outage_prob;
    if (p > 0.0 && p < 1.0) stochastic.push_back(j);
  }
  const int n = static_cast<int>(stochastic.size());
  if (n > max_stochastic) {
    throw InstanceError(std::to_string(n) + " stochastic generators exceed the enumeration cap of " +
                        std::to_string(max_stochastic) + "; use Monte Carlo sampling");
  }
  const Eigen::Index count = Eigen::Index{1} << n;
  StateSet::UpMatrix up(count, num_gen);
  Eigen::VectorXd weights(count);
  for (int j = 0; j < num_gen; ++j) {
    const std::uint8_t fixed = spec.generator(j).outage_prob >= 1.0 ? 0 : 1;
    up.col(j).setConstant(fixed);
  }
  for (Eigen::Index s = 0; s < count; ++s) {
    double w = 1.0;
    for (int k = 0; k < n; ++k) {
      const int j = stochastic[k];
      const double p = spec.generator(j).outage_prob;
      const bool down = ((s >> (n - 1 - k)) & 1) != 0;
      up(s, j) = down ? 0 : 1;
      w *= down ? p : 1.0 - p;
    }
    weights(s) = w;
  }
  return StateSet(std::move(up), std::move(weights), StateMode::Exact);
}

StateSampler::StateSampler(const SystemSpec& spec, std::uint64_t seed) : engine_(seed) {
  outage_.reserve(spec.num_generators());
  for (const auto& g : spec.generators()) outage_.push_back(g.outage_prob);
}

void StateSampler::draw(std::span<std::uint8_t> up) {
  for (std::size_t j = 0; j < outage_.size(); ++j) {
    // 53-bit uniform in [0, 1), independent of the standard library's
    // distribution implementations.
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    up[j] = u < outage_[j] ? 0 : 1;
  }
}

StateSet sample_states(const SystemSpec& spec, Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw InstanceError("sample size must be >= 1");
  StateSampler sampler(spec, seed);
  StateSet::UpMatrix up(n, spec.num_generators());
  for (Eigen::Index s = 0; s < n; ++s) {
    sampler.draw(std::span<std::uint8_t>(up.row(s).data(), static_cast<std::size_t>(up.cols())));
  }
  Eigen::VectorXd weights = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  return StateSet(std::move(up), std::move(weights), StateMode::Sampled, seed);
}

StateSet make_states(const SystemSpec& spec, const StateOptions& options) {
  switch (options.mode) {
    case StateOptions::Mode::Exact:
      return enumerate_states(spec, options.max_stochastic);
    case StateOptions::Mode::Sampled:
      return sample_states(spec, options.samples, options.seed);
    case StateOptions::Mode::Auto:
      break;
  }
  if (count_stochastic(spec) <= options.max_stochastic) {
    return enumerate_states(spec, options.max_stochastic);
  }
  return sample_states(spec, options.samples, options.seed);
}

namespace {

void check_states(const SystemSpec& spec, const StateSet& states) {
  if (states.num_generators() != spec.num_generators()) {
    throw InstanceError("state set was built for a different generator list");
  }
}

}  // namespace

Eigen::VectorXd shedding_vector(const SystemSpec& spec, const Eigen::MatrixXd& x, int period,
                                const StateSet& states) {
  check_states(spec, states);
  const Eigen::VectorXd cap = capacity_in_service(spec, x, period);
  const double demand = spec.demand(period);
  const auto& up = states.up();
  Eigen::VectorXd shed(states.size());
  parallel_chunks(states.size(), 4096, [&](Eigen::Index begin, Eigen::Index end) {
    for (Eigen::Index s = begin; s < end; ++s) {
      double available = 0.0;
      for (Eigen::Index j = 0; j < up.cols(); ++j) {
        if (up(s, j) != 0) available += cap(j);
      }
      shed(s) = std::max(demand - available, 0.0);
    }
  });
  return shed;
}

double shedding(const SystemSpec& spec, const InvestmentPlan& plan, int period,
                const OutageState& state) {
  return std::max(spec.demand(period) - available_capacity(spec, plan, period, state), 0.0);
}

double lolp(const SystemSpec& spec, const InvestmentPlan& plan, int period,
            const StateSet& states) {
  const Eigen::VectorXd shed = shedding_vector(spec, plan.relaxed(), period, states);
  CompensatedSum p;
  for (Eigen::Index s = 0; s < shed.size(); ++s) {
    if (shed(s) > kShedZeroTol) p.add(states.weights()(s));
  }
  return p.value();
}

double epns(const SystemSpec& spec, const Eigen::MatrixXd& x, int period, const StateSet& states) {
  return weighted_sum(shedding_vector(spec, x, period, states), states.weights());
}

double epns(const SystemSpec& spec, const InvestmentPlan& plan, int period,
            const StateSet& states) {
  return epns(spec, plan.relaxed(), period, states);
}

namespace {

// -sum_s lambda_s * up(s, j) * capacity_j for every candidate.
Eigen::VectorXd assemble_subgradient(const SystemSpec& spec, const StateSet& states,
                                     const Eigen::VectorXd& lambda) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(spec.num_candidates());
  const auto& up = states.up();
  for (int c = 0; c < spec.num_candidates(); ++c) {
    const int j = spec.candidate_generator(c);
    CompensatedSum acc;
    for (Eigen::Index s = 0; s < states.size(); ++s) {
      if (lambda(s) != 0.0 && up(s, j) != 0) acc.add(lambda(s));
    }
    g(c) = -acc.value() * spec.generator(j).capacity_mw;
  }
  return g;
}

}  // namespace

RiskEvaluation epns_eval(const SystemSpec& spec, const Eigen::MatrixXd& x, int period,
                         const StateSet& states) {
  const Eigen::VectorXd shed = shedding_vector(spec, x, period, states);
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(states.size());
  for (Eigen::Index s = 0; s < shed.size(); ++s) {
    if (shed(s) > kShedZeroTol) lambda(s) = states.weights()(s);
  }
  RiskEvaluation out;
  out.value = weighted_sum(shed, states.weights());
  out.subgradient = assemble_subgradient(spec, states, lambda);
  out.samples = states.size();
  return out;
}

CvarLpResult cvar_lp(const SystemSpec& spec, const Eigen::MatrixXd& x, int period,
                     const StateSet& states, double alpha, const SolverOptions& options) {
  check_states(spec, states);
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InstanceError("alpha must lie in (0, 1]");
  const Eigen::VectorXd cap = capacity_in_service(spec, x, period);
  const Eigen::Index n = states.size();
  const auto& up = states.up();

  // r_s = max(D - available_s, 0) carries no cost, so it is folded into the
  // rows y_s + b >= D - available_s. States that never shed get no row.
  LinearProgram lp;
  const int b = lp.add_variable(1.0, 0.0, kInfinity, VarKind::Continuous, "b");
  std::vector<Eigen::Index> shedding_states;
  for (Eigen::Index s = 0; s < n; ++s) {
    double available = 0.0;
    for (Eigen::Index j = 0; j < up.cols(); ++j) {
      if (up(s, j) != 0) available += cap(j);
    }
    const double rhs = spec.demand(period) - available;
    if (rhs <= 0.0) continue;
    const int y = lp.add_variable(states.weights()(s) / alpha);
    lp.add_row({{y, 1.0}, {b, 1.0}}, Relation::GreaterEqual, rhs);
    shedding_states.push_back(s);
  }

  // Start from y_s = r_s, b = 0, which is primal feasible.
  const int rows = lp.num_rows();
  Basis start;
  for (int i = 0; i < rows; ++i) start.basic.push_back(1 + i);
  start.at_upper.assign(lp.num_variables() + rows, 0);

  CvarLpResult out;
  out.capacity_duals = Eigen::VectorXd::Zero(n);
  if (rows == 0) {
    out.solution.status = LpStatus::Optimal;
    out.solution.primal = Eigen::VectorXd::Zero(1);
    return out;
  }
  out.solution = solve_lp(lp, options, &start);
  if (!out.solution.optimal()) {
    throw SolverError(std::string("CVaR subproblem ended ") + to_string(out.solution.status));
  }
  out.value = out.solution.objective;
  out.threshold = out.solution.primal(b);
  for (int i = 0; i < rows; ++i) {
    out.capacity_duals(shedding_states[i]) = std::max(out.solution.duals(i), 0.0);
  }
  return out;
}

RiskEvaluation cvar_eval(const SystemSpec& spec, const Eigen::MatrixXd& x, int period,
                         const StateSet& states, double alpha, CvarMethod method) {
  if (method == CvarMethod::Auto) {
    method = states.size() <= kCvarLpMaxStates ? CvarMethod::Lp : CvarMethod::Analytic;
  }
  RiskEvaluation out;
  out.samples = states.size();
  if (method == CvarMethod::Lp) {
    const auto lp = cvar_lp(spec, x, period, states, alpha);
    out.value = lp.value;
    out.subgradient = assemble_subgradient(spec, states, lp.capacity_duals);
    return out;
  }

  if (!(alpha > 0.0 && alpha <= 1.0)) throw InstanceError("alpha must lie in (0, 1]");
  const Eigen::VectorXd shed = shedding_vector(spec, x, period, states);
  const Eigen::VectorXd& w = states.weights();
  out.value = cvar_alpha(shed, w, alpha);
  const double threshold = var_alpha(shed, w, alpha);

  // Mass strictly above the quantile gets weight/alpha; the quantile atom
  // shares the remaining tail mass in proportion to its weights.
  CompensatedSum above;
  CompensatedSum atom;
  for (Eigen::Index s = 0; s < shed.size(); ++s) {
    if (shed(s) > threshold) {
      above.add(w(s));
    } else if (shed(s) == threshold) {
      atom.add(w(s));
    }
  }
  const double share =
      atom.value() > 0.0 ? std::clamp((alpha - above.value()) / atom.value(), 0.0, 1.0) : 0.0;
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(shed.size());
  for (Eigen::Index s = 0; s < shed.size(); ++s) {
    if (shed(s) <= kShedZeroTol) continue;
    if (shed(s) > threshold) {
      lambda(s) = w(s) / alpha;
    } else if (shed(s) == threshold) {
      lambda(s) = w(s) * share / alpha;
    }
  }
  out.subgradient = assemble_subgradient(spec, states, lambda);
  return out;
}

RiskEvaluation mc_epns_converged(const SystemSpec& spec, const Eigen::MatrixXd& x, int period,
                                 std::uint64_t seed, const McOptions& options) {
  if (!(options.cov_target > 0.0)) throw InstanceError("cov_target must be positive");
  if (options.batch < 1) throw InstanceError("batch must be >= 1");
  const Eigen::VectorXd cap = capacity_in_service(spec, x, period);
  const double demand = spec.demand(period);
  const int num_gen = spec.num_generators();

  StateSampler sampler(spec, seed);
  std::vector<std::uint8_t> up(num_gen);
  CompensatedSum sum;
  CompensatedSum sum_sq;
  Eigen::VectorXd shed_up_count = Eigen::VectorXd::Zero(spec.num_candidates());
  Eigen::Index n = 0;

  auto snapshot = [&]() {
    RiskEvaluation out;
    const double nd = static_cast<double>(n);
    out.samples = n;
    out.value = sum.value() / nd;
    const double var = n > 1 ? std::max(sum_sq.value() - nd * out.value * out.value, 0.0) / (nd - 1.0)
                             : 0.0;
    out.standard_error = std::sqrt(var / nd);
    out.subgradient.resize(spec.num_candidates());
    for (int c = 0; c < spec.num_candidates(); ++c) {
      out.subgradient(c) = -shed_up_count(c) / nd * spec.candidate(c).capacity_mw;
    }
    return out;
  };

  for (;;) {
    for (Eigen::Index k = 0; k < options.batch; ++k) {
      sampler.draw(up);
      double available = 0.0;
      for (int j = 0; j < num_gen; ++j) {
        if (up[j] != 0) available += cap(j);
      }
      const double shed = std::max(demand - available, 0.0);
      sum.add(shed);
      sum_sq.add(shed * shed);
      if (shed > kShedZeroTol) {
        for (int c = 0; c < spec.num_candidates(); ++c) {
          if (up[spec.candidate_generator(c)] != 0) shed_up_count(c) += 1.0;
        }
      }
    }
    n += options.batch;
    RiskEvaluation current = snapshot();
    if (current.value > 0.0) {
      if (current.standard_error <= options.cov_target * current.value) return current;
    } else if (n >= options.min_samples) {
      return current;
    }
    if (n >= options.max_samples) {
      throw SampleLimitError("Monte Carlo EPNS did not reach the target coefficient of variation in " +
                                 std::to_string(n) + " samples",
                             std::move(current));
    }
  }
}

Eigen::VectorXd capacity_outage_table(const SystemSpec& spec, const Eigen::MatrixXd& x,
                                      int period, double resolution) {
  if (!(resolution > 0.0)) throw InstanceError("resolution must be positive");
  const Eigen::VectorXd cap = capacity_in_service(spec, x, period);
  std::vector<Eigen::Index> units(cap.size());
  Eigen::Index total = 0;
  for (Eigen::Index j = 0; j < cap.size(); ++j) {
    const double scaled = cap(j) / resolution;
    const double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) > 1e-9 * std::max(1.0, scaled)) {
      throw InstanceError("capacity of generator '" + spec.generator(static_cast<int>(j)).id +
                          "' is not a multiple of the table resolution");
    }
    units[j] = static_cast<Eigen::Index>(rounded);
    total += units[j];
  }
  Eigen::VectorXd table = Eigen::VectorXd::Zero(total + 1);
  table(0) = 1.0;
  Eigen::Index reach = 0;
  for (Eigen::Index j = 0; j < cap.size(); ++j) {
    const double p = spec.generator(static_cast<int>(j)).outage_prob;
    const Eigen::Index k = units[j];
    if (k == 0) continue;
    for (Eigen::Index i = reach + k; i >= 0; --i) {
      const double down = table(i) * p;
      const double upv = i >= k ? table(i - k) * (1.0 - p) : 0.0;
      table(i) = down + upv;
    }
    reach += k;
  }
  return table;
}

double epns_from_table(const Eigen::VectorXd& table, double demand, double resolution) {
  CompensatedSum acc;
  for (Eigen::Index k = 0; k < table.size(); ++k) {
    const double shed = demand - static_cast<double>(k) * resolution;
    if (shed <= 0.0) break;
    acc.add(table(k) * shed);
  }
  return acc.value();
}

}  // namespace rcep
