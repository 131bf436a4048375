#pragma once

// Independent reference computations used only by the test suites. Nothing
// here calls into the solver paths it is used to check.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "rcep/lp.hpp"

namespace rcep::oracle {

/// Minimum of a small bounded LP by enumerating every vertex: each choice of
/// n linearly independent active constraints (rows at rhs or columns at a
/// finite bound) is solved densely and kept when feasible. Only meant for a
/// handful of variables. Returns nullopt when no vertex is feasible.
inline std::optional<double> vertex_enumeration_min(const LinearProgram& p,
                                                    double tol = 1e-9) {
  const int n = p.num_variables();
  struct Plane {
    Eigen::VectorXd a;
    double b;
  };
  std::vector<Plane> planes;
  for (const auto& row : p.rows()) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    for (const auto& t : row.terms) a(t.var) += t.coef;
    planes.push_back({a, row.rhs});
  }
  for (int j = 0; j < n; ++j) {
    const auto& v = p.variable(j);
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    a(j) = 1.0;
    if (std::isfinite(v.lower)) planes.push_back({a, v.lower});
    if (std::isfinite(v.upper) && v.upper != v.lower) planes.push_back({a, v.upper});
  }
  const int k = static_cast<int>(planes.size());
  std::optional<double> best;
  std::vector<int> pick(n);
  // Iterate over all n-subsets of the planes.
  std::vector<bool> mask(k, false);
  std::fill(mask.begin(), mask.begin() + std::min(n, k), true);
  if (k < n) return std::nullopt;
  do {
    Eigen::MatrixXd a(n, n);
    Eigen::VectorXd b(n);
    int r = 0;
    for (int i = 0; i < k; ++i) {
      if (!mask[i]) continue;
      a.row(r) = planes[i].a.transpose();
      b(r) = planes[i].b;
      ++r;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.rank() < n) continue;
    const Eigen::VectorXd x = lu.solve(b);
    bool feasible = true;
    for (int j = 0; j < n && feasible; ++j) {
      const auto& v = p.variable(j);
      feasible = x(j) >= v.lower - tol && x(j) <= v.upper + tol;
    }
    for (const auto& row : p.rows()) {
      if (!feasible) break;
      double act = 0.0;
      for (const auto& t : row.terms) act += t.coef * x(t.var);
      switch (row.relation) {
        case Relation::LessEqual: feasible = act <= row.rhs + tol; break;
        case Relation::GreaterEqual: feasible = act >= row.rhs - tol; break;
        case Relation::Equal: feasible = std::abs(act - row.rhs) <= tol; break;
      }
    }
    if (!feasible) continue;
    const double obj = p.objective_value(x);
    if (!best || obj < *best) best = obj;
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

/// Minimum over all 0/1 assignments of a pure-binary problem (no continuous
/// columns). Returns nullopt when every assignment violates some row.
inline std::optional<double> binary_enumeration_min(const LinearProgram& p,
                                                    double tol = 1e-9) {
  const int n = p.num_variables();
  std::optional<double> best;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    Eigen::VectorXd x(n);
    for (int j = 0; j < n; ++j) x(j) = (bits >> j) & 1U;
    bool feasible = true;
    for (const auto& row : p.rows()) {
      double act = 0.0;
      for (const auto& t : row.terms) act += t.coef * x(t.var);
      switch (row.relation) {
        case Relation::LessEqual: feasible = act <= row.rhs + tol; break;
        case Relation::GreaterEqual: feasible = act >= row.rhs - tol; break;
        case Relation::Equal: feasible = std::abs(act - row.rhs) <= tol; break;
      }
      if (!feasible) break;
    }
    if (!feasible) continue;
    const double obj = p.objective_value(x);
    if (!best || obj < *best) best = obj;
  }
  return best;
}

}  // namespace rcep::oracle

namespace rcep::oracle {

/// Risk metrics of the shedding distribution max(D - sum_j xi_j cap_j, 0)
/// computed by walking all 2^n up/down combinations directly.
struct BruteForceRisk {
  double lolp = 0.0;
  double epns = 0.0;
  double var = 0.0;
  double cvar = 0.0;
};

inline BruteForceRisk brute_force_risk(const std::vector<double>& capacity,
                                       const std::vector<double>& outage_prob, double demand,
                                       double alpha) {
  const int n = static_cast<int>(capacity.size());
  std::vector<double> shed;
  std::vector<double> prob;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    double p = 1.0;
    double available = 0.0;
    for (int j = 0; j < n; ++j) {
      const bool up = ((bits >> j) & 1U) != 0;
      p *= up ? 1.0 - outage_prob[j] : outage_prob[j];
      if (up) available += capacity[j];
    }
    if (p == 0.0) continue;
    shed.push_back(std::max(demand - available, 0.0));
    prob.push_back(p);
  }
  BruteForceRisk out;
  long double e = 0.0L;
  long double l = 0.0L;
  for (std::size_t s = 0; s < shed.size(); ++s) {
    e += static_cast<long double>(prob[s]) * shed[s];
    if (shed[s] > 1e-9) l += prob[s];
  }
  out.epns = static_cast<double>(e);
  out.lolp = static_cast<double>(l);

  // VaR straight from the definition: the smallest atom v with P(R > v) <= alpha.
  double var = std::numeric_limits<double>::infinity();
  for (const double v : shed) {
    long double above = 0.0L;
    for (std::size_t s = 0; s < shed.size(); ++s) {
      if (shed[s] > v) above += prob[s];
    }
    if (above <= alpha + 1e-12 && v < var) var = v;
  }
  out.var = var;

  // CVaR as min over b of b + E[(R - b)^+] / alpha; the minimum sits on an atom.
  double cvar = std::numeric_limits<double>::infinity();
  for (const double b : shed) {
    long double excess = 0.0L;
    for (std::size_t s = 0; s < shed.size(); ++s) {
      excess += static_cast<long double>(prob[s]) * std::max(shed[s] - b, 0.0);
    }
    cvar = std::min(cvar, static_cast<double>(b + excess / alpha));
  }
  out.cvar = cvar;
  return out;
}

}  // namespace rcep::oracle

#include <functional>

#include "rcep/model.hpp"

namespace rcep::oracle {

/// Cheapest derated merit-order dispatch of one period: fill units by
/// ascending var_cost, shed the remainder at shed_cost.
inline double merit_order_cost(const SystemSpec& spec, const std::vector<bool>& in_service,
                               double demand) {
  std::vector<int> order;
  for (int j = 0; j < spec.num_generators(); ++j) {
    if (in_service[j]) order.push_back(j);
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return spec.generator(a).var_cost < spec.generator(b).var_cost;
  });
  double left = demand;
  double cost = 0.0;
  for (const int j : order) {
    const double g = std::min(left, spec.generator(j).derated_capacity());
    cost += g * spec.generator(j).var_cost;
    left -= g;
  }
  return cost + left * spec.shed_cost();
}

struct EnumeratedPlan {
  double total = 0.0;
  std::vector<int> first;  // 0-based first period in service, -1 when never built
  std::vector<BruteForceRisk> risk;  // per period
};

/// Walks every monotone plan (each candidate picks a first period or never)
/// and calls visit with its total cost and brute-force risk per period.
inline void for_each_plan(const SystemSpec& spec, double alpha,
                          const std::function<void(const EnumeratedPlan&)>& visit) {
  const int nc = spec.num_candidates();
  const int periods = spec.periods();
  std::vector<int> first(nc, -1);
  std::function<void(int)> rec = [&](int c) {
    if (c == nc) {
      EnumeratedPlan plan;
      plan.first = first;
      for (int k = 0; k < nc; ++k) {
        if (first[k] >= 0) plan.total += spec.candidate(k).invest_cost;
      }
      for (int t = 0; t < periods; ++t) {
        std::vector<bool> in_service(spec.num_generators());
        std::vector<double> caps;
        std::vector<double> probs;
        for (int j = 0; j < spec.num_generators(); ++j) {
          const int slot = spec.candidate_slot(j);
          in_service[j] = slot < 0 || (first[slot] >= 0 && first[slot] <= t);
          if (!in_service[j]) continue;
          caps.push_back(spec.generator(j).capacity_mw);
          probs.push_back(spec.generator(j).outage_prob);
        }
        plan.total += merit_order_cost(spec, in_service, spec.demand(t));
        plan.risk.push_back(brute_force_risk(caps, probs, spec.demand(t), alpha));
      }
      visit(plan);
      return;
    }
    first[c] = -1;
    rec(c + 1);
    for (int t = spec.candidate(c).earliest_period - 1; t < periods; ++t) {
      first[c] = t;
      rec(c + 1);
    }
    first[c] = -1;
  };
  rec(0);
}

inline double risk_value(const BruteForceRisk& r, Metric metric) {
  switch (metric) {
    case Metric::Epns: return r.epns;
    case Metric::Cvar: return r.cvar;
    case Metric::Lolp: return r.lolp;
    case Metric::Var: return r.var;
  }
  return 0.0;
}

/// Minimum total cost over plans meeting the criterion in every period
/// (nullopt criterion = unconstrained); nullopt when none qualifies.
inline std::optional<double> best_plan_cost(const SystemSpec& spec,
                                            const std::optional<ReliabilityCriterion>& criterion,
                                            double tol = 1e-7) {
  std::optional<double> best;
  const double alpha = criterion ? criterion->alpha : 0.05;
  for_each_plan(spec, alpha, [&](const EnumeratedPlan& plan) {
    if (criterion) {
      for (int t = 0; t < spec.periods(); ++t) {
        const double limit = criterion->limit(spec, t);
        if (risk_value(plan.risk[t], criterion->metric) > limit + tol * std::max(1.0, limit)) {
          return;
        }
      }
    }
    if (!best || plan.total < *best) best = plan.total;
  });
  return best;
}

}  // namespace rcep::oracle
