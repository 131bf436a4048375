#include "rcep/planner.hpp"

namespace rcep {

BendersResult run_ep(const SystemSpec& spec, const StateSet& states,
                     const std::optional<ReliabilityCriterion>& criterion,
                     const BendersOptions& options) {
  auto out = run_benders(spec, std::nullopt, states, options);
  if (criterion) out.report = evaluate_plan(spec, out.plan, criterion, states, options.tol_feas);
  return out;
}

BendersResult run_hp(const SystemSpec& spec, const ReliabilityCriterion& criterion,
                     const StateSet& states, const BendersOptions& options) {
  BendersOptions step1 = options;
  step1.floor.reset();
  const auto ep = run_ep(spec, states, criterion, step1);
  if (ep.report.violated_periods == 0) return ep;

  BendersOptions step2 = options;
  InvestmentPlan::Matrix floor = ep.plan.matrix();
  if (options.floor) floor = floor.cwiseMax(*options.floor);
  step2.floor = floor;
  auto hp = run_benders(spec, criterion, states, step2);
  // The log keeps both stages so the convergence report is complete.
  auto iterations = ep.log.iterations;
  for (auto& rec : hp.log.iterations) {
    rec.iteration += static_cast<int>(iterations.size());
    iterations.push_back(rec);
  }
  hp.log.iterations = std::move(iterations);
  return hp;
}

BendersResult run_ip(const SystemSpec& spec, const ReliabilityCriterion& criterion,
                     const StateSet& states, const BendersOptions& options) {
  return run_benders(spec, criterion, states, options);
}

double cvar_limit_frac(const SystemSpec& spec, const InvestmentPlan& plan,
                       const StateSet& states, double alpha) {
  double frac = 0.0;
  const Eigen::MatrixXd x = plan.relaxed();
  for (int t = 0; t < spec.periods(); ++t) {
    if (spec.demand(t) <= 0.0) continue;
    const double cvar = cvar_alpha(shedding_vector(spec, x, t, states), states.weights(), alpha);
    frac = std::max(frac, cvar / spec.demand(t));
  }
  return std::min(frac, 1.0);
}

std::vector<double> added_capacity(const SystemSpec& spec, const InvestmentPlan& plan) {
  std::vector<double> mw(static_cast<std::size_t>(spec.periods()), 0.0);
  for (int c = 0; c < spec.num_candidates(); ++c) {
    if (const auto first = plan.first_period(c)) {
      mw[static_cast<std::size_t>(*first)] += spec.candidate(c).capacity_mw;
    }
  }
  return mw;
}

namespace {

int error_kind(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const InfeasibleCriterionError&) {
    return 3;
  } catch (const ResourceError&) {
    return 4;
  } catch (const SolverError&) {
    return 5;
  } catch (...) {
    return 1;
  }
}

}  // namespace

ComparisonReport compare(const SystemSpec& spec, const ReliabilityCriterion& criterion,
                         const StateSet& states, const BendersOptions& options) {
  ComparisonReport out;
  out.epns_criterion = {Metric::Epns, criterion.limit_frac, criterion.alpha};
  out.cvar_criterion = {Metric::Cvar, 1.0, criterion.alpha};

  auto add = [&](const char* method, BendersResult result) {
    auto mw = added_capacity(spec, result.plan);
    out.rows.push_back({method, std::move(result.plan), std::move(result.report), std::move(mw),
                        std::move(result.log)});
  };
  const char* stage = "EP";
  try {
    add("EP", run_ep(spec, states, out.epns_criterion, options));
    stage = "HP";
    add("HP", run_hp(spec, out.epns_criterion, states, options));
    stage = "IP-EPNS";
    add("IP-EPNS", run_ip(spec, out.epns_criterion, states, options));
    out.cvar_criterion.limit_frac =
        cvar_limit_frac(spec, out.rows.back().plan, states, criterion.alpha);
    stage = "IP-CVaR";
    add("IP-CVaR", run_ip(spec, out.cvar_criterion, states, options));
  } catch (const std::exception& e) {
    const int kind = error_kind(std::current_exception());
    throw ComparisonError(std::string(stage) + " failed: " + e.what(), out, kind);
  }
  return out;
}

}  // namespace rcep
