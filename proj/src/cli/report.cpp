#include "rcep/report.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace rcep {

namespace {

// Infinite bounds become null so the document stays valid JSON.
OrderedJson finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

OrderedJson plan_to_json(const SystemSpec& spec, const InvestmentPlan& plan) {
  OrderedJson built = OrderedJson::object();
  for (int c = 0; c < spec.num_candidates(); ++c) {
    OrderedJson row = OrderedJson::array();
    for (int t = 0; t < plan.periods(); ++t) row.push_back(plan.built(c, t) ? 1 : 0);
    built[spec.candidate(c).id] = std::move(row);
  }
  return {{"built", std::move(built)}};
}

InvestmentPlan plan_from_json(const SystemSpec& spec, const nlohmann::json& doc) {
  const nlohmann::json* node = &doc;
  if (node->is_object() && node->contains("plan")) node = &node->at("plan");
  if (!node->is_object() || !node->contains("built") || !node->at("built").is_object()) {
    throw InstanceError("plan document needs a \"built\" object keyed by candidate id");
  }
  const auto& built = node->at("built");
  InvestmentPlan::Matrix m = InvestmentPlan::Matrix::Zero(spec.num_candidates(), spec.periods());
  for (const auto& [id, row] : built.items()) {
    int slot = -1;
    for (int c = 0; c < spec.num_candidates(); ++c) {
      if (spec.candidate(c).id == id) slot = c;
    }
    if (slot < 0) throw InstanceError("plan names unknown candidate '" + id + "'");
    if (!row.is_array() || static_cast<int>(row.size()) != spec.periods()) {
      throw InstanceError("plan row for '" + id + "' needs one entry per period");
    }
    for (int t = 0; t < spec.periods(); ++t) {
      if (!row[t].is_number_integer() || (row[t] != 0 && row[t] != 1)) {
        throw InstanceError("plan entries must be 0 or 1 (candidate '" + id + "')");
      }
      m(slot, t) = static_cast<std::int8_t>(row[t].get<int>());
    }
  }
  return InvestmentPlan(spec, m);
}

OrderedJson report_to_json(const PlanReport& report) {
  OrderedJson periods = OrderedJson::array();
  for (std::size_t t = 0; t < report.periods.size(); ++t) {
    const auto& p = report.periods[t];
    periods.push_back({{"period", t + 1},
                       {"demand_mw", p.demand},
                       {"limit", p.limit},
                       {"epns_mw", p.epns},
                       {"lolp", p.lolp},
                       {"var_mw", p.var},
                       {"cvar_mw", p.cvar},
                       {"oper_cost", p.oper_cost},
                       {"violated", p.violated}});
  }
  return {{"invest_cost", report.invest_cost},
          {"oper_cost", report.oper_cost},
          {"total_cost", report.total_cost},
          {"alpha", report.alpha},
          {"violated_periods", report.violated_periods},
          {"periods", std::move(periods)}};
}

OrderedJson log_to_json(const SystemSpec& spec, const BendersLog& log,
                        const RenderOptions& render) {
  OrderedJson iterations = OrderedJson::array();
  for (const auto& rec : log.iterations) {
    OrderedJson j;
    j["iteration"] = rec.iteration;
    j["lower_bound"] = finite_or_null(rec.lower_bound);
    j["upper_bound"] = finite_or_null(rec.upper_bound);
    j["invest_cost"] = rec.invest_cost;
    j["oper_cost"] = rec.oper_cost;
    j["metric"] = rec.metric;
    j["feasible"] = rec.feasible;
    j["optimality_cuts"] = rec.optimality_cuts;
    j["feasibility_cuts"] = rec.feasibility_cuts;
    j["plan"] = plan_to_json(spec, InvestmentPlan(spec, rec.plan))["built"];
    if (render.timing) j["seconds"] = rec.seconds;
    iterations.push_back(std::move(j));
  }
  return {{"converged", log.converged}, {"iterations", std::move(iterations)}};
}

OrderedJson criterion_to_json(const ReliabilityCriterion& criterion) {
  return {{"metric", to_string(criterion.metric)},
          {"limit_frac", criterion.limit_frac},
          {"alpha", criterion.alpha}};
}

OrderedJson comparison_to_json(const SystemSpec& spec, const ComparisonReport& report,
                               const RenderOptions& render) {
  OrderedJson rows = OrderedJson::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"method", row.method},
                    {"added_mw", row.added_mw},
                    {"plan", plan_to_json(spec, row.plan)},
                    {"report", report_to_json(row.report)},
                    {"benders_log", log_to_json(spec, row.log, render)}});
  }
  return {{"epns_criterion", criterion_to_json(report.epns_criterion)},
          {"cvar_criterion", criterion_to_json(report.cvar_criterion)},
          {"rows", std::move(rows)}};
}

std::string plan_table(const SystemSpec& spec, const InvestmentPlan& plan,
                       const PlanReport& report) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  out << "invest_cost " << report.invest_cost << "  oper_cost " << report.oper_cost
      << "  total_cost " << report.total_cost << "  violated_periods "
      << report.violated_periods << "\n\n";
  out << std::setw(6) << "period" << std::setw(12) << "demand" << std::setw(12) << "limit"
      << std::setw(12) << "epns" << std::setw(10) << "lolp" << std::setw(12) << "var"
      << std::setw(12) << "cvar" << std::setw(14) << "oper_cost" << "  violated\n";
  for (std::size_t t = 0; t < report.periods.size(); ++t) {
    const auto& p = report.periods[t];
    out << std::setw(6) << t + 1 << std::setw(12) << p.demand << std::setw(12) << p.limit
        << std::setw(12) << p.epns << std::setw(10) << std::setprecision(4) << p.lolp
        << std::setprecision(2) << std::setw(12) << p.var << std::setw(12) << p.cvar
        << std::setw(14) << p.oper_cost << "  " << (p.violated ? "yes" : "no") << "\n";
  }
  out << "\nbuilds:";
  bool any = false;
  for (int c = 0; c < spec.num_candidates(); ++c) {
    if (const auto first = plan.first_period(c)) {
      out << " " << spec.candidate(c).id << "@" << *first + 1;
      any = true;
    }
  }
  out << (any ? "\n" : " none\n");
  return out.str();
}

std::string comparison_table(const SystemSpec& spec, const ComparisonReport& report) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  out << std::left << std::setw(9) << "method" << std::right;
  for (int t = 0; t < spec.periods(); ++t) out << std::setw(9) << ("+MW" + std::to_string(t + 1));
  out << std::setw(15) << "invest" << std::setw(15) << "operation" << std::setw(15) << "total"
      << std::setw(10) << "violated\n";
  for (const auto& row : report.rows) {
    out << std::left << std::setw(9) << row.method << std::right;
    for (const double mw : row.added_mw) out << std::setw(9) << mw;
    out << std::setw(15) << row.report.invest_cost << std::setw(15) << row.report.oper_cost
        << std::setw(15) << row.report.total_cost << std::setw(9)
        << row.report.violated_periods << "\n";
  }
  out << std::setprecision(6) << "\nEPNS limit " << report.epns_criterion.limit_frac
      << " of demand; CVaR_" << report.cvar_criterion.alpha << " limit "
      << report.cvar_criterion.limit_frac << " of demand\n";
  return out.str();
}

}  // namespace rcep
