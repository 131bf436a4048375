#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "rcep/case.hpp"
#include "rcep/cli.hpp"
#include "rcep/monolithic.hpp"
#include "rcep/planner.hpp"
#include "rcep/report.hpp"

#ifndef RCEP_VERSION
#define RCEP_VERSION "0.0.0"
#endif

namespace rcep {

namespace {

struct Common {
  std::string case_path;
  std::string out_path;
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  int threads = 0;
  bool timing = false;
};

void add_common(CLI::App* cmd, Common& c, bool needs_case = true) {
  if (needs_case) cmd->add_option("case", c.case_path, "Case file (JSON)")->required();
  cmd->add_option("--out", c.out_path, "Write the report here instead of stdout");
  cmd->add_option("--format", c.format, "Report format")
      ->check(CLI::IsMember({"json", "table"}));
  cmd->add_option("--seed", c.seed, "Overrides the case seed");
  cmd->add_option("--threads", c.threads, "Worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_flag("--timing", c.timing, "Include wall-clock seconds in the log");
}

void emit(const Common& c, const std::string& text, std::ostream& out) {
  if (c.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(c.out_path, std::ios::binary);
  if (!file) throw InstanceError("cannot write '" + c.out_path + "'");
  file << text;
}

CaseFile load(const Common& c) {
  CaseFile cf = read_case(c.case_path);
  if (c.seed) cf.options.seed = *c.seed;
  return cf;
}

OrderedJson header(const CaseFile& cf, const StateSet& states, const std::string& command,
                   const Common& c) {
  OrderedJson h;
  h["tool"] = "rcep";
  h["version"] = RCEP_VERSION;
  h["command"] = command;
  if (!cf.name.empty()) h["case"] = cf.name;
  const auto& o = cf.options;
  h["options"] = {{"criterion", criterion_to_json(cf.criterion)},
                  {"tol_gap", o.tol_gap},
                  {"max_iter", o.max_iter},
                  {"tol_feas", o.tol_feas},
                  {"tol_opt", o.tol_opt},
                  {"max_nodes", o.max_nodes},
                  {"seed", o.seed},
                  {"state_mode", to_string(o.state_mode)},
                  {"samples", o.samples},
                  {"max_stochastic", o.max_stochastic},
                  {"mc_batch", o.mc_batch},
                  {"mc_cov_target", o.mc_cov_target},
                  {"threads", c.threads}};
  h["states"] = {{"mode", states.mode() == StateMode::Exact ? "exact" : "sampled"},
                 {"count", states.size()}};
  return h;
}

std::string dump(const OrderedJson& doc) { return doc.dump(2) + "\n"; }

void check_benders_metric(const ReliabilityCriterion& crit) {
  if (crit.metric != Metric::Epns && crit.metric != Metric::Cvar) {
    throw InstanceError(std::string("mode needs an epns or cvar criterion, case has ") +
                        to_string(crit.metric));
  }
}

int cmd_solve(const Common& c, const std::string& mode, std::ostream& out) {
  const CaseFile cf = load(c);
  const auto& spec = cf.spec;
  const StateSet states = make_states(spec, cf.options.state_options());
  const BendersOptions options = cf.options.benders_options();
  const ReliabilityCriterion epns_crit{Metric::Epns, cf.criterion.limit_frac, cf.criterion.alpha};

  BendersResult result = [&] {
    if (mode == "ep") return run_ep(spec, states, cf.criterion, options);
    if (mode == "hp") {
      check_benders_metric(cf.criterion);
      return run_hp(spec, cf.criterion, states, options);
    }
    if (mode == "ip-epns") return run_ip(spec, epns_crit, states, options);
    // ip-cvar: the case limit when it is a CVaR criterion, otherwise the
    // largest CVaR of the IP-EPNS plan.
    ReliabilityCriterion cvar{Metric::Cvar, cf.criterion.limit_frac, cf.criterion.alpha};
    if (cf.criterion.metric != Metric::Cvar) {
      const auto ip = run_ip(spec, epns_crit, states, options);
      cvar.limit_frac = cvar_limit_frac(spec, ip.plan, states, cf.criterion.alpha);
    }
    return run_ip(spec, cvar, states, options);
  }();

  if (c.format == "table") {
    emit(c, plan_table(spec, result.plan, result.report), out);
    return kExitOk;
  }
  OrderedJson doc = header(cf, states, "solve", c);
  doc["mode"] = mode;
  doc["plan"] = plan_to_json(spec, result.plan);
  doc["added_mw"] = added_capacity(spec, result.plan);
  doc["report"] = report_to_json(result.report);
  doc["benders_log"] = log_to_json(spec, result.log, {c.timing});
  emit(c, dump(doc), out);
  return kExitOk;
}

int cmd_evaluate(const Common& c, const std::string& plan_path, bool mc, std::ostream& out) {
  const CaseFile cf = load(c);
  const auto& spec = cf.spec;
  InvestmentPlan plan = InvestmentPlan::empty(spec);
  if (!plan_path.empty()) {
    std::ifstream in(plan_path, std::ios::binary);
    if (!in) throw InstanceError("cannot open plan file '" + plan_path + "'");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw InstanceError(std::string("plan file: ") + e.what());
    }
    plan = plan_from_json(spec, doc);
  }
  const StateSet states = make_states(spec, cf.options.state_options());
  const PlanReport report =
      evaluate_plan(spec, plan, cf.criterion, states, cf.options.tol_feas);

  OrderedJson mc_rows = OrderedJson::array();
  if (mc) {
    McOptions mo;
    mo.batch = cf.options.mc_batch;
    mo.cov_target = cf.options.mc_cov_target;
    for (int t = 0; t < spec.periods(); ++t) {
      const auto e = mc_epns_converged(spec, plan.relaxed(), t, cf.options.seed + t, mo);
      mc_rows.push_back({{"period", t + 1},
                         {"epns_mw", e.value},
                         {"standard_error", e.standard_error},
                         {"samples", e.samples}});
    }
  }

  if (c.format == "table") {
    std::string text = plan_table(spec, plan, report);
    for (const auto& row : mc_rows) {
      std::ostringstream line;
      line << "mc period " << row["period"] << ": epns " << row["epns_mw"].get<double>()
           << " +- " << row["standard_error"].get<double>() << " (" << row["samples"]
           << " samples)\n";
      text += line.str();
    }
    emit(c, text, out);
    return kExitOk;
  }
  OrderedJson doc = header(cf, states, "evaluate", c);
  doc["plan"] = plan_to_json(spec, plan);
  doc["report"] = report_to_json(report);
  if (mc) doc["monte_carlo"] = mc_rows;
  emit(c, dump(doc), out);
  return kExitOk;
}

int cmd_compare(const Common& c, std::ostream& out, std::ostream& err) {
  const CaseFile cf = load(c);
  const auto& spec = cf.spec;
  const StateSet states = make_states(spec, cf.options.state_options());
  auto render = [&](const ComparisonReport& report) {
    if (c.format == "table") return comparison_table(spec, report);
    OrderedJson doc = header(cf, states, "compare", c);
    doc["comparison"] = comparison_to_json(spec, report, {c.timing});
    return dump(doc);
  };
  try {
    emit(c, render(compare(spec, cf.criterion, states, cf.options.benders_options())), out);
  } catch (const ComparisonError& e) {
    emit(c, render(e.partial()), out);
    err << "error: " << e.what() << "\n";
    return e.kind() == 1 ? kExitUsage : e.kind();
  }
  return kExitOk;
}

int cmd_gen_case(const Common& c, const GenCaseParams& params, std::ostream& out) {
  GenCaseParams p = params;
  if (c.seed) p.seed = *c.seed;
  emit(c, serialize_case(gen_case(p)), out);
  return kExitOk;
}

int cmd_dump_mip(const Common& c, const std::string& metric, std::ostream& out) {
  const CaseFile cf = load(c);
  std::optional<ReliabilityCriterion> crit;
  if (metric != "none") {
    crit = cf.criterion;
    crit->metric = *metric_from_string(metric);
  }
  StateOptions so = cf.options.state_options();
  so.mode = StateOptions::Mode::Exact;
  const auto model = crit ? build_planning_mip(cf.spec, make_states(cf.spec, so), crit)
                          : build_economic_mip(cf.spec);
  std::ostringstream text;
  write_lp_format(model.program, text);
  emit(c, text.str(), out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reliability-constrained generation expansion planning", "rcep"};
  app.set_version_flag("--version", RCEP_VERSION);
  app.require_subcommand(1);

  Common common;
  std::string mode;
  std::string plan_path;
  bool mc = false;
  GenCaseParams gen;
  std::string metric = "epns";

  auto* solve = app.add_subcommand("solve", "Plan with one methodology");
  add_common(solve, common);
  solve->add_option("--mode", mode, "Planning methodology")
      ->required()
      ->check(CLI::IsMember({"ep", "hp", "ip-epns", "ip-cvar"}));

  auto* evaluate = app.add_subcommand("evaluate", "Costs and reliability metrics of a plan");
  add_common(evaluate, common);
  evaluate->add_option("--plan", plan_path, "Plan JSON (default: no builds)");
  evaluate->add_flag("--mc", mc, "Add Monte Carlo EPNS estimates per period");

  auto* cmp = app.add_subcommand("compare", "EP, HP, IP-EPNS and IP-CVaR side by side");
  add_common(cmp, common);

  auto* gen_cmd = app.add_subcommand("gen-case", "Write a synthetic case");
  add_common(gen_cmd, common, false);
  gen_cmd->add_option("--existing", gen.existing, "Existing units")->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--candidates", gen.candidates, "Candidate units")
      ->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--periods", gen.periods, "Periods")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--growth", gen.demand_growth, "Demand growth per period")
      ->check(CLI::Range(0.0, 1.0));

  auto* dump_cmd = app.add_subcommand("dump-mip", "Write the extensive-form MIP in LP format");
  add_common(dump_cmd, common);
  dump_cmd->add_option("--metric", metric, "Reliability block")
      ->check(CLI::IsMember({"epns", "cvar", "lolp", "var", "none"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return kExitOk;
    const auto chosen = app.get_subcommands();
    err << "\n" << (chosen.empty() ? app.help() : chosen.front()->help());
    return kExitUsage;
  }

  set_worker_threads(common.threads);
  try {
    if (*solve) return cmd_solve(common, mode, out);
    if (*evaluate) return cmd_evaluate(common, plan_path, mc, out);
    if (*cmp) return cmd_compare(common, out, err);
    if (*gen_cmd) return cmd_gen_case(common, gen, out);
    if (*dump_cmd) return cmd_dump_mip(common, metric, out);
  } catch (const InfeasibleCriterionError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const ResourceError& e) {
    err << "resource limit: " << e.what() << "\n";
    return kExitResource;
  } catch (const SolverError& e) {
    err << "numeric failure: " << e.what() << "\n";
    if (!e.log().empty()) err << e.log() << "\n";
    return kExitNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace rcep
