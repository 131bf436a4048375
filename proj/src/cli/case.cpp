#include "rcep/case.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>

namespace rcep {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

StateOptions CaseOptions::state_options() const {
  StateOptions s;
  s.mode = state_mode;
  s.samples = samples;
  s.seed = seed;
  s.max_stochastic = max_stochastic;
  return s;
}

BendersOptions CaseOptions::benders_options() const {
  BendersOptions b;
  b.tol_gap = tol_gap;
  b.max_iter = max_iter;
  b.tol_feas = tol_feas;
  b.tol_opt = tol_opt;
  b.lp.max_nodes = max_nodes;
  return b;
}

const char* to_string(StateOptions::Mode mode) {
  switch (mode) {
    case StateOptions::Mode::Auto: return "auto";
    case StateOptions::Mode::Exact: return "exact";
    case StateOptions::Mode::Sampled: return "sampled";
  }
  return "?";
}

namespace {

// Typed access to one JSON object that remembers its path and rejects keys
// nobody asked for.
class Reader {
 public:
  Reader(const json& value, std::string path, std::set<std::string> allowed)
      : value_(value), path_(std::move(path)) {
    if (!value_.is_object()) throw CaseSchemaError("expected an object", where());
    for (const auto& [key, _] : value_.items()) {
      if (!allowed.contains(key)) throw CaseSchemaError("unknown key", path_ + "." + key);
    }
  }

  bool has(const std::string& key) const { return value_.contains(key); }
  std::string at(const std::string& key) const { return path_ + "." + key; }

  const json& require(const std::string& key) const {
    if (!value_.contains(key)) throw CaseSchemaError("missing required key", at(key));
    return value_.at(key);
  }

  // Real in [lo, hi]; open_lo excludes lo.
  double real(const std::string& key, std::optional<double> fallback, double lo, double hi,
              bool open_lo = false) const {
    if (!has(key)) {
      if (!fallback) require(key);
      return *fallback;
    }
    const json& v = value_.at(key);
    if (!v.is_number()) throw CaseSchemaError("expected a number", at(key));
    const double x = v.get<double>();
    const bool below = open_lo ? !(x > lo) : !(x >= lo);
    if (!std::isfinite(x) || below || x > hi) {
      std::ostringstream msg;
      msg << "value " << x << " outside " << (open_lo ? "(" : "[") << lo << ", " << hi << "]";
      throw CaseSchemaError(msg.str(), at(key));
    }
    return x;
  }

  long long integer(const std::string& key, std::optional<long long> fallback, long long lo,
                    long long hi) const {
    if (!has(key)) {
      if (!fallback) require(key);
      return *fallback;
    }
    const json& v = value_.at(key);
    if (!v.is_number_integer()) throw CaseSchemaError("expected an integer", at(key));
    const long long x = v.get<long long>();
    if (x < lo || x > hi) {
      throw CaseSchemaError("value " + std::to_string(x) + " outside [" + std::to_string(lo) +
                                ", " + std::to_string(hi) + "]",
                            at(key));
    }
    return x;
  }

  std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const json& v = value_.at(key);
    if (!v.is_number_unsigned()) throw CaseSchemaError("expected a nonnegative integer", at(key));
    return v.get<std::uint64_t>();
  }

  std::string string(const std::string& key, std::optional<std::string> fallback) const {
    if (!has(key)) {
      if (!fallback) require(key);
      return *fallback;
    }
    const json& v = value_.at(key);
    if (!v.is_string()) throw CaseSchemaError("expected a string", at(key));
    return v.get<std::string>();
  }

  template <typename T>
  T choice(const std::string& key, T fallback,
           const std::vector<std::pair<std::string, T>>& options) const {
    if (!has(key)) return fallback;
    const std::string s = string(key, std::nullopt);
    for (const auto& [name, value] : options) {
      if (name == s) return value;
    }
    std::string names;
    for (const auto& [name, _] : options) names += (names.empty() ? "" : "|") + name;
    throw CaseSchemaError("'" + s + "' is not one of " + names, at(key));
  }

  std::string where() const { return path_.empty() ? "." : path_; }

 private:
  const json& value_;
  std::string path_;
};

Generator parse_generator(const json& value, const std::string& path) {
  const Reader r(value, path,
                 {"id", "kind", "capacity_mw", "outage_prob", "var_cost", "invest_cost",
                  "earliest_period"});
  Generator g;
  g.id = r.string("id", std::nullopt);
  if (g.id.empty()) throw CaseSchemaError("id must not be empty", r.at("id"));
  const std::string kind = r.string("kind", std::nullopt);
  if (kind == "existing") {
    g.kind = GeneratorKind::Existing;
  } else if (kind == "candidate") {
    g.kind = GeneratorKind::Candidate;
  } else {
    throw CaseSchemaError("'" + kind + "' is not one of existing|candidate", r.at("kind"));
  }
  const double inf = std::numeric_limits<double>::max();
  g.capacity_mw = r.real("capacity_mw", std::nullopt, 0.0, inf, true);
  g.outage_prob = r.real("outage_prob", std::nullopt, 0.0, 1.0);
  g.var_cost = r.real("var_cost", std::nullopt, 0.0, inf);
  g.invest_cost = r.real("invest_cost", 0.0, 0.0, inf);
  g.earliest_period =
      static_cast<int>(r.integer("earliest_period", 1, 1, std::numeric_limits<int>::max()));
  return g;
}

CaseOptions parse_options(const json& value, const std::string& path) {
  const Reader r(value, path,
                 {"tol_gap", "max_iter", "tol_feas", "tol_opt", "max_nodes", "seed",
                  "state_mode", "samples", "max_stochastic", "mc_batch", "mc_cov_target"});
  CaseOptions o;
  const double inf = std::numeric_limits<double>::max();
  const long long big = std::numeric_limits<long>::max();
  o.tol_gap = r.real("tol_gap", o.tol_gap, 0.0, 1.0, true);
  o.max_iter = static_cast<int>(r.integer("max_iter", o.max_iter, 1, 1'000'000));
  o.tol_feas = r.real("tol_feas", o.tol_feas, 0.0, inf, true);
  o.tol_opt = r.real("tol_opt", o.tol_opt, 0.0, inf, true);
  o.max_nodes = static_cast<long>(r.integer("max_nodes", o.max_nodes, 1, big));
  o.seed = r.unsigned64("seed", o.seed);
  o.state_mode = r.choice<StateOptions::Mode>("state_mode", o.state_mode,
                                              {{"auto", StateOptions::Mode::Auto},
                                               {"exact", StateOptions::Mode::Exact},
                                               {"sampled", StateOptions::Mode::Sampled}});
  o.samples = static_cast<long>(r.integer("samples", o.samples, 1, big));
  o.max_stochastic = static_cast<int>(r.integer("max_stochastic", o.max_stochastic, 0, 40));
  o.mc_batch = static_cast<long>(r.integer("mc_batch", o.mc_batch, 1, big));
  o.mc_cov_target = r.real("mc_cov_target", o.mc_cov_target, 0.0, inf, true);
  return o;
}

ReliabilityCriterion parse_criterion(const json& value, const std::string& path) {
  const Reader r(value, path, {"metric", "limit_frac", "alpha"});
  ReliabilityCriterion c;
  c.metric = r.choice<Metric>("metric", c.metric,
                              {{"epns", Metric::Epns},
                               {"cvar", Metric::Cvar},
                               {"lolp", Metric::Lolp},
                               {"var", Metric::Var}});
  c.limit_frac = r.real("limit_frac", c.limit_frac, 0.0, 1.0);
  c.alpha = r.real("alpha", c.alpha, 0.0, 1.0, true);
  return c;
}

// Contradictions between individually valid fields, reported at the field
// that has to change.
void check_semantics(const std::vector<Generator>& gens, const std::vector<double>& demand,
                     double shed_cost) {
  std::set<std::string> ids;
  for (std::size_t j = 0; j < gens.size(); ++j) {
    const auto& g = gens[j];
    const std::string at = ".generators[" + std::to_string(j) + "]";
    if (!ids.insert(g.id).second) {
      throw CaseSemanticError("duplicate generator id '" + g.id + "'", at + ".id");
    }
    if (g.is_candidate() && !(g.invest_cost > 0.0)) {
      throw CaseSemanticError("candidate '" + g.id + "' needs a positive invest_cost",
                              at + ".invest_cost");
    }
    if (!g.is_candidate() && g.invest_cost != 0.0) {
      throw CaseSemanticError("existing unit '" + g.id + "' must have invest_cost 0",
                              at + ".invest_cost");
    }
    if (!(g.var_cost < shed_cost)) {
      throw CaseSemanticError("var_cost of '" + g.id + "' is not below shed_cost",
                              at + ".var_cost");
    }
    if (g.earliest_period > static_cast<int>(demand.size())) {
      throw CaseSemanticError("earliest_period of '" + g.id + "' is past the horizon",
                              at + ".earliest_period");
    }
  }
}

}  // namespace

CaseFile parse_case(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw CaseSyntaxError(e.what(), "");
  }
  const Reader r(doc, "",
                 {"schema_version", "name", "shed_cost", "demand_mw", "generators", "criterion",
                  "options"});
  const int version = static_cast<int>(r.integer("schema_version", std::nullopt, 0, 1 << 20));
  if (version != kCaseSchemaVersion) {
    throw CaseSchemaError("unsupported schema_version " + std::to_string(version),
                          ".schema_version");
  }
  const std::string name = r.string("name", "");
  const double shed_cost =
      r.real("shed_cost", std::nullopt, 0.0, std::numeric_limits<double>::max(), true);

  const json& demand_json = r.require("demand_mw");
  if (!demand_json.is_array()) throw CaseSchemaError("expected an array", ".demand_mw");
  if (demand_json.empty()) throw CaseSchemaError("at least one period is required", ".demand_mw");
  std::vector<double> demand;
  for (std::size_t t = 0; t < demand_json.size(); ++t) {
    const std::string at = ".demand_mw[" + std::to_string(t) + "]";
    const json& v = demand_json[t];
    if (!v.is_number()) throw CaseSchemaError("expected a number", at);
    const double d = v.get<double>();
    if (!std::isfinite(d) || d < 0.0) throw CaseSchemaError("demand must be >= 0", at);
    demand.push_back(d);
  }

  const json& gens_json = r.require("generators");
  if (!gens_json.is_array()) throw CaseSchemaError("expected an array", ".generators");
  std::vector<Generator> gens;
  for (std::size_t j = 0; j < gens_json.size(); ++j) {
    gens.push_back(parse_generator(gens_json[j], ".generators[" + std::to_string(j) + "]"));
  }

  const ReliabilityCriterion criterion =
      r.has("criterion") ? parse_criterion(doc.at("criterion"), ".criterion")
                         : ReliabilityCriterion{};
  const CaseOptions options =
      r.has("options") ? parse_options(doc.at("options"), ".options") : CaseOptions{};

  check_semantics(gens, demand, shed_cost);
  try {
    return CaseFile{version, name, SystemSpec(std::move(gens), std::move(demand), shed_cost),
                    criterion, options};
  } catch (const InstanceError& e) {
    throw CaseSemanticError(e.what(), "");
  }
}

CaseFile read_case(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InstanceError("cannot open case file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_case(buffer.str());
}

std::string serialize_case(const CaseFile& c) {
  ordered_json doc;
  doc["schema_version"] = c.schema_version;
  if (!c.name.empty()) doc["name"] = c.name;
  doc["shed_cost"] = c.spec.shed_cost();
  doc["demand_mw"] = c.spec.demand();
  ordered_json gens = ordered_json::array();
  for (const auto& g : c.spec.generators()) {
    ordered_json j;
    j["id"] = g.id;
    j["kind"] = g.is_candidate() ? "candidate" : "existing";
    j["capacity_mw"] = g.capacity_mw;
    j["outage_prob"] = g.outage_prob;
    j["var_cost"] = g.var_cost;
    j["invest_cost"] = g.invest_cost;
    j["earliest_period"] = g.earliest_period;
    gens.push_back(std::move(j));
  }
  doc["generators"] = std::move(gens);
  doc["criterion"] = {{"metric", to_string(c.criterion.metric)},
                      {"limit_frac", c.criterion.limit_frac},
                      {"alpha", c.criterion.alpha}};
  const auto& o = c.options;
  doc["options"] = {{"tol_gap", o.tol_gap},
                    {"max_iter", o.max_iter},
                    {"tol_feas", o.tol_feas},
                    {"tol_opt", o.tol_opt},
                    {"max_nodes", o.max_nodes},
                    {"seed", o.seed},
                    {"state_mode", to_string(o.state_mode)},
                    {"samples", o.samples},
                    {"max_stochastic", o.max_stochastic},
                    {"mc_batch", o.mc_batch},
                    {"mc_cov_target", o.mc_cov_target}};
  return doc.dump(2) + "\n";
}

CaseFile gen_case(const GenCaseParams& params) {
  if (params.existing < 0 || params.candidates < 0) {
    throw InstanceError("generator counts must be >= 0");
  }
  if (params.existing + params.candidates == 0) throw InstanceError("no generators requested");
  if (params.periods < 1) throw InstanceError("periods must be >= 1");
  if (!(params.demand_growth >= 0.0 && params.demand_growth <= 1.0)) {
    throw InstanceError("demand_growth must lie in [0, 1]");
  }

  std::mt19937_64 rng(params.seed);
  std::uniform_int_distribution<int> existing_cap(20, 150);
  std::uniform_int_distribution<int> candidate_cap(20, 120);
  std::uniform_int_distribution<int> outage_pct(2, 12);
  std::uniform_int_distribution<int> existing_cost(10, 80);
  std::uniform_int_distribution<int> candidate_cost(5, 60);
  std::uniform_int_distribution<int> invest_per_mw(5, 40);  // x 100 $
  std::uniform_int_distribution<int> earliest(1, std::max(1, (params.periods + 1) / 2));
  std::uniform_real_distribution<double> load(0.8, 1.0);

  std::vector<Generator> gens;
  double derated = 0.0;
  for (int j = 0; j < params.existing; ++j) {
    Generator g{"E" + std::to_string(j + 1), GeneratorKind::Existing, double(existing_cap(rng)),
                outage_pct(rng) / 100.0, double(existing_cost(rng)), 0.0, 1};
    derated += g.derated_capacity();
    gens.push_back(g);
  }
  for (int c = 0; c < params.candidates; ++c) {
    Generator g{"C" + std::to_string(c + 1), GeneratorKind::Candidate,
                double(candidate_cap(rng)), outage_pct(rng) / 100.0,
                double(candidate_cost(rng)), 0.0, earliest(rng)};
    g.invest_cost = 100.0 * invest_per_mw(rng) * g.capacity_mw;
    gens.push_back(g);
  }
  if (params.existing == 0) derated = gens.front().derated_capacity();
  const double base = load(rng) * derated;

  // Shrink the load level until every period is satisfiable at 1% EPNS with
  // everything built that may be.
  for (double scale = 1.0;; scale *= 0.95) {
    std::vector<double> demand;
    for (int t = 0; t < params.periods; ++t) {
      const double d = base * scale * std::pow(1.0 + params.demand_growth, t);
      demand.push_back(std::round(d * 10.0) / 10.0);
    }
    SystemSpec spec(gens, demand, 1000.0);
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(spec.num_candidates(), spec.periods());
    for (int c = 0; c < spec.num_candidates(); ++c) {
      for (int t = spec.candidate(c).earliest_period - 1; t < spec.periods(); ++t) x(c, t) = 1.0;
    }
    bool ok = true;
    for (int t = 0; t < spec.periods() && ok; ++t) {
      const auto table = capacity_outage_table(spec, x, t);
      ok = epns_from_table(table, spec.demand(t)) <= 0.01 * spec.demand(t);
    }
    if (ok) {
      CaseFile out{kCaseSchemaVersion, "synthetic-" + std::to_string(params.seed), std::move(spec),
                   ReliabilityCriterion{}, CaseOptions{}};
      out.options.seed = params.seed;
      return out;
    }
    if (scale < 1e-6) throw InstanceError("could not generate a satisfiable case");
  }
}

}  // namespace rcep
