#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "rcep/benders.hpp"
#include "rcep/model.hpp"
#include "rcep/reliability.hpp"

namespace rcep {

inline constexpr int kCaseSchemaVersion = 1;

/// Solver settings carried by a case file.
struct CaseOptions {
  double tol_gap = 1e-6;
  int max_iter = 200;
  double tol_feas = 1e-7;
  double tol_opt = 1e-7;
  long max_nodes = 200000;
  std::uint64_t seed = 1;
  StateOptions::Mode state_mode = StateOptions::Mode::Auto;
  long samples = 20000;
  int max_stochastic = kDefaultMaxStochasticGenerators;
  long mc_batch = 1000;
  double mc_cov_target = 0.05;

  StateOptions state_options() const;
  BendersOptions benders_options() const;
};

struct CaseFile {
  int schema_version = kCaseSchemaVersion;
  std::string name;
  SystemSpec spec;
  ReliabilityCriterion criterion;
  CaseOptions options;
};

/// Base of the three case-file diagnostics; path is a JSON path such as
/// `.generators[0].outage_prob` (empty for document-level problems).
class CaseError : public InstanceError {
 public:
  CaseError(const std::string& what, std::string path)
      : InstanceError(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Not a JSON document.
class CaseSyntaxError : public CaseError {
 public:
  using CaseError::CaseError;
};

/// Wrong type, missing or unknown key, value out of its range.
class CaseSchemaError : public CaseError {
 public:
  using CaseError::CaseError;
};

/// Well-formed values that contradict each other (duplicate ids, shedding
/// cheaper than generation, ...).
class CaseSemanticError : public CaseError {
 public:
  using CaseError::CaseError;
};

CaseFile parse_case(std::string_view text);
CaseFile read_case(const std::string& path);

/// Pretty-printed JSON; parse_case(serialize_case(c)) reproduces c.
std::string serialize_case(const CaseFile& c);

struct GenCaseParams {
  int existing = 6;
  int candidates = 4;
  int periods = 3;
  double demand_growth = 0.05;  // per period, geometric
  std::uint64_t seed = 1;
};

/// Reproducible synthetic case. Every period meets EPNS <= 1% of demand with
/// all candidates available by then built (checked on the capacity outage
/// table; demand is scaled down until it holds).
CaseFile gen_case(const GenCaseParams& params);

const char* to_string(StateOptions::Mode mode);

}  // namespace rcep
