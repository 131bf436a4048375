#pragma once

#include <json.hpp>

#include <optional>
#include <string>

#include "rcep/benders.hpp"
#include "rcep/case.hpp"
#include "rcep/planner.hpp"

namespace rcep {

using OrderedJson = nlohmann::ordered_json;

struct RenderOptions {
  bool timing = false;  // include wall-clock seconds in the Benders log
};

/// {"built": {"<candidate id>": [0/1 per period], ...}}
OrderedJson plan_to_json(const SystemSpec& spec, const InvestmentPlan& plan);

/// Accepts a plan object or any document with a top-level "plan" member.
InvestmentPlan plan_from_json(const SystemSpec& spec, const nlohmann::json& doc);

OrderedJson report_to_json(const PlanReport& report);
OrderedJson log_to_json(const SystemSpec& spec, const BendersLog& log,
                        const RenderOptions& render);
OrderedJson criterion_to_json(const ReliabilityCriterion& criterion);
OrderedJson comparison_to_json(const SystemSpec& spec, const ComparisonReport& report,
                               const RenderOptions& render);

/// Fixed-width text tables for --format table.
std::string plan_table(const SystemSpec& spec, const InvestmentPlan& plan,
                       const PlanReport& report);
std::string comparison_table(const SystemSpec& spec, const ComparisonReport& report);

}  // namespace rcep
