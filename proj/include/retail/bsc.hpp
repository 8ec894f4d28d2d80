#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "retail/common.hpp"
#include "retail/warehouse.hpp"

namespace retail {

enum class Perspective { Financial, Customer, Internal };
enum class Direction { AtLeast, AtMost };

const char* perspective_name(Perspective p);
const char* direction_name(Direction d);

/// Measured quantities the warehouse cannot provide: investment figures,
/// shrinkage, checkout timings, survey scores, inventory counts. One row per
/// (baseline, current) period pair. Decimal fields carry up to 4 d.p.
struct OperationalInputs {
  std::string baseline_label;
  std::string current_label;
  std::int32_t baseline_start = 0, baseline_end = 0;  // date keys, inclusive
  std::int32_t current_start = 0, current_end = 0;

  Money investment_cost;
  Money measured_benefit;
  Money shrinkage_baseline, shrinkage_current;
  Money ops_cost_baseline, ops_cost_current;
  std::int64_t checkout_seconds_baseline = 0, checkout_seconds_current = 0;  // scaled 1e4
  std::int64_t cc_orders_total = 0, cc_orders_accurate = 0;
  std::int64_t survey_score_baseline = 0, survey_score_current = 0;  // scaled 1e4
  std::int64_t inventory_counted_correct = 0, inventory_counted_total = 0;
  std::int64_t sku_days_out_of_stock = 0, sku_days_total = 0;  // current period
  std::optional<std::int64_t> sku_days_out_of_stock_baseline;
  std::optional<std::int64_t> sku_days_total_baseline;
};

/// Parses the operational-inputs CSV (header documented in the README);
/// exactly one data row.
OperationalInputs parse_operational_inputs(std::string_view bytes);

struct KpiValue {
  std::string name;
  Ratio value;
};

/// All ratio KPIs as exact rationals. Revenue totals for the two periods come
/// from the warehouse. Throws DIVISION_BY_ZERO_BASELINE when a used baseline
/// quantity is zero.
std::vector<KpiValue> compute_kpis(const OperationalInputs& inputs, Money revenue_baseline,
                                   Money revenue_current);

/// Sums FactSales revenue over an inclusive date-key range; MISSING_PERIOD
/// when the range holds no sales rows.
Money period_revenue(const Warehouse& wh, std::int32_t from_date_key, std::int32_t to_date_key);

struct TargetSpec {
  std::string name;        // scorecard row name
  std::string kpi;         // source KPI (defaults to name)
  Direction direction = Direction::AtLeast;
  Ratio threshold;
  Perspective perspective = Perspective::Financial;
};

struct TargetConfig {
  std::vector<TargetSpec> targets;                    // file order
  std::map<std::string, std::string> annotations;     // e.g. roi.band_high -> 0.30
};

/// Flat key = value format:
///   roi = at_least 0.20 financial
///   out_of_stock_reduction_shelf = at_least 0.80 internal kpi=out_of_stock_reduction
///   roi.band_high = 0.30        (informational annotation)
TargetConfig parse_targets(std::string_view bytes);

struct ScorecardEntry {
  std::string name;
  Perspective perspective;
  std::string kpi;
  Ratio value;
  Direction direction;
  Ratio threshold;
  bool met = false;
};

struct Scorecard {
  std::vector<ScorecardEntry> entries;  // grouped by perspective, config order within
  std::map<std::string, std::string> annotations;

  std::string to_text() const;
  std::string to_json_text() const;
};

/// Marks each configured target met/not-met against the computed KPIs.
/// Boundary comparisons are exact (rational cross-multiplication).
Scorecard evaluate(const std::vector<KpiValue>& kpis, const TargetConfig& config);

}  // namespace retail
