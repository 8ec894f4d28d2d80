#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "retail/warehouse.hpp"

namespace retail {

enum class Measure {
  Quantity,
  Revenue,
  Cost,
  Profit,
  Margin,
  DwellS,
  StopS,
  VisitCount,
  DistanceM,
};

enum class Level {
  Year,
  Quarter,
  Month,
  Day,
  Zone,
  Product,
  Supplier,
  Customer,
  Gender,
  AgeBand,
  Movement,
};

const char* measure_name(Measure m);
const char* level_name(Level l);
std::optional<Measure> measure_from_name(std::string_view name);
std::optional<Level> level_from_name(std::string_view name);
bool measure_is_additive(Measure m);  // everything except margin

struct Filter {
  Level level;
  std::string value;  // matches the level's rendered form (e.g. "2025-Q3", "Dairy")
};

struct CubeQuery {
  std::vector<Measure> measures;
  std::vector<Level> group_by;            // may be empty: grand total
  std::vector<Filter> filters;
};

/// Deterministic result: rows sorted by group key ascending, one row per key.
struct ResultTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
  std::string to_report() const;  // aligned text block
};

/// Grouped aggregation over the star schema. Additive measures sum fact rows;
/// margin is recomputed from the group's summed profit and revenue, never
/// averaged from row margins.
ResultTable rollup(const Warehouse& wh, const CubeQuery& query);

struct HierarchyReport {
  std::vector<std::string> violations;
  std::size_t parents_checked = 0;
  bool clean() const { return violations.empty(); }
};

/// Verifies parent = sum(children) for an additive measure along the calendar
/// hierarchy (parent must be the coarser level).
HierarchyReport hierarchy_consistency(const Warehouse& wh, Measure measure, Level parent,
                                      Level child);

struct HeatmapCell {
  std::int32_t area_key = 0;
  std::string area_name;
  double value = 0;  // money measures carry whole currency units
};

struct Heatmap {
  Measure measure = Measure::DwellS;
  std::int32_t from_date_key = 0, to_date_key = 0;
  std::vector<HeatmapCell> cells;  // zones in sequence order, then UNZONED
  // raster over the map bounds; row 0 is the north edge
  double cell_size_m = 1.0;
  std::size_t grid_rows = 0, grid_cols = 0;
  std::vector<double> grid;  // row-major

  std::string to_csv() const;
  std::string to_matrix() const;
  std::string to_report() const;
};

/// Per-zone aggregate for dwell_s, visit_count or revenue over an inclusive
/// date-key range, plus a plottable raster of the store plane.
Heatmap heatmap(const Warehouse& wh, Measure measure, std::int32_t from_date_key,
                std::int32_t to_date_key, double cell_size_m = 1.0);

}  // namespace retail
