#include "retail/cube.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace retail {

namespace {

struct KeyPart {
  bool is_num = true;
  std::int64_t num = 0;
  std::string text;  // display form; also the sort key for string levels

  friend bool operator<(const KeyPart& a, const KeyPart& b) {
    if (a.is_num != b.is_num) return a.is_num;  // never mixed within one level
    if (a.is_num) return a.num < b.num || (a.num == b.num && a.text < b.text);
    return a.text < b.text;
  }
  friend bool operator==(const KeyPart& a, const KeyPart& b) {
    return a.is_num == b.is_num && a.num == b.num && a.text == b.text;
  }
};

using GroupKey = std::vector<KeyPart>;

struct Accum {
  std::int64_t quantity = 0;
  std::int64_t revenue_c = 0;
  std::int64_t cost_c = 0;
  std::int64_t profit_c = 0;
  double dwell_s = 0;
  double stop_s = 0;
  std::int64_t visits = 0;
  double distance_m = 0;
};

bool is_sales_measure(Measure m) {
  switch (m) {
    case Measure::Quantity:
    case Measure::Revenue:
    case Measure::Cost:
    case Measure::Profit:
    case Measure::Margin:
      return true;
    default:
      return false;
  }
}

bool level_valid_for_sales(Level l) { return l != Level::Movement; }
bool level_valid_for_behaviour(Level l) {
  return l != Level::Product && l != Level::Supplier;
}

int age_band_index(std::optional<int> age) {
  if (!age) return 99;
  int a = *age;
  if (a <= 17) return 0;
  if (a <= 24) return 1;
  if (a <= 34) return 2;
  if (a <= 44) return 3;
  if (a <= 54) return 4;
  if (a <= 64) return 5;
  return 6;
}

const char* age_band_label(int band) {
  switch (band) {
    case 0: return "0-17";
    case 1: return "18-24";
    case 2: return "25-34";
    case 3: return "35-44";
    case 4: return "45-54";
    case 5: return "55-64";
    case 6: return "65+";
    default: return "UNKNOWN";
  }
}

int gender_order(Gender g) {
  switch (g) {
    case Gender::M: return 0;
    case Gender::F: return 1;
    case Gender::Unknown: return 2;
  }
  return 2;
}

KeyPart calendar_part(Level level, std::int32_t date_key) {
  KeyPart part;
  char buf[16];
  int y = year_of_date_key(date_key);
  switch (level) {
    case Level::Year:
      part.num = y;
      part.text = std::to_string(y);
      break;
    case Level::Quarter: {
      int q = quarter_of_date_key(date_key);
      part.num = y * 10 + q;
      std::snprintf(buf, sizeof buf, "%04d-Q%d", y, q);
      part.text = buf;
      break;
    }
    case Level::Month: {
      int m = month_of_date_key(date_key);
      part.num = y * 100 + m;
      std::snprintf(buf, sizeof buf, "%04d-%02d", y, m);
      part.text = buf;
      break;
    }
    default:  // Level::Day
      part.num = date_key;
      part.text = date_string_from_key(date_key);
      break;
  }
  return part;
}

// the shared per-row context needed to evaluate a level
struct RowContext {
  std::int32_t date_key = 0;
  std::int32_t area_key = 0;
  std::int32_t customer_key = 0;
  std::int32_t product_key = 0;   // sales only
  std::int32_t movement_key = 0;  // behaviour only
};

KeyPart level_part(const Warehouse& wh, Level level, const RowContext& row) {
  KeyPart part;
  switch (level) {
    case Level::Year:
    case Level::Quarter:
    case Level::Month:
    case Level::Day:
      return calendar_part(level, row.date_key);
    case Level::Zone: {
      const AreaRow* area = wh.find_area(row.area_key);
      part.num = row.area_key;
      part.text = area ? area->area_name : std::to_string(row.area_key);
      return part;
    }
    case Level::Product: {
      const DmProduct* p = wh.find_product(row.product_key);
      part.num = row.product_key;
      part.text = p ? p->sku_key : std::to_string(row.product_key);
      return part;
    }
    case Level::Supplier: {
      const DmProduct* p = wh.find_product(row.product_key);
      std::int32_t key = p ? p->supplier_key : 0;
      part.num = key;
      part.text = (key >= 1 && static_cast<std::size_t>(key) <= wh.suppliers().size())
                      ? wh.suppliers()[static_cast<std::size_t>(key) - 1].supplier_name
                      : std::to_string(key);
      return part;
    }
    case Level::Customer: {
      const DmCustomer* c = wh.find_customer_by_key(row.customer_key);
      part.num = row.customer_key;
      part.text = c ? c->customer_id : std::to_string(row.customer_key);
      return part;
    }
    case Level::Gender: {
      const DmCustomer* c = wh.find_customer_by_key(row.customer_key);
      Gender g = c ? c->gender : Gender::Unknown;
      part.num = gender_order(g);
      part.text = gender_name(g);
      return part;
    }
    case Level::AgeBand: {
      const DmCustomer* c = wh.find_customer_by_key(row.customer_key);
      int band = age_band_index(c ? c->age : std::nullopt);
      part.num = band;
      part.text = age_band_label(band);
      return part;
    }
    case Level::Movement:
      part.num = row.movement_key;
      part.text = row.movement_key == 1 ? "STOP" : "MOVE";
      return part;
  }
  return part;
}

void validate_query(const CubeQuery& query) {
  if (query.measures.empty()) {
    throw Error(Err::UsageError, "a cube query needs at least one measure");
  }
  for (std::size_t i = 0; i < query.group_by.size(); ++i) {
    for (std::size_t j = i + 1; j < query.group_by.size(); ++j) {
      if (query.group_by[i] == query.group_by[j]) {
        throw Error(Err::UsageError,
                    std::string("duplicate group level ") + level_name(query.group_by[i]));
      }
    }
  }
  bool sales = false, behaviour = false;
  for (Measure m : query.measures) {
    (is_sales_measure(m) ? sales : behaviour) = true;
  }
  auto check_level = [&](Level l) {
    if (sales && !level_valid_for_sales(l)) {
      throw Error(Err::IncompatibleLevel, std::string(level_name(l)) +
                                              " cannot group or filter sales measures");
    }
    if (behaviour && !level_valid_for_behaviour(l)) {
      throw Error(Err::IncompatibleLevel, std::string(level_name(l)) +
                                              " cannot group or filter movement measures");
    }
  };
  for (Level l : query.group_by) check_level(l);
  for (const Filter& f : query.filters) check_level(f.level);
}

// shared aggregation core for rollup / hierarchy / heatmap
std::map<GroupKey, Accum> aggregate(const Warehouse& wh, const CubeQuery& query) {
  bool want_sales = false, want_behaviour = false;
  for (Measure m : query.measures) {
    (is_sales_measure(m) ? want_sales : want_behaviour) = true;
  }

  std::map<GroupKey, Accum> groups;
  auto row_key = [&](const RowContext& row, bool& keep) {
    keep = true;
    for (const Filter& f : query.filters) {
      if (level_part(wh, f.level, row).text != f.value) {
        keep = false;
        return GroupKey{};
      }
    }
    GroupKey key;
    key.reserve(query.group_by.size());
    for (Level l : query.group_by) key.push_back(level_part(wh, l, row));
    return key;
  };

  if (want_sales) {
    for (const FactSalesRow& r : wh.fact_sales()) {
      RowContext row{r.date_key, r.area_key, r.customer_key, r.product_key, 0};
      bool keep;
      GroupKey key = row_key(row, keep);
      if (!keep) continue;
      Accum& acc = groups[std::move(key)];
      acc.quantity += r.quantity;
      acc.revenue_c += r.revenue.cents;
      acc.cost_c += r.cost.cents;
      acc.profit_c += r.profit.cents;
    }
  }
  if (want_behaviour) {
    for (const FactBehaviourRow& r : wh.fact_behaviour()) {
      RowContext row{r.date_key, r.area_key, r.customer_key, 0, r.movement_key};
      bool keep;
      GroupKey key = row_key(row, keep);
      if (!keep) continue;
      Accum& acc = groups[std::move(key)];
      acc.dwell_s += r.duration_s;
      if (r.movement_key == 1) acc.stop_s += r.duration_s;
      acc.visits += r.visit;
      acc.distance_m += r.distance_m;
    }
  }
  return groups;
}

std::string render_measure(Measure m, const Accum& acc) {
  switch (m) {
    case Measure::Quantity: return std::to_string(acc.quantity);
    case Measure::Revenue: return format_money(Money{acc.revenue_c});
    case Measure::Cost: return format_money(Money{acc.cost_c});
    case Measure::Profit: return format_money(Money{acc.profit_c});
    case Measure::Margin: return render_margin(Money{acc.profit_c}, Money{acc.revenue_c});
    case Measure::DwellS: return format_double(acc.dwell_s);
    case Measure::StopS: return format_double(acc.stop_s);
    case Measure::VisitCount: return std::to_string(acc.visits);
    case Measure::DistanceM: return format_double(acc.distance_m);
  }
  return {};
}

double measure_as_double(Measure m, const Accum& acc) {
  switch (m) {
    case Measure::Quantity: return static_cast<double>(acc.quantity);
    case Measure::Revenue: return static_cast<double>(acc.revenue_c) / 100.0;
    case Measure::Cost: return static_cast<double>(acc.cost_c) / 100.0;
    case Measure::Profit: return static_cast<double>(acc.profit_c) / 100.0;
    case Measure::Margin:
      return acc.revenue_c > 0 ? static_cast<double>(acc.profit_c) / acc.revenue_c : 0.0;
    case Measure::DwellS: return acc.dwell_s;
    case Measure::StopS: return acc.stop_s;
    case Measure::VisitCount: return static_cast<double>(acc.visits);
    case Measure::DistanceM: return acc.distance_m;
  }
  return 0;
}

}  // namespace

const char* measure_name(Measure m) {
  switch (m) {
    case Measure::Quantity: return "quantity";
    case Measure::Revenue: return "revenue";
    case Measure::Cost: return "cost";
    case Measure::Profit: return "profit";
    case Measure::Margin: return "margin";
    case Measure::DwellS: return "dwell_s";
    case Measure::StopS: return "stop_s";
    case Measure::VisitCount: return "visit_count";
    case Measure::DistanceM: return "distance_m";
  }
  return "?";
}

const char* level_name(Level l) {
  switch (l) {
    case Level::Year: return "year";
    case Level::Quarter: return "quarter";
    case Level::Month: return "month";
    case Level::Day: return "day";
    case Level::Zone: return "zone";
    case Level::Product: return "product";
    case Level::Supplier: return "supplier";
    case Level::Customer: return "customer";
    case Level::Gender: return "gender";
    case Level::AgeBand: return "age_band";
    case Level::Movement: return "movement";
  }
  return "?";
}

std::optional<Measure> measure_from_name(std::string_view name) {
  for (Measure m : {Measure::Quantity, Measure::Revenue, Measure::Cost, Measure::Profit,
                    Measure::Margin, Measure::DwellS, Measure::StopS, Measure::VisitCount,
                    Measure::DistanceM}) {
    if (name == measure_name(m)) return m;
  }
  return std::nullopt;
}

std::optional<Level> level_from_name(std::string_view name) {
  for (Level l : {Level::Year, Level::Quarter, Level::Month, Level::Day, Level::Zone,
                  Level::Product, Level::Supplier, Level::Customer, Level::Gender,
                  Level::AgeBand, Level::Movement}) {
    if (name == level_name(l)) return l;
  }
  return std::nullopt;
}

bool measure_is_additive(Measure m) { return m != Measure::Margin; }

std::string ResultTable::to_csv() const {
  std::string out = csv_join(header);
  out += '\n';
  for (const auto& row : rows) {
    out += csv_join(row);
    out += '\n';
  }
  return out;
}

std::string ResultTable::to_report() const {
  std::vector<std::size_t> widths(header.size(), 0);
  for (std::size_t c = 0; c < header.size(); ++c) widths[c] = header[c].size();
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << "  ";
      out << row[c];
      for (std::size_t pad = row[c].size(); pad < widths[c]; ++pad) out << ' ';
    }
    out << '\n';
  };
  emit(header);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) out << "  ";
    out << std::string(widths[c], '-');
  }
  out << '\n';
  for (const auto& row : rows) emit(row);
  return out.str();
}

ResultTable rollup(const Warehouse& wh, const CubeQuery& query) {
  validate_query(query);
  if (!wh.has_facts()) {
    throw Error(Err::EmptyWarehouse, "no facts loaded; run load first");
  }
  std::map<GroupKey, Accum> groups = aggregate(wh, query);

  ResultTable table;
  for (Level l : query.group_by) table.header.push_back(level_name(l));
  for (Measure m : query.measures) table.header.push_back(measure_name(m));
  for (const auto& [key, acc] : groups) {
    std::vector<std::string> row;
    row.reserve(key.size() + query.measures.size());
    for (const KeyPart& part : key) row.push_back(part.text);
    for (Measure m : query.measures) row.push_back(render_measure(m, acc));
    table.rows.push_back(std::move(row));
  }
  return table;
}

HierarchyReport hierarchy_consistency(const Warehouse& wh, Measure measure, Level parent,
                                      Level child) {
  if (!measure_is_additive(measure)) {
    throw Error(Err::NonAdditiveMeasure,
                std::string(measure_name(measure)) + " is a ratio; drill-down sums do not apply");
  }
  auto rank = [](Level l) {
    switch (l) {
      case Level::Year: return 0;
      case Level::Quarter: return 1;
      case Level::Month: return 2;
      case Level::Day: return 3;
      default: return -1;
    }
  };
  if (rank(parent) < 0 || rank(child) < 0 || rank(parent) >= rank(child)) {
    throw Error(Err::UsageError, "hierarchy check needs calendar levels coarse-to-fine");
  }
  if (!wh.has_facts()) {
    throw Error(Err::EmptyWarehouse, "no facts loaded; run load first");
  }

  CubeQuery parent_query{{measure}, {parent}, {}};
  CubeQuery child_query{{measure}, {parent, child}, {}};
  std::map<GroupKey, Accum> parents = aggregate(wh, parent_query);
  std::map<GroupKey, Accum> children = aggregate(wh, child_query);

  HierarchyReport report;
  report.parents_checked = parents.size();
  for (const auto& [pkey, pacc] : parents) {
    Accum sum;
    for (const auto& [ckey, cacc] : children) {
      if (ckey[0] == pkey[0]) {
        sum.quantity += cacc.quantity;
        sum.revenue_c += cacc.revenue_c;
        sum.cost_c += cacc.cost_c;
        sum.profit_c += cacc.profit_c;
        sum.dwell_s += cacc.dwell_s;
        sum.stop_s += cacc.stop_s;
        sum.visits += cacc.visits;
        sum.distance_m += cacc.distance_m;
      }
    }
    std::string parent_value = render_measure(measure, pacc);
    std::string child_sum = render_measure(measure, sum);
    if (parent_value != child_sum) {
      report.violations.push_back(std::string(level_name(parent)) + " " + pkey[0].text + ": " +
                                  parent_value + " != sum(children) " + child_sum);
    }
  }
  return report;
}

std::string Heatmap::to_csv() const {
  std::string out = "area_key,area_name," + std::string(measure_name(measure)) + "\n";
  for (const HeatmapCell& c : cells) {
    out += csv_join({std::to_string(c.area_key), c.area_name, format_double(c.value)});
    out += '\n';
  }
  return out;
}

std::string Heatmap::to_matrix() const {
  std::string out;
  for (std::size_t r = 0; r < grid_rows; ++r) {
    for (std::size_t c = 0; c < grid_cols; ++c) {
      if (c) out += ' ';
      out += format_double(grid[r * grid_cols + c]);
    }
    out += '\n';
  }
  return out;
}

std::string Heatmap::to_report() const {
  std::ostringstream out;
  out << "measure = " << measure_name(measure) << '\n';
  out << "from = " << date_string_from_key(from_date_key) << '\n';
  out << "to = " << date_string_from_key(to_date_key) << '\n';
  for (const HeatmapCell& c : cells) {
    out << c.area_name << " = " << format_double(c.value) << '\n';
  }
  return out.str();
}

Heatmap heatmap(const Warehouse& wh, Measure measure, std::int32_t from_date_key,
                std::int32_t to_date_key, double cell_size_m) {
  if (measure != Measure::DwellS && measure != Measure::VisitCount &&
      measure != Measure::Revenue) {
    throw Error(Err::UnknownMeasure, "heatmap supports dwell_s, visit_count or revenue");
  }
  if (!valid_date_key(from_date_key) || !valid_date_key(to_date_key) ||
      from_date_key > to_date_key) {
    throw Error(Err::EmptyRange, "empty or invalid date range");
  }
  if (!(cell_size_m > 0)) throw Error(Err::UsageError, "cell size must be positive");
  if (!wh.has_facts()) {
    throw Error(Err::EmptyWarehouse, "no facts loaded; run load first");
  }

  // zone totals; date filtering is a range, not an equality filter, so the
  // scan is inlined rather than routed through aggregate()
  std::map<GroupKey, Accum> groups;
  {
    auto in_range = [&](std::int32_t dk) { return dk >= from_date_key && dk <= to_date_key; };
    if (measure == Measure::Revenue) {
      for (const FactSalesRow& r : wh.fact_sales()) {
        if (!in_range(r.date_key)) continue;
        RowContext row{r.date_key, r.area_key, r.customer_key, r.product_key, 0};
        groups[{level_part(wh, Level::Zone, row)}].revenue_c += r.revenue.cents;
      }
    } else {
      for (const FactBehaviourRow& r : wh.fact_behaviour()) {
        if (!in_range(r.date_key)) continue;
        RowContext row{r.date_key, r.area_key, r.customer_key, 0, r.movement_key};
        Accum& acc = groups[{level_part(wh, Level::Zone, row)}];
        acc.dwell_s += r.duration_s;
        acc.visits += r.visit;
      }
    }
  }

  Heatmap hm;
  hm.measure = measure;
  hm.from_date_key = from_date_key;
  hm.to_date_key = to_date_key;
  hm.cell_size_m = cell_size_m;

  // zones in sequence order, zero-filled; UNZONED bucket last
  std::vector<const AreaRow*> ordered;
  for (const AreaRow& a : wh.areas()) {
    if (a.area_key != 0) ordered.push_back(&a);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const AreaRow* a, const AreaRow* b) { return a->sequence_index < b->sequence_index; });
  auto value_of = [&](std::int32_t area_key, const std::string& name) {
    GroupKey key{{true, area_key, name}};
    auto it = groups.find(key);
    return it == groups.end() ? 0.0 : measure_as_double(measure, it->second);
  };
  for (const AreaRow* a : ordered) {
    hm.cells.push_back({a->area_key, a->area_name, value_of(a->area_key, a->area_name)});
  }
  hm.cells.push_back({0, "UNZONED", value_of(0, "UNZONED")});

  // raster over the enclosing bounds of all zone rectangles
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  bool first = true;
  for (const AreaRow* a : ordered) {
    if (!a->has_geometry) continue;
    if (first) { x0 = a->x0; y0 = a->y0; x1 = a->x1; y1 = a->y1; first = false; }
    x0 = std::min(x0, a->x0); y0 = std::min(y0, a->y0);
    x1 = std::max(x1, a->x1); y1 = std::max(y1, a->y1);
  }
  if (!first) {
    hm.grid_cols = static_cast<std::size_t>(std::ceil((x1 - x0) / cell_size_m));
    hm.grid_rows = static_cast<std::size_t>(std::ceil((y1 - y0) / cell_size_m));
    hm.grid.assign(hm.grid_rows * hm.grid_cols, 0.0);
    for (std::size_t r = 0; r < hm.grid_rows; ++r) {
      // row 0 at the north edge
      double cy = y1 - (static_cast<double>(r) + 0.5) * cell_size_m;
      for (std::size_t c = 0; c < hm.grid_cols; ++c) {
        double cx = x0 + (static_cast<double>(c) + 0.5) * cell_size_m;
        for (std::size_t z = 0; z < ordered.size(); ++z) {
          const AreaRow* a = ordered[z];
          if (cx >= a->x0 && cx < a->x1 && cy >= a->y0 && cy < a->y1) {
            hm.grid[r * hm.grid_cols + c] = hm.cells[z].value;
            break;
          }
        }
      }
    }
  }
  return hm;
}

}  // namespace retail
