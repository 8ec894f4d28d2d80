#include "retail/bsc.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

namespace retail {

using nlohmann::json;

namespace {

constexpr std::string_view kInputsHeader =
    "baseline_label,current_label,baseline_start,baseline_end,current_start,current_end,"
    "investment_cost,measured_benefit,shrinkage_baseline,shrinkage_current,ops_cost_baseline,"
    "ops_cost_current,checkout_seconds_baseline,checkout_seconds_current,cc_orders_total,"
    "cc_orders_accurate,survey_score_baseline,survey_score_current,inventory_counted_correct,"
    "inventory_counted_total,sku_days_out_of_stock,sku_days_total,"
    "sku_days_out_of_stock_baseline,sku_days_total_baseline";

// decimal with up to 4 fractional digits -> value * 10^4
std::optional<std::int64_t> parse_scaled4(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool negative = false;
  std::size_t i = 0;
  if (text[0] == '-') { negative = true; i = 1; }
  std::int64_t whole = 0;
  std::size_t digits = 0;
  while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
    whole = whole * 10 + (text[i] - '0');
    ++i; ++digits;
    if (digits > 14) return std::nullopt;
  }
  if (digits == 0) return std::nullopt;
  std::int64_t frac = 0;
  std::size_t frac_digits = 0;
  if (i < text.size()) {
    if (text[i] != '.') return std::nullopt;
    ++i;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
      frac = frac * 10 + (text[i] - '0');
      ++i; ++frac_digits;
    }
    if (frac_digits == 0 || frac_digits > 4 || i != text.size()) return std::nullopt;
  }
  for (std::size_t k = frac_digits; k < 4; ++k) frac *= 10;
  std::int64_t scaled = whole * 10000 + frac;
  return negative ? -scaled : scaled;
}

std::optional<Ratio> parse_ratio(std::string_view text) {
  auto scaled = parse_scaled4(text);
  if (!scaled) return std::nullopt;
  return Ratio::of(*scaled, 10000);
}

Ratio reduction(std::int64_t baseline, std::int64_t current, const char* what) {
  if (baseline == 0) {
    throw Error(Err::DivisionByZeroBaseline, std::string(what) + " baseline is zero");
  }
  return Ratio::of(baseline - current, baseline);
}

Ratio improvement(std::int64_t baseline, std::int64_t current, const char* what) {
  if (baseline == 0) {
    throw Error(Err::DivisionByZeroBaseline, std::string(what) + " baseline is zero");
  }
  return Ratio::of(current - baseline, baseline);
}

Ratio share(std::int64_t part, std::int64_t total, const char* what) {
  if (total == 0) {
    throw Error(Err::DivisionByZeroBaseline, std::string(what) + " total is zero");
  }
  return Ratio::of(part, total);
}

}  // namespace

const char* perspective_name(Perspective p) {
  switch (p) {
    case Perspective::Financial: return "FINANCIAL";
    case Perspective::Customer: return "CUSTOMER";
    case Perspective::Internal: return "INTERNAL";
  }
  return "?";
}

const char* direction_name(Direction d) {
  return d == Direction::AtLeast ? "at_least" : "at_most";
}

OperationalInputs parse_operational_inputs(std::string_view bytes) {
  if (!valid_utf8(bytes)) throw Error(Err::UndecodableInput, "inputs file is not valid UTF-8");
  LineReader reader(bytes);
  std::string_view line;
  if (!reader.next(line) || line != kInputsHeader) {
    throw Error(Err::BadHeader, "operational inputs header mismatch");
  }
  std::vector<std::vector<std::string>> rows;
  while (reader.next(line)) {
    if (line.empty()) continue;
    auto fields = csv_split(line);
    if (!fields || fields->size() != 24) {
      throw Error(Err::MalformedRow, "inputs line " + std::to_string(reader.line_number()));
    }
    rows.push_back(std::move(*fields));
  }
  if (rows.size() != 1) {
    throw Error(Err::MalformedRow, "expected exactly one period-pair row, got " +
                                       std::to_string(rows.size()));
  }
  const auto& f = rows[0];
  auto fail = [&](const char* what) {
    throw Error(Err::MalformedRow, std::string("bad inputs field: ") + what);
  };

  OperationalInputs in;
  in.baseline_label = f[0];
  in.current_label = f[1];
  auto date = [&](const std::string& s, const char* what) {
    auto epoch = parse_date(s);
    if (!epoch) fail(what);
    return date_key_from_epoch(*epoch);
  };
  in.baseline_start = date(f[2], "baseline_start");
  in.baseline_end = date(f[3], "baseline_end");
  in.current_start = date(f[4], "current_start");
  in.current_end = date(f[5], "current_end");

  auto money = [&](const std::string& s, const char* what) {
    auto m = parse_money(s);
    if (!m || m->cents < 0) fail(what);
    return *m;
  };
  in.investment_cost = money(f[6], "investment_cost");
  in.measured_benefit = money(f[7], "measured_benefit");
  in.shrinkage_baseline = money(f[8], "shrinkage_baseline");
  in.shrinkage_current = money(f[9], "shrinkage_current");
  in.ops_cost_baseline = money(f[10], "ops_cost_baseline");
  in.ops_cost_current = money(f[11], "ops_cost_current");

  auto scaled = [&](const std::string& s, const char* what) {
    auto v = parse_scaled4(s);
    if (!v || *v < 0) fail(what);
    return *v;
  };
  in.checkout_seconds_baseline = scaled(f[12], "checkout_seconds_baseline");
  in.checkout_seconds_current = scaled(f[13], "checkout_seconds_current");

  auto count = [&](const std::string& s, const char* what) {
    auto v = parse_int(s);
    if (!v || *v < 0) fail(what);
    return *v;
  };
  in.cc_orders_total = count(f[14], "cc_orders_total");
  in.cc_orders_accurate = count(f[15], "cc_orders_accurate");
  in.survey_score_baseline = scaled(f[16], "survey_score_baseline");
  in.survey_score_current = scaled(f[17], "survey_score_current");
  in.inventory_counted_correct = count(f[18], "inventory_counted_correct");
  in.inventory_counted_total = count(f[19], "inventory_counted_total");
  in.sku_days_out_of_stock = count(f[20], "sku_days_out_of_stock");
  in.sku_days_total = count(f[21], "sku_days_total");
  if (!f[22].empty()) in.sku_days_out_of_stock_baseline = count(f[22], "sku_days_oos_baseline");
  if (!f[23].empty()) in.sku_days_total_baseline = count(f[23], "sku_days_total_baseline");

  if (in.cc_orders_accurate > in.cc_orders_total) fail("cc accurate exceeds total");
  if (in.inventory_counted_correct > in.inventory_counted_total) {
    fail("inventory correct exceeds total");
  }
  if (in.sku_days_out_of_stock > in.sku_days_total) fail("sku-days out exceed total");
  if (in.sku_days_out_of_stock_baseline && in.sku_days_total_baseline &&
      *in.sku_days_out_of_stock_baseline > *in.sku_days_total_baseline) {
    fail("baseline sku-days out exceed total");
  }
  return in;
}

Money period_revenue(const Warehouse& wh, std::int32_t from_date_key, std::int32_t to_date_key) {
  Money total;
  bool any = false;
  for (const FactSalesRow& r : wh.fact_sales()) {
    if (r.date_key >= from_date_key && r.date_key <= to_date_key) {
      total += r.revenue;
      any = true;
    }
  }
  if (!any) {
    throw Error(Err::MissingPeriod, "no sales between " + date_string_from_key(from_date_key) +
                                        " and " + date_string_from_key(to_date_key));
  }
  return total;
}

std::vector<KpiValue> compute_kpis(const OperationalInputs& in, Money revenue_baseline,
                                   Money revenue_current) {
  std::vector<KpiValue> kpis;
  if (in.investment_cost.cents == 0) {
    throw Error(Err::DivisionByZeroBaseline, "investment_cost is zero");
  }
  kpis.push_back({"roi", Ratio::of(in.measured_benefit.cents - in.investment_cost.cents,
                                   in.investment_cost.cents)});
  kpis.push_back({"sales_uplift",
                  improvement(revenue_baseline.cents, revenue_current.cents, "revenue")});
  kpis.push_back({"shrinkage_reduction",
                  reduction(in.shrinkage_baseline.cents, in.shrinkage_current.cents,
                            "shrinkage")});
  kpis.push_back({"ops_cost_reduction",
                  reduction(in.ops_cost_baseline.cents, in.ops_cost_current.cents, "ops cost")});
  kpis.push_back({"checkout_time_reduction",
                  reduction(in.checkout_seconds_baseline, in.checkout_seconds_current,
                            "checkout time")});
  kpis.push_back({"cc_accuracy",
                  share(in.cc_orders_accurate, in.cc_orders_total, "click-and-collect")});
  kpis.push_back({"survey_improvement",
                  improvement(in.survey_score_baseline, in.survey_score_current, "survey")});
  kpis.push_back({"inventory_accuracy",
                  share(in.inventory_counted_correct, in.inventory_counted_total, "inventory")});
  kpis.push_back({"out_of_stock_rate",
                  share(in.sku_days_out_of_stock, in.sku_days_total, "sku-days")});
  if (in.sku_days_out_of_stock_baseline && in.sku_days_total_baseline) {
    // (rate_b - rate_c) / rate_b as an exact rational
    std::int64_t ob = *in.sku_days_out_of_stock_baseline;
    std::int64_t tb = *in.sku_days_total_baseline;
    std::int64_t oc = in.sku_days_out_of_stock;
    std::int64_t tc = in.sku_days_total;
    if (ob == 0 || tb == 0) {
      throw Error(Err::DivisionByZeroBaseline, "baseline sku-days are zero");
    }
    if (tc == 0) throw Error(Err::DivisionByZeroBaseline, "sku_days_total is zero");
    kpis.push_back({"out_of_stock_reduction", Ratio::of(ob * tc - oc * tb, ob * tc)});
  }
  return kpis;
}

TargetConfig parse_targets(std::string_view bytes) {
  if (!valid_utf8(bytes)) throw Error(Err::UndecodableInput, "targets file is not valid UTF-8");
  TargetConfig config;
  LineReader reader(bytes);
  std::string_view line;
  while (reader.next(line)) {
    std::string_view trimmed = line;
    while (!trimmed.empty() && (trimmed.front() == ' ' || trimmed.front() == '\t')) {
      trimmed.remove_prefix(1);
    }
    if (trimmed.empty() || trimmed.front() == '#') continue;
    std::size_t eq = trimmed.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Err::MalformedRow, "targets line " + std::to_string(reader.line_number()));
    }
    auto strip = [](std::string_view s) {
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
      while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
      }
      return s;
    };
    std::string key{strip(trimmed.substr(0, eq))};
    std::string value{strip(trimmed.substr(eq + 1))};
    if (key.empty() || value.empty()) {
      throw Error(Err::MalformedRow, "targets line " + std::to_string(reader.line_number()));
    }
    if (key.find('.') != std::string::npos) {
      config.annotations[key] = value;
      continue;
    }

    std::istringstream tokens(value);
    std::string direction, threshold, perspective, extra;
    tokens >> direction >> threshold >> perspective;
    TargetSpec spec;
    spec.name = key;
    spec.kpi = key;
    if (direction == "at_least") spec.direction = Direction::AtLeast;
    else if (direction == "at_most") spec.direction = Direction::AtMost;
    else throw Error(Err::MalformedRow, "bad direction in target " + key);
    auto ratio = parse_ratio(threshold);
    if (!ratio) throw Error(Err::MalformedRow, "bad threshold in target " + key);
    spec.threshold = *ratio;
    if (perspective == "financial") spec.perspective = Perspective::Financial;
    else if (perspective == "customer") spec.perspective = Perspective::Customer;
    else if (perspective == "internal") spec.perspective = Perspective::Internal;
    else throw Error(Err::MalformedRow, "bad perspective in target " + key);
    while (tokens >> extra) {
      if (extra.rfind("kpi=", 0) == 0) spec.kpi = extra.substr(4);
      else throw Error(Err::MalformedRow, "unexpected token in target " + key);
    }
    config.targets.push_back(std::move(spec));
  }
  return config;
}

Scorecard evaluate(const std::vector<KpiValue>& kpis, const TargetConfig& config) {
  auto find_kpi = [&](const std::string& name) -> const KpiValue* {
    for (const KpiValue& k : kpis) {
      if (k.name == name) return &k;
    }
    return nullptr;
  };

  Scorecard card;
  card.annotations = config.annotations;
  for (Perspective p : {Perspective::Financial, Perspective::Customer, Perspective::Internal}) {
    for (const TargetSpec& spec : config.targets) {
      if (spec.perspective != p) continue;
      const KpiValue* kpi = find_kpi(spec.kpi);
      if (!kpi) {
        throw Error(Err::UnknownKpiInConfig, "target " + spec.name + " references unknown KPI '" +
                                                 spec.kpi + "'");
      }
      ScorecardEntry entry;
      entry.name = spec.name;
      entry.perspective = p;
      entry.kpi = spec.kpi;
      entry.value = kpi->value;
      entry.direction = spec.direction;
      entry.threshold = spec.threshold;
      int cmp = kpi->value.cmp(spec.threshold);
      entry.met = spec.direction == Direction::AtLeast ? cmp >= 0 : cmp <= 0;
      card.entries.push_back(std::move(entry));
    }
  }
  return card;
}

std::string Scorecard::to_text() const {
  std::ostringstream out;
  Perspective last = Perspective::Internal;
  bool first = true;
  for (const ScorecardEntry& e : entries) {
    if (first || e.perspective != last) {
      if (!first) out << '\n';
      out << perspective_name(e.perspective) << '\n';
      last = e.perspective;
      first = false;
    }
    char line[200];
    std::snprintf(line, sizeof line, "  %-32s %10s  %s %8s  %s\n", e.name.c_str(),
                  e.value.render4().c_str(), direction_name(e.direction),
                  e.threshold.render4().c_str(), e.met ? "met" : "NOT MET");
    out << line;
  }
  if (!annotations.empty()) {
    out << '\n';
    for (const auto& [key, value] : annotations) out << key << " = " << value << '\n';
  }
  return out.str();
}

std::string Scorecard::to_json_text() const {
  json jentries = json::array();
  for (const ScorecardEntry& e : entries) {
    jentries.push_back({{"name", e.name},
                        {"perspective", perspective_name(e.perspective)},
                        {"kpi", e.kpi},
                        {"value", e.value.render4()},
                        {"direction", direction_name(e.direction)},
                        {"target", e.threshold.render4()},
                        {"met", e.met}});
  }
  json doc = {{"entries", jentries}, {"annotations", annotations}};
  return doc.dump(2) + "\n";
}

}  // namespace retail
