#include "retail/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "retail/ingest.hpp"

namespace retail {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kAisleY = 15.0;      // central aisle centerline
constexpr double kEntranceX = 0.5;    // west margin corridor
constexpr double kEntranceY = 0.5;

double round2(double v) { return std::round(v * 100.0) / 100.0; }

struct PathPoint {
  double x, y;
};

// One constant-speed polyline leg plus the dwell that follows it.
struct TimelinePiece {
  double t0, t1;
  PathPoint a, b;
};

struct WalkPlan {
  std::vector<TimelinePiece> pieces;  // contiguous, cover [0, session_len]
  double session_len = 0;
  std::vector<TruthStop> stops;
  double transit_s = 0;
};

double seg_len(PathPoint a, PathPoint b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y));
}

// Route between two floor points via the aisle: vertical to the aisle
// centerline, horizontal, vertical to the target.
std::vector<PathPoint> route(PathPoint from, PathPoint to) {
  std::vector<PathPoint> pts;
  pts.push_back(from);
  if (from.x != to.x) {
    if (from.y != kAisleY) pts.push_back({from.x, kAisleY});
    pts.push_back({to.x, kAisleY});
  }
  if (pts.back().x != to.x || pts.back().y != to.y) pts.push_back(to);
  return pts;
}

// Walks the aisle route at constant speed, with the leg duration rounded to
// whole seconds (speed = length / duration). Every arrival and departure then
// falls exactly on a sampling tick: no ping ever lands in the ambiguous
// near-radius band around a stop, so stop windows can neither absorb walking
// fixes nor get truncated by them.
void append_leg(WalkPlan& plan, double& t, PathPoint from, PathPoint to, double target_speed) {
  std::vector<PathPoint> pts = route(from, to);
  double total = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) total += seg_len(pts[i], pts[i + 1]);
  if (total == 0) return;
  double duration = std::max<double>(1.0, std::llround(total / target_speed));
  double t0 = t;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double len = seg_len(pts[i], pts[i + 1]);
    if (len == 0) continue;
    double dur = duration * (len / total);
    plan.pieces.push_back({t, t + dur, pts[i], pts[i + 1]});
    t += dur;
  }
  // land exactly on the tick despite the proportional-split rounding residue
  t = t0 + duration;
  plan.pieces.back().t1 = t;
  plan.transit_s += duration;
}

void append_dwell(WalkPlan& plan, double& t, PathPoint at, double seconds) {
  plan.pieces.push_back({t, t + seconds, at, at});
  t += seconds;
}

PathPoint position_at(const WalkPlan& plan, double t) {
  for (const TimelinePiece& piece : plan.pieces) {
    if (t <= piece.t1) {
      double span = piece.t1 - piece.t0;
      double f = span > 0 ? (t - piece.t0) / span : 0.0;
      return {piece.a.x + f * (piece.b.x - piece.a.x), piece.a.y + f * (piece.b.y - piece.a.y)};
    }
  }
  return plan.pieces.back().b;
}

struct CatalogEntry {
  std::string sku_key;
  std::string product_name;
  std::string supplier_name;
  std::int32_t area_key;
  std::string area_name;
  Money unit_price;
  Money unit_cost;
  std::int64_t stock;
};

const char* kSuppliers[] = {"Northline Foods",  "Vega Distribution", "Crate & Pallet Co",
                            "Harbor Wholesale", "Pominor Group",     "Blue Spruce Trading"};
const char* kLocations[] = {"Moscow",  "Kazan",  "Tver",   "Samara",
                            "Kaluga",  "Ryazan", "Izhevsk", "Perm"};

std::vector<CatalogEntry> build_catalog(const SimConfig& cfg, const StoreMap& map,
                                        Xoshiro256 rng) {
  std::vector<CatalogEntry> catalog;
  for (const Zone& z : map.zones()) {
    for (int i = 0; i < cfg.products_per_zone; ++i) {
      CatalogEntry e;
      char sku[32];
      std::snprintf(sku, sizeof sku, "SKU-%02d-%03d", z.sequence_index, i + 1);
      e.sku_key = sku;
      char name[64];
      std::snprintf(name, sizeof name, "%s Item %02d", z.area_name.c_str(), i + 1);
      e.product_name = name;
      e.supplier_name = kSuppliers[rng.below(std::size(kSuppliers))];
      e.area_key = z.area_key;
      e.area_name = z.area_name;
      e.unit_price = Money{rng.range_int(cfg.price_min.cents, cfg.price_max.cents)};
      double frac = rng.range_double(cfg.cost_fraction_min, cfg.cost_fraction_max);
      e.unit_cost = Money{static_cast<std::int64_t>(
          std::llround(static_cast<double>(e.unit_price.cents) * frac))};
      e.stock = rng.range_int(cfg.stock_min, cfg.stock_max);
      catalog.push_back(std::move(e));
    }
  }
  return catalog;
}

struct Corrupter {
  Xoshiro256 rng;
  double rate;

  // Mangles `fields` in place; returns the reject reason, or nullptr when the
  // row stays clean.
  const char* maybe_corrupt_ping(std::vector<std::string>& fields) {
    if (rng.uniform01() >= rate) return nullptr;
    switch (rng.below(6)) {
      case 0: fields[2] = "abc"; return "BAD_NUMBER";
      case 1: fields[1] = "2025-13-40T99:00:00Z"; return "BAD_TIMESTAMP";
      case 2: fields.pop_back(); return "BAD_COLUMN_COUNT";
      case 3: fields[4] = "XXX"; return "BAD_STATUS";
      case 4: fields[0] = ""; return "EMPTY_FIELD";
      default: fields[3] = "99999"; return "OUT_OF_BOUNDS";
    }
  }

  const char* maybe_corrupt_pos(std::vector<std::string>& fields) {
    if (rng.uniform01() >= rate) return nullptr;
    switch (rng.below(5)) {
      case 0: fields[5] = "two"; return "BAD_NUMBER";
      case 1: {
        auto m = parse_money(fields[7]);
        fields[7] = format_money(Money{m->cents + 1});
        return "TOTAL_MISMATCH";
      }
      case 2: fields[6] = "1.999"; return "BAD_MONEY";
      case 3: fields.pop_back(); return "BAD_COLUMN_COUNT";
      default: fields[5] = "0"; return "NON_POSITIVE_QTY";
    }
  }
};

}  // namespace

std::vector<Zone> SimConfig::default_zones() {
  const char* south[] = {"Produce", "Bakery", "Dairy", "Meat", "Seafood", "Frozen"};
  const char* north[] = {"Beverages", "Snacks", "Household", "Beauty", "Electronics", "Apparel"};
  std::vector<Zone> zones;
  for (int i = 0; i < 6; ++i) {
    Zone z;
    z.area_name = south[i];
    z.x0 = 1.0 + 7.0 * i;
    z.x1 = z.x0 + 6.0;
    z.y0 = 1.0;
    z.y1 = 14.0;
    z.sequence_index = i;
    zones.push_back(z);
  }
  for (int i = 0; i < 6; ++i) {
    Zone z;
    z.area_name = north[i];
    z.x0 = 1.0 + 7.0 * i;
    z.x1 = z.x0 + 6.0;
    z.y0 = 16.0;
    z.y1 = 29.0;
    z.sequence_index = 6 + i;
    zones.push_back(z);
  }
  return zones;
}

void SimConfig::validate() const {
  auto bad = [](const std::string& what) { throw Error(Err::InvalidConfig, what); };
  if (n_customers < 1) bad("n_customers must be >= 1");
  if (n_days < 1) bad("n_days must be >= 1");
  if (!parse_date(start_date)) bad("start_date must be YYYY-MM-DD");
  if (visit_probability < 0 || visit_probability > 1) bad("visit_probability outside [0,1]");
  if (buy_probability < 0 || buy_probability > 1) bad("buy_probability outside [0,1]");
  if (corruption_rate < 0 || corruption_rate > 1) bad("corruption_rate outside [0,1]");
  if (dwell_min_s < 1 || dwell_min_s > dwell_max_s) bad("dwell bounds out of order");
  if (!(speed_min_m_s > 0) || speed_min_m_s > speed_max_m_s) bad("speed bounds out of order");
  if (jitter_m < 0 || jitter_m > 0.4) bad("jitter_m outside [0, 0.4]");
  if (line_items_min < 1 || line_items_min > line_items_max) bad("line_items out of order");
  if (quantity_min < 1 || quantity_min > quantity_max) bad("quantity bounds out of order");
  if (products_per_zone < 1) bad("products_per_zone must be >= 1");
  if (products_per_zone < line_items_max) bad("line_items_max exceeds products_per_zone");
  if (price_min.cents < 1 || price_min.cents > price_max.cents) bad("price bounds out of order");
  if (cost_fraction_min < 0 || cost_fraction_min > cost_fraction_max || cost_fraction_max > 1) {
    bad("cost_fraction bounds out of order");
  }
  if (stock_min < 0 || stock_min > stock_max) bad("stock bounds out of order");
}

SimConfig SimConfig::from_json_text(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(Err::InvalidConfig, "config is not a JSON object");
  }
  SimConfig cfg;
  try {
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("n_customers")) cfg.n_customers = doc["n_customers"].get<int>();
    if (doc.contains("n_days")) cfg.n_days = doc["n_days"].get<int>();
    if (doc.contains("start_date")) cfg.start_date = doc["start_date"].get<std::string>();
    if (doc.contains("visit_probability"))
      cfg.visit_probability = doc["visit_probability"].get<double>();
    if (doc.contains("dwell_s")) {
      cfg.dwell_min_s = doc["dwell_s"].at(0).get<int>();
      cfg.dwell_max_s = doc["dwell_s"].at(1).get<int>();
    }
    if (doc.contains("walk_speed_m_s")) {
      cfg.speed_min_m_s = doc["walk_speed_m_s"].at(0).get<double>();
      cfg.speed_max_m_s = doc["walk_speed_m_s"].at(1).get<double>();
    }
    if (doc.contains("jitter_m")) cfg.jitter_m = doc["jitter_m"].get<double>();
    if (doc.contains("buy_probability")) cfg.buy_probability = doc["buy_probability"].get<double>();
    if (doc.contains("line_items")) {
      cfg.line_items_min = doc["line_items"].at(0).get<int>();
      cfg.line_items_max = doc["line_items"].at(1).get<int>();
    }
    if (doc.contains("quantity")) {
      cfg.quantity_min = doc["quantity"].at(0).get<int>();
      cfg.quantity_max = doc["quantity"].at(1).get<int>();
    }
    if (doc.contains("products_per_zone"))
      cfg.products_per_zone = doc["products_per_zone"].get<int>();
    if (doc.contains("unit_price")) {
      auto lo = parse_money(doc["unit_price"].at(0).get<std::string>());
      auto hi = parse_money(doc["unit_price"].at(1).get<std::string>());
      if (!lo || !hi) throw Error(Err::InvalidConfig, "unit_price bounds must be money strings");
      cfg.price_min = *lo;
      cfg.price_max = *hi;
    }
    if (doc.contains("cost_fraction")) {
      cfg.cost_fraction_min = doc["cost_fraction"].at(0).get<double>();
      cfg.cost_fraction_max = doc["cost_fraction"].at(1).get<double>();
    }
    if (doc.contains("stock")) {
      cfg.stock_min = doc["stock"].at(0).get<int>();
      cfg.stock_max = doc["stock"].at(1).get<int>();
    }
    if (doc.contains("corruption_rate")) cfg.corruption_rate = doc["corruption_rate"].get<double>();
    if (doc.contains("emit_status")) cfg.emit_status = doc["emit_status"].get<bool>();
    if (doc.contains("zones")) {
      for (const auto& jz : doc["zones"]) {
        Zone z;
        z.area_name = jz.at("area_name").get<std::string>();
        z.x0 = jz.at("x0").get<double>();
        z.y0 = jz.at("y0").get<double>();
        z.x1 = jz.at("x1").get<double>();
        z.y1 = jz.at("y1").get<double>();
        z.sequence_index = jz.at("sequence_index").get<std::int32_t>();
        cfg.zones.push_back(std::move(z));
      }
    }
  } catch (const json::exception& e) {
    throw Error(Err::InvalidConfig, std::string("bad config field: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string SimConfig::to_json_text() const {
  json doc = {
      {"seed", seed},
      {"n_customers", n_customers},
      {"n_days", n_days},
      {"start_date", start_date},
      {"visit_probability", visit_probability},
      {"dwell_s", {dwell_min_s, dwell_max_s}},
      {"walk_speed_m_s", {speed_min_m_s, speed_max_m_s}},
      {"jitter_m", jitter_m},
      {"buy_probability", buy_probability},
      {"line_items", {line_items_min, line_items_max}},
      {"quantity", {quantity_min, quantity_max}},
      {"products_per_zone", products_per_zone},
      {"unit_price", {format_money(price_min), format_money(price_max)}},
      {"cost_fraction", {cost_fraction_min, cost_fraction_max}},
      {"stock", {stock_min, stock_max}},
      {"corruption_rate", corruption_rate},
      {"emit_status", emit_status},
  };
  json jzones = json::array();
  const std::vector<Zone> zs = zones.empty() ? default_zones() : zones;
  for (const Zone& z : zs) {
    jzones.push_back({{"area_name", z.area_name},
                      {"x0", z.x0},
                      {"y0", z.y0},
                      {"x1", z.x1},
                      {"y1", z.y1},
                      {"sequence_index", z.sequence_index}});
  }
  doc["zones"] = jzones;
  return doc.dump(2) + "\n";
}

std::string GroundTruth::to_json_text() const {
  json jdays = json::array();
  for (const CustomerDayTruth& d : days) {
    json jstops = json::array();
    for (const TruthStop& s : d.itinerary) {
      jstops.push_back({{"area_key", s.area_key},
                        {"area_name", s.area_name},
                        {"arrive_s", s.arrive_s},
                        {"depart_s", s.depart_s},
                        {"dwell_s", s.dwell_s},
                        {"stop_x", s.stop_x},
                        {"stop_y", s.stop_y}});
    }
    json jdwell = json::object();
    for (const auto& [key, secs] : d.zone_dwell_s) jdwell[std::to_string(key)] = secs;
    json jlines = json::array();
    for (const TruthReceiptLine& l : d.receipts) {
      jlines.push_back({{"sku_key", l.sku_key},
                        {"product_name", l.product_name},
                        {"quantity", l.quantity},
                        {"unit_price", format_money(l.unit_price)},
                        {"line_total", format_money(l.line_total)},
                        {"area_key", l.area_key}});
    }
    jdays.push_back({{"customer_id", d.customer_id},
                     {"date_key", d.date_key},
                     {"session_start_ts", d.session_start_ts},
                     {"session_len_s", d.session_len_s},
                     {"n_pings", d.n_pings},
                     {"sampled_path_length_m", d.sampled_path_length_m},
                     {"itinerary", jstops},
                     {"transit_s", d.transit_s},
                     {"zone_dwell_s", jdwell},
                     {"receipts", jlines},
                     {"day_revenue", format_money(d.day_revenue)}});
  }
  json jcorrupt = json::array();
  for (const CorruptionRecord& c : corrupted) {
    jcorrupt.push_back({{"file", c.file}, {"data_row", c.data_row}, {"reason", c.reason}});
  }
  json doc = {{"days", jdays},
              {"corrupted", jcorrupt},
              {"ping_rows", ping_rows},
              {"pos_rows", pos_rows},
              {"total_revenue", format_money(total_revenue)}};
  return doc.dump(2) + "\n";
}

GeneratedCorpus generate_corpus(const SimConfig& config) {
  config.validate();
  GeneratedCorpus corpus;
  corpus.map = StoreMap::from_zones(config.zones.empty() ? SimConfig::default_zones()
                                                         : config.zones);
  const StoreMap& map = corpus.map;
  const Xoshiro256 master(config.seed);

  // --- catalog / cost ------------------------------------------------------
  std::vector<CatalogEntry> catalog = build_catalog(config, map, master.child(1));
  std::string catalog_csv = "sku_key,product_name,supplier_name,home_area_name,unit_price,stock\n";
  std::string cost_csv = "sku_key,unit_cost\n";
  for (const CatalogEntry& e : catalog) {
    catalog_csv += csv_join({e.sku_key, e.product_name, e.supplier_name, e.area_name,
                             format_money(e.unit_price), std::to_string(e.stock)});
    catalog_csv += '\n';
    cost_csv += csv_join({e.sku_key, format_money(e.unit_cost)});
    cost_csv += '\n';
  }
  // products of one zone occupy a contiguous catalog slice
  std::map<std::int32_t, std::pair<std::size_t, std::size_t>> zone_slice;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    auto& slice = zone_slice.try_emplace(catalog[i].area_key, i, i).first->second;
    slice.second = i;
  }

  // --- demographics --------------------------------------------------------
  std::string demo_csv = "customer_id,gender,age,location\n";
  std::vector<std::string> customer_ids;
  for (int c = 0; c < config.n_customers; ++c) {
    char id[16];
    std::snprintf(id, sizeof id, "C%04d", c + 1);
    customer_ids.push_back(id);
    Xoshiro256 rng = master.child(2, static_cast<std::uint64_t>(c));
    double g = rng.uniform01();
    const char* gender = g < 0.48 ? "F" : (g < 0.96 ? "M" : "");
    std::string age = rng.uniform01() < 0.05 ? std::string()
                                             : std::to_string(rng.range_int(16, 80));
    const char* location = kLocations[rng.below(std::size(kLocations))];
    demo_csv += csv_join({customer_ids.back(), gender, age, location});
    demo_csv += '\n';
  }

  // --- walks + purchases ---------------------------------------------------
  const std::int64_t day0 = *parse_date(config.start_date);
  std::vector<std::vector<std::string>> ping_rows;   // field lists, emission order
  std::vector<std::vector<std::string>> pos_rows;

  for (int c = 0; c < config.n_customers; ++c) {
    for (int d = 0; d < config.n_days; ++d) {
      Xoshiro256 rng = master.child(3, static_cast<std::uint64_t>(c) * 10007ull +
                                           static_cast<std::uint64_t>(d));
      CustomerDayTruth truth;
      truth.customer_id = customer_ids[c];
      const std::int64_t midnight = day0 + static_cast<std::int64_t>(d) * 86400;
      truth.date_key = date_key_from_epoch(midnight);

      // plan: which zones, how long, where exactly
      struct PlannedVisit {
        const Zone* zone;
        double dwell;
        PathPoint stop;
      };
      std::vector<PlannedVisit> visits;
      for (const Zone& z : map.zones()) {
        if (rng.uniform01() >= config.visit_probability) continue;
        PlannedVisit v;
        v.zone = &z;
        v.dwell = static_cast<double>(rng.range_int(config.dwell_min_s, config.dwell_max_s));
        double sx = round2(rng.range_double(z.x0 + 1.0, z.x1 - 1.0));
        double sy = round2((z.y0 + z.y1) / 2.0);
        v.stop = {sx, sy};
        visits.push_back(v);
      }

      // session start: 09:00 + up to 8 h
      const std::int64_t session_start = midnight + 32400 + rng.range_int(0, 28800);
      truth.session_start_ts = session_start;

      WalkPlan plan;
      double t = 0;
      PathPoint here{kEntranceX, kEntranceY};
      for (const PlannedVisit& v : visits) {
        double speed = rng.range_double(config.speed_min_m_s, config.speed_max_m_s);
        append_leg(plan, t, here, v.stop, speed);
        TruthStop stop;
        stop.area_key = v.zone->area_key;
        stop.area_name = v.zone->area_name;
        stop.arrive_s = t;
        append_dwell(plan, t, v.stop, v.dwell);
        stop.depart_s = t;
        stop.dwell_s = v.dwell;
        stop.stop_x = v.stop.x;
        stop.stop_y = v.stop.y;
        truth.itinerary.push_back(stop);
        truth.zone_dwell_s[v.zone->area_key] += v.dwell;
        here = v.stop;
      }
      {
        double speed = rng.range_double(config.speed_min_m_s, config.speed_max_m_s);
        append_leg(plan, t, here, {kEntranceX, kEntranceY}, speed);
      }
      plan.session_len = t;
      truth.session_len_s = t;
      truth.transit_s = plan.transit_s;

      // 1 Hz sampling with per-ping jitter
      const std::size_t n_pings = static_cast<std::size_t>(std::floor(plan.session_len)) + 1;
      truth.n_pings = n_pings;
      double prev_x = 0, prev_y = 0;
      for (std::size_t k = 0; k < n_pings; ++k) {
        PathPoint p = position_at(plan, static_cast<double>(k));
        double angle = rng.uniform01() * 6.283185307179586;
        double radius = config.jitter_m * std::sqrt(rng.uniform01());
        double px = round2(p.x + radius * std::cos(angle));
        double py = round2(p.y + radius * std::sin(angle));
        if (k > 0) {
          double dx = px - prev_x, dy = py - prev_y;
          truth.sampled_path_length_m += std::sqrt(dx * dx + dy * dy);
        }
        prev_x = px;
        prev_y = py;

        std::string status;
        if (config.emit_status) {
          double tk = static_cast<double>(k);
          bool stopped = false;
          for (const TruthStop& s : truth.itinerary) {
            if (tk >= s.arrive_s && tk <= s.depart_s) { stopped = true; break; }
          }
          status = stopped ? "SUS" : "MIG";
        }
        ping_rows.push_back({truth.customer_id,
                             format_iso_utc(session_start + static_cast<std::int64_t>(k)),
                             format_fixed(px, 2), format_fixed(py, 2), status});
      }

      // purchases at checkout
      const std::int64_t checkout_ts =
          session_start + static_cast<std::int64_t>(std::floor(plan.session_len));
      char receipt_id[48];
      std::snprintf(receipt_id, sizeof receipt_id, "R-%s-%d", truth.customer_id.c_str(),
                    truth.date_key);
      for (const TruthStop& stop : truth.itinerary) {
        if (rng.uniform01() >= config.buy_probability) continue;
        auto slice = zone_slice.at(stop.area_key);
        const std::size_t zone_products = slice.second - slice.first + 1;
        std::size_t k = static_cast<std::size_t>(
            rng.range_int(config.line_items_min,
                          std::min<std::int64_t>(config.line_items_max,
                                                 static_cast<std::int64_t>(zone_products))));
        // partial Fisher-Yates over the zone's catalog slice
        std::vector<std::size_t> idx(zone_products);
        std::iota(idx.begin(), idx.end(), slice.first);
        for (std::size_t pick = 0; pick < k; ++pick) {
          std::size_t swap_with = pick + rng.below(idx.size() - pick);
          std::swap(idx[pick], idx[swap_with]);
        }
        for (std::size_t pick = 0; pick < k; ++pick) {
          const CatalogEntry& e = catalog[idx[pick]];
          std::int64_t qty = rng.range_int(config.quantity_min, config.quantity_max);
          Money line_total = e.unit_price * qty;
          pos_rows.push_back({truth.customer_id, format_iso_utc(checkout_ts), receipt_id,
                              e.sku_key, e.product_name, std::to_string(qty),
                              format_money(e.unit_price), format_money(line_total)});
          truth.receipts.push_back(
              {e.sku_key, e.product_name, qty, e.unit_price, line_total, e.area_key});
          truth.day_revenue += line_total;
        }
      }
      corpus.truth.total_revenue += truth.day_revenue;
      corpus.truth.days.push_back(std::move(truth));
    }
  }

  // --- corruption pass -----------------------------------------------------
  Corrupter corrupter{master.child(4), config.corruption_rate};
  std::string pings_csv = std::string(kPingHeader) + "\n";
  std::string pos_csv = std::string(kPosHeader) + "\n";
  for (std::size_t i = 0; i < ping_rows.size(); ++i) {
    if (config.corruption_rate > 0) {
      if (const char* reason = corrupter.maybe_corrupt_ping(ping_rows[i])) {
        corpus.truth.corrupted.push_back({"pings", i + 1, reason});
      }
    }
    pings_csv += csv_join(ping_rows[i]);
    pings_csv += '\n';
  }
  for (std::size_t i = 0; i < pos_rows.size(); ++i) {
    if (config.corruption_rate > 0) {
      if (const char* reason = corrupter.maybe_corrupt_pos(pos_rows[i])) {
        corpus.truth.corrupted.push_back({"pos", i + 1, reason});
      }
    }
    pos_csv += csv_join(pos_rows[i]);
    pos_csv += '\n';
  }
  corpus.truth.ping_rows = ping_rows.size();
  corpus.truth.pos_rows = pos_rows.size();

  corpus.files["pings.csv"] = std::move(pings_csv);
  corpus.files["pos.csv"] = std::move(pos_csv);
  corpus.files["cost.csv"] = std::move(cost_csv);
  corpus.files["catalog.csv"] = std::move(catalog_csv);
  corpus.files["demographics.csv"] = std::move(demo_csv);
  corpus.files["zones.csv"] = map.to_csv();
  return corpus;
}

GeneratedCorpus generate_to_dir(const SimConfig& config, const fs::path& out_dir) {
  GeneratedCorpus corpus = generate_corpus(config);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(Err::StorageFailure, "cannot create output dir: " + ec.message());
  auto write = [&](const std::string& name, std::string_view bytes) {
    std::ofstream out(out_dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Err::StorageFailure, "cannot create " + (out_dir / name).string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out.flush()) throw Error(Err::StorageFailure, "short write: " + name);
  };
  for (const auto& [name, bytes] : corpus.files) write(name, bytes);
  write("ground_truth.json", corpus.truth.to_json_text());
  write("sim_config.json", config.to_json_text());
  return corpus;
}

}  // namespace retail
