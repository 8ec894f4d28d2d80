#include "retail/journey.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace retail {

using nlohmann::json;

const char* coverage_name(Coverage c) {
  switch (c) {
    case Coverage::Both: return "BOTH";
    case Coverage::PosOnly: return "POS_ONLY";
    case Coverage::RfidOnly: return "RFID_ONLY";
    case Coverage::None: return "NONE";
  }
  return "NONE";
}

JourneyProfile build_profile(const Warehouse& wh, const std::string& customer_id,
                             std::int32_t date_key) {
  const DmCustomer* customer = wh.find_customer_by_id(customer_id);
  if (!customer) {
    throw Error(Err::UnknownCustomer, "customer " + customer_id + " is unknown to the warehouse");
  }

  JourneyProfile profile;
  profile.customer_id = customer_id;
  profile.date_key = date_key;

  // purchases: aggregate receipt lines to per-product entries, catalog order
  std::map<std::int32_t, ProductPurchase> by_product;
  for (const FactSalesRow& r : wh.fact_sales()) {
    if (r.customer_key != customer->customer_key || r.date_key != date_key) continue;
    const DmProduct* p = wh.find_product(r.product_key);
    ProductPurchase& entry = by_product[r.product_key];
    if (entry.sku_key.empty() && p) {
      entry.sku_key = p->sku_key;
      entry.product_name = p->product_name;
    }
    entry.quantity += r.quantity;
    entry.revenue += r.revenue;
    profile.total_items += r.quantity;
    profile.total_revenue += r.revenue;
  }
  for (auto& [key, entry] : by_product) profile.purchases.push_back(std::move(entry));

  // behaviour: per-zone aggregates
  std::map<std::int32_t, ZoneBehaviour> by_zone;
  for (const FactBehaviourRow& r : wh.fact_behaviour()) {
    if (r.customer_key != customer->customer_key || r.date_key != date_key) continue;
    ZoneBehaviour& zone = by_zone[r.area_key];
    zone.area_key = r.area_key;
    if (zone.area_name.empty()) {
      const AreaRow* a = wh.find_area(r.area_key);
      zone.area_name = a ? a->area_name : std::to_string(r.area_key);
    }
    zone.dwell_s += r.duration_s;
    if (r.movement_key == 1) zone.stop_s += r.duration_s;
    zone.visit_count += r.visit;
    profile.total_movement_s += r.duration_s;
    profile.total_visits += r.visit;
    profile.total_distance_m += r.distance_m;
  }
  for (auto& [key, zone] : by_zone) profile.behaviour.push_back(std::move(zone));

  bool has_pos = !profile.purchases.empty();
  bool has_rfid = !profile.behaviour.empty();
  profile.coverage = has_pos && has_rfid ? Coverage::Both
                     : has_pos           ? Coverage::PosOnly
                     : has_rfid          ? Coverage::RfidOnly
                                         : Coverage::None;

  // conversion flags across every real zone
  std::set<std::int32_t> bought_zones;
  for (const FactSalesRow& r : wh.fact_sales()) {
    if (r.customer_key == customer->customer_key && r.date_key == date_key) {
      bought_zones.insert(r.area_key);
    }
  }
  for (const AreaRow& a : wh.areas()) {
    if (a.area_key == 0) continue;
    ZoneConversionFlag flag;
    flag.area_key = a.area_key;
    flag.area_name = a.area_name;
    auto it = by_zone.find(a.area_key);
    flag.visited = it != by_zone.end() && it->second.dwell_s > 0;
    flag.purchased_here = bought_zones.count(a.area_key) > 0;
    profile.conversions.push_back(std::move(flag));
  }
  return profile;
}

std::string JourneyProfile::to_text() const {
  std::ostringstream out;
  out << "customer " << customer_id << "  date " << date_string_from_key(date_key)
      << "  coverage " << coverage_name(coverage) << "\n\n";

  out << "purchases\n";
  out << "  sku            product                        qty      revenue\n";
  for (const ProductPurchase& p : purchases) {
    char line[160];
    std::snprintf(line, sizeof line, "  %-14s %-28s %5lld %12s\n", p.sku_key.c_str(),
                  p.product_name.c_str(), static_cast<long long>(p.quantity),
                  format_money(p.revenue).c_str());
    out << line;
  }
  out << "  total items = " << total_items << ", total revenue = " << format_money(total_revenue)
      << "\n\n";

  out << "behaviour\n";
  out << "  zone                 dwell_s   stop_s  visits\n";
  for (const ZoneBehaviour& z : behaviour) {
    char line[160];
    std::snprintf(line, sizeof line, "  %-18s %9s %8s %7lld\n", z.area_name.c_str(),
                  format_double(z.dwell_s).c_str(), format_double(z.stop_s).c_str(),
                  static_cast<long long>(z.visit_count));
    out << line;
  }
  out << "  total movement = " << format_double(total_movement_s)
      << " s, total visits = " << total_visits
      << ", total distance = " << format_double(total_distance_m) << " m\n\n";

  out << "conversions\n";
  for (const ZoneConversionFlag& c : conversions) {
    out << "  " << c.area_name << ": visited=" << (c.visited ? "yes" : "no")
        << " purchased=" << (c.purchased_here ? "yes" : "no") << '\n';
  }
  return out.str();
}

std::string JourneyProfile::to_json_text() const {
  json jpurchases = json::array();
  for (const ProductPurchase& p : purchases) {
    jpurchases.push_back({{"sku_key", p.sku_key},
                          {"product_name", p.product_name},
                          {"quantity", p.quantity},
                          {"revenue", format_money(p.revenue)}});
  }
  json jzones = json::array();
  for (const ZoneBehaviour& z : behaviour) {
    jzones.push_back({{"area_key", z.area_key},
                      {"area_name", z.area_name},
                      {"dwell_s", z.dwell_s},
                      {"stop_s", z.stop_s},
                      {"visit_count", z.visit_count}});
  }
  json jconv = json::array();
  for (const ZoneConversionFlag& c : conversions) {
    jconv.push_back({{"area_key", c.area_key},
                     {"area_name", c.area_name},
                     {"visited", c.visited},
                     {"purchased_here", c.purchased_here}});
  }
  json doc = {{"customer_id", customer_id},
              {"date", date_string_from_key(date_key)},
              {"coverage", coverage_name(coverage)},
              {"purchases", jpurchases},
              {"purchase_totals",
               {{"total_items", total_items}, {"total_revenue", format_money(total_revenue)}}},
              {"behaviour", jzones},
              {"behaviour_totals",
               {{"total_movement_s", total_movement_s},
                {"total_visits", total_visits},
                {"total_distance_m", total_distance_m}}},
              {"conversions", jconv}};
  return doc.dump(2) + "\n";
}

std::string ZoneConversionRow::render_conversion() const {
  if (visitors == 0) return "0.0000";
  return Ratio::of(buyers, visitors).render4();
}

std::vector<ZoneConversionRow> zone_conversion(const Warehouse& wh, std::int32_t from_date_key,
                                               std::int32_t to_date_key) {
  if (!valid_date_key(from_date_key) || !valid_date_key(to_date_key) ||
      from_date_key > to_date_key) {
    throw Error(Err::EmptyRange, "empty or invalid date range");
  }
  auto in_range = [&](std::int32_t dk) { return dk >= from_date_key && dk <= to_date_key; };

  std::map<std::int32_t, std::set<std::int32_t>> visitors;  // area -> customer keys
  for (const FactBehaviourRow& r : wh.fact_behaviour()) {
    if (!in_range(r.date_key) || r.area_key == 0 || r.duration_s <= 0) continue;
    visitors[r.area_key].insert(r.customer_key);
  }
  std::map<std::int32_t, std::set<std::int32_t>> buyers;
  for (const FactSalesRow& r : wh.fact_sales()) {
    if (!in_range(r.date_key) || r.area_key == 0) continue;
    buyers[r.area_key].insert(r.customer_key);
  }

  std::vector<ZoneConversionRow> rows;
  for (const AreaRow& a : wh.areas()) {
    if (a.area_key == 0) continue;
    ZoneConversionRow row;
    row.area_key = a.area_key;
    row.area_name = a.area_name;
    auto v = visitors.find(a.area_key);
    auto b = buyers.find(a.area_key);
    row.visitors = v == visitors.end() ? 0 : static_cast<std::int64_t>(v->second.size());
    row.buyers = b == buyers.end() ? 0 : static_cast<std::int64_t>(b->second.size());
    row.conversion = row.visitors > 0
                         ? static_cast<double>(row.buyers) / static_cast<double>(row.visitors)
                         : 0.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string zone_conversion_to_csv(const std::vector<ZoneConversionRow>& rows) {
  std::string out = "area_key,area_name,visitors,buyers,conversion\n";
  for (const ZoneConversionRow& r : rows) {
    out += csv_join({std::to_string(r.area_key), r.area_name, std::to_string(r.visitors),
                     std::to_string(r.buyers), r.render_conversion()});
    out += '\n';
  }
  return out;
}

}  // namespace retail
