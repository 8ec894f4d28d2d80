#include "retail/warehouse.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace retail {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Err::StorageFailure, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Err::StorageFailure, "cannot create " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(Err::StorageFailure, "short write to " + path.string());
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  write_file(tmp, bytes);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(Err::StorageFailure, "cannot publish " + path.string());
}

std::vector<std::vector<std::string>> read_table(const fs::path& path,
                                                 std::string_view expected_header) {
  std::string bytes = read_file(path);
  LineReader reader(bytes);
  std::string_view line;
  if (!reader.next(line) || line != expected_header) {
    throw Error(Err::StorageFailure, "unexpected header in " + path.string());
  }
  std::vector<std::vector<std::string>> rows;
  while (reader.next(line)) {
    if (line.empty()) continue;
    auto fields = csv_split(line);
    if (!fields) throw Error(Err::StorageFailure, "corrupt row in " + path.string());
    rows.push_back(std::move(*fields));
  }
  return rows;
}

constexpr std::string_view kProductsHeader =
    "product_key,sku_key,product_name,unit_price,supplier_key,home_area_key";
constexpr std::string_view kSuppliesHeader = "supplier_key,supplier_name";
constexpr std::string_view kCalendarHeader = "date_key,date,day,month,quarter,year";
constexpr std::string_view kCustomersHeader = "customer_key,customer_id,gender,age,location";
constexpr std::string_view kMovementHeader = "movement_key,movement";
constexpr std::string_view kAreaHeader = "area_key,area_name,x0,y0,x1,y1,sequence_index";
constexpr std::string_view kFactSalesHeader =
    "product_key,customer_key,date_key,area_key,quantity,quantity_purchased,sold,cost,revenue,"
    "profit,total_sales,margin,stock";
constexpr std::string_view kFactBehaviourHeader =
    "customer_key,date_key,area_key,movement_key,t_start,t_end,x,y,speed_m_s,distance_m,"
    "duration_s,visit";

std::int64_t want_int(const std::vector<std::string>& f, std::size_t i, const char* table) {
  auto v = parse_int(f.at(i));
  if (!v) throw Error(Err::StorageFailure, std::string("bad integer in ") + table);
  return *v;
}

double want_double(const std::vector<std::string>& f, std::size_t i, const char* table) {
  auto v = parse_double(f.at(i));
  if (!v) throw Error(Err::StorageFailure, std::string("bad number in ") + table);
  return *v;
}

Money want_money(const std::vector<std::string>& f, std::size_t i, const char* table) {
  auto v = parse_money(f.at(i));
  if (!v) throw Error(Err::StorageFailure, std::string("bad money in ") + table);
  return *v;
}

double want_time(const std::vector<std::string>& f, std::size_t i, const char* table) {
  auto v = parse_iso8601_frac(f.at(i));
  if (!v) throw Error(Err::StorageFailure, std::string("bad timestamp in ") + table);
  return *v;
}

}  // namespace

const char* gender_name(Gender g) {
  switch (g) {
    case Gender::M: return "M";
    case Gender::F: return "F";
    case Gender::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

Gender gender_from_string(std::string_view s) {
  if (s == "M") return Gender::M;
  if (s == "F") return Gender::F;
  return Gender::Unknown;
}

std::string render_margin(Money profit, Money revenue) {
  if (revenue.cents <= 0) return "0.0000";
  return Ratio::of(profit.cents, revenue.cents).render4();
}

std::string IntegrityReport::to_text() const {
  std::ostringstream out;
  out << "violations = " << violations.size() << '\n';
  for (const IntegrityViolation& v : violations) {
    out << v.table << " row " << v.row << ": " << v.what << '\n';
  }
  return out.str();
}

Warehouse::Warehouse(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw Error(Err::StorageFailure, "cannot create warehouse dir: " + ec.message());
  load_current();
  if (version_ == 0) {
    // reserved rows exist even before the first load
    customers_.push_back({0, "UNKNOWN", Gender::Unknown, std::nullopt, ""});
    customer_by_id_["UNKNOWN"] = 0;
    movement_.push_back({1, MovementKind::Stop});
    movement_.push_back({2, MovementKind::Move});
    areas_.push_back({0, "UNZONED", false, 0, 0, 0, 0, -1});
  }
}

void Warehouse::load_current() {
  fs::path manifest = dir_ / "manifest.json";
  if (!fs::exists(manifest)) return;
  json doc = json::parse(read_file(manifest), nullptr, false);
  if (doc.is_discarded()) {
    throw Error(Err::StorageFailure, "warehouse manifest is corrupt");
  }
  version_ = doc.at("version").get<std::int64_t>();
  for (const auto& b : doc.at("loaded_batches")) {
    loaded_batches_.push_back(b.get<std::int64_t>());
  }
  fs::path vdir = dir_ / doc.at("dir").get<std::string>();

  for (auto& f : read_table(vdir / "dm_products.csv", kProductsHeader)) {
    DmProduct p;
    p.product_key = static_cast<std::int32_t>(want_int(f, 0, "dm_products"));
    p.sku_key = f.at(1);
    p.product_name = f.at(2);
    p.unit_price = want_money(f, 3, "dm_products");
    p.supplier_key = static_cast<std::int32_t>(want_int(f, 4, "dm_products"));
    p.home_area_key = static_cast<std::int32_t>(want_int(f, 5, "dm_products"));
    product_by_sku_[p.sku_key] = p.product_key;
    products_.push_back(std::move(p));
  }
  for (auto& f : read_table(vdir / "dm_supplies.csv", kSuppliesHeader)) {
    DmSupplier s;
    s.supplier_key = static_cast<std::int32_t>(want_int(f, 0, "dm_supplies"));
    s.supplier_name = f.at(1);
    supplier_by_name_[s.supplier_name] = s.supplier_key;
    suppliers_.push_back(std::move(s));
  }
  for (auto& f : read_table(vdir / "dm_calendar.csv", kCalendarHeader)) {
    DmCalendarRow c;
    c.date_key = static_cast<std::int32_t>(want_int(f, 0, "dm_calendar"));
    c.date = f.at(1);
    c.day = static_cast<int>(want_int(f, 2, "dm_calendar"));
    c.month = static_cast<int>(want_int(f, 3, "dm_calendar"));
    c.quarter = static_cast<int>(want_int(f, 4, "dm_calendar"));
    c.year = static_cast<int>(want_int(f, 5, "dm_calendar"));
    calendar_.push_back(std::move(c));
  }
  for (auto& f : read_table(vdir / "dm_customers.csv", kCustomersHeader)) {
    DmCustomer c;
    c.customer_key = static_cast<std::int32_t>(want_int(f, 0, "dm_customers"));
    c.customer_id = f.at(1);
    c.gender = gender_from_string(f.at(2));
    if (!f.at(3).empty()) c.age = static_cast<int>(want_int(f, 3, "dm_customers"));
    c.location = f.at(4);
    customer_by_id_[c.customer_id] = c.customer_key;
    customers_.push_back(std::move(c));
  }
  for (auto& f : read_table(vdir / "dm_movement.csv", kMovementHeader)) {
    DmMovementRow m;
    m.movement_key = static_cast<std::int32_t>(want_int(f, 0, "dm_movement"));
    m.movement = f.at(1) == "STOP" ? MovementKind::Stop : MovementKind::Move;
    movement_.push_back(m);
  }
  for (auto& f : read_table(vdir / "area.csv", kAreaHeader)) {
    AreaRow a;
    a.area_key = static_cast<std::int32_t>(want_int(f, 0, "area"));
    a.area_name = f.at(1);
    a.has_geometry = !f.at(2).empty();
    if (a.has_geometry) {
      a.x0 = want_double(f, 2, "area");
      a.y0 = want_double(f, 3, "area");
      a.x1 = want_double(f, 4, "area");
      a.y1 = want_double(f, 5, "area");
      a.sequence_index = static_cast<std::int32_t>(want_int(f, 6, "area"));
    }
    areas_.push_back(std::move(a));
  }
  for (auto& f : read_table(vdir / "fact_sales.csv", kFactSalesHeader)) {
    FactSalesRow r;
    r.product_key = static_cast<std::int32_t>(want_int(f, 0, "fact_sales"));
    r.customer_key = static_cast<std::int32_t>(want_int(f, 1, "fact_sales"));
    r.date_key = static_cast<std::int32_t>(want_int(f, 2, "fact_sales"));
    r.area_key = static_cast<std::int32_t>(want_int(f, 3, "fact_sales"));
    r.quantity = want_int(f, 4, "fact_sales");
    r.quantity_purchased = want_int(f, 5, "fact_sales");
    r.sold = want_int(f, 6, "fact_sales");
    r.cost = want_money(f, 7, "fact_sales");
    r.revenue = want_money(f, 8, "fact_sales");
    r.profit = want_money(f, 9, "fact_sales");
    r.total_sales = want_money(f, 10, "fact_sales");
    r.margin = f.at(11);
    r.stock = want_int(f, 12, "fact_sales");
    fact_sales_.push_back(std::move(r));
  }
  for (auto& f : read_table(vdir / "fact_cust_behaviour.csv", kFactBehaviourHeader)) {
    FactBehaviourRow r;
    r.customer_key = static_cast<std::int32_t>(want_int(f, 0, "fact_cust_behaviour"));
    r.date_key = static_cast<std::int32_t>(want_int(f, 1, "fact_cust_behaviour"));
    r.area_key = static_cast<std::int32_t>(want_int(f, 2, "fact_cust_behaviour"));
    r.movement_key = static_cast<std::int32_t>(want_int(f, 3, "fact_cust_behaviour"));
    r.t_start = want_time(f, 4, "fact_cust_behaviour");
    r.t_end = want_time(f, 5, "fact_cust_behaviour");
    r.x = want_double(f, 6, "fact_cust_behaviour");
    r.y = want_double(f, 7, "fact_cust_behaviour");
    r.speed_m_s = want_double(f, 8, "fact_cust_behaviour");
    r.distance_m = want_double(f, 9, "fact_cust_behaviour");
    r.duration_s = want_double(f, 10, "fact_cust_behaviour");
    r.visit = static_cast<int>(want_int(f, 11, "fact_cust_behaviour"));
    fact_behaviour_.push_back(std::move(r));
  }
}

std::int32_t Warehouse::upsert_supplier(const std::string& supplier_name) {
  if (supplier_name.empty()) throw Error(Err::UnresolvedKey, "empty supplier name");
  auto it = supplier_by_name_.find(supplier_name);
  if (it != supplier_by_name_.end()) return it->second;
  std::int32_t key = static_cast<std::int32_t>(suppliers_.size()) + 1;
  suppliers_.push_back({key, supplier_name});
  supplier_by_name_[supplier_name] = key;
  dirty_ = true;
  return key;
}

std::int32_t Warehouse::upsert_product(const std::string& sku_key,
                                       const std::string& product_name, Money unit_price,
                                       std::int32_t supplier_key, std::int32_t home_area_key) {
  if (sku_key.empty()) throw Error(Err::UnresolvedKey, "empty sku_key");
  auto it = product_by_sku_.find(sku_key);
  if (it != product_by_sku_.end()) {
    const DmProduct& existing = products_[static_cast<std::size_t>(it->second) - 1];
    if (existing.product_name != product_name || existing.unit_price != unit_price ||
        existing.supplier_key != supplier_key || existing.home_area_key != home_area_key) {
      attribute_conflicts_.push_back("ATTRIBUTE_CONFLICT: product " + sku_key);
    }
    return it->second;
  }
  std::int32_t key = static_cast<std::int32_t>(products_.size()) + 1;
  products_.push_back({key, sku_key, product_name, unit_price, supplier_key, home_area_key});
  product_by_sku_[sku_key] = key;
  dirty_ = true;
  return key;
}

std::int32_t Warehouse::upsert_customer(const std::string& customer_id, Gender gender,
                                        std::optional<int> age, const std::string& location) {
  if (customer_id.empty()) return 0;  // walk-in
  auto it = customer_by_id_.find(customer_id);
  if (it != customer_by_id_.end()) {
    const DmCustomer& existing = *find_customer_by_key(it->second);
    if (it->second != 0 && (existing.gender != gender || existing.age != age ||
                            existing.location != location)) {
      attribute_conflicts_.push_back("ATTRIBUTE_CONFLICT: customer " + customer_id);
    }
    return it->second;
  }
  std::int32_t key = static_cast<std::int32_t>(customers_.size());  // 0 is reserved
  customers_.push_back({key, customer_id, gender, age, location});
  customer_by_id_[customer_id] = key;
  dirty_ = true;
  return key;
}

std::int32_t Warehouse::upsert_calendar(std::int32_t date_key) {
  if (!valid_date_key(date_key)) {
    throw Error(Err::UnresolvedKey, "invalid date key " + std::to_string(date_key));
  }
  for (const DmCalendarRow& c : calendar_) {
    if (c.date_key == date_key) return date_key;
  }
  DmCalendarRow c;
  c.date_key = date_key;
  c.date = date_string_from_key(date_key);
  c.day = day_of_date_key(date_key);
  c.month = month_of_date_key(date_key);
  c.quarter = quarter_of_date_key(date_key);
  c.year = year_of_date_key(date_key);
  // keep the calendar sorted so repeated loads serialize identically
  auto pos = calendar_.begin();
  while (pos != calendar_.end() && pos->date_key < date_key) ++pos;
  calendar_.insert(pos, std::move(c));
  dirty_ = true;
  return date_key;
}

void Warehouse::set_areas(const StoreMap& map) {
  if (areas_.size() > 1) {
    // already populated: verify the zone file did not drift
    for (const Zone& z : map.zones()) {
      const AreaRow* existing = find_area(z.area_key);
      if (!existing || existing->area_name != z.area_name) {
        attribute_conflicts_.push_back("ATTRIBUTE_CONFLICT: area " + z.area_name);
      }
    }
    return;
  }
  for (const Zone& z : map.zones()) {
    areas_.push_back({z.area_key, z.area_name, true, z.x0, z.y0, z.x1, z.y1, z.sequence_index});
  }
  if (!map.zones().empty()) dirty_ = true;
}

std::int32_t Warehouse::movement_key(MovementKind kind) const {
  return kind == MovementKind::Stop ? 1 : 2;
}

void Warehouse::append_fact_sales(FactSalesRow row) {
  fact_sales_.push_back(std::move(row));
  dirty_ = true;
}

void Warehouse::append_fact_behaviour(FactBehaviourRow row) {
  fact_behaviour_.push_back(std::move(row));
  dirty_ = true;
}

bool Warehouse::has_batch(std::int64_t batch_id) const {
  for (std::int64_t b : loaded_batches_) {
    if (b == batch_id) return true;
  }
  return false;
}

void Warehouse::record_batch(std::int64_t batch_id) {
  if (!has_batch(batch_id)) {
    loaded_batches_.push_back(batch_id);
    dirty_ = true;
  }
}

void Warehouse::publish() {
  if (!dirty_) return;
  std::int64_t next = version_ + 1;
  char dirname[32];
  std::snprintf(dirname, sizeof dirname, "v%04lld", static_cast<long long>(next));
  fs::path vdir = dir_ / dirname;
  std::error_code ec;
  fs::remove_all(vdir, ec);  // leftovers from an interrupted publish
  fs::create_directories(vdir, ec);
  if (ec) throw Error(Err::StorageFailure, "cannot create version dir: " + ec.message());

  auto table = [&](const char* name, std::string_view header, auto&& rows, auto&& to_fields) {
    std::string out{header};
    out += '\n';
    for (const auto& r : rows) {
      out += csv_join(to_fields(r));
      out += '\n';
    }
    write_file(vdir / name, out);
  };

  table("dm_products.csv", kProductsHeader, products_, [](const DmProduct& p) {
    return std::vector<std::string>{std::to_string(p.product_key), p.sku_key, p.product_name,
                                    format_money(p.unit_price), std::to_string(p.supplier_key),
                                    std::to_string(p.home_area_key)};
  });
  table("dm_supplies.csv", kSuppliesHeader, suppliers_, [](const DmSupplier& s) {
    return std::vector<std::string>{std::to_string(s.supplier_key), s.supplier_name};
  });
  table("dm_calendar.csv", kCalendarHeader, calendar_, [](const DmCalendarRow& c) {
    return std::vector<std::string>{std::to_string(c.date_key), c.date, std::to_string(c.day),
                                    std::to_string(c.month), std::to_string(c.quarter),
                                    std::to_string(c.year)};
  });
  table("dm_customers.csv", kCustomersHeader, customers_, [](const DmCustomer& c) {
    return std::vector<std::string>{std::to_string(c.customer_key), c.customer_id,
                                    gender_name(c.gender),
                                    c.age ? std::to_string(*c.age) : std::string(), c.location};
  });
  table("dm_movement.csv", kMovementHeader, movement_, [](const DmMovementRow& m) {
    return std::vector<std::string>{std::to_string(m.movement_key),
                                    m.movement == MovementKind::Stop ? "STOP" : "MOVE"};
  });
  table("area.csv", kAreaHeader, areas_, [](const AreaRow& a) {
    if (!a.has_geometry) {
      return std::vector<std::string>{std::to_string(a.area_key), a.area_name, "", "", "", "", ""};
    }
    return std::vector<std::string>{std::to_string(a.area_key), a.area_name, format_double(a.x0),
                                    format_double(a.y0),        format_double(a.x1),
                                    format_double(a.y1),        std::to_string(a.sequence_index)};
  });
  table("fact_sales.csv", kFactSalesHeader, fact_sales_, [](const FactSalesRow& r) {
    return std::vector<std::string>{std::to_string(r.product_key),
                                    std::to_string(r.customer_key),
                                    std::to_string(r.date_key),
                                    std::to_string(r.area_key),
                                    std::to_string(r.quantity),
                                    std::to_string(r.quantity_purchased),
                                    std::to_string(r.sold),
                                    format_money(r.cost),
                                    format_money(r.revenue),
                                    format_money(r.profit),
                                    format_money(r.total_sales),
                                    r.margin,
                                    std::to_string(r.stock)};
  });
  table("fact_cust_behaviour.csv", kFactBehaviourHeader, fact_behaviour_,
        [](const FactBehaviourRow& r) {
          return std::vector<std::string>{std::to_string(r.customer_key),
                                          std::to_string(r.date_key),
                                          std::to_string(r.area_key),
                                          std::to_string(r.movement_key),
                                          format_iso_utc_frac(r.t_start),
                                          format_iso_utc_frac(r.t_end),
                                          format_double(r.x),
                                          format_double(r.y),
                                          format_double(r.speed_m_s),
                                          format_double(r.distance_m),
                                          format_double(r.duration_s),
                                          std::to_string(r.visit)};
        });

  json batches = json::array();
  for (std::int64_t b : loaded_batches_) batches.push_back(b);
  json manifest = {{"version", next},
                   {"dir", dirname},
                   {"loaded_batches", batches},
                   {"tables",
                    {{"dm_products", products_.size()},
                     {"dm_supplies", suppliers_.size()},
                     {"dm_calendar", calendar_.size()},
                     {"dm_customers", customers_.size()},
                     {"dm_movement", movement_.size()},
                     {"area", areas_.size()},
                     {"fact_sales", fact_sales_.size()},
                     {"fact_cust_behaviour", fact_behaviour_.size()}}}};
  write_file_atomic(dir_ / "manifest.json", manifest.dump(2) + "\n");
  version_ = next;
  dirty_ = false;
}

const DmProduct* Warehouse::find_product_by_sku(std::string_view sku) const {
  auto it = product_by_sku_.find(sku);
  if (it == product_by_sku_.end()) return nullptr;
  return &products_[static_cast<std::size_t>(it->second) - 1];
}

const DmProduct* Warehouse::find_product(std::int32_t key) const {
  if (key < 1 || static_cast<std::size_t>(key) > products_.size()) return nullptr;
  return &products_[static_cast<std::size_t>(key) - 1];
}

const DmCustomer* Warehouse::find_customer_by_id(std::string_view customer_id) const {
  auto it = customer_by_id_.find(customer_id);
  if (it == customer_by_id_.end()) return nullptr;
  return find_customer_by_key(it->second);
}

const DmCustomer* Warehouse::find_customer_by_key(std::int32_t key) const {
  for (const DmCustomer& c : customers_) {
    if (c.customer_key == key) return &c;
  }
  return nullptr;
}

const AreaRow* Warehouse::find_area(std::int32_t area_key) const {
  for (const AreaRow& a : areas_) {
    if (a.area_key == area_key) return &a;
  }
  return nullptr;
}

IntegrityReport Warehouse::integrity_check() const {
  IntegrityReport report;
  auto flag = [&](const char* table, std::size_t row, std::string what) {
    report.violations.push_back({table, row, std::move(what)});
  };

  // surrogate key spaces are dense
  for (std::size_t i = 0; i < products_.size(); ++i) {
    if (products_[i].product_key != static_cast<std::int32_t>(i + 1)) {
      flag("dm_products", i + 1, "surrogate keys not dense");
      break;
    }
  }
  for (std::size_t i = 0; i < suppliers_.size(); ++i) {
    if (suppliers_[i].supplier_key != static_cast<std::int32_t>(i + 1)) {
      flag("dm_supplies", i + 1, "surrogate keys not dense");
      break;
    }
  }
  for (std::size_t i = 0; i < customers_.size(); ++i) {
    if (customers_[i].customer_key != static_cast<std::int32_t>(i)) {
      flag("dm_customers", i + 1, "surrogate keys not dense");
      break;
    }
  }

  if (movement_.size() != 2 || movement_[0].movement_key != 1 ||
      movement_[0].movement != MovementKind::Stop || movement_[1].movement_key != 2 ||
      movement_[1].movement != MovementKind::Move) {
    flag("dm_movement", 0, "expected exactly rows 1=STOP and 2=MOVE");
  }

  for (std::size_t i = 0; i < calendar_.size(); ++i) {
    const DmCalendarRow& c = calendar_[i];
    bool ok = valid_date_key(c.date_key) && c.date == date_string_from_key(c.date_key) &&
              c.day == day_of_date_key(c.date_key) && c.month == month_of_date_key(c.date_key) &&
              c.quarter == quarter_of_date_key(c.date_key) &&
              c.year == year_of_date_key(c.date_key);
    if (!ok) flag("dm_calendar", i + 1, "hierarchy inconsistent for " + std::to_string(c.date_key));
  }

  auto has_calendar = [&](std::int32_t date_key) {
    for (const DmCalendarRow& c : calendar_) {
      if (c.date_key == date_key) return true;
    }
    return false;
  };

  for (std::size_t i = 0; i < fact_sales_.size(); ++i) {
    const FactSalesRow& r = fact_sales_[i];
    if (!find_product(r.product_key)) {
      flag("fact_sales", i + 1, "unresolved product_key " + std::to_string(r.product_key));
    }
    if (!find_customer_by_key(r.customer_key)) {
      flag("fact_sales", i + 1, "unresolved customer_key " + std::to_string(r.customer_key));
    }
    if (!has_calendar(r.date_key)) {
      flag("fact_sales", i + 1, "unresolved date_key " + std::to_string(r.date_key));
    }
    if (!find_area(r.area_key)) {
      flag("fact_sales", i + 1, "unresolved area_key " + std::to_string(r.area_key));
    }
    if (r.profit != r.revenue - r.cost) flag("fact_sales", i + 1, "profit != revenue - cost");
    if (r.total_sales != r.revenue) flag("fact_sales", i + 1, "total_sales != revenue");
    if (r.quantity_purchased != r.quantity) {
      flag("fact_sales", i + 1, "quantity_purchased != quantity");
    }
    if (r.sold != (r.revenue.cents > 0 ? r.quantity : 0)) {
      flag("fact_sales", i + 1, "sold != revenue-bearing units");
    }
    if (r.margin != render_margin(r.profit, r.revenue)) {
      flag("fact_sales", i + 1, "margin does not match profit/revenue");
    }
  }

  for (std::size_t i = 0; i < fact_behaviour_.size(); ++i) {
    const FactBehaviourRow& r = fact_behaviour_[i];
    if (!find_customer_by_key(r.customer_key)) {
      flag("fact_cust_behaviour", i + 1,
           "unresolved customer_key " + std::to_string(r.customer_key));
    }
    if (!has_calendar(r.date_key)) {
      flag("fact_cust_behaviour", i + 1, "unresolved date_key " + std::to_string(r.date_key));
    }
    if (!find_area(r.area_key)) {
      flag("fact_cust_behaviour", i + 1, "unresolved area_key " + std::to_string(r.area_key));
    }
    if (r.movement_key != 1 && r.movement_key != 2) {
      flag("fact_cust_behaviour", i + 1,
           "unresolved movement_key " + std::to_string(r.movement_key));
    }
    if (std::fabs(r.duration_s - (r.t_end - r.t_start)) > 1e-9) {
      flag("fact_cust_behaviour", i + 1, "duration_s != t_end - t_start");
    }
    double expect = r.speed_m_s * r.duration_s;
    double tolerance = 1e-9 * std::max(1.0, std::fabs(r.distance_m));
    if (std::fabs(expect - r.distance_m) > tolerance) {
      flag("fact_cust_behaviour", i + 1, "speed * duration != distance");
    }
    if (r.visit != 0 && r.visit != 1) flag("fact_cust_behaviour", i + 1, "visit flag not 0/1");
  }

  return report;
}

}  // namespace retail
