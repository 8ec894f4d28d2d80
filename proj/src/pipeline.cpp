#include "retail/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#ifdef __unix__
#include <cerrno>
#include <signal.h>
#include <unistd.h>
#endif

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

bool pid_alive(long pid) {
#ifdef __unix__
  if (pid <= 0) return false;
  return ::kill(static_cast<pid_t>(pid), 0) == 0 || errno == EPERM;
#else
  (void)pid;
  return true;  // no liveness probe: treat as held
#endif
}

}  // namespace

fs::path staging_dir(const fs::path& workspace) { return workspace / "staging"; }
fs::path warehouse_dir(const fs::path& workspace) { return workspace / "warehouse"; }

WorkspaceLock::WorkspaceLock(const fs::path& workspace) {
  std::error_code ec;
  fs::create_directories(workspace, ec);
  if (ec) throw Error(Err::StorageFailure, "cannot create workspace: " + ec.message());
  lock_path_ = workspace / "lock";
  if (fs::exists(lock_path_)) {
    long pid = 0;
    try {
      pid = std::stol(read_file(lock_path_));
    } catch (...) {
      pid = 0;
    }
    if (pid_alive(pid)) {
      throw Error(Err::WorkspaceBusy,
                  "workspace locked by pid " + std::to_string(pid));
    }
    fs::remove(lock_path_, ec);  // stale lock from a dead process
  }
  std::ofstream out(lock_path_, std::ios::trunc);
#ifdef __unix__
  out << ::getpid() << '\n';
#else
  out << 0 << '\n';
#endif
  if (!out.flush()) throw Error(Err::StorageFailure, "cannot write lock file");
  held_ = true;
}

WorkspaceLock::~WorkspaceLock() {
  if (held_) {
    std::error_code ec;
    fs::remove(lock_path_, ec);
  }
}

std::string LoadSummary::to_text() const {
  std::ostringstream out;
  out << "batches_transformed = " << batches_transformed << '\n';
  out << "fact_sales_inserted = " << sales_rows_inserted << '\n';
  out << "fact_cust_behaviour_inserted = " << behaviour_rows_inserted << '\n';
  out << "dm_products = " << products << '\n';
  out << "dm_supplies = " << suppliers << '\n';
  out << "dm_customers = " << customers << '\n';
  out << "dm_calendar = " << calendar_days << '\n';
  out << "area = " << areas << '\n';
  out << "attribute_conflicts = " << attribute_conflicts << '\n';
  out << "orphan_pings = " << orphan_pings << '\n';
  out << "status_conflicts = " << status_conflicts << '\n';
  out << "warehouse_version = " << warehouse_version << '\n';
  return out.str();
}

namespace {

struct CatalogRow {
  std::string sku_key;
  std::string product_name;
  std::string supplier_name;
  std::string home_area_name;
  Money unit_price;
  std::int64_t stock = 0;
  Money unit_cost;
  bool has_cost = false;
};

constexpr std::string_view kCatalogHeader =
    "sku_key,product_name,supplier_name,home_area_name,unit_price,stock";
constexpr std::string_view kCostHeader = "sku_key,unit_cost";
constexpr std::string_view kDemoHeader = "customer_id,gender,age,location";

std::vector<CatalogRow> read_catalog(const std::string& catalog_file,
                                     const std::string& cost_file) {
  std::string bytes = read_file(catalog_file);
  LineReader reader(bytes);
  std::string_view line;
  if (!reader.next(line) || line != kCatalogHeader) {
    throw Error(Err::BadHeader, "catalog header must be '" + std::string(kCatalogHeader) + "'");
  }
  std::vector<CatalogRow> rows;
  std::map<std::string, std::size_t> by_sku;
  while (reader.next(line)) {
    if (line.empty()) continue;
    auto fields = csv_split(line);
    if (!fields || fields->size() != 6) {
      throw Error(Err::MalformedRow, "catalog line " + std::to_string(reader.line_number()));
    }
    CatalogRow row;
    row.sku_key = (*fields)[0];
    row.product_name = (*fields)[1];
    row.supplier_name = (*fields)[2];
    row.home_area_name = (*fields)[3];
    auto price = parse_money((*fields)[4]);
    auto stock = parse_int((*fields)[5]);
    if (row.sku_key.empty() || !price || !stock) {
      throw Error(Err::MalformedRow, "catalog line " + std::to_string(reader.line_number()));
    }
    row.unit_price = *price;
    row.stock = *stock;
    by_sku[row.sku_key] = rows.size();
    rows.push_back(std::move(row));
  }

  std::string cost_bytes = read_file(cost_file);
  LineReader cost_reader(cost_bytes);
  if (!cost_reader.next(line) || line != kCostHeader) {
    throw Error(Err::BadHeader, "cost snapshot header must be '" + std::string(kCostHeader) + "'");
  }
  while (cost_reader.next(line)) {
    if (line.empty()) continue;
    auto fields = csv_split(line);
    if (!fields || fields->size() != 2) {
      throw Error(Err::MalformedRow, "cost line " + std::to_string(cost_reader.line_number()));
    }
    auto cost = parse_money((*fields)[1]);
    if (!cost) {
      throw Error(Err::MalformedRow, "cost line " + std::to_string(cost_reader.line_number()));
    }
    auto it = by_sku.find((*fields)[0]);
    if (it == by_sku.end()) continue;  // cost for an uncatalogued SKU: ignored
    rows[it->second].unit_cost = *cost;
    rows[it->second].has_cost = true;
  }
  return rows;
}

struct DemoRow {
  std::string customer_id;
  Gender gender;
  std::optional<int> age;
  std::string location;
};

std::vector<DemoRow> read_demographics(const std::string& path) {
  std::string bytes = read_file(path);
  LineReader reader(bytes);
  std::string_view line;
  if (!reader.next(line) || line != kDemoHeader) {
    throw Error(Err::BadHeader, "demographics header must be '" + std::string(kDemoHeader) + "'");
  }
  std::vector<DemoRow> rows;
  while (reader.next(line)) {
    if (line.empty()) continue;
    auto fields = csv_split(line);
    if (!fields || fields->size() != 4 || (*fields)[0].empty()) {
      throw Error(Err::MalformedRow, "demographics line " + std::to_string(reader.line_number()));
    }
    DemoRow row;
    row.customer_id = (*fields)[0];
    row.gender = gender_from_string((*fields)[1]);
    if (!(*fields)[2].empty()) {
      auto age = parse_int((*fields)[2]);
      if (!age || *age < 0 || *age > 150) {
        throw Error(Err::MalformedRow,
                    "demographics line " + std::to_string(reader.line_number()));
      }
      row.age = static_cast<int>(*age);
    }
    row.location = (*fields)[3];
    rows.push_back(std::move(row));
  }
  return rows;
}

void load_ping_batch(Warehouse& wh, const std::vector<Ping>& pings,
                     const StoreMap& map, const SegmentationParams& params,
                     LoadSummary& summary) {
  // group into customer-days; a customer-day is assumed to arrive in one file
  std::map<std::pair<std::string, std::int32_t>, std::vector<Ping>> groups;
  for (const Ping& p : pings) {
    groups[{p.customer_id, date_key_from_epoch(p.ts)}].push_back(p);
  }
  for (auto& [key, group] : groups) {
    const auto& [customer_id, date_key] = key;
    std::vector<Ping> track = order_track(std::move(group));
    bool statuses_present =
        !track.empty() && std::all_of(track.begin(), track.end(), [](const Ping& p) {
          return p.status != PingStatus::None;
        });
    SegmentationResult seg = segment(track, params, statuses_present);
    summary.orphan_pings += seg.orphan_pings;
    summary.status_conflicts += seg.status_conflicts;
    if (seg.segments.empty()) continue;
    attribute_zones(seg.segments, map);

    // tracked customers missing from demographics get a key with unknown attrs
    const DmCustomer* known = wh.find_customer_by_id(customer_id);
    std::int32_t customer_key =
        known ? known->customer_key
              : wh.upsert_customer(customer_id, Gender::Unknown, std::nullopt, "");
    wh.upsert_calendar(date_key);
    for (const Segment& s : seg.segments) {
      FactBehaviourRow row;
      row.customer_key = customer_key;
      row.date_key = date_key;
      row.area_key = s.area_key.value_or(0);
      row.movement_key = wh.movement_key(s.kind);
      row.t_start = s.t_start;
      row.t_end = s.t_end;
      row.x = s.anchor_x;
      row.y = s.anchor_y;
      row.speed_m_s = s.mean_speed_m_s;
      row.distance_m = s.distance_m;
      row.duration_s = s.duration_s;
      row.visit = s.visit_start ? 1 : 0;
      wh.append_fact_behaviour(std::move(row));
      ++summary.behaviour_rows_inserted;
    }
  }
}

void load_pos_batch(Warehouse& wh, const std::vector<ReceiptLine>& lines,
                    const std::map<std::string, const CatalogRow*>& catalog_by_sku,
                    LoadSummary& summary) {
  for (const ReceiptLine& line : lines) {
    const DmProduct* product = wh.find_product_by_sku(line.sku_key);
    auto cat_it = catalog_by_sku.find(line.sku_key);
    if (!product || cat_it == catalog_by_sku.end()) {
      throw Error(Err::UnresolvedKey, "receipt references unknown SKU " + line.sku_key);
    }
    std::int32_t customer_key = 0;
    if (!line.customer_id.empty()) {
      const DmCustomer* customer = wh.find_customer_by_id(line.customer_id);
      if (!customer) {
        throw Error(Err::UnresolvedKey,
                    "receipt references unknown customer " + line.customer_id);
      }
      customer_key = customer->customer_key;
    }
    const CatalogRow& cat = *cat_it->second;
    if (!cat.has_cost) {
      throw Error(Err::UnresolvedKey, "no cost snapshot entry for SKU " + line.sku_key);
    }

    FactSalesRow row;
    row.product_key = product->product_key;
    row.customer_key = customer_key;
    row.date_key = wh.upsert_calendar(date_key_from_epoch(line.ts));
    row.area_key = product->home_area_key;
    row.quantity = line.quantity;
    row.quantity_purchased = line.quantity;
    row.revenue = line.line_total;
    row.sold = line.line_total.cents > 0 ? line.quantity : 0;
    row.cost = cat.unit_cost * line.quantity;
    row.profit = row.revenue - row.cost;
    row.total_sales = row.revenue;
    row.margin = render_margin(row.profit, row.revenue);
    row.stock = cat.stock;
    wh.append_fact_sales(std::move(row));
    ++summary.sales_rows_inserted;
  }
}

}  // namespace

LoadSummary run_load(const fs::path& workspace, const LoadInputs& inputs) {
  inputs.segmentation.validate();
  StagingStore staging(staging_dir(workspace));
  if (staging.list_batches().empty()) {
    throw Error(Err::MissingStage, "nothing staged yet; run ingest first");
  }

  StoreMap map = StoreMap::load_file(inputs.zone_file);
  std::vector<CatalogRow> catalog = read_catalog(inputs.catalog_file, inputs.cost_file);
  std::vector<DemoRow> demographics = read_demographics(inputs.demographics_file);

  Warehouse wh(warehouse_dir(workspace));
  LoadSummary summary;

  wh.set_areas(map);
  for (const CatalogRow& row : catalog) {
    const Zone* zone = map.find_name(row.home_area_name);
    if (!zone) {
      throw Error(Err::UnresolvedKey,
                  "catalog SKU " + row.sku_key + " references unknown zone '" +
                      row.home_area_name + "'");
    }
    std::int32_t supplier_key = wh.upsert_supplier(row.supplier_name);
    wh.upsert_product(row.sku_key, row.product_name, row.unit_price, supplier_key,
                      zone->area_key);
  }
  for (const DemoRow& row : demographics) {
    wh.upsert_customer(row.customer_id, row.gender, row.age, row.location);
  }
  std::map<std::string, const CatalogRow*> catalog_by_sku;
  for (const CatalogRow& row : catalog) catalog_by_sku[row.sku_key] = &row;

  std::vector<std::int64_t> to_mark;
  for (const BatchMeta& batch : staging.list_batches(BatchState::Loaded)) {
    if (!wh.has_batch(batch.batch_id)) {
      if (batch.kind == BatchKind::Pings) {
        load_ping_batch(wh, staging.read_accepted_pings(batch.batch_id), map,
                        inputs.segmentation, summary);
      } else {
        load_pos_batch(wh, staging.read_accepted_pos(batch.batch_id), catalog_by_sku, summary);
      }
      wh.record_batch(batch.batch_id);
    }
    to_mark.push_back(batch.batch_id);
    ++summary.batches_transformed;
  }

  wh.publish();
  // state flips only after the warehouse snapshot is durable, so a crash in
  // between replays as a no-op
  for (std::int64_t batch_id : to_mark) staging.mark_transformed(batch_id);

  summary.products = wh.products().size();
  summary.suppliers = wh.suppliers().size();
  summary.customers = wh.customers().size();
  summary.calendar_days = wh.calendar().size();
  summary.areas = wh.areas().size();
  summary.attribute_conflicts = wh.attribute_conflicts().size();
  summary.warehouse_version = wh.version();
  return summary;
}

void record_stage(const fs::path& workspace, const std::string& stage,
                  const std::vector<std::pair<std::string, std::string>>& details) {
  fs::path path = workspace / "run_manifest.json";
  json doc = json::object();
  doc["stages"] = json::array();
  if (fs::exists(path)) {
    json existing = json::parse(read_file(path), nullptr, false);
    if (!existing.is_discarded() && existing.contains("stages")) doc = std::move(existing);
  }
  json entry = {{"seq", doc["stages"].size() + 1}, {"stage", stage}};
  for (const auto& [key, value] : details) entry[key] = value;
  doc["stages"].push_back(std::move(entry));
  fs::path tmp = path;
  tmp += ".tmp";
  std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
  out << doc.dump(2) << '\n';
  out.flush();
  if (!out) throw Error(Err::StorageFailure, "cannot write run manifest");
  out.close();
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(Err::StorageFailure, "cannot publish run manifest");
}

}  // namespace retail
