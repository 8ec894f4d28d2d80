#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "retail/common.hpp"
#include "retail/storemap.hpp"
#include "retail/trajectory.hpp"

namespace retail {

enum class Gender { M, F, Unknown };

const char* gender_name(Gender g);
Gender gender_from_string(std::string_view s);  // tolerant: ""/U/UNKNOWN -> Unknown

struct DmProduct {
  std::int32_t product_key = 0;
  std::string sku_key;
  std::string product_name;
  Money unit_price;
  std::int32_t supplier_key = 0;
  std::int32_t home_area_key = 0;
};

struct DmSupplier {
  std::int32_t supplier_key = 0;
  std::string supplier_name;
};

struct DmCalendarRow {
  std::int32_t date_key = 0;  // yyyymmdd, doubles as the surrogate
  std::string date;           // YYYY-MM-DD
  int day = 0, month = 0, quarter = 0, year = 0;
};

struct DmCustomer {
  std::int32_t customer_key = 0;  // 0 reserved: UNKNOWN walk-in
  std::string customer_id;
  Gender gender = Gender::Unknown;
  std::optional<int> age;
  std::string location;
};

struct DmMovementRow {
  std::int32_t movement_key = 0;  // 1 = STOP, 2 = MOVE
  MovementKind movement = MovementKind::Stop;
};

struct AreaRow {
  std::int32_t area_key = 0;  // 0 reserved: UNZONED (no geometry)
  std::string area_name;
  bool has_geometry = false;
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  std::int32_t sequence_index = -1;
};

/// Sales fact at receipt-line grain. Sold carries revenue-bearing units
/// (= quantity on any revenue-positive line); total_sales = revenue and
/// quantity_purchased = quantity at this grain — the columns are duplicated
/// on purpose and documented as such. The margin column is derived from
/// profit/revenue and re-verified by the integrity check.
struct FactSalesRow {
  std::int32_t product_key = 0;
  std::int32_t customer_key = 0;
  std::int32_t date_key = 0;
  std::int32_t area_key = 0;
  std::int64_t quantity = 0;
  std::int64_t quantity_purchased = 0;
  std::int64_t sold = 0;
  Money cost;
  Money revenue;
  Money profit;
  Money total_sales;
  std::string margin;  // rendered 4 d.p.
  std::int64_t stock = 0;
};

std::string render_margin(Money profit, Money revenue);

/// Movement fact at segment grain. `visit` is 1 on the first segment of a
/// maximal same-zone run of its customer-day, so visit counts stay additive
/// under any grouping.
struct FactBehaviourRow {
  std::int32_t customer_key = 0;
  std::int32_t date_key = 0;
  std::int32_t area_key = 0;
  std::int32_t movement_key = 0;
  double t_start = 0;
  double t_end = 0;
  double x = 0, y = 0;  // segment anchor
  double speed_m_s = 0;
  double distance_m = 0;
  double duration_s = 0;
  int visit = 0;
};

struct IntegrityViolation {
  std::string table;
  std::size_t row = 0;  // 1-based data row
  std::string what;
};

struct IntegrityReport {
  std::vector<IntegrityViolation> violations;
  bool clean() const { return violations.empty(); }
  std::string to_text() const;
};

/// The star schema store. One CSV per table inside a versioned directory;
/// loads accumulate in memory and `publish()` writes version N+1 and swaps
/// the manifest, so readers always see a complete snapshot.
///
/// Single writer; any number of readers may open the published version.
class Warehouse {
 public:
  explicit Warehouse(std::filesystem::path dir);

  // -- dimension maintenance (idempotent; attribute mismatches keep the
  //    existing row and add a warning) --
  std::int32_t upsert_supplier(const std::string& supplier_name);
  std::int32_t upsert_product(const std::string& sku_key, const std::string& product_name,
                              Money unit_price, std::int32_t supplier_key,
                              std::int32_t home_area_key);
  std::int32_t upsert_customer(const std::string& customer_id, Gender gender,
                               std::optional<int> age, const std::string& location);
  std::int32_t upsert_calendar(std::int32_t date_key);
  void set_areas(const StoreMap& map);
  std::int32_t movement_key(MovementKind kind) const;

  void append_fact_sales(FactSalesRow row);
  void append_fact_behaviour(FactBehaviourRow row);

  bool has_batch(std::int64_t batch_id) const;
  void record_batch(std::int64_t batch_id);

  /// Writes the next version directory and swaps the manifest.
  void publish();
  bool dirty() const { return dirty_; }
  std::int64_t version() const { return version_; }

  // -- readers --
  const std::vector<DmProduct>& products() const { return products_; }
  const std::vector<DmSupplier>& suppliers() const { return suppliers_; }
  const std::vector<DmCalendarRow>& calendar() const { return calendar_; }
  const std::vector<DmCustomer>& customers() const { return customers_; }
  const std::vector<DmMovementRow>& movement() const { return movement_; }
  const std::vector<AreaRow>& areas() const { return areas_; }
  const std::vector<FactSalesRow>& fact_sales() const { return fact_sales_; }
  const std::vector<FactBehaviourRow>& fact_behaviour() const { return fact_behaviour_; }

  const DmProduct* find_product_by_sku(std::string_view sku) const;
  const DmCustomer* find_customer_by_id(std::string_view customer_id) const;
  const DmCustomer* find_customer_by_key(std::int32_t key) const;
  const AreaRow* find_area(std::int32_t area_key) const;
  const DmProduct* find_product(std::int32_t key) const;

  bool has_facts() const { return !fact_sales_.empty() || !fact_behaviour_.empty(); }
  const std::vector<std::string>& attribute_conflicts() const { return attribute_conflicts_; }

  IntegrityReport integrity_check() const;

 private:
  void load_current();

  std::filesystem::path dir_;
  std::int64_t version_ = 0;
  bool dirty_ = false;
  std::vector<std::int64_t> loaded_batches_;

  std::vector<DmProduct> products_;
  std::vector<DmSupplier> suppliers_;
  std::vector<DmCalendarRow> calendar_;
  std::vector<DmCustomer> customers_;
  std::vector<DmMovementRow> movement_;
  std::vector<AreaRow> areas_;
  std::vector<FactSalesRow> fact_sales_;
  std::vector<FactBehaviourRow> fact_behaviour_;

  std::map<std::string, std::int32_t, std::less<>> product_by_sku_;
  std::map<std::string, std::int32_t, std::less<>> supplier_by_name_;
  std::map<std::string, std::int32_t, std::less<>> customer_by_id_;

  std::vector<std::string> attribute_conflicts_;
};

}  // namespace retail
