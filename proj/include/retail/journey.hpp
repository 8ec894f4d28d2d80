#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "retail/warehouse.hpp"

namespace retail {

enum class Coverage { Both, PosOnly, RfidOnly, None };
const char* coverage_name(Coverage c);

struct ProductPurchase {
  std::string sku_key;
  std::string product_name;
  std::int64_t quantity = 0;
  Money revenue;
};

struct ZoneBehaviour {
  std::int32_t area_key = 0;
  std::string area_name;
  double dwell_s = 0;
  double stop_s = 0;
  std::int64_t visit_count = 0;
};

struct ZoneConversionFlag {
  std::int32_t area_key = 0;
  std::string area_name;
  bool visited = false;
  bool purchased_here = false;
};

/// One customer-day joined across POS and RFID facts. Totals re-derive from
/// the per-item/per-zone entries exactly.
struct JourneyProfile {
  std::string customer_id;
  std::int32_t date_key = 0;
  Coverage coverage = Coverage::None;

  std::vector<ProductPurchase> purchases;
  std::int64_t total_items = 0;
  Money total_revenue;

  std::vector<ZoneBehaviour> behaviour;  // ordered by area_key; 0 = unzoned
  double total_movement_s = 0;
  std::int64_t total_visits = 0;
  double total_distance_m = 0;

  std::vector<ZoneConversionFlag> conversions;

  std::string to_text() const;
  std::string to_json_text() const;
};

/// Joins FactSales and FactCustBehaviour by customer and date. A customer
/// absent from both sources (and from the customer dimension) is an error;
/// one-sided coverage yields the other half empty plus a coverage flag.
JourneyProfile build_profile(const Warehouse& wh, const std::string& customer_id,
                             std::int32_t date_key);

struct ZoneConversionRow {
  std::int32_t area_key = 0;
  std::string area_name;
  std::int64_t visitors = 0;  // distinct customers with dwell in the zone
  std::int64_t buyers = 0;    // distinct customers who bought a product homed there
  double conversion = 0;      // buyers / visitors, 0 when no visitors

  std::string render_conversion() const;
};

/// Visit -> purchase conversion per zone over an inclusive date range.
/// Buyers can exceed visitors via unzoned tracking gaps; reported as-is.
std::vector<ZoneConversionRow> zone_conversion(const Warehouse& wh, std::int32_t from_date_key,
                                               std::int32_t to_date_key);

std::string zone_conversion_to_csv(const std::vector<ZoneConversionRow>& rows);

}  // namespace retail
