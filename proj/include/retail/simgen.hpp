#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "retail/common.hpp"
#include "retail/storemap.hpp"

namespace retail {

/// Generator configuration. Fully deterministic for a given seed: the PRNG
/// (xoshiro256** seeded via splitmix64) and the draw order are part of the
/// contract, so fixtures reproduce bit-exactly across platforms.
struct SimConfig {
  std::uint64_t seed = 42;
  int n_customers = 50;
  int n_days = 7;
  std::string start_date = "2025-06-02";

  double visit_probability = 0.7;
  int dwell_min_s = 40;
  int dwell_max_s = 85;
  // the lower speed bound keeps the second post-departure fix outside the
  // default 1 m stop radius, so recovered stop bounds stay within +-1 fix
  // of the plan at each end
  double speed_min_m_s = 1.4;
  double speed_max_m_s = 1.8;
  double jitter_m = 0.15;

  double buy_probability = 0.85;
  int line_items_min = 1;
  int line_items_max = 10;
  int quantity_min = 1;
  int quantity_max = 5;

  int products_per_zone = 40;
  Money price_min{80};      // 0.80
  Money price_max{2499};    // 24.99
  double cost_fraction_min = 0.55;
  double cost_fraction_max = 0.85;
  int stock_min = 20;
  int stock_max = 500;

  double corruption_rate = 0.0;
  bool emit_status = false;

  std::vector<Zone> zones;  // empty -> default two-row layout

  void validate() const;  // throws INVALID_CONFIG
  static SimConfig from_json_text(std::string_view text);
  std::string to_json_text() const;

  /// The layout used when `zones` is empty: 12 departments in two rows
  /// flanking a central aisle, entrance at the southwest corner.
  static std::vector<Zone> default_zones();
};

struct TruthStop {
  std::int32_t area_key = 0;
  std::string area_name;
  double arrive_s = 0;  // session-relative
  double depart_s = 0;
  double dwell_s = 0;
  double stop_x = 0, stop_y = 0;
};

struct TruthReceiptLine {
  std::string sku_key;
  std::string product_name;
  std::int64_t quantity = 0;
  Money unit_price;
  Money line_total;
  std::int32_t area_key = 0;
};

struct CustomerDayTruth {
  std::string customer_id;
  std::int32_t date_key = 0;
  std::int64_t session_start_ts = 0;
  double session_len_s = 0;
  std::size_t n_pings = 0;
  double sampled_path_length_m = 0;  // over emitted (quantized) fixes
  std::vector<TruthStop> itinerary;
  double transit_s = 0;  // total walking time
  std::map<std::int32_t, double> zone_dwell_s;
  std::vector<TruthReceiptLine> receipts;
  Money day_revenue;
};

struct CorruptionRecord {
  std::string file;       // "pings" | "pos"
  std::size_t data_row;   // 1-based index among data rows
  std::string reason;     // the reject reason ingest must report
};

struct GroundTruth {
  std::vector<CustomerDayTruth> days;
  std::vector<CorruptionRecord> corrupted;
  std::size_t ping_rows = 0;  // data rows emitted (incl. corrupted)
  std::size_t pos_rows = 0;
  Money total_revenue;

  std::string to_json_text() const;
};

struct GeneratedCorpus {
  std::map<std::string, std::string> files;  // file name -> bytes
  GroundTruth truth;
  StoreMap map;
};

/// Runs the simulation in memory. File set: pings.csv, pos.csv, cost.csv,
/// catalog.csv, demographics.csv, zones.csv.
GeneratedCorpus generate_corpus(const SimConfig& config);

/// generate_corpus + write everything (plus ground_truth.json and the
/// resolved sim_config.json) under out_dir.
GeneratedCorpus generate_to_dir(const SimConfig& config, const std::filesystem::path& out_dir);

}  // namespace retail
