#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "retail/common.hpp"

namespace retail {

enum class PingStatus { None, Sus, Mig };

/// One timestamped basket-tag observation, timestamps normalized to UTC.
struct Ping {
  std::string customer_id;
  std::int64_t ts = 0;  // epoch seconds, UTC
  double x = 0, y = 0;
  PingStatus status = PingStatus::None;
};

/// One POS line item. line_total is validated against quantity * unit_price
/// in exact fixed point at parse time.
struct ReceiptLine {
  std::string customer_id;  // empty = walk-in without loyalty ID
  std::int64_t ts = 0;
  std::string receipt_id;
  std::string sku_key;
  std::string product_name;
  std::int64_t quantity = 0;
  Money unit_price;
  Money line_total;
};

struct RejectedRow {
  std::size_t line_no = 0;   // physical line in the source file
  std::string reason;
  std::string raw;           // verbatim source line
};

/// Profile of one parse pass. rows_read = rows_accepted + rows_rejected holds
/// for every input.
struct QualityReport {
  std::size_t rows_read = 0;
  std::size_t rows_accepted = 0;
  std::size_t rows_rejected = 0;
  std::map<std::string, std::size_t> reject_reasons;
  std::vector<std::pair<std::string, std::size_t>> null_counts;  // per column, schema order
  std::size_t duplicates = 0;
  std::size_t out_of_bounds = 0;

  /// Deterministic key/value text rendering.
  std::string to_text() const;
};

struct PingParseResult {
  std::vector<Ping> accepted;
  std::vector<RejectedRow> rejects;
  QualityReport report;
};

struct PosParseResult {
  std::vector<ReceiptLine> accepted;
  std::vector<RejectedRow> rejects;
  QualityReport report;
};

/// Ping CSV header: customer_id,ts,x,y,status  (status may be empty).
/// Every data line lands in exactly one of accepted/rejects.
PingParseResult parse_pings(std::string_view bytes);

/// POS CSV header:
///   customer_id,ts,receipt_id,sku_key,product_name,quantity,unit_price,line_total
PosParseResult parse_pos(std::string_view bytes);

// Reject reasons (also the keys of QualityReport::reject_reasons).
namespace reject {
inline constexpr const char* kBadColumnCount = "BAD_COLUMN_COUNT";
inline constexpr const char* kBadTimestamp = "BAD_TIMESTAMP";
inline constexpr const char* kBadNumber = "BAD_NUMBER";
inline constexpr const char* kBadMoney = "BAD_MONEY";
inline constexpr const char* kBadStatus = "BAD_STATUS";
inline constexpr const char* kEmptyField = "EMPTY_FIELD";
inline constexpr const char* kNonFinite = "NON_FINITE_COORDINATE";
inline constexpr const char* kOutOfBounds = "OUT_OF_BOUNDS";
inline constexpr const char* kDuplicate = "DUPLICATE";
inline constexpr const char* kConflictingFix = "CONFLICTING_FIX";
inline constexpr const char* kTotalMismatch = "TOTAL_MISMATCH";
inline constexpr const char* kDuplicateLine = "DUPLICATE_LINE";
inline constexpr const char* kNonPositiveQty = "NON_POSITIVE_QTY";
}  // namespace reject

std::string ping_to_csv_row(const Ping& p);
std::string receipt_line_to_csv_row(const ReceiptLine& r);

inline constexpr std::string_view kPingHeader = "customer_id,ts,x,y,status";
inline constexpr std::string_view kPosHeader =
    "customer_id,ts,receipt_id,sku_key,product_name,quantity,unit_price,line_total";

}  // namespace retail
