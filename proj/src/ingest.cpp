#include "retail/ingest.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>

namespace retail {

namespace {

// Sanity envelope for coordinates; ingest has no store map, so anything
// wildly outside a plausible floor plan is rejected here.
constexpr double kCoordBound = 10000.0;

struct NullCounter {
  std::vector<std::pair<std::string, std::size_t>> counts;
  explicit NullCounter(std::initializer_list<const char*> columns) {
    for (const char* c : columns) counts.emplace_back(c, 0);
  }
  void tally(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < counts.size() && i < fields.size(); ++i) {
      if (fields[i].empty()) ++counts[i].second;
    }
  }
};

void reject_row(PingParseResult& r, std::size_t line_no, std::string_view raw,
                const char* reason) {
  r.rejects.push_back({line_no, reason, std::string(raw)});
  ++r.report.rows_rejected;
  ++r.report.reject_reasons[reason];
}

void reject_row(PosParseResult& r, std::size_t line_no, std::string_view raw,
                const char* reason) {
  r.rejects.push_back({line_no, reason, std::string(raw)});
  ++r.report.rows_rejected;
  ++r.report.reject_reasons[reason];
}

}  // namespace

std::string QualityReport::to_text() const {
  std::ostringstream out;
  out << "rows_read = " << rows_read << '\n';
  out << "rows_accepted = " << rows_accepted << '\n';
  out << "rows_rejected = " << rows_rejected << '\n';
  out << "duplicates = " << duplicates << '\n';
  out << "out_of_bounds = " << out_of_bounds << '\n';
  for (const auto& [reason, count] : reject_reasons) {
    out << "reject." << reason << " = " << count << '\n';
  }
  for (const auto& [column, count] : null_counts) {
    out << "nulls." << column << " = " << count << '\n';
  }
  return out.str();
}

PingParseResult parse_pings(std::string_view bytes) {
  if (!valid_utf8(bytes)) {
    throw Error(Err::UndecodableInput, "ping file is not valid UTF-8");
  }
  PingParseResult result;
  NullCounter nulls({"customer_id", "ts", "x", "y", "status"});
  LineReader reader(bytes);
  std::string_view line;
  if (!reader.next(line) || line != kPingHeader) {
    throw Error(Err::BadHeader, "ping file header must be '" + std::string(kPingHeader) + "'");
  }
  // (customer_id, ts) -> (x, y) of the first accepted fix
  std::unordered_map<std::string, std::pair<double, double>> seen;
  while (reader.next(line)) {
    if (line.empty()) continue;
    ++result.report.rows_read;
    const std::size_t line_no = reader.line_number();

    auto fields = csv_split(line);
    if (!fields || fields->size() != 5) {
      reject_row(result, line_no, line, reject::kBadColumnCount);
      continue;
    }
    nulls.tally(*fields);
    const auto& f = *fields;
    if (f[0].empty()) {
      reject_row(result, line_no, line, reject::kEmptyField);
      continue;
    }
    auto ts = parse_iso8601(f[1]);
    if (!ts) {
      reject_row(result, line_no, line, reject::kBadTimestamp);
      continue;
    }
    auto x = parse_double(f[2]);
    auto y = parse_double(f[3]);
    if (!x || !y) {
      reject_row(result, line_no, line, reject::kBadNumber);
      continue;
    }
    if (!std::isfinite(*x) || !std::isfinite(*y)) {
      reject_row(result, line_no, line, reject::kNonFinite);
      continue;
    }
    if (std::fabs(*x) > kCoordBound || std::fabs(*y) > kCoordBound) {
      ++result.report.out_of_bounds;
      reject_row(result, line_no, line, reject::kOutOfBounds);
      continue;
    }
    PingStatus status = PingStatus::None;
    if (f[4] == "SUS") status = PingStatus::Sus;
    else if (f[4] == "MIG") status = PingStatus::Mig;
    else if (!f[4].empty()) {
      reject_row(result, line_no, line, reject::kBadStatus);
      continue;
    }

    std::string key = f[0] + "\x1f" + std::to_string(*ts);
    auto [it, inserted] = seen.try_emplace(std::move(key), *x, *y);
    if (!inserted) {
      if (it->second.first == *x && it->second.second == *y) {
        ++result.report.duplicates;
        reject_row(result, line_no, line, reject::kDuplicate);
      } else {
        // Two positions in the same second cannot both be right.
        reject_row(result, line_no, line, reject::kConflictingFix);
      }
      continue;
    }

    result.accepted.push_back({f[0], *ts, *x, *y, status});
    ++result.report.rows_accepted;
  }
  result.report.null_counts = std::move(nulls.counts);
  return result;
}

PosParseResult parse_pos(std::string_view bytes) {
  if (!valid_utf8(bytes)) {
    throw Error(Err::UndecodableInput, "POS file is not valid UTF-8");
  }
  PosParseResult result;
  NullCounter nulls({"customer_id", "ts", "receipt_id", "sku_key", "product_name", "quantity",
                     "unit_price", "line_total"});
  LineReader reader(bytes);
  std::string_view line;
  if (!reader.next(line) || line != kPosHeader) {
    throw Error(Err::BadHeader, "POS file header must be '" + std::string(kPosHeader) + "'");
  }
  std::set<std::pair<std::string, std::string>> seen_lines;
  while (reader.next(line)) {
    if (line.empty()) continue;
    ++result.report.rows_read;
    const std::size_t line_no = reader.line_number();

    auto fields = csv_split(line);
    if (!fields || fields->size() != 8) {
      reject_row(result, line_no, line, reject::kBadColumnCount);
      continue;
    }
    nulls.tally(*fields);
    const auto& f = *fields;
    // customer_id may be empty (walk-in); receipt and SKU may not.
    if (f[2].empty() || f[3].empty()) {
      reject_row(result, line_no, line, reject::kEmptyField);
      continue;
    }
    auto ts = parse_iso8601(f[1]);
    if (!ts) {
      reject_row(result, line_no, line, reject::kBadTimestamp);
      continue;
    }
    auto qty = parse_int(f[5]);
    if (!qty) {
      reject_row(result, line_no, line, reject::kBadNumber);
      continue;
    }
    if (*qty <= 0) {
      reject_row(result, line_no, line, reject::kNonPositiveQty);
      continue;
    }
    auto unit_price = parse_money(f[6]);
    auto line_total = parse_money(f[7]);
    if (!unit_price || !line_total || unit_price->cents < 0 || line_total->cents < 0) {
      reject_row(result, line_no, line, reject::kBadMoney);
      continue;
    }
    if (line_total->cents != unit_price->cents * *qty) {
      reject_row(result, line_no, line, reject::kTotalMismatch);
      continue;
    }
    if (!seen_lines.emplace(f[2], f[3]).second) {
      reject_row(result, line_no, line, reject::kDuplicateLine);
      continue;
    }

    result.accepted.push_back({f[0], *ts, f[2], f[3], f[4], *qty, *unit_price, *line_total});
    ++result.report.rows_accepted;
  }
  result.report.null_counts = std::move(nulls.counts);
  return result;
}

std::string ping_to_csv_row(const Ping& p) {
  const char* status = p.status == PingStatus::Sus ? "SUS"
                       : p.status == PingStatus::Mig ? "MIG"
                                                     : "";
  return csv_join({p.customer_id, format_iso_utc(p.ts), format_double(p.x), format_double(p.y),
                   status});
}

std::string receipt_line_to_csv_row(const ReceiptLine& r) {
  return csv_join({r.customer_id, format_iso_utc(r.ts), r.receipt_id, r.sku_key, r.product_name,
                   std::to_string(r.quantity), format_money(r.unit_price),
                   format_money(r.line_total)});
}

}  // namespace retail
