#include "retail/common.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>

namespace retail {

const char* err_name(Err code) {
  switch (code) {
    case Err::MalformedRow: return "MALFORMED_ROW";
    case Err::OverlappingZones: return "OVERLAPPING_ZONES";
    case Err::DuplicateName: return "DUPLICATE_NAME";
    case Err::DuplicateSequence: return "DUPLICATE_SEQUENCE";
    case Err::NonFiniteCoordinate: return "NON_FINITE_COORDINATE";
    case Err::UndecodableInput: return "UNDECODABLE_INPUT";
    case Err::BadHeader: return "BAD_HEADER";
    case Err::StorageFailure: return "STORAGE_FAILURE";
    case Err::NonMonotonicAfterSort: return "NON_MONOTONIC_AFTER_SORT";
    case Err::SeriesTooShort: return "SERIES_TOO_SHORT";
    case Err::UnresolvedKey: return "UNRESOLVED_KEY";
    case Err::UnknownLevel: return "UNKNOWN_LEVEL";
    case Err::UnknownMeasure: return "UNKNOWN_MEASURE";
    case Err::IncompatibleLevel: return "INCOMPATIBLE_LEVEL";
    case Err::EmptyWarehouse: return "EMPTY_WAREHOUSE";
    case Err::NonAdditiveMeasure: return "NON_ADDITIVE_MEASURE";
    case Err::EmptyRange: return "EMPTY_RANGE";
    case Err::UnknownCustomer: return "UNKNOWN_CUSTOMER";
    case Err::DivisionByZeroBaseline: return "DIVISION_BY_ZERO_BASELINE";
    case Err::MissingPeriod: return "MISSING_PERIOD";
    case Err::UnknownKpiInConfig: return "UNKNOWN_KPI_IN_CONFIG";
    case Err::InvalidConfig: return "INVALID_CONFIG";
    case Err::MissingStage: return "MISSING_STAGE";
    case Err::WorkspaceBusy: return "WORKSPACE_BUSY";
    case Err::UsageError: return "USAGE_ERROR";
  }
  return "UNKNOWN_ERROR";
}

// ---------------------------------------------------------------------------
// Money
// ---------------------------------------------------------------------------

std::optional<Money> parse_money(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool negative = false;
  std::size_t i = 0;
  if (text[0] == '-') { negative = true; i = 1; }
  if (i >= text.size()) return std::nullopt;

  std::int64_t whole = 0;
  std::size_t digits = 0;
  while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
    whole = whole * 10 + (text[i] - '0');
    ++i; ++digits;
    if (digits > 15) return std::nullopt;
  }
  if (digits == 0) return std::nullopt;

  std::int64_t frac = 0;
  if (i < text.size()) {
    if (text[i] != '.') return std::nullopt;
    ++i;
    std::size_t frac_digits = 0;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
      frac = frac * 10 + (text[i] - '0');
      ++i; ++frac_digits;
    }
    if (frac_digits == 0 || frac_digits > 2 || i != text.size()) return std::nullopt;
    if (frac_digits == 1) frac *= 10;
  }
  std::int64_t cents = whole * 100 + frac;
  return Money{negative ? -cents : cents};
}

std::string format_money(Money m) {
  std::int64_t c = m.cents;
  bool negative = c < 0;
  if (negative) c = -c;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%lld.%02lld", negative ? "-" : "",
                static_cast<long long>(c / 100), static_cast<long long>(c % 100));
  return buf;
}

// ---------------------------------------------------------------------------
// Ratio
// ---------------------------------------------------------------------------

Ratio Ratio::of(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error(Err::DivisionByZeroBaseline, "ratio denominator is zero");
  if (den < 0) { num = -num; den = -den; }
  return Ratio{num, den};
}

int Ratio::cmp(const Ratio& other) const {
  __int128 lhs = static_cast<__int128>(num) * other.den;
  __int128 rhs = static_cast<__int128>(other.num) * den;
  if (lhs < rhs) return -1;
  if (lhs > rhs) return 1;
  return 0;
}

std::string Ratio::render4() const {
  // round(num * 10^4 / den) half away from zero, exact integer arithmetic
  __int128 scaled = static_cast<__int128>(num) * 10000;
  bool negative = scaled < 0;
  __int128 mag = negative ? -scaled : scaled;
  __int128 q = mag / den;
  __int128 r = mag % den;
  if (2 * r >= den) ++q;
  long long whole = static_cast<long long>(q / 10000);
  long long frac = static_cast<long long>(q % 10000);
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%lld.%04lld", negative ? "-" : "", whole, frac);
  return buf;
}

// ---------------------------------------------------------------------------
// Time
// ---------------------------------------------------------------------------

std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yy + (m <= 2));
}

namespace {

bool parse_uint_field(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (i >= s.size() || s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}

bool days_in_month_ok(int y, int m, int d) {
  static const int dim[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m < 1 || m > 12 || d < 1) return false;
  int limit = dim[m - 1];
  if (m == 2 && ((y % 4 == 0 && y % 100 != 0) || y % 400 == 0)) limit = 29;
  return d <= limit;
}

// Parses "YYYY-MM-DDTHH:MM:SS" prefix; on success sets epoch and returns the
// number of characters consumed (19).
bool parse_datetime_prefix(std::string_view s, std::int64_t& epoch) {
  if (s.size() < 19) return false;
  int y, mo, d, h, mi, se;
  if (!parse_uint_field(s, 0, 4, y) || s[4] != '-' || !parse_uint_field(s, 5, 2, mo) ||
      s[7] != '-' || !parse_uint_field(s, 8, 2, d) || s[10] != 'T' ||
      !parse_uint_field(s, 11, 2, h) || s[13] != ':' || !parse_uint_field(s, 14, 2, mi) ||
      s[16] != ':' || !parse_uint_field(s, 17, 2, se)) {
    return false;
  }
  if (!days_in_month_ok(y, mo, d) || h > 23 || mi > 59 || se > 59) return false;
  epoch = days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + se;
  return true;
}

// Parses the zone designator at s[pos..]: "Z" or "+HH:MM"/"-HH:MM".
bool parse_offset(std::string_view s, std::size_t pos, std::int64_t& offset_s) {
  if (pos >= s.size()) return false;
  if (s[pos] == 'Z') { offset_s = 0; return pos + 1 == s.size(); }
  if (s[pos] != '+' && s[pos] != '-') return false;
  if (pos + 6 != s.size()) return false;
  int oh, om;
  if (!parse_uint_field(s, pos + 1, 2, oh) || s[pos + 3] != ':' ||
      !parse_uint_field(s, pos + 4, 2, om)) {
    return false;
  }
  if (oh > 14 || om > 59) return false;
  offset_s = (oh * 3600 + om * 60) * (s[pos] == '-' ? -1 : 1);
  return true;
}

}  // namespace

std::optional<std::int64_t> parse_iso8601(std::string_view text) {
  std::int64_t epoch, offset;
  if (!parse_datetime_prefix(text, epoch)) return std::nullopt;
  if (!parse_offset(text, 19, offset)) return std::nullopt;
  return epoch - offset;
}

std::optional<double> parse_iso8601_frac(std::string_view text) {
  std::int64_t epoch;
  if (!parse_datetime_prefix(text, epoch)) return std::nullopt;
  std::size_t pos = 19;
  double frac = 0.0;
  if (pos < text.size() && text[pos] == '.') {
    std::size_t end = pos + 1;
    while (end < text.size() && text[end] >= '0' && text[end] <= '9') ++end;
    if (end == pos + 1) return std::nullopt;
    double v = 0;
    auto rc = std::from_chars(text.data() + pos, text.data() + end, v);
    if (rc.ec != std::errc()) return std::nullopt;
    frac = v;
    pos = end;
  }
  std::int64_t offset;
  if (!parse_offset(text, pos, offset)) return std::nullopt;
  return static_cast<double>(epoch - offset) + frac;
}

std::string format_iso_utc(std::int64_t epoch_s) {
  std::int64_t days = epoch_s / 86400;
  std::int64_t sod = epoch_s % 86400;
  if (sod < 0) { sod += 86400; --days; }
  int y, m, d;
  civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02lld:%02lld:%02lldZ", y, m, d,
                static_cast<long long>(sod / 3600), static_cast<long long>((sod / 60) % 60),
                static_cast<long long>(sod % 60));
  return buf;
}

std::string format_iso_utc_frac(double epoch_s) {
  double whole = std::floor(epoch_s);
  double frac = epoch_s - whole;
  std::string out = format_iso_utc(static_cast<std::int64_t>(whole));
  if (frac > 0.0) {
    std::string f = format_double(frac);  // "0.5", "0.25", ...
    out.pop_back();                       // strip 'Z'
    out += f.substr(1);                   // append ".5"
    out += 'Z';
  }
  return out;
}

std::optional<std::int64_t> parse_date(std::string_view text) {
  if (text.size() != 10) return std::nullopt;
  int y, m, d;
  if (!parse_uint_field(text, 0, 4, y) || text[4] != '-' || !parse_uint_field(text, 5, 2, m) ||
      text[7] != '-' || !parse_uint_field(text, 8, 2, d)) {
    return std::nullopt;
  }
  if (!days_in_month_ok(y, m, d)) return std::nullopt;
  return days_from_civil(y, m, d) * 86400;
}

std::int32_t date_key_from_epoch(std::int64_t epoch_s) {
  std::int64_t days = epoch_s / 86400;
  if (epoch_s % 86400 < 0) --days;
  int y, m, d;
  civil_from_days(days, y, m, d);
  return static_cast<std::int32_t>(y * 10000 + m * 100 + d);
}

std::int64_t epoch_from_date_key(std::int32_t date_key) {
  return days_from_civil(date_key / 10000, (date_key / 100) % 100, date_key % 100) * 86400;
}

std::string date_string_from_key(std::int32_t date_key) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", date_key / 10000, (date_key / 100) % 100,
                date_key % 100);
  return buf;
}

int day_of_date_key(std::int32_t k) { return k % 100; }
int month_of_date_key(std::int32_t k) { return (k / 100) % 100; }
int quarter_of_date_key(std::int32_t k) { return (month_of_date_key(k) - 1) / 3 + 1; }
int year_of_date_key(std::int32_t k) { return k / 10000; }

bool valid_date_key(std::int32_t k) {
  return k > 0 && days_in_month_ok(k / 10000, (k / 100) % 100, k % 100);
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

std::optional<std::vector<std::string>> csv_split(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool in_quotes = false;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') { current += '"'; i += 2; continue; }
        in_quotes = false;
        ++i;
      } else {
        current += c;
        ++i;
      }
    } else if (c == '"') {
      if (!current.empty()) return std::nullopt;  // quote opening mid-field
      in_quotes = true;
      ++i;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
      ++i;
    } else {
      current += c;
      ++i;
    }
  }
  if (in_quotes) return std::nullopt;  // unterminated quote
  fields.push_back(std::move(current));
  return fields;
}

std::string csv_field(std::string_view value) {
  bool needs_quotes = value.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::string csv_join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  return out;
}

bool LineReader::next(std::string_view& line) {
  if (pos_ >= data_.size()) return false;
  std::size_t end = data_.find('\n', pos_);
  std::size_t stop = (end == std::string_view::npos) ? data_.size() : end;
  std::size_t len = stop - pos_;
  if (len > 0 && data_[pos_ + len - 1] == '\r') --len;
  line = data_.substr(pos_, len);
  pos_ = (end == std::string_view::npos) ? data_.size() : end + 1;
  ++line_no_;
  return true;
}

bool valid_utf8(std::string_view bytes) {
  std::size_t i = 0;
  const auto cont = [&](std::size_t k) {
    return i + k < bytes.size() && (static_cast<unsigned char>(bytes[i + k]) & 0xC0) == 0x80;
  };
  while (i < bytes.size()) {
    unsigned char c = static_cast<unsigned char>(bytes[i]);
    if (c < 0x80) { ++i; continue; }
    if ((c & 0xE0) == 0xC0) {
      if (c < 0xC2 || !cont(1)) return false;
      i += 2;
    } else if ((c & 0xF0) == 0xE0) {
      if (!cont(1) || !cont(2)) return false;
      unsigned char c1 = static_cast<unsigned char>(bytes[i + 1]);
      if (c == 0xE0 && c1 < 0xA0) return false;
      if (c == 0xED && c1 > 0x9F) return false;  // surrogates
      i += 3;
    } else if ((c & 0xF8) == 0xF0) {
      if (c > 0xF4 || !cont(1) || !cont(2) || !cont(3)) return false;
      unsigned char c1 = static_cast<unsigned char>(bytes[i + 1]);
      if (c == 0xF0 && c1 < 0x90) return false;
      if (c == 0xF4 && c1 > 0x8F) return false;
      i += 4;
    } else {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Numbers
// ---------------------------------------------------------------------------

std::optional<double> parse_double(std::string_view text) {
  if (text.empty()) return std::nullopt;
  double v = 0;
  auto rc = std::from_chars(text.data(), text.data() + text.size(), v);
  if (rc.ec != std::errc() || rc.ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

std::optional<std::int64_t> parse_int(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::int64_t v = 0;
  auto rc = std::from_chars(text.data(), text.data() + text.size(), v);
  if (rc.ec != std::errc() || rc.ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

std::string format_double(double v) {
  char buf[64];
  auto rc = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, rc.ptr);
}

std::string format_fixed(double v, int precision) {
  char buf[64];
  auto rc = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
  return std::string(buf, rc.ptr);
}

// ---------------------------------------------------------------------------
// Hashing
// ---------------------------------------------------------------------------

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// ---------------------------------------------------------------------------
// PRNG
// ---------------------------------------------------------------------------

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

Xoshiro256::Xoshiro256(std::uint64_t seed) : seed_(seed) {
  SplitMix64 sm(seed);
  for (auto& s : s_) s = sm.next();
}

static inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

std::uint64_t Xoshiro256::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256::uniform01() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t Xoshiro256::below(std::uint64_t n) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(next()) * static_cast<unsigned __int128>(n)) >> 64);
}

std::int64_t Xoshiro256::range_int(std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
}

double Xoshiro256::range_double(double lo, double hi) {
  return lo + uniform01() * (hi - lo);
}

Xoshiro256 Xoshiro256::child(std::uint64_t tag_a, std::uint64_t tag_b) const {
  SplitMix64 sm(seed_ ^ (tag_a * 0x9e3779b97f4a7c15ull) ^ (tag_b * 0xd1b54a32d192ed03ull));
  std::uint64_t derived = sm.next();
  return Xoshiro256(derived);
}

}  // namespace retail
