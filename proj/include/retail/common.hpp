#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace retail {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class Err {
  MalformedRow,
  OverlappingZones,
  DuplicateName,
  DuplicateSequence,
  NonFiniteCoordinate,
  UndecodableInput,
  BadHeader,
  StorageFailure,
  NonMonotonicAfterSort,
  SeriesTooShort,
  UnresolvedKey,
  UnknownLevel,
  UnknownMeasure,
  IncompatibleLevel,
  EmptyWarehouse,
  NonAdditiveMeasure,
  EmptyRange,
  UnknownCustomer,
  DivisionByZeroBaseline,
  MissingPeriod,
  UnknownKpiInConfig,
  InvalidConfig,
  MissingStage,
  WorkspaceBusy,
  UsageError,
};

const char* err_name(Err code);

/// Typed pipeline error. `code()` maps onto the CLI exit-code table.
class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& message)
      : std::runtime_error(std::string(err_name(code)) + ": " + message), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

// ---------------------------------------------------------------------------
// Money: fixed point, 2 decimals, stored as integer cents.
// ---------------------------------------------------------------------------

struct Money {
  std::int64_t cents = 0;

  friend Money operator+(Money a, Money b) { return {a.cents + b.cents}; }
  friend Money operator-(Money a, Money b) { return {a.cents - b.cents}; }
  friend Money operator*(Money a, std::int64_t k) { return {a.cents * k}; }
  Money& operator+=(Money o) { cents += o.cents; return *this; }
  Money& operator-=(Money o) { cents -= o.cents; return *this; }
  friend bool operator==(Money a, Money b) { return a.cents == b.cents; }
  friend bool operator!=(Money a, Money b) { return a.cents != b.cents; }
  friend bool operator<(Money a, Money b) { return a.cents < b.cents; }
  friend bool operator>(Money a, Money b) { return a.cents > b.cents; }
  friend bool operator>=(Money a, Money b) { return a.cents >= b.cents; }
};

/// Parses "123", "123.4", "123.45" (optionally signed). At most two decimals;
/// no exponent, no thousands separators.
std::optional<Money> parse_money(std::string_view text);
std::string format_money(Money m);

// ---------------------------------------------------------------------------
// Exact ratio of two 64-bit integers. Comparisons cross-multiply in 128 bits,
// so KPI boundary checks are exact (0.99 vs 99/100 never misses on rounding).
// ---------------------------------------------------------------------------

struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;  // always > 0

  static Ratio of(std::int64_t num, std::int64_t den);
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  /// -1, 0, +1 against another ratio.
  int cmp(const Ratio& other) const;
  /// Rendered at 4 decimal places, round half away from zero.
  std::string render4() const;
};

// ---------------------------------------------------------------------------
// Time: UTC epoch seconds + proleptic Gregorian civil conversions.
// ---------------------------------------------------------------------------

std::int64_t days_from_civil(int y, int m, int d);
void civil_from_days(std::int64_t z, int& y, int& m, int& d);

/// Strict ISO-8601 "YYYY-MM-DDTHH:MM:SS" with "Z" or "+HH:MM"/"-HH:MM" offset,
/// normalized to UTC epoch seconds. Second resolution only.
std::optional<std::int64_t> parse_iso8601(std::string_view text);
/// As above but tolerates a fractional-seconds part (warehouse reload path).
std::optional<double> parse_iso8601_frac(std::string_view text);
std::string format_iso_utc(std::int64_t epoch_s);
/// Fractional variant; emits seconds with a shortest-round-trip fraction.
std::string format_iso_utc_frac(double epoch_s);

/// "YYYY-MM-DD" -> epoch seconds at 00:00:00Z.
std::optional<std::int64_t> parse_date(std::string_view text);

std::int32_t date_key_from_epoch(std::int64_t epoch_s);       // yyyymmdd, UTC day
std::int64_t epoch_from_date_key(std::int32_t date_key);      // 00:00:00Z
std::string date_string_from_key(std::int32_t date_key);      // "YYYY-MM-DD"
int day_of_date_key(std::int32_t date_key);
int month_of_date_key(std::int32_t date_key);
int quarter_of_date_key(std::int32_t date_key);
int year_of_date_key(std::int32_t date_key);
bool valid_date_key(std::int32_t date_key);

// ---------------------------------------------------------------------------
// CSV (RFC4180-style quoting, single physical line per record; our formats
// never embed newlines, so an unterminated quote is a malformed row).
// ---------------------------------------------------------------------------

std::optional<std::vector<std::string>> csv_split(std::string_view line);
std::string csv_field(std::string_view value);
std::string csv_join(const std::vector<std::string>& fields);

/// Iterates physical lines of a buffer, tolerating \r\n and a missing final
/// newline. Returns false when exhausted.
class LineReader {
 public:
  explicit LineReader(std::string_view data) : data_(data) {}
  bool next(std::string_view& line);
  std::size_t line_number() const { return line_no_; }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

bool valid_utf8(std::string_view bytes);

// ---------------------------------------------------------------------------
// Numeric parsing/printing helpers (locale independent).
// ---------------------------------------------------------------------------

std::optional<double> parse_double(std::string_view text);   // full-token, finite or inf/nan
std::optional<std::int64_t> parse_int(std::string_view text);
std::string format_double(double v);                         // shortest round-trip
std::string format_fixed(double v, int precision);

// ---------------------------------------------------------------------------
// FNV-1a 64-bit checksum (staging idempotency key).
// ---------------------------------------------------------------------------

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

// ---------------------------------------------------------------------------
// Pinned portable PRNG: xoshiro256** seeded via splitmix64. Identical output
// on every platform; the generator contract depends on it.
// ---------------------------------------------------------------------------

struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next();
};

class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed);
  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform integer in [0, n), n > 0. Lemire multiply-shift (no rejection).
  std::uint64_t below(std::uint64_t n);
  std::int64_t range_int(std::int64_t lo, std::int64_t hi);   // inclusive
  double range_double(double lo, double hi);
  /// Derives an independent child stream; tags keep streams stable when the
  /// config changes elsewhere.
  Xoshiro256 child(std::uint64_t tag_a, std::uint64_t tag_b = 0) const;

 private:
  std::uint64_t s_[4];
  std::uint64_t seed_;
};

}  // namespace retail
