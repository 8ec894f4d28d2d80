#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "retail/common.hpp"

namespace retail {

/// Axis-aligned rectangular department, half-open on the high edges:
/// [x0, x1) x [y0, y1). Half-open edges keep point-to-zone mapping unique
/// where rectangles touch.
struct Zone {
  std::int32_t area_key = 0;  // 1..N in file order; 0 is reserved for UNZONED
  std::string area_name;
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  std::int32_t sequence_index = 0;

  bool contains(double x, double y) const {
    return x >= x0 && x < x1 && y >= y0 && y < y1;
  }
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

struct Rect {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

/// Immutable store floor plan. Safe for concurrent reads once loaded.
class StoreMap {
 public:
  StoreMap() = default;

  /// Builds a map from already-parsed zones (surrogate keys are reassigned
  /// 1..N in the given order). Validates geometry and uniqueness.
  static StoreMap from_zones(std::vector<Zone> zones);

  /// Parses the zone-definition CSV:
  ///   area_name,x0,y0,x1,y1,sequence_index
  static StoreMap load(std::string_view csv_bytes);
  static StoreMap load_file(const std::string& path);

  /// Zone containing (x, y), or nullopt for aisle/unzoned space.
  std::optional<std::int32_t> locate(double x, double y) const;

  const std::vector<Zone>& zones() const { return zones_; }
  const Rect& bounds() const { return bounds_; }
  bool empty() const { return zones_.empty(); }
  const Zone* find(std::int32_t area_key) const;
  const Zone* find_name(std::string_view area_name) const;

  std::string to_csv() const;

 private:
  std::vector<Zone> zones_;
  Rect bounds_;
};

}  // namespace retail
