#include "retail/storemap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace retail {

namespace {

constexpr std::string_view kHeader = "area_name,x0,y0,x1,y1,sequence_index";

bool rects_overlap(const Zone& a, const Zone& b) {
  double w = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
  double h = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  return w > 0 && h > 0;  // touching edges have zero intersection area
}

}  // namespace

StoreMap StoreMap::from_zones(std::vector<Zone> zones) {
  StoreMap map;
  std::set<std::string> names;
  std::set<std::int32_t> sequences;
  for (std::size_t i = 0; i < zones.size(); ++i) {
    Zone& z = zones[i];
    z.area_key = static_cast<std::int32_t>(i + 1);
    if (z.area_name.empty()) {
      throw Error(Err::MalformedRow, "zone " + std::to_string(i + 1) + " has empty name");
    }
    if (!(z.x0 < z.x1) || !(z.y0 < z.y1)) {
      throw Error(Err::MalformedRow, "zone '" + z.area_name + "' has a degenerate rectangle");
    }
    if (z.sequence_index < 0) {
      throw Error(Err::MalformedRow, "zone '" + z.area_name + "' has negative sequence_index");
    }
    if (!names.insert(z.area_name).second) {
      throw Error(Err::DuplicateName, "zone name '" + z.area_name + "' appears twice");
    }
    if (!sequences.insert(z.sequence_index).second) {
      throw Error(Err::DuplicateSequence,
                  "sequence_index " + std::to_string(z.sequence_index) + " appears twice");
    }
  }
  for (std::size_t i = 0; i < zones.size(); ++i) {
    for (std::size_t j = i + 1; j < zones.size(); ++j) {
      if (rects_overlap(zones[i], zones[j])) {
        throw Error(Err::OverlappingZones,
                    "zones '" + zones[i].area_name + "' and '" + zones[j].area_name +
                        "' overlap");
      }
    }
  }
  if (!zones.empty()) {
    map.bounds_ = {zones[0].x0, zones[0].y0, zones[0].x1, zones[0].y1};
    for (const Zone& z : zones) {
      map.bounds_.x0 = std::min(map.bounds_.x0, z.x0);
      map.bounds_.y0 = std::min(map.bounds_.y0, z.y0);
      map.bounds_.x1 = std::max(map.bounds_.x1, z.x1);
      map.bounds_.y1 = std::max(map.bounds_.y1, z.y1);
    }
  }
  map.zones_ = std::move(zones);
  return map;
}

StoreMap StoreMap::load(std::string_view csv_bytes) {
  if (!valid_utf8(csv_bytes)) {
    throw Error(Err::UndecodableInput, "zone file is not valid UTF-8");
  }
  LineReader reader(csv_bytes);
  std::string_view line;
  if (!reader.next(line)) return StoreMap{};  // empty document: zero zones
  if (line != kHeader) {
    throw Error(Err::BadHeader, "zone file header must be '" + std::string(kHeader) + "'");
  }
  std::vector<Zone> zones;
  while (reader.next(line)) {
    if (line.empty()) continue;
    auto fields = csv_split(line);
    if (!fields || fields->size() != 6) {
      throw Error(Err::MalformedRow, "zone file line " + std::to_string(reader.line_number()));
    }
    Zone z;
    z.area_name = (*fields)[0];
    auto x0 = parse_double((*fields)[1]);
    auto y0 = parse_double((*fields)[2]);
    auto x1 = parse_double((*fields)[3]);
    auto y1 = parse_double((*fields)[4]);
    auto seq = parse_int((*fields)[5]);
    bool ok = x0 && y0 && x1 && y1 && seq && std::isfinite(*x0) && std::isfinite(*y0) &&
              std::isfinite(*x1) && std::isfinite(*y1) && z.area_name.size() > 0;
    if (!ok) {
      throw Error(Err::MalformedRow, "zone file line " + std::to_string(reader.line_number()));
    }
    z.x0 = *x0; z.y0 = *y0; z.x1 = *x1; z.y1 = *y1;
    z.sequence_index = static_cast<std::int32_t>(*seq);
    zones.push_back(std::move(z));
  }
  return from_zones(std::move(zones));
}

StoreMap StoreMap::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Err::StorageFailure, "cannot open zone file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load(buf.str());
}

std::optional<std::int32_t> StoreMap::locate(double x, double y) const {
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw Error(Err::NonFiniteCoordinate, "locate() requires finite coordinates");
  }
  for (const Zone& z : zones_) {
    if (z.contains(x, y)) return z.area_key;
  }
  return std::nullopt;
}

const Zone* StoreMap::find(std::int32_t area_key) const {
  for (const Zone& z : zones_) {
    if (z.area_key == area_key) return &z;
  }
  return nullptr;
}

const Zone* StoreMap::find_name(std::string_view area_name) const {
  for (const Zone& z : zones_) {
    if (z.area_name == area_name) return &z;
  }
  return nullptr;
}

std::string StoreMap::to_csv() const {
  std::string out(kHeader);
  out += '\n';
  for (const Zone& z : zones_) {
    out += csv_join({z.area_name, format_double(z.x0), format_double(z.y0), format_double(z.x1),
                     format_double(z.y1), std::to_string(z.sequence_index)});
    out += '\n';
  }
  return out;
}

}  // namespace retail
