#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "retail/cube.hpp"
#include "retail/ingest.hpp"
#include "retail/trajectory.hpp"
#include "retail/warehouse.hpp"

#ifdef __unix__
#include <sys/wait.h>
#include <unistd.h>
#endif

namespace testutil {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("retail_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

struct CmdResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

inline CmdResult run_cmd(const std::string& cmd) {
  CmdResult result;
  std::string full = cmd + " 2>&1";
  FILE* pipe = ::popen(full.c_str(), "r");
  if (!pipe) return result;
  char buf[4096];
  std::size_t n;
  while ((n = ::fread(buf, 1, sizeof buf, pipe)) > 0) result.output.append(buf, n);
  int status = ::pclose(pipe);
#ifdef __unix__
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#else
  result.exit_code = status;
#endif
  return result;
}

/// Relative path -> bytes for every regular file under root ("lock" skipped).
inline std::map<std::string, std::string> dir_contents(const fs::path& root) {
  std::map<std::string, std::string> out;
  if (!fs::exists(root)) return out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::string rel = fs::relative(entry.path(), root).string();
    if (rel == "lock") continue;
    out[rel] = read_file(entry.path());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Independent O(n^2) segmentation reference: replays the stop predicate on
// every candidate window with from-scratch arithmetic. Kept deliberately
// separate from the production extend/scan implementation.
// ---------------------------------------------------------------------------

struct OracleSegment {
  retail::MovementKind kind;
  double t_start, t_end;
};

namespace oracle_detail {

inline bool window_ok(const std::vector<retail::Ping>& p, std::size_t i, std::size_t j,
                      double radius) {
  double sx = 0, sy = 0;
  for (std::size_t k = i; k <= j; ++k) {
    sx += p[k].x;
    sy += p[k].y;
  }
  double n = static_cast<double>(j - i + 1);
  double cx = sx / n, cy = sy / n;
  for (std::size_t k = i; k <= j; ++k) {
    double dx = p[k].x - cx, dy = p[k].y - cy;
    if (std::sqrt(dx * dx + dy * dy) > radius) return false;
  }
  return true;
}

// largest j such that windows (i,i+1), (i,i+2), ..., (i,j) all pass
inline std::size_t oracle_extend(const std::vector<retail::Ping>& p, std::size_t i,
                                 double radius) {
  std::size_t j = i;
  while (j + 1 < p.size() && window_ok(p, i, j + 1, radius)) ++j;
  return j;
}

inline bool stop_starts_at(const std::vector<retail::Ping>& p, std::size_t i,
                           const retail::SegmentationParams& prm, std::size_t& last) {
  std::size_t j = oracle_extend(p, i, prm.stop_radius_m);
  if (j > i && static_cast<double>(p[j].ts - p[i].ts) >= prm.min_stop_duration_s) {
    last = j;
    return true;
  }
  return false;
}

inline void oracle_subtrack(const std::vector<retail::Ping>& p,
                            const retail::SegmentationParams& prm,
                            std::vector<OracleSegment>& out) {
  const std::size_t n = p.size();
  if (n < 2) return;
  std::size_t i = 0;
  while (i < n - 1) {
    std::size_t last;
    if (stop_starts_at(p, i, prm, last)) {
      out.push_back({retail::MovementKind::Stop, static_cast<double>(p[i].ts),
                     static_cast<double>(p[last].ts)});
      i = last;
      continue;
    }
    std::size_t k = i + 1;
    while (k < n - 1 && !stop_starts_at(p, k, prm, last)) ++k;
    out.push_back({retail::MovementKind::Move, static_cast<double>(p[i].ts),
                   static_cast<double>(p[k].ts)});
    i = k;
  }
}

}  // namespace oracle_detail

inline std::vector<OracleSegment> oracle_segment(const std::vector<retail::Ping>& series,
                                                 const retail::SegmentationParams& prm) {
  std::vector<OracleSegment> out;
  std::vector<retail::Ping> sub;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!sub.empty() &&
        static_cast<double>(series[i].ts - sub.back().ts) > prm.max_gap_s) {
      oracle_detail::oracle_subtrack(sub, prm, out);
      sub.clear();
    }
    sub.push_back(series[i]);
  }
  oracle_detail::oracle_subtrack(sub, prm, out);
  return out;
}

// ---------------------------------------------------------------------------
// Naive full-scan rollup reference with its own level rendering.
// ---------------------------------------------------------------------------

namespace naive {

inline std::string age_band(const std::optional<int>& age) {
  if (!age) return "UNKNOWN";
  int a = *age;
  if (a <= 17) return "0-17";
  if (a <= 24) return "18-24";
  if (a <= 34) return "25-34";
  if (a <= 44) return "35-44";
  if (a <= 54) return "45-54";
  if (a <= 64) return "55-64";
  return "65+";
}

inline std::string render_level(const retail::Warehouse& wh, retail::Level level,
                                std::int32_t date_key, std::int32_t area_key,
                                std::int32_t customer_key, std::int32_t product_key,
                                std::int32_t movement_key) {
  using retail::Level;
  char buf[24];
  switch (level) {
    case Level::Year:
      return std::to_string(date_key / 10000);
    case Level::Quarter:
      std::snprintf(buf, sizeof buf, "%04d-Q%d", date_key / 10000,
                    ((date_key / 100) % 100 - 1) / 3 + 1);
      return buf;
    case Level::Month:
      std::snprintf(buf, sizeof buf, "%04d-%02d", date_key / 10000, (date_key / 100) % 100);
      return buf;
    case Level::Day:
      std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", date_key / 10000,
                    (date_key / 100) % 100, date_key % 100);
      return buf;
    case Level::Zone: {
      const retail::AreaRow* a = wh.find_area(area_key);
      return a ? a->area_name : std::to_string(area_key);
    }
    case Level::Product: {
      const retail::DmProduct* p = wh.find_product(product_key);
      return p ? p->sku_key : std::to_string(product_key);
    }
    case Level::Supplier: {
      const retail::DmProduct* p = wh.find_product(product_key);
      if (!p) return "?";
      return wh.suppliers().at(static_cast<std::size_t>(p->supplier_key) - 1).supplier_name;
    }
    case Level::Customer: {
      const retail::DmCustomer* c = wh.find_customer_by_key(customer_key);
      return c ? c->customer_id : std::to_string(customer_key);
    }
    case Level::Gender: {
      const retail::DmCustomer* c = wh.find_customer_by_key(customer_key);
      return retail::gender_name(c ? c->gender : retail::Gender::Unknown);
    }
    case Level::AgeBand: {
      const retail::DmCustomer* c = wh.find_customer_by_key(customer_key);
      return age_band(c ? c->age : std::nullopt);
    }
    case Level::Movement:
      return movement_key == 1 ? "STOP" : "MOVE";
  }
  return "?";
}

struct Totals {
  long long quantity = 0, revenue_c = 0, cost_c = 0, profit_c = 0, visits = 0;
  double dwell = 0, stop = 0, distance = 0;
};

/// Group key (rendered) -> totals, honoring the query's filters.
inline std::map<std::vector<std::string>, Totals> scan(const retail::Warehouse& wh,
                                                       const retail::CubeQuery& query) {
  using retail::Level;
  using retail::Measure;
  bool sales = false, behaviour = false;
  for (Measure m : query.measures) {
    if (m == Measure::Quantity || m == Measure::Revenue || m == Measure::Cost ||
        m == Measure::Profit || m == Measure::Margin) {
      sales = true;
    } else {
      behaviour = true;
    }
  }
  std::map<std::vector<std::string>, Totals> groups;
  auto keep_and_key = [&](std::int32_t dk, std::int32_t ak, std::int32_t ck, std::int32_t pk,
                          std::int32_t mk, std::vector<std::string>& key) {
    for (const retail::Filter& f : query.filters) {
      if (render_level(wh, f.level, dk, ak, ck, pk, mk) != f.value) return false;
    }
    key.clear();
    for (Level l : query.group_by) key.push_back(render_level(wh, l, dk, ak, ck, pk, mk));
    return true;
  };
  std::vector<std::string> key;
  if (sales) {
    for (const retail::FactSalesRow& r : wh.fact_sales()) {
      if (!keep_and_key(r.date_key, r.area_key, r.customer_key, r.product_key, 0, key)) continue;
      Totals& t = groups[key];
      t.quantity += r.quantity;
      t.revenue_c += r.revenue.cents;
      t.cost_c += r.cost.cents;
      t.profit_c += r.profit.cents;
    }
  }
  if (behaviour) {
    for (const retail::FactBehaviourRow& r : wh.fact_behaviour()) {
      if (!keep_and_key(r.date_key, r.area_key, r.customer_key, 0, r.movement_key, key)) {
        continue;
      }
      Totals& t = groups[key];
      t.dwell += r.duration_s;
      if (r.movement_key == 1) t.stop += r.duration_s;
      t.visits += r.visit;
      t.distance += r.distance_m;
    }
  }
  return groups;
}

}  // namespace naive

inline std::vector<retail::Ping> make_track(const std::string& customer, std::int64_t t0,
                                            const std::vector<std::pair<double, double>>& xy) {
  std::vector<retail::Ping> pings;
  for (std::size_t i = 0; i < xy.size(); ++i) {
    pings.push_back({customer, t0 + static_cast<std::int64_t>(i), xy[i].first, xy[i].second,
                     retail::PingStatus::None});
  }
  return pings;
}

}  // namespace testutil
