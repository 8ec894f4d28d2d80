#include "retail/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace retail {

namespace {

double dist(double ax, double ay, double bx, double by) {
  double dx = ax - bx, dy = ay - by;
  return std::sqrt(dx * dx + dy * dy);
}

// Position on the piecewise-linear track at time t (clamped to the span).
void position_at(std::span<const Ping> p, double t, double& x, double& y) {
  if (t <= static_cast<double>(p.front().ts)) { x = p.front().x; y = p.front().y; return; }
  if (t >= static_cast<double>(p.back().ts)) { x = p.back().x; y = p.back().y; return; }
  std::size_t lo = 0, hi = p.size() - 1;
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    if (static_cast<double>(p[mid].ts) <= t) lo = mid;
    else hi = mid;
  }
  double t0 = static_cast<double>(p[lo].ts), t1 = static_cast<double>(p[hi].ts);
  double f = (t - t0) / (t1 - t0);
  x = p[lo].x + f * (p[hi].x - p[lo].x);
  y = p[lo].y + f * (p[hi].y - p[lo].y);
}

// Path length of the track restricted to [t0, t1] under linear interpolation.
double path_length_between(std::span<const Ping> p, double t0, double t1) {
  double total = 0;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    double a = static_cast<double>(p[k].ts);
    double b = static_cast<double>(p[k + 1].ts);
    double lo = std::max(a, t0), hi = std::min(b, t1);
    if (hi <= lo) continue;
    double full = dist(p[k].x, p[k].y, p[k + 1].x, p[k + 1].y);
    total += full * ((hi - lo) / (b - a));
  }
  return total;
}

// Largest j >= i such that extending the window ping-by-ping never pushed any
// member farther than radius from the window centroid. Centroid sums grow
// left to right so the arithmetic matches a from-scratch recomputation.
std::size_t extend_stop(std::span<const Ping> p, std::size_t i, double radius) {
  double sx = p[i].x, sy = p[i].y;
  std::size_t j = i;
  while (j + 1 < p.size()) {
    double nsx = sx + p[j + 1].x;
    double nsy = sy + p[j + 1].y;
    double n = static_cast<double>(j + 2 - i);
    double cx = nsx / n, cy = nsy / n;
    bool ok = true;
    for (std::size_t k = i; k <= j + 1; ++k) {
      if (dist(p[k].x, p[k].y, cx, cy) > radius) { ok = false; break; }
    }
    if (!ok) break;
    sx = nsx;
    sy = nsy;
    ++j;
  }
  return j;
}

struct StopSpan {
  std::size_t first, last;
};

std::optional<StopSpan> stop_at(std::span<const Ping> p, std::size_t i,
                                const SegmentationParams& params) {
  std::size_t j = extend_stop(p, i, params.stop_radius_m);
  if (j > i &&
      static_cast<double>(p[j].ts - p[i].ts) >= params.min_stop_duration_s) {
    return StopSpan{i, j};
  }
  return std::nullopt;
}

Segment make_stop(std::span<const Ping> p, std::size_t first, std::size_t last) {
  Segment s;
  s.customer_id = p[first].customer_id;
  s.kind = MovementKind::Stop;
  s.t_start = static_cast<double>(p[first].ts);
  s.t_end = static_cast<double>(p[last].ts);
  s.duration_s = s.t_end - s.t_start;
  s.distance_m = 0;
  s.mean_speed_m_s = 0;
  double sx = 0, sy = 0;
  for (std::size_t k = first; k <= last; ++k) { sx += p[k].x; sy += p[k].y; }
  double n = static_cast<double>(last - first + 1);
  s.anchor_x = sx / n;
  s.anchor_y = sy / n;
  return s;
}

Segment make_move(std::span<const Ping> p, std::size_t first, std::size_t last) {
  Segment s;
  s.customer_id = p[first].customer_id;
  s.kind = MovementKind::Move;
  s.t_start = static_cast<double>(p[first].ts);
  s.t_end = static_cast<double>(p[last].ts);
  s.duration_s = s.t_end - s.t_start;
  double d = 0;
  for (std::size_t k = first; k < last; ++k) {
    d += dist(p[k].x, p[k].y, p[k + 1].x, p[k + 1].y);
  }
  s.distance_m = quantize_distance(d);
  s.mean_speed_m_s = s.duration_s > 0 ? s.distance_m / s.duration_s : 0;
  position_at(p, (s.t_start + s.t_end) / 2.0, s.anchor_x, s.anchor_y);
  return s;
}

void segment_threshold(std::span<const Ping> p, const SegmentationParams& params,
                       std::vector<Segment>& out) {
  const std::size_t n = p.size();
  std::size_t i = 0;
  while (i < n - 1) {
    if (auto s = stop_at(p, i, params)) {
      out.push_back(make_stop(p, s->first, s->last));
      i = s->last;
      continue;
    }
    std::size_t m = i;
    std::size_t k = i + 1;
    while (k < n - 1 && !stop_at(p, k, params)) ++k;
    out.push_back(make_move(p, m, k));
    i = k;
  }
}

// Per-ping labels implied by the threshold rule: members of detected stop
// windows are SUS, everything else MIG.
std::vector<PingStatus> implied_labels(std::span<const Ping> p,
                                       const SegmentationParams& params) {
  std::vector<PingStatus> labels(p.size(), PingStatus::Mig);
  const std::size_t n = p.size();
  std::size_t i = 0;
  while (i < n - 1) {
    if (auto s = stop_at(p, i, params)) {
      for (std::size_t k = s->first; k <= s->last; ++k) labels[k] = PingStatus::Sus;
      i = s->last;
      continue;
    }
    std::size_t k = i + 1;
    while (k < n - 1 && !stop_at(p, k, params)) ++k;
    i = k;
  }
  return labels;
}

void segment_labeled(std::span<const Ping> p, const SegmentationParams& params,
                     std::vector<Segment>& out, std::size_t& conflicts) {
  const std::size_t n = p.size();
  std::vector<PingStatus> recomputed = implied_labels(p, params);
  for (std::size_t k = 0; k < n; ++k) {
    if (p[k].status != recomputed[k]) ++conflicts;
  }

  // Runs of equal labels; boundaries at the midpoint between the adjacent
  // pings of neighbouring runs, so segments partition the span and a
  // single-ping run still has positive duration.
  std::size_t run_start = 0;
  while (run_start < n) {
    std::size_t run_end = run_start;
    while (run_end + 1 < n && p[run_end + 1].status == p[run_start].status) ++run_end;

    double t0 = run_start == 0
                    ? static_cast<double>(p[0].ts)
                    : (static_cast<double>(p[run_start - 1].ts) +
                       static_cast<double>(p[run_start].ts)) / 2.0;
    double t1 = run_end == n - 1
                    ? static_cast<double>(p[n - 1].ts)
                    : (static_cast<double>(p[run_end].ts) +
                       static_cast<double>(p[run_end + 1].ts)) / 2.0;

    Segment s;
    s.customer_id = p[run_start].customer_id;
    s.kind = p[run_start].status == PingStatus::Sus ? MovementKind::Stop : MovementKind::Move;
    s.t_start = t0;
    s.t_end = t1;
    s.duration_s = t1 - t0;
    if (s.kind == MovementKind::Stop) {
      s.distance_m = 0;
      s.mean_speed_m_s = 0;
      double sx = 0, sy = 0;
      for (std::size_t k = run_start; k <= run_end; ++k) { sx += p[k].x; sy += p[k].y; }
      double cnt = static_cast<double>(run_end - run_start + 1);
      s.anchor_x = sx / cnt;
      s.anchor_y = sy / cnt;
    } else {
      s.distance_m = quantize_distance(path_length_between(p, t0, t1));
      s.mean_speed_m_s = s.duration_s > 0 ? s.distance_m / s.duration_s : 0;
      position_at(p, (t0 + t1) / 2.0, s.anchor_x, s.anchor_y);
    }
    out.push_back(std::move(s));
    run_start = run_end + 1;
  }
}

}  // namespace

void SegmentationParams::validate() const {
  if (!(stop_radius_m > 0) || !(min_stop_duration_s > 0) || !(max_gap_s > 0)) {
    throw Error(Err::InvalidConfig, "segmentation parameters must be strictly positive");
  }
}

double quantize_distance(double meters) {
  return std::round(meters * 1048576.0) / 1048576.0;
}

std::vector<Ping> order_track(std::vector<Ping> pings) {
  std::sort(pings.begin(), pings.end(),
            [](const Ping& a, const Ping& b) { return a.ts < b.ts; });
  for (std::size_t i = 0; i + 1 < pings.size(); ++i) {
    if (pings[i].ts == pings[i + 1].ts) {
      throw Error(Err::NonMonotonicAfterSort,
                  "customer " + pings[i].customer_id + " has two pings at " +
                      format_iso_utc(pings[i].ts));
    }
  }
  return pings;
}

std::vector<IntervalKin> kinematics(std::span<const Ping> series) {
  if (series.size() < 2) {
    throw Error(Err::SeriesTooShort, "kinematics needs at least two fixes");
  }
  std::vector<IntervalKin> out;
  out.reserve(series.size() - 1);
  for (std::size_t i = 0; i + 1 < series.size(); ++i) {
    double d = dist(series[i].x, series[i].y, series[i + 1].x, series[i + 1].y);
    double dt = static_cast<double>(series[i + 1].ts - series[i].ts);
    out.push_back({d, d / dt});
  }
  return out;
}

SegmentationResult segment(std::span<const Ping> series, const SegmentationParams& params,
                           bool statuses_present) {
  params.validate();
  SegmentationResult result;
  if (series.empty()) return result;

  std::size_t start = 0;
  double covered = 0;
  for (std::size_t i = 0; i <= series.size(); ++i) {
    bool split = i == series.size() ||
                 (i > start && static_cast<double>(series[i].ts - series[i - 1].ts) >
                                   params.max_gap_s);
    if (!split) continue;
    if (i < series.size()) {
      result.gap_split_s += static_cast<double>(series[i].ts - series[i - 1].ts);
    }
    std::span<const Ping> sub = series.subspan(start, i - start);
    ++result.sub_tracks;
    if (sub.size() < 2) {
      result.orphan_pings += sub.size();
      covered += sub.empty() ? 0 : static_cast<double>(sub.back().ts - sub.front().ts);
    } else if (statuses_present) {
      segment_labeled(sub, params, result.segments, result.status_conflicts);
      covered += static_cast<double>(sub.back().ts - sub.front().ts);
    } else {
      segment_threshold(sub, params, result.segments);
      covered += static_cast<double>(sub.back().ts - sub.front().ts);
    }
    start = i;
  }

  // time conservation: segment durations partition the non-gap span. All
  // boundaries are ping timestamps or their midpoints, so the double sums are
  // exact and the comparison can be too.
  double total = 0;
  for (const Segment& s : result.segments) total += s.duration_s;
  if (total != covered) {
    throw std::logic_error("segmentation broke time conservation");
  }
  return result;
}

void attribute_zones(std::vector<Segment>& segments, const StoreMap& map) {
  for (Segment& s : segments) {
    s.area_key = map.locate(s.anchor_x, s.anchor_y);
  }
  for (std::size_t i = 0; i < segments.size(); ++i) {
    segments[i].visit_start =
        i == 0 || segments[i].area_key != segments[i - 1].area_key;
  }
}

std::vector<ZoneDwell> zone_dwell(std::span<const Segment> segments, std::int32_t date_key) {
  std::map<std::int32_t, ZoneDwell> by_zone;
  for (const Segment& s : segments) {
    std::int32_t key = s.area_key.value_or(0);
    ZoneDwell& d = by_zone[key];
    if (d.customer_id.empty() && !s.customer_id.empty()) d.customer_id = s.customer_id;
    d.date_key = date_key;
    d.area_key = key;
    d.dwell_s += s.duration_s;
    if (s.kind == MovementKind::Stop) d.stop_s += s.duration_s;
    if (s.visit_start) ++d.visit_count;
  }
  std::vector<ZoneDwell> out;
  out.reserve(by_zone.size());
  for (auto& [key, d] : by_zone) out.push_back(std::move(d));
  return out;
}

}  // namespace retail
