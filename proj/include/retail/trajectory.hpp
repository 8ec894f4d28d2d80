#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "retail/ingest.hpp"
#include "retail/storemap.hpp"

namespace retail {

enum class MovementKind { Stop, Move };

/// A maximal stop or migration interval of one customer-day track.
///
/// Conventions:
///  - STOP distance is 0 by definition; mean_speed = distance / duration.
///  - STOP anchor is the centroid of the member pings; MOVE anchor is the
///    interpolated position at the segment's time midpoint.
///  - distance_m is quantized to 2^-20 m so sums are order-independent
///    (drill-down totals then conserve exactly).
struct Segment {
  std::string customer_id;
  MovementKind kind = MovementKind::Move;
  double t_start = 0;  // epoch seconds; halves appear in label-driven mode
  double t_end = 0;
  double duration_s = 0;
  double distance_m = 0;
  double mean_speed_m_s = 0;
  double anchor_x = 0, anchor_y = 0;
  std::optional<std::int32_t> area_key;  // set by attribute_zones
  bool visit_start = false;              // first segment of a same-zone run
};

struct SegmentationParams {
  double stop_radius_m = 1.0;
  double min_stop_duration_s = 10.0;
  double max_gap_s = 30.0;

  void validate() const;
};

/// Per customer-day, per zone aggregation (area_key 0 = unzoned).
struct ZoneDwell {
  std::string customer_id;
  std::int32_t date_key = 0;
  std::int32_t area_key = 0;
  double dwell_s = 0;   // STOP + MOVE time attributed to the zone
  double stop_s = 0;    // STOP time only
  std::int64_t visit_count = 0;
};

struct SegmentationResult {
  std::vector<Segment> segments;
  std::size_t orphan_pings = 0;      // single-ping sub-tracks
  std::size_t status_conflicts = 0;  // label-driven mode: pings disagreeing with re-computation
  double gap_split_s = 0;            // total time removed at track splits
  std::size_t sub_tracks = 0;
};

/// Sorts one customer-day's pings by timestamp. Two pings in the same second
/// signal an upstream dedup bug.
std::vector<Ping> order_track(std::vector<Ping> pings);

struct IntervalKin {
  double distance_m = 0;
  double speed_m_s = 0;
};

/// Per consecutive-fix Euclidean distance and speed. Needs >= 2 pings.
std::vector<IntervalKin> kinematics(std::span<const Ping> series);

/// Splits the ordered series at gaps > max_gap_s, then segments each
/// sub-track. With statuses_present, segments are the run-length encoding of
/// the SUS/MIG labels (boundaries at midpoints between runs; source labels
/// win, disagreements with the threshold rule are counted). Otherwise a STOP
/// is a maximal window whose pings stay within stop_radius_m of the window
/// centroid for at least min_stop_duration_s; the rest becomes MOVE.
/// Fewer than 2 pings yields no segments.
SegmentationResult segment(std::span<const Ping> series, const SegmentationParams& params,
                           bool statuses_present);

/// Fills area_key from the anchor point and marks visit_start on each first
/// segment of a maximal same-zone run.
void attribute_zones(std::vector<Segment>& segments, const StoreMap& map);

std::vector<ZoneDwell> zone_dwell(std::span<const Segment> segments, std::int32_t date_key);

double quantize_distance(double meters);

}  // namespace retail
