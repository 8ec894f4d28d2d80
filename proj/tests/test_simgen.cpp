#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "retail/simgen.hpp"
#include "retail/trajectory.hpp"

using namespace retail;
using namespace testutil;

namespace {

SimConfig small_config() {
  SimConfig config;
  config.n_customers = 4;
  config.n_days = 2;
  return config;
}

}  // namespace

TEST_CASE("same seed, byte-identical corpus") {
  GeneratedCorpus a = generate_corpus(small_config());
  GeneratedCorpus b = generate_corpus(small_config());
  CHECK(a.files == b.files);
  CHECK(a.truth.to_json_text() == b.truth.to_json_text());

  SimConfig other = small_config();
  other.seed = 43;
  GeneratedCorpus c = generate_corpus(other);
  CHECK(a.files.at("pings.csv") != c.files.at("pings.csv"));
}

TEST_CASE("buy probability zero leaves the pos file header-only") {
  SimConfig config = small_config();
  config.buy_probability = 0.0;
  GeneratedCorpus corpus = generate_corpus(config);
  CHECK(corpus.files.at("pos.csv") == std::string(kPosHeader) + "\n");
  CHECK(corpus.truth.total_revenue.cents == 0);
}

TEST_CASE("exact dwell plan is recovered by segmentation within 2 s") {
  SimConfig config;
  config.n_customers = 3;
  config.n_days = 1;
  config.dwell_min_s = 120;
  config.dwell_max_s = 120;  // scripted: every stop is exactly 120 s
  GeneratedCorpus corpus = generate_corpus(config);

  for (const CustomerDayTruth& day : corpus.truth.days) {
    for (const auto& [area, secs] : day.zone_dwell_s) CHECK(secs == 120.0);
  }

  auto parsed = parse_pings(corpus.files.at("pings.csv"));
  REQUIRE(parsed.report.rows_rejected == 0);
  std::map<std::string, std::vector<Ping>> by_customer;
  for (const Ping& p : parsed.accepted) by_customer[p.customer_id].push_back(p);

  for (const CustomerDayTruth& day : corpus.truth.days) {
    auto track = order_track(by_customer.at(day.customer_id));
    auto seg = segment(track, {}, false);
    attribute_zones(seg.segments, corpus.map);
    auto dwell = zone_dwell(seg.segments, day.date_key);
    std::map<std::int32_t, double> recovered;
    for (const ZoneDwell& d : dwell) recovered[d.area_key] = d.dwell_s;
    for (const auto& [area, planned] : day.zone_dwell_s) {
      CHECK(std::fabs(recovered[area] - planned) <= 2.0);
    }
  }
}

TEST_CASE("ground truth is self-consistent") {
  GeneratedCorpus corpus = generate_corpus(small_config());
  for (const CustomerDayTruth& day : corpus.truth.days) {
    double stops = 0;
    for (std::size_t i = 0; i < day.itinerary.size(); ++i) {
      const TruthStop& s = day.itinerary[i];
      CHECK(s.depart_s > s.arrive_s);
      CHECK(std::fabs(s.dwell_s - (s.depart_s - s.arrive_s)) < 1e-9);
      if (i > 0) CHECK(s.arrive_s >= day.itinerary[i - 1].depart_s);  // ordered, no overlap
      stops += s.dwell_s;
    }
    CHECK(std::fabs(stops + day.transit_s - day.session_len_s) < 1e-9);
    CHECK(day.n_pings == static_cast<std::size_t>(std::floor(day.session_len_s)) + 1);
  }
}

TEST_CASE("receipt lines in the pos file match the ground-truth ledger") {
  GeneratedCorpus corpus = generate_corpus(small_config());
  auto parsed = parse_pos(corpus.files.at("pos.csv"));
  REQUIRE(parsed.report.rows_rejected == 0);

  Money from_file;
  for (const ReceiptLine& line : parsed.accepted) from_file += line.line_total;
  CHECK(from_file == corpus.truth.total_revenue);

  std::size_t truth_lines = 0;
  for (const CustomerDayTruth& day : corpus.truth.days) truth_lines += day.receipts.size();
  CHECK(parsed.accepted.size() == truth_lines);
}

TEST_CASE("status labels, when emitted, run-length back to the plan") {
  SimConfig config;
  config.n_customers = 2;
  config.n_days = 1;
  config.emit_status = true;
  GeneratedCorpus corpus = generate_corpus(config);
  auto parsed = parse_pings(corpus.files.at("pings.csv"));
  REQUIRE(parsed.report.rows_rejected == 0);

  std::map<std::string, std::vector<Ping>> by_customer;
  for (const Ping& p : parsed.accepted) {
    CHECK(p.status != PingStatus::None);
    by_customer[p.customer_id].push_back(p);
  }
  for (const CustomerDayTruth& day : corpus.truth.days) {
    auto track = order_track(by_customer.at(day.customer_id));
    auto seg = segment(track, {}, true);
    std::size_t stop_count = 0;
    for (const Segment& s : seg.segments) {
      if (s.kind == MovementKind::Stop) ++stop_count;
    }
    CHECK(stop_count == day.itinerary.size());
  }
}

TEST_CASE("config validation rejects out-of-order bounds") {
  SimConfig bad = small_config();
  bad.dwell_min_s = 50;
  bad.dwell_max_s = 40;
  CHECK_THROWS_AS(generate_corpus(bad), Error);

  bad = small_config();
  bad.visit_probability = 1.5;
  CHECK_THROWS_AS(bad.validate(), Error);

  bad = small_config();
  bad.corruption_rate = -0.1;
  CHECK_THROWS_AS(bad.validate(), Error);

  CHECK_THROWS_AS(SimConfig::from_json_text("not json"), Error);
  CHECK_THROWS_AS(SimConfig::from_json_text("{\"n_customers\": 0}"), Error);
}

TEST_CASE("config JSON round-trips") {
  SimConfig config = small_config();
  config.buy_probability = 0.3;
  config.corruption_rate = 0.02;
  SimConfig parsed = SimConfig::from_json_text(config.to_json_text());
  CHECK(parsed.buy_probability == 0.3);
  CHECK(parsed.corruption_rate == 0.02);
  CHECK(parsed.n_customers == config.n_customers);
  CHECK(parsed.zones.size() == 12);  // defaults were materialized
  CHECK(generate_corpus(parsed).files.at("pings.csv") ==
        generate_corpus(config).files.at("pings.csv"));
}

TEST_CASE("zones file matches the map the walks were generated on") {
  GeneratedCorpus corpus = generate_corpus(small_config());
  StoreMap reloaded = StoreMap::load(corpus.files.at("zones.csv"));
  REQUIRE(reloaded.zones().size() == corpus.map.zones().size());
  for (std::size_t i = 0; i < reloaded.zones().size(); ++i) {
    CHECK(reloaded.zones()[i].area_name == corpus.map.zones()[i].area_name);
    CHECK(reloaded.zones()[i].area_key == corpus.map.zones()[i].area_key);
  }
}

TEST_CASE("sampled path length matches kinematics over the emitted fixes") {
  SimConfig config;
  config.n_customers = 1;
  config.n_days = 1;
  GeneratedCorpus corpus = generate_corpus(config);
  auto parsed = parse_pings(corpus.files.at("pings.csv"));
  auto track = order_track(parsed.accepted);
  double sum = 0;
  for (const IntervalKin& k : kinematics(track)) sum += k.distance_m;
  const CustomerDayTruth& day = corpus.truth.days.at(0);
  CHECK(std::fabs(sum - day.sampled_path_length_m) <=
        1e-9 * std::max(1.0, day.sampled_path_length_m));
}
