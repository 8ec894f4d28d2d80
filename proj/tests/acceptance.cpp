// Acceptance suite: one test case per acceptance criterion, each printing a
// single PASS line when it holds. Any failure shows up as a doctest assertion
// failure for that criterion.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>

#include "helpers.hpp"
#include "retail/bsc.hpp"
#include "retail/cube.hpp"
#include "retail/journey.hpp"
#include "retail/pipeline.hpp"
#include "retail/simgen.hpp"

using namespace retail;
using namespace testutil;

namespace {

const std::string kBin = RETAILDW_BIN;
const fs::path kSourceDir = RETAIL_SOURCE_DIR;

void pass(int criterion, const std::string& detail) {
  std::printf("ACCEPTANCE %d PASS: %s\n", criterion, detail.c_str());
  std::fflush(stdout);
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

SimConfig seed42_config() {
  SimConfig config;  // defaults: seed 42, 50 customers, 7 days
  return config;
}

void stage_and_load(const fs::path& ws, const GeneratedCorpus& corpus) {
  StagingStore staging(staging_dir(ws));
  staging.stage_pings(corpus.files.at("pings.csv"), "pings.csv");
  staging.stage_pos(corpus.files.at("pos.csv"), "pos.csv");
  write_file(ws / "zones.csv", corpus.files.at("zones.csv"));
  write_file(ws / "catalog.csv", corpus.files.at("catalog.csv"));
  write_file(ws / "cost.csv", corpus.files.at("cost.csv"));
  write_file(ws / "demographics.csv", corpus.files.at("demographics.csv"));
  LoadInputs inputs;
  inputs.zone_file = (ws / "zones.csv").string();
  inputs.cost_file = (ws / "cost.csv").string();
  inputs.catalog_file = (ws / "catalog.csv").string();
  inputs.demographics_file = (ws / "demographics.csv").string();
  run_load(ws, inputs);
}

std::vector<Ping> random_walk(Xoshiro256& rng, std::size_t max_len) {
  std::size_t n = 2 + rng.below(max_len - 1);
  std::vector<Ping> pings;
  double x = rng.range_double(0, 40), y = rng.range_double(0, 30);
  std::int64_t t = 1000000;
  for (std::size_t i = 0; i < n; ++i) {
    pings.push_back({"W", t, x, y, PingStatus::None});
    t += 1 + static_cast<std::int64_t>(rng.below(3));
    if (rng.uniform01() < 0.35) {
      x += rng.range_double(-0.3, 0.3);
      y += rng.range_double(-0.3, 0.3);
    } else {
      x += rng.range_double(-2.0, 2.0);
      y += rng.range_double(-2.0, 2.0);
    }
  }
  return pings;
}

}  // namespace

TEST_CASE("criterion 1: end-to-end oracle run on the seed-42 corpus") {
  auto t0 = std::chrono::steady_clock::now();

  GeneratedCorpus corpus = generate_corpus(seed42_config());
  // corpus shape: ~250k pings, ~15k receipt lines over 50 customers x 7 days
  REQUIRE(corpus.truth.days.size() == 350);
  REQUIRE(corpus.truth.ping_rows >= 200000);
  REQUIRE(corpus.truth.ping_rows <= 300000);
  REQUIRE(corpus.truth.pos_rows >= 10000);
  REQUIRE(corpus.truth.pos_rows <= 20000);

  TempDir tmp("acc1");
  stage_and_load(tmp.path(), corpus);

  Warehouse wh(warehouse_dir(tmp.path()));
  IntegrityReport report = wh.integrity_check();
  REQUIRE(report.violations.empty());

  // recovered dwell within +-2 s per zone; revenue exact per customer-day
  double worst_dwell_err = 0;
  Money recovered_total;
  for (const CustomerDayTruth& day : corpus.truth.days) {
    JourneyProfile profile = build_profile(wh, day.customer_id, day.date_key);
    REQUIRE(profile.total_revenue == day.day_revenue);
    recovered_total += profile.total_revenue;
    std::map<std::int32_t, double> recovered;
    for (const ZoneBehaviour& z : profile.behaviour) recovered[z.area_key] = z.dwell_s;
    for (const auto& [area, planned] : day.zone_dwell_s) {
      double err = std::fabs(recovered[area] - planned);
      worst_dwell_err = std::max(worst_dwell_err, err);
      REQUIRE(err <= 2.0);
    }
  }
  REQUIRE(recovered_total == corpus.truth.total_revenue);

  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  REQUIRE(elapsed <= 60.0);

  char detail[256];
  std::snprintf(detail, sizeof detail,
                "%zu pings, %zu receipt lines, 0 violations, max dwell error %.1f s, "
                "revenue exact, %.1f s elapsed",
                corpus.truth.ping_rows, corpus.truth.pos_rows, worst_dwell_err, elapsed);
  pass(1, detail);
}

TEST_CASE("criterion 2: threshold segmentation equals the O(n^2) reference") {
  SegmentationParams params{1.0, 10.0, 30.0};
  Xoshiro256 rng(4242);
  std::size_t mismatches = 0;
  std::size_t segments_total = 0;
  for (int walk = 0; walk < 500; ++walk) {
    std::vector<Ping> track = random_walk(rng, 200);
    SegmentationResult fast = segment(track, params, false);
    std::vector<OracleSegment> slow = oracle_segment(track, params);
    REQUIRE(fast.segments.size() == slow.size());
    segments_total += slow.size();
    for (std::size_t i = 0; i < slow.size(); ++i) {
      bool same = fast.segments[i].kind == slow[i].kind &&
                  fast.segments[i].t_start == slow[i].t_start &&
                  fast.segments[i].t_end == slow[i].t_end;
      if (!same) ++mismatches;
      REQUIRE(same);
    }
  }
  REQUIRE(mismatches == 0);
  pass(2, "500 walks, " + std::to_string(segments_total) + " segments, 0 boundary mismatches");
}

TEST_CASE("criterion 3: rollup equivalence and drill-down conservation") {
  TempDir tmp("acc3");
  GeneratedCorpus corpus = generate_corpus(seed42_config());
  stage_and_load(tmp.path(), corpus);
  Warehouse wh(warehouse_dir(tmp.path()));

  const std::vector<Measure> sales_measures = {Measure::Quantity, Measure::Revenue,
                                               Measure::Cost, Measure::Profit, Measure::Margin};
  const std::vector<Measure> beh_measures = {Measure::DwellS, Measure::StopS,
                                             Measure::VisitCount, Measure::DistanceM};
  const std::vector<Level> shared_levels = {Level::Year,     Level::Quarter, Level::Month,
                                            Level::Day,      Level::Zone,    Level::Customer,
                                            Level::Gender,   Level::AgeBand};
  Xoshiro256 rng(30303);
  for (int trial = 0; trial < 200; ++trial) {
    CubeQuery query;
    int mode = static_cast<int>(rng.below(3));
    std::vector<Level> levels = shared_levels;
    if (mode == 0) {
      query.measures.push_back(sales_measures[rng.below(sales_measures.size())]);
      levels.push_back(Level::Product);
      levels.push_back(Level::Supplier);
    } else if (mode == 1) {
      query.measures.push_back(beh_measures[rng.below(beh_measures.size())]);
      levels.push_back(Level::Movement);
    } else {
      query.measures.push_back(sales_measures[rng.below(sales_measures.size())]);
      query.measures.push_back(beh_measures[rng.below(beh_measures.size())]);
    }
    std::size_t n_levels = rng.below(3);
    for (std::size_t i = 0; i < n_levels; ++i) {
      Level l = levels[rng.below(levels.size())];
      bool dup = false;
      for (Level existing : query.group_by) dup = dup || existing == l;
      if (!dup) query.group_by.push_back(l);
    }
    if (rng.uniform01() < 0.25) {
      query.filters.push_back({Level::Day, "2025-06-0" + std::to_string(2 + rng.below(7))});
    }

    ResultTable table = rollup(wh, query);
    auto expected = naive::scan(wh, query);
    REQUIRE(table.rows.size() == expected.size());
    std::size_t k = query.group_by.size();
    for (const auto& row : table.rows) {
      std::vector<std::string> key(row.begin(), row.begin() + k);
      auto it = expected.find(key);
      REQUIRE(it != expected.end());
      for (std::size_t m = 0; m < query.measures.size(); ++m) {
        Measure measure = query.measures[m];
        const std::string& got = row[k + m];
        switch (measure) {
          case Measure::Quantity:
            REQUIRE(got == std::to_string(it->second.quantity));
            break;
          case Measure::Revenue:
            REQUIRE(got == format_money(Money{it->second.revenue_c}));
            break;
          case Measure::Cost:
            REQUIRE(got == format_money(Money{it->second.cost_c}));
            break;
          case Measure::Profit:
            REQUIRE(got == format_money(Money{it->second.profit_c}));
            break;
          case Measure::Margin:
            REQUIRE(got == render_margin(Money{it->second.profit_c},
                                         Money{it->second.revenue_c}));
            break;
          case Measure::VisitCount:
            REQUIRE(got == std::to_string(it->second.visits));
            break;
          case Measure::DwellS:
          case Measure::StopS:
          case Measure::DistanceM: {
            double want = measure == Measure::DwellS  ? it->second.dwell
                          : measure == Measure::StopS ? it->second.stop
                                                      : it->second.distance;
            double g = *parse_double(got);
            REQUIRE(std::fabs(g - want) <= 1e-9 * std::max(1.0, std::fabs(want)));
            break;
          }
        }
      }
    }
  }

  // all four calendar drill-down pairs conserve every additive measure exactly
  std::size_t pairs_checked = 0;
  for (Measure m : {Measure::Quantity, Measure::Revenue, Measure::Cost, Measure::Profit,
                    Measure::DwellS, Measure::StopS, Measure::VisitCount, Measure::DistanceM}) {
    for (auto [parent, child] :
         {std::pair<Level, Level>{Level::Year, Level::Quarter},
          {Level::Quarter, Level::Month},
          {Level::Month, Level::Day},
          {Level::Year, Level::Day}}) {
      HierarchyReport report = hierarchy_consistency(wh, m, parent, child);
      REQUIRE(report.parents_checked > 0);
      REQUIRE(report.clean());
      ++pairs_checked;
    }
  }
  pass(3, "200 random queries equal the naive scan; " + std::to_string(pairs_checked) +
              " measure/level drill-down pairs conserve exactly");
}

TEST_CASE("criterion 4: row conservation under fuzz, no crashes") {
  SimConfig config;
  config.n_customers = 3;
  config.n_days = 1;
  GeneratedCorpus corpus = generate_corpus(config);
  const std::string ping_bytes = corpus.files.at("pings.csv");
  const std::string pos_bytes = corpus.files.at("pos.csv");

  Xoshiro256 rng(777);
  // body mutations stay ASCII so every file parses row by row; the generated
  // corpus is pure ASCII, so edits after the header keep the file decodable
  auto mutate_body = [&](const std::string& original) {
    std::string bytes = original;
    std::size_t body = bytes.find('\n') + 1;
    std::size_t edits = 1 + rng.below(8);
    for (std::size_t e = 0; e < edits && bytes.size() > body; ++e) {
      std::size_t pos = body + rng.below(bytes.size() - body);
      char c = static_cast<char>(32 + rng.below(95));
      switch (rng.below(4)) {
        case 0: bytes[pos] = c; break;
        case 1: bytes.insert(pos, 1, rng.uniform01() < 0.2 ? '\n' : c); break;
        case 2: bytes.erase(pos, 1 + rng.below(3)); break;
        default: bytes.resize(pos); break;  // truncate
      }
    }
    return bytes;
  };

  for (int trial = 0; trial < 1000; ++trial) {
    bool is_ping = trial % 2 == 0;
    std::string bytes = mutate_body(is_ping ? ping_bytes : pos_bytes);
    if (is_ping) {
      PingParseResult r = parse_pings(bytes);
      REQUIRE(r.report.rows_read == r.report.rows_accepted + r.report.rows_rejected);
      REQUIRE(r.report.rows_accepted == r.accepted.size());
      REQUIRE(r.report.rows_rejected == r.rejects.size());
    } else {
      PosParseResult r = parse_pos(bytes);
      REQUIRE(r.report.rows_read == r.report.rows_accepted + r.report.rows_rejected);
      REQUIRE(r.report.rows_accepted == r.accepted.size());
      REQUIRE(r.report.rows_rejected == r.rejects.size());
    }
  }

  // unrestricted byte fuzz on top: anything may break, but only as a typed
  // whole-file error, never a crash
  std::size_t parsed_ok = 0, file_level = 0;
  for (int trial = 0; trial < 300; ++trial) {
    std::string bytes = trial % 2 == 0 ? ping_bytes : pos_bytes;
    std::size_t edits = 1 + rng.below(8);
    for (std::size_t e = 0; e < edits && !bytes.empty(); ++e) {
      std::size_t pos = rng.below(bytes.size());
      switch (rng.below(4)) {
        case 0: bytes[pos] = static_cast<char>(rng.below(256)); break;
        case 1: bytes.insert(pos, 1, static_cast<char>(rng.below(256))); break;
        case 2: bytes.erase(pos, 1 + rng.below(3)); break;
        default: bytes.resize(pos); break;
      }
    }
    try {
      if (trial % 2 == 0) {
        PingParseResult r = parse_pings(bytes);
        REQUIRE(r.report.rows_read == r.report.rows_accepted + r.report.rows_rejected);
      } else {
        PosParseResult r = parse_pos(bytes);
        REQUIRE(r.report.rows_read == r.report.rows_accepted + r.report.rows_rejected);
      }
      ++parsed_ok;
    } catch (const Error& e) {
      REQUIRE((e.code() == Err::UndecodableInput || e.code() == Err::BadHeader));
      ++file_level;
    }
  }
  pass(4, "1000 mutated files satisfy exact row conservation; " +
              std::to_string(parsed_ok + file_level) +
              " byte-fuzzed files handled with structured errors, 0 crashes");
}

TEST_CASE("criterion 5: kill-and-restart after staging equals an uninterrupted run") {
  TempDir tmp("acc5");
  fs::path corpus_dir = tmp.path() / "corpus";
  SimConfig config;
  config.n_customers = 8;
  config.n_days = 3;
  generate_to_dir(config, corpus_dir);

  auto ingest = [&](const fs::path& ws) {
    auto r = run_cmd(kBin + " ingest --workspace " + q(ws) + " " + q(corpus_dir / "pings.csv") +
                     " " + q(corpus_dir / "pos.csv"));
    REQUIRE(r.exit_code == 0);
  };
  auto load = [&](const fs::path& ws) {
    return run_cmd(kBin + " load --workspace " + q(ws) + " --zones " +
                   q(corpus_dir / "zones.csv") + " --cost " + q(corpus_dir / "cost.csv") +
                   " --catalog " + q(corpus_dir / "catalog.csv") + " --demographics " +
                   q(corpus_dir / "demographics.csv"));
  };

  // interrupted: staging completes, then the next process dies before load;
  // its stale lock is left behind
  fs::path ws_a = tmp.path() / "interrupted";
  ingest(ws_a);
  write_file(ws_a / "lock", "999999999\n");
  auto resumed = load(ws_a);
  REQUIRE(resumed.exit_code == 0);

  // uninterrupted
  fs::path ws_b = tmp.path() / "clean";
  ingest(ws_b);
  REQUIRE(load(ws_b).exit_code == 0);

  REQUIRE(dir_contents(ws_a / "warehouse") == dir_contents(ws_b / "warehouse"));
  REQUIRE(read_file(ws_a / "staging" / "manifest.json") ==
          read_file(ws_b / "staging" / "manifest.json"));

  // crash window between warehouse publish and staging mark: rewind the
  // staging states and re-run; the warehouse must not change
  std::string manifest = read_file(ws_a / "staging" / "manifest.json");
  std::string rewound = manifest;
  std::size_t at;
  while ((at = rewound.find("TRANSFORMED")) != std::string::npos) {
    rewound.replace(at, 11, "LOADED");
  }
  write_file(ws_a / "staging" / "manifest.json", rewound);
  auto before = dir_contents(ws_a / "warehouse");
  REQUIRE(load(ws_a).exit_code == 0);
  REQUIRE(dir_contents(ws_a / "warehouse") == before);
  REQUIRE(read_file(ws_a / "staging" / "manifest.json") == manifest);

  pass(5, "resume after simulated crash (stale lock; rewound batch states) is byte-identical");
}

TEST_CASE("criterion 6: default targets reproduce the published scorecard figures") {
  TargetConfig config =
      parse_targets(read_file(kSourceDir / "configs/targets_default.cfg"));
  auto threshold_of = [&](const std::string& name) -> std::string {
    for (const TargetSpec& t : config.targets) {
      if (t.name == name) return t.threshold.render4();
    }
    return "<missing>";
  };
  REQUIRE(threshold_of("roi") == "0.2000");
  REQUIRE(config.annotations.at("roi.band_high") == "0.30");
  REQUIRE(threshold_of("shrinkage_reduction") == "0.7500");
  REQUIRE(threshold_of("ops_cost_reduction") == "0.3000");
  REQUIRE(threshold_of("sales_uplift") == "0.0500");
  REQUIRE(config.annotations.at("sales_uplift.band_high") == "0.10");
  REQUIRE(threshold_of("checkout_time_reduction") == "0.5000");
  REQUIRE(threshold_of("cc_accuracy") == "0.9800");
  REQUIRE(threshold_of("survey_improvement") == "0.2000");
  REQUIRE(threshold_of("inventory_accuracy") == "0.9900");
  REQUIRE(threshold_of("out_of_stock_reduction") == "0.5000");
  REQUIRE(threshold_of("out_of_stock_reduction_shelf") == "0.8000");

  // the three worked examples evaluate to met
  OperationalInputs in;
  in.baseline_start = 20250602;
  in.baseline_end = 20250604;
  in.current_start = 20250605;
  in.current_end = 20250608;
  in.investment_cost = Money{10000000};   // 100,000.00
  in.measured_benefit = Money{12500000};  // 125,000.00 -> ROI 0.25
  in.shrinkage_baseline = Money{10000000};
  in.shrinkage_current = Money{2500000};  // reduction 0.75
  in.ops_cost_baseline = Money{8000000};
  in.ops_cost_current = Money{5600000};
  in.checkout_seconds_baseline = 190 * 10000;
  in.checkout_seconds_current = 95 * 10000;
  in.cc_orders_total = 1000;
  in.cc_orders_accurate = 980;  // 0.98
  in.survey_score_baseline = 40 * 10000;
  in.survey_score_current = 48 * 10000;
  in.inventory_counted_correct = 990;
  in.inventory_counted_total = 1000;
  in.sku_days_out_of_stock = 120;
  in.sku_days_total = 3000;
  in.sku_days_out_of_stock_baseline = 400;
  in.sku_days_total_baseline = 3000;

  auto kpis = compute_kpis(in, Money{10000000}, Money{10700000});
  Scorecard card = evaluate(kpis, config);
  auto entry = [&](const std::string& name) -> const ScorecardEntry& {
    for (const ScorecardEntry& e : card.entries) {
      if (e.name == name) return e;
    }
    REQUIRE(false);
    static ScorecardEntry dummy;
    return dummy;
  };
  REQUIRE(entry("roi").value.render4() == "0.2500");
  REQUIRE(entry("roi").met);
  REQUIRE(entry("shrinkage_reduction").value.render4() == "0.7500");
  REQUIRE(entry("shrinkage_reduction").met);
  REQUIRE(entry("cc_accuracy").value.render4() == "0.9800");
  REQUIRE(entry("cc_accuracy").met);

  pass(6, "all default scorecard thresholds present; ROI 0.25, shrinkage 0.75, "
          "click-and-collect 0.98 all met");
}

TEST_CASE("criterion 7: kinematics identities") {
  auto fixture = make_track("K", 0, {{0, 0}, {3, 4}});
  auto kin = kinematics(fixture);
  REQUIRE(kin[0].distance_m == 5.0);
  REQUIRE(kin[0].speed_m_s == 5.0);

  Xoshiro256 rng(979);
  for (int trial = 0; trial < 10000; ++trial) {
    double x0 = rng.range_double(-100, 100), y0 = rng.range_double(-100, 100);
    double x1 = rng.range_double(-100, 100), y1 = rng.range_double(-100, 100);
    std::int64_t dt = 1 + static_cast<std::int64_t>(rng.below(30));
    std::vector<Ping> pair = {{"K", 0, x0, y0, PingStatus::None},
                              {"K", dt, x1, y1, PingStatus::None}};
    auto k = kinematics(pair);
    double expect = std::sqrt((x1 - x0) * (x1 - x0) + (y1 - y0) * (y1 - y0));
    REQUIRE(std::fabs(k[0].speed_m_s * static_cast<double>(dt) - expect) <=
            1e-9 * std::max(1.0, expect));
    REQUIRE(std::fabs(k[0].distance_m - expect) <= 1e-9 * std::max(1.0, expect));
  }
  pass(7, "10000 random fix pairs satisfy speed x dt = distance within 1e-9; 3-4-5 exact");
}

TEST_CASE("criterion 8: identical command sequences are byte-identical") {
  TempDir tmp("acc8");
  fs::path corpus_a = tmp.path() / "corpus_a";
  fs::path corpus_b = tmp.path() / "corpus_b";
  REQUIRE(run_cmd(kBin + " generate --out " + q(corpus_a) + " --seed 42").exit_code == 0);
  REQUIRE(run_cmd(kBin + " generate --out " + q(corpus_b) + " --seed 42").exit_code == 0);
  REQUIRE(dir_contents(corpus_a) == dir_contents(corpus_b));

  auto run_sequence = [&](const fs::path& ws, const fs::path& corpus) {
    fs::create_directories(ws / "reports");
    std::vector<std::string> cmds = {
        kBin + " ingest --workspace " + q(ws) + " " + q(corpus / "pings.csv") + " " +
            q(corpus / "pos.csv"),
        kBin + " load --workspace " + q(ws) + " --zones " + q(corpus / "zones.csv") +
            " --cost " + q(corpus / "cost.csv") + " --catalog " + q(corpus / "catalog.csv") +
            " --demographics " + q(corpus / "demographics.csv"),
        kBin + " query --workspace " + q(ws) +
            " --measures revenue,margin,dwell_s --by month,zone --out " +
            q(ws / "reports" / "rollup.csv"),
        kBin + " heatmap --workspace " + q(ws) +
            " --measure dwell_s --from 2025-06-02 --to 2025-06-08 --out " +
            q(ws / "reports" / "heatmap.csv"),
        kBin + " journey --workspace " + q(ws) +
            " --customer C0007 --date 2025-06-03 --format json --out " +
            q(ws / "reports" / "journey.json"),
        kBin + " bsc --workspace " + q(ws) + " --inputs " +
            q(kSourceDir / "configs/bsc_inputs_example.csv") + " --targets " +
            q(kSourceDir / "configs/targets_default.cfg") + " --out " +
            q(ws / "reports" / "scorecard.txt"),
        kBin + " check --workspace " + q(ws),
    };
    std::string transcript;
    for (const std::string& cmd : cmds) {
      CmdResult r = run_cmd(cmd);
      REQUIRE(r.exit_code == 0);
      transcript += r.output;
    }
    return transcript;
  };

  fs::path ws_a = tmp.path() / "ws_a";
  fs::path ws_b = tmp.path() / "ws_b";
  std::string out_a = run_sequence(ws_a, corpus_a);
  std::string out_b = run_sequence(ws_b, corpus_b);
  REQUIRE(out_a == out_b);
  REQUIRE(dir_contents(ws_a) == dir_contents(ws_b));

  pass(8, "two runs: workspaces, reports and stdout transcripts all byte-identical");
}
