#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "retail/cube.hpp"
#include "retail/journey.hpp"
#include "retail/pipeline.hpp"
#include "retail/simgen.hpp"

using namespace retail;
using namespace testutil;

namespace {

// two customers, one day: C1 buys apples+bread and dwells in A and B;
// C2 has receipts only
struct Fixture {
  TempDir tmp{"journey"};
  Fixture() {
    StagingStore staging(staging_dir(tmp.path()));
    staging.stage_pos(
        "customer_id,ts,receipt_id,sku_key,product_name,quantity,unit_price,line_total\n"
        "C1,2025-06-02T12:00:00Z,R1,S1,Apples,2,3.50,7.00\n"
        "C1,2025-06-02T12:00:00Z,R1,S2,Bread,1,3.00,3.00\n"
        "C2,2025-06-02T12:10:00Z,R2,S2,Bread,2,3.00,6.00\n",
        "pos.csv");
    std::string pings = std::string(kPingHeader) + "\n";
    for (int i = 0; i <= 40; ++i) {  // 40 s stop in A
      pings += "C1,2025-06-02T10:00:" + std::string(i < 10 ? "0" : "") + std::to_string(i) +
               "Z,5,5,\n";
    }
    for (int i = 0; i <= 20; ++i) {  // 20 s stop in B, 19 s later
      int sec = 60 + i;
      pings += "C1,2025-06-02T10:0" + std::to_string(sec / 60) + ":" +
               (sec % 60 < 10 ? "0" : "") + std::to_string(sec % 60) + "Z,25,5,\n";
    }
    staging.stage_pings(pings, "pings.csv");

    write_file(tmp.path() / "zones.csv",
               "area_name,x0,y0,x1,y1,sequence_index\n"
               "A,0,0,10,10,0\n"
               "B,20,0,30,10,1\n");
    write_file(tmp.path() / "catalog.csv",
               "sku_key,product_name,supplier_name,home_area_name,unit_price,stock\n"
               "S1,Apples,Fresh Co,A,3.50,100\n"
               "S2,Bread,Bake Co,B,3.00,50\n");
    write_file(tmp.path() / "cost.csv", "sku_key,unit_cost\nS1,2.00\nS2,1.80\n");
    write_file(tmp.path() / "demographics.csv",
               "customer_id,gender,age,location\nC1,F,34,Tver\nC2,M,51,Kazan\n");
    LoadInputs inputs;
    inputs.zone_file = (tmp.path() / "zones.csv").string();
    inputs.cost_file = (tmp.path() / "cost.csv").string();
    inputs.catalog_file = (tmp.path() / "catalog.csv").string();
    inputs.demographics_file = (tmp.path() / "demographics.csv").string();
    run_load(tmp.path(), inputs);
  }
  Warehouse open() { return Warehouse(warehouse_dir(tmp.path())); }
};

}  // namespace

TEST_CASE("profile totals are the hand sums") {
  Fixture fx;
  Warehouse wh = fx.open();
  JourneyProfile profile = build_profile(wh, "C1", 20250602);

  CHECK(profile.coverage == Coverage::Both);
  CHECK(profile.total_revenue == Money{1000});  // 7.00 + 3.00
  CHECK(profile.total_items == 3);
  REQUIRE(profile.purchases.size() == 2);
  CHECK(profile.purchases[0].sku_key == "S1");
  CHECK(profile.purchases[0].revenue == Money{700});

  // behaviour: 40 s stop in A + move + 20 s stop in B = 80 s total span
  double dwell_a = 0, dwell_b = 0;
  for (const ZoneBehaviour& z : profile.behaviour) {
    if (z.area_name == "A") dwell_a = z.dwell_s;
    if (z.area_name == "B") dwell_b = z.dwell_s;
  }
  CHECK(dwell_a == 40.0);
  CHECK(dwell_b == 20.0);
  CHECK(profile.total_movement_s == 80.0);
  CHECK(profile.total_visits == 3);  // A, aisle, B

  // receipt totals re-derive from the itemized entries
  Money sum;
  std::int64_t items = 0;
  for (const ProductPurchase& p : profile.purchases) {
    sum += p.revenue;
    items += p.quantity;
  }
  CHECK(sum == profile.total_revenue);
  CHECK(items == profile.total_items);

  double zone_sum = 0;
  for (const ZoneBehaviour& z : profile.behaviour) zone_sum += z.dwell_s;
  CHECK(zone_sum == profile.total_movement_s);

  // conversion flags: visited A and bought an A-homed product
  for (const ZoneConversionFlag& c : profile.conversions) {
    if (c.area_name == "A") {
      CHECK(c.visited);
      CHECK(c.purchased_here);
    }
    if (c.area_name == "B") {
      CHECK(c.visited);
      CHECK(c.purchased_here);
    }
  }
}

TEST_CASE("pos-only customer gets an empty behaviour half and a flag") {
  Fixture fx;
  Warehouse wh = fx.open();
  JourneyProfile profile = build_profile(wh, "C2", 20250602);
  CHECK(profile.coverage == Coverage::PosOnly);
  CHECK(profile.behaviour.empty());
  CHECK(profile.total_revenue == Money{600});

  // known customer, day without data: both halves empty
  JourneyProfile other_day = build_profile(wh, "C2", 20250603);
  CHECK(other_day.coverage == Coverage::None);
  CHECK(other_day.purchases.empty());
}

TEST_CASE("unknown customer is an error") {
  Fixture fx;
  Warehouse wh = fx.open();
  try {
    build_profile(wh, "GHOST", 20250602);
    FAIL("expected UNKNOWN_CUSTOMER");
  } catch (const Error& e) {
    CHECK(e.code() == Err::UnknownCustomer);
  }
}

TEST_CASE("zone conversion: 1 of 1 and table shape") {
  Fixture fx;
  Warehouse wh = fx.open();
  auto rows = zone_conversion(wh, 20250602, 20250602);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].area_name == "A");
  CHECK(rows[0].visitors == 1);
  CHECK(rows[0].buyers == 1);
  CHECK(rows[0].conversion == 1.0);
  // B: C1 visited and bought bread (homed in B); C2 bought without tracking
  CHECK(rows[1].visitors == 1);
  CHECK(rows[1].buyers == 2);  // buyers can exceed visitors, reported not clamped
  CHECK(rows[1].conversion == 2.0);

  try {
    zone_conversion(wh, 20250610, 20250601);
    FAIL("expected EMPTY_RANGE");
  } catch (const Error& e) {
    CHECK(e.code() == Err::EmptyRange);
  }
}

TEST_CASE("two visitors one buyer gives one half") {
  TempDir tmp("conv_half");
  Warehouse wh(tmp.path());
  StoreMap map = StoreMap::load("area_name,x0,y0,x1,y1,sequence_index\nA,0,0,10,10,0\n");
  wh.set_areas(map);
  std::int32_t sup = wh.upsert_supplier("S");
  std::int32_t prod = wh.upsert_product("S1", "P", Money{100}, sup, 1);
  std::int32_t c1 = wh.upsert_customer("C1", Gender::F, 30, "");
  std::int32_t c2 = wh.upsert_customer("C2", Gender::M, 40, "");
  wh.upsert_calendar(20250602);
  for (std::int32_t cust : {c1, c2}) {
    FactBehaviourRow row;
    row.customer_key = cust;
    row.date_key = 20250602;
    row.area_key = 1;
    row.movement_key = 1;
    row.t_end = row.duration_s = 30;
    row.visit = 1;
    wh.append_fact_behaviour(row);
  }
  FactSalesRow sale;
  sale.product_key = prod;
  sale.customer_key = c1;
  sale.date_key = 20250602;
  sale.area_key = 1;
  sale.quantity = sale.quantity_purchased = sale.sold = 1;
  sale.revenue = sale.total_sales = Money{100};
  sale.cost = Money{60};
  sale.profit = Money{40};
  sale.margin = render_margin(sale.profit, sale.revenue);
  wh.append_fact_sales(sale);

  auto rows = zone_conversion(wh, 20250602, 20250602);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].visitors == 2);
  CHECK(rows[0].buyers == 1);
  CHECK(rows[0].conversion == 0.5);
  CHECK(rows[0].render_conversion() == "0.5000");
}

TEST_CASE("join discipline: no cross-contamination between interleaved customers") {
  TempDir tmp("journey_fuzz");
  SimConfig config;
  config.n_customers = 8;
  config.n_days = 2;
  GeneratedCorpus corpus = generate_corpus(config);
  StagingStore staging(staging_dir(tmp.path()));
  staging.stage_pings(corpus.files.at("pings.csv"), "pings.csv");
  staging.stage_pos(corpus.files.at("pos.csv"), "pos.csv");
  write_file(tmp.path() / "zones.csv", corpus.files.at("zones.csv"));
  write_file(tmp.path() / "catalog.csv", corpus.files.at("catalog.csv"));
  write_file(tmp.path() / "cost.csv", corpus.files.at("cost.csv"));
  write_file(tmp.path() / "demographics.csv", corpus.files.at("demographics.csv"));
  LoadInputs inputs;
  inputs.zone_file = (tmp.path() / "zones.csv").string();
  inputs.cost_file = (tmp.path() / "cost.csv").string();
  inputs.catalog_file = (tmp.path() / "catalog.csv").string();
  inputs.demographics_file = (tmp.path() / "demographics.csv").string();
  run_load(tmp.path(), inputs);
  Warehouse wh(warehouse_dir(tmp.path()));

  // every profile's revenue equals the ledger for exactly that customer-day
  for (const CustomerDayTruth& day : corpus.truth.days) {
    JourneyProfile profile = build_profile(wh, day.customer_id, day.date_key);
    CHECK(profile.total_revenue == day.day_revenue);
    for (const auto& [area, planned] : day.zone_dwell_s) {
      double got = 0;
      for (const ZoneBehaviour& z : profile.behaviour) {
        if (z.area_key == area) got = z.dwell_s;
      }
      CHECK(std::fabs(got - planned) <= 2.0);
    }
  }
}

TEST_CASE("scripted 30% buy probability shows up in observed zone conversion") {
  TempDir tmp("conv_stat");
  SimConfig config;
  config.n_customers = 30;
  config.n_days = 7;
  config.buy_probability = 0.3;
  GeneratedCorpus corpus = generate_corpus(config);
  StagingStore staging(staging_dir(tmp.path()));
  staging.stage_pings(corpus.files.at("pings.csv"), "pings.csv");
  staging.stage_pos(corpus.files.at("pos.csv"), "pos.csv");
  write_file(tmp.path() / "zones.csv", corpus.files.at("zones.csv"));
  write_file(tmp.path() / "catalog.csv", corpus.files.at("catalog.csv"));
  write_file(tmp.path() / "cost.csv", corpus.files.at("cost.csv"));
  write_file(tmp.path() / "demographics.csv", corpus.files.at("demographics.csv"));
  LoadInputs inputs;
  inputs.zone_file = (tmp.path() / "zones.csv").string();
  inputs.cost_file = (tmp.path() / "cost.csv").string();
  inputs.catalog_file = (tmp.path() / "catalog.csv").string();
  inputs.demographics_file = (tmp.path() / "demographics.csv").string();
  run_load(tmp.path(), inputs);
  Warehouse wh(warehouse_dir(tmp.path()));

  // conversion is a per-day decision, so tally per-day zone tables
  std::int64_t visitors = 0, buyers = 0;
  for (int day = 2; day <= 8; ++day) {
    std::int32_t key = 20250600 + day;
    for (const ZoneConversionRow& row : zone_conversion(wh, key, key)) {
      visitors += row.visitors;
      buyers += row.buyers;
    }
  }
  REQUIRE(visitors >= 1000);
  double observed = static_cast<double>(buyers) / static_cast<double>(visitors);
  CHECK(observed >= 0.25);
  CHECK(observed <= 0.35);
}

TEST_CASE("profile totals re-derive from the cube") {
  Fixture fx;
  Warehouse wh = fx.open();
  JourneyProfile profile = build_profile(wh, "C1", 20250602);
  ResultTable table = rollup(wh, {{Measure::Revenue},
                                  {Level::Customer, Level::Day},
                                  {{Level::Customer, "C1"}, {Level::Day, "2025-06-02"}}});
  REQUIRE(table.rows.size() == 1);
  CHECK(table.rows[0][2] == format_money(profile.total_revenue));
}

TEST_CASE("profile renders to text and json") {
  Fixture fx;
  Warehouse wh = fx.open();
  JourneyProfile profile = build_profile(wh, "C1", 20250602);
  std::string text = profile.to_text();
  CHECK(text.find("C1") != std::string::npos);
  CHECK(text.find("Apples") != std::string::npos);
  CHECK(text.find("BOTH") != std::string::npos);
  std::string json_text = profile.to_json_text();
  CHECK(json_text.find("\"total_revenue\": \"10.00\"") != std::string::npos);
}
