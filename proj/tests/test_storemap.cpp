#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "retail/storemap.hpp"

using namespace retail;

namespace {

const char* kTwoZones =
    "area_name,x0,y0,x1,y1,sequence_index\n"
    "A,0,0,10,10,0\n"
    "B,20,0,30,10,1\n";

}  // namespace

TEST_CASE("two disjoint zones load with keys 1 and 2") {
  StoreMap map = StoreMap::load(kTwoZones);
  REQUIRE(map.zones().size() == 2);
  CHECK(map.zones()[0].area_key == 1);
  CHECK(map.zones()[0].area_name == "A");
  CHECK(map.zones()[1].area_key == 2);
  CHECK(map.bounds().x1 == 30);
}

TEST_CASE("overlapping zones are rejected with the pair named") {
  const char* csv =
      "area_name,x0,y0,x1,y1,sequence_index\n"
      "A,0,0,10,10,0\n"
      "B,5,5,15,15,1\n";
  try {
    StoreMap::load(csv);
    FAIL("expected OVERLAPPING_ZONES");
  } catch (const Error& e) {
    CHECK(e.code() == Err::OverlappingZones);
    CHECK(std::string(e.what()).find("A") != std::string::npos);
    CHECK(std::string(e.what()).find("B") != std::string::npos);
  }
}

TEST_CASE("touching edges are not an overlap") {
  const char* csv =
      "area_name,x0,y0,x1,y1,sequence_index\n"
      "A,0,0,10,10,0\n"
      "B,10,0,20,10,1\n";
  CHECK(StoreMap::load(csv).zones().size() == 2);
}

TEST_CASE("empty document gives an empty map") {
  StoreMap map = StoreMap::load("");
  CHECK(map.empty());
  CHECK_FALSE(map.locate(3, 3).has_value());
}

TEST_CASE("duplicate name and duplicate sequence are rejected") {
  const char* dup_name =
      "area_name,x0,y0,x1,y1,sequence_index\n"
      "A,0,0,10,10,0\n"
      "A,20,0,30,10,1\n";
  CHECK_THROWS_WITH_AS(StoreMap::load(dup_name), doctest::Contains("DUPLICATE_NAME"), Error);
  const char* dup_seq =
      "area_name,x0,y0,x1,y1,sequence_index\n"
      "A,0,0,10,10,0\n"
      "B,20,0,30,10,0\n";
  CHECK_THROWS_WITH_AS(StoreMap::load(dup_seq), doctest::Contains("DUPLICATE_SEQUENCE"), Error);
}

TEST_CASE("malformed row reports the line number") {
  const char* csv =
      "area_name,x0,y0,x1,y1,sequence_index\n"
      "A,0,0,10,10,0\n"
      "B,oops,0,30,10,1\n";
  try {
    StoreMap::load(csv);
    FAIL("expected MALFORMED_ROW");
  } catch (const Error& e) {
    CHECK(e.code() == Err::MalformedRow);
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
}

TEST_CASE("degenerate rectangle is rejected") {
  const char* csv =
      "area_name,x0,y0,x1,y1,sequence_index\n"
      "A,10,0,10,10,0\n";
  CHECK_THROWS_AS(StoreMap::load(csv), Error);
}

TEST_CASE("locate: interior, half-open edges, outside") {
  StoreMap map = StoreMap::load(kTwoZones);
  CHECK(map.locate(5, 5) == 1);
  CHECK(map.locate(0, 0) == 1);            // low edges closed
  CHECK_FALSE(map.locate(10, 5));          // high x edge open
  CHECK_FALSE(map.locate(5, 10));          // high y edge open
  CHECK_FALSE(map.locate(-1, 2));
  CHECK(map.locate(29.999, 9.999) == 2);
}

TEST_CASE("locate rejects non-finite coordinates") {
  StoreMap map = StoreMap::load(kTwoZones);
  CHECK_THROWS_AS(map.locate(std::numeric_limits<double>::quiet_NaN(), 0), Error);
  CHECK_THROWS_AS(map.locate(0, std::numeric_limits<double>::infinity()), Error);
}

TEST_CASE("property: locate equals brute-force scan and is unique") {
  // a handful of zones with touching edges and gaps
  std::vector<Zone> zones;
  for (int i = 0; i < 5; ++i) {
    Zone z;
    z.area_name = "Z" + std::to_string(i);
    z.x0 = i * 10.0;
    z.x1 = z.x0 + (i % 2 ? 10.0 : 8.0);  // gaps after even zones
    z.y0 = 0;
    z.y1 = 12;
    z.sequence_index = i;
    zones.push_back(z);
  }
  StoreMap map = StoreMap::from_zones(zones);

  Xoshiro256 rng(123);
  for (int trial = 0; trial < 5000; ++trial) {
    double x = rng.range_double(-5, 55);
    double y = rng.range_double(-5, 15);
    int members = 0;
    std::int32_t found = -1;
    for (const Zone& z : map.zones()) {
      if (x >= z.x0 && x < z.x1 && y >= z.y0 && y < z.y1) {
        ++members;
        found = z.area_key;
      }
    }
    CHECK(members <= 1);
    auto located = map.locate(x, y);
    if (members == 0) {
      CHECK_FALSE(located);
    } else {
      CHECK(located == found);
    }
  }
}

TEST_CASE("map serializes back to the zone CSV format") {
  StoreMap map = StoreMap::load(kTwoZones);
  StoreMap again = StoreMap::load(map.to_csv());
  REQUIRE(again.zones().size() == 2);
  CHECK(again.zones()[1].x0 == 20);
}
