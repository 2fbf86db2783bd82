#include <algorithm>
#include <cmath>
#include <cstdio>

#include "doctest.h"
#include "oracles.hpp"
#include "persearch/gridmodel.hpp"
#include "persearch/rng.hpp"

using namespace persearch;

TEST_CASE("fresh grid sits at the uninformative prior") {
  RateGrid g({4, 3, 1.0, {0.0, 0.0}});
  CHECK(g.spec().cell_count() == 12);
  for (const RateCell& c : g.cells()) {
    CHECK(c.alpha == 1.0);
    CHECK(c.beta == 1.0);
    CHECK(c.rate_mean() == 1.0);
    CHECK(c.rate_variance() == 1.0);
  }
}

TEST_CASE("one observation window shifts the posterior by count and exposure") {
  RateGrid g({5, 5, 1.0, {0.0, 0.0}});
  const Vec2 pose = g.spec().cell_center({2, 2});
  g.update(pose, {{{2, 2}, 3}}, 0.9);  // radius below 1 covers just that cell
  CHECK(g.cell({2, 2}).alpha == 4.0);
  CHECK(g.cell({2, 2}).beta == 2.0);
  CHECK(g.cell({2, 2}).rate_mean() == 2.0);
  CHECK(g.cell({2, 1}).beta == 1.0);  // outside the disc, untouched
}

TEST_CASE("empty windows only accumulate exposure") {
  RateGrid g({3, 3, 1.0, {0.0, 0.0}});
  const Vec2 pose = g.spec().cell_center({1, 1});
  for (int i = 0; i < 10; ++i) g.update(pose, {}, 0.5);
  CHECK(g.cell({1, 1}).alpha == 1.0);
  CHECK(g.cell({1, 1}).beta == 11.0);
  CHECK(g.cell({1, 1}).rate_mean() == doctest::Approx(1.0 / 11.0));
  CHECK(g.cell({1, 1}).rate_variance() == doctest::Approx(1.0 / 121.0));
}

TEST_CASE("counts keyed inside the disc land on their own cells") {
  RateGrid g({7, 7, 1.0, {0.0, 0.0}});
  const Vec2 pose = g.spec().cell_center({3, 3});
  g.update(pose, {{{3, 3}, 1}, {{4, 3}, 2}}, 2.0);
  CHECK(g.cell({3, 3}).alpha == 2.0);
  CHECK(g.cell({4, 3}).alpha == 3.0);
  CHECK(g.cell({3, 4}).alpha == 1.0);   // covered, no count
  CHECK(g.cell({3, 4}).beta == 2.0);
  // a count keyed outside the disc is ignored
  g.update(pose, {{{0, 0}, 5}}, 2.0);
  CHECK(g.cell({0, 0}).alpha == 1.0);
  CHECK(g.cell({0, 0}).beta == 1.0);
}

TEST_CASE("bad updates are rejected whole") {
  RateGrid g({3, 3, 1.0, {0.0, 0.0}});
  const Vec2 pose = g.spec().cell_center({1, 1});
  CHECK_THROWS_AS(g.update(pose, {{{5, 5}, 1}}, 2.0), std::out_of_range);
  CHECK_THROWS_AS(g.update(pose, {{{1, 1}, -2}}, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(g.update(pose, {}, 0.0), std::invalid_argument);
  for (const RateCell& c : g.cells()) {
    CHECK(c.alpha == 1.0);
    CHECK(c.beta == 1.0);
  }
  CHECK_THROWS_AS(g.set_cell({0, 0}, {0.5, 1.0}), std::invalid_argument);
}

TEST_CASE("disc membership matches a direct scan") {
  const GridSpec spec{20, 20, 1.0, {0.0, 0.0}};
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec2 center{rng.uniform() * 20.0, rng.uniform() * 20.0};
    const double radius = 0.3 + rng.uniform() * 4.0;
    auto got = cells_in_disc(spec, {center, radius});
    auto want = oracles::disc_members(spec, center, radius);
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    REQUIRE(got == want);
  }
}

TEST_CASE("a radius-2 disc on a unit grid covers the 13-cell plus shape") {
  const GridSpec spec{11, 11, 1.0, {0.0, 0.0}};
  const auto cells = cells_in_disc(spec, {spec.cell_center({5, 5}), 2.0});
  CHECK(cells.size() == 13);
  // translation invariance of the covered pattern
  const auto shifted = cells_in_disc(spec, {spec.cell_center({7, 4}), 2.0});
  CHECK(shifted.size() == 13);
}

TEST_CASE("disc rate sums the covered posterior means") {
  RateGrid g = oracles::uniform_grid(9, 9, 1.0, 0.01);
  oracles::set_rate(g, {4, 4}, 0.05);
  const DiscRate dr = rate_in_disc(g, {g.spec().cell_center({4, 4}), 2.0});
  CHECK(dr.cells_covered == 13);
  CHECK(dr.rate == doctest::Approx(12 * 0.01 + 0.05).epsilon(1e-9));
}

TEST_CASE("place sampling is reproducible and rate weighted") {
  RateGrid g = oracles::uniform_grid(10, 10, 1.0, 1e-6);
  oracles::set_rate(g, {2, 2}, 0.3);
  oracles::set_rate(g, {7, 7}, 0.1);

  const auto a = sample_places(g, 2, 1.0, 0.01, 100.0, {0.5, 0.5}, 77);
  const auto b = sample_places(g, 2, 1.0, 0.01, 100.0, {0.5, 0.5}, 77);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].cell == b[i].cell);

  // 3:1 roulette over many single draws
  int hot = 0, warm = 0;
  for (int trial = 0; trial < 100000; ++trial) {
    const auto s = sample_places(g, 1, 1.0, 0.01, 100.0, {0.5, 0.5},
                                 persearch::mix_seed(5, static_cast<std::uint64_t>(trial)));
    REQUIRE(s.size() == 1);
    if (s[0].cell == CellIndex{2, 2}) ++hot;
    if (s[0].cell == CellIndex{7, 7}) ++warm;
  }
  CHECK(static_cast<double>(hot) / warm == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("close pairs keep only the stronger cell") {
  RateGrid g = oracles::uniform_grid(10, 10, 1.0, 1e-9);
  oracles::set_rate(g, {4, 4}, 0.2);
  oracles::set_rate(g, {5, 4}, 0.1);  // 1 m apart, below min_separation
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = sample_places(g, 2, 2.0, 0.01, 100.0, {0.5, 0.5},
                                 persearch::mix_seed(9, static_cast<std::uint64_t>(trial)));
    bool weak = false, strong = false;
    for (const auto& p : s) {
      weak = weak || p.cell == CellIndex{5, 4};
      strong = strong || p.cell == CellIndex{4, 4};
    }
    CHECK(!(weak && strong));
  }
}

TEST_CASE("sampling respects variance and distance gates") {
  RateGrid g({6, 6, 1.0, {0.0, 0.0}});
  // high rate but fresh posterior: variance 1, should be filtered out
  const auto none = sample_places(g, 3, 1.0, 0.01, 100.0, {0.5, 0.5}, 1);
  CHECK(none.empty());

  RateGrid g2 = oracles::uniform_grid(6, 6, 1.0, 0.05);
  const auto near = sample_places(g2, 36, 0.5, 0.01, 2.0, {0.5, 0.5}, 1);
  for (const auto& p : near) CHECK(distance(p.position, {0.5, 0.5}) <= 2.0);
  CHECK(near.size() < 36);
  CHECK(!near.empty());
}

TEST_CASE("arrival stream is empty on a practically zero field") {
  RateGrid g = oracles::zero_grid(4, 4, 1.0);
  CHECK(simulate_arrivals(g, 100000.0, 1.0, 123).empty());
}

TEST_CASE("arrival stream frequency tracks the rate field") {
  RateGrid g = oracles::uniform_grid(3, 3, 1.0, 1e-9);
  oracles::set_rate(g, {1, 1}, 0.05);
  const double horizon = 40000.0;
  const auto events = simulate_arrivals(g, horizon, 1.0, 2024);
  double total = 0.0;
  double last_t = 0.0;
  for (const auto& e : events) {
    CHECK(e.cell == CellIndex{1, 1});
    CHECK(e.time_s >= last_t);
    last_t = e.time_s;
    total += e.count;
  }
  CHECK(total / horizon == doctest::Approx(0.05).epsilon(0.05));

  // halving dt must not change the expected count
  const auto fine = simulate_arrivals(g, horizon, 0.5, 2025);
  double total_fine = 0.0;
  for (const auto& e : fine) total_fine += e.count;
  CHECK(total_fine / horizon == doctest::Approx(0.05).epsilon(0.05));
}

TEST_CASE("replaying an arrival stream as observations recovers the rate") {
  // one cell of known rate observed continuously for 10^4 windows
  const double truth = 0.5;
  RateGrid world = oracles::uniform_grid(3, 3, 1.0, 1e-9);
  oracles::set_rate(world, {1, 1}, truth);
  const auto events = simulate_arrivals(world, 10000.0, 1.0, 31337);

  RateGrid learned({3, 3, 1.0, {0.0, 0.0}});
  const Vec2 pose = learned.spec().cell_center({1, 1});
  std::size_t next = 0;
  for (int w = 0; w < 10000; ++w) {
    std::map<CellIndex, int> counts;
    while (next < events.size() && events[next].time_s < w + 1.0) {
      counts[events[next].cell] += events[next].count;
      ++next;
    }
    learned.update(pose, counts, 2.0);
  }
  CHECK(learned.cell({1, 1}).rate_mean() == doctest::Approx(truth).epsilon(0.05));
  CHECK(learned.cell({1, 1}).rate_variance() < 1e-3);
}

TEST_CASE("grid snapshots round trip exactly") {
  RateGrid g({4, 2, 0.5, {1.0, -2.0}}, 7);
  g.set_cell({3, 1}, {13.25, 9.5});
  g.update(g.spec().cell_center({1, 0}), {{{1, 0}, 2}}, 0.4);
  const std::string path = "test_grid_roundtrip.json";
  save_grid(g, path);
  const RateGrid back = load_grid(path);
  CHECK(back.spec() == g.spec());
  CHECK(back.slice_id() == 7);
  for (int y = 0; y < 2; ++y) {
    for (int x = 0; x < 4; ++x) {
      CHECK(back.cell({x, y}).alpha == g.cell({x, y}).alpha);
      CHECK(back.cell({x, y}).beta == g.cell({x, y}).beta);
    }
  }
  std::remove(path.c_str());
}

TEST_CASE("event export writes one row per arrival burst") {
  RateGrid g = oracles::uniform_grid(2, 2, 1.0, 0.5);
  const auto events = simulate_arrivals(g, 50.0, 1.0, 5);
  REQUIRE(!events.empty());
  const std::string path = "test_events.csv";
  write_events_csv(events, path);
  std::FILE* f = std::fopen(path.c_str(), "rb");
  REQUIRE(f);
  char header[64] = {0};
  REQUIRE(std::fgets(header, sizeof(header), f));
  CHECK(std::string(header) == "time_s,cell_x,cell_y,count\n");
  int rows = 0;
  char line[128];
  while (std::fgets(line, sizeof(line), f)) ++rows;
  std::fclose(f);
  CHECK(rows == static_cast<int>(events.size()));
  std::remove(path.c_str());
}
