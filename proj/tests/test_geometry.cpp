#include <limits>
#include <cmath>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "lorentz/dynamics.hpp"
#include "lorentz/error.hpp"
#include "lorentz/geometry.hpp"
#include "lorentz/table_io.hpp"
#include "support.hpp"

using namespace lorentz;

TEST_SUITE("geometry") {
  TEST_CASE("min gap of a single disk is translate distance minus diameter") {
    CHECK(validate_disjoint({{{0.5, 0.5}, 0.25}}) == doctest::Approx(0.5).epsilon(1e-15));
  }

  TEST_CASE("default table min gap is the diagonal cross pair") {
    const auto t = default_table();
    CHECK(t.min_gap() == doctest::Approx(std::sqrt(2.0) / 2 - 0.7).epsilon(1e-12));
    CHECK(std::abs(t.min_gap() - 0.007107) < 1e-6);
  }

  TEST_CASE("overlap reports the pair and translate") {
    try {
      validate_disjoint({{{0, 0}, 0.3}, {{0.1, 0.1}, 0.3}});
      FAIL("expected OverlapError");
    } catch (const OverlapError& e) {
      CHECK(e.first == 0);
      CHECK(e.second == 1);
      CHECK(e.translate == std::array<int, 2>{0, 0});
      CHECK(e.gap < 0);
      CHECK(std::string(e.what()).find("1 and 2") != std::string::npos);
    }
  }

  TEST_CASE("touching disks count as overlapping") {
    CHECK_THROWS_AS(validate_disjoint({{{0.25, 0.5}, 0.25}, {{0.75, 0.5}, 0.25}}), OverlapError);
  }

  TEST_CASE("disk constraints") {
    CHECK_THROWS_AS(validate_disk({{0.5, 0.5}, 0.5}), ConfigError);
    CHECK_THROWS_AS(validate_disk({{0.5, 0.5}, 0.0}), ConfigError);
    CHECK_THROWS_AS(validate_disk({{1.0, 0.5}, 0.1}), ConfigError);
    CHECK_THROWS_AS(validate_disk({{-0.1, 0.5}, 0.1}), ConfigError);
    CHECK_THROWS_AS(validate_disk({{NAN, 0.5}, 0.1}), ConfigError);
    CHECK_THROWS_AS(validate_disjoint({}), ConfigError);
    CHECK_NOTHROW(validate_disk({{0.0, 0.999}, 0.499}));
  }

  TEST_CASE("single disk r=0.4 has a corridor along (1,0) of width 0.2") {
    const auto h = testing::single_disk(0.5, 0.5, 0.4).horizon();
    CHECK_FALSE(h.finite);
    REQUIRE(h.open_corridor);
    CHECK(h.open_corridor->direction == LatticeDirection{1, 0});
    CHECK(h.open_corridor->gap_width == doctest::Approx(0.2).epsilon(1e-12));
    CHECK_FALSE(h.max_free_path_bound);
  }

  TEST_CASE("single disk r=0.49 leaves a 0.02 corridor") {
    const auto h = testing::single_disk(0.5, 0.5, 0.49).horizon();
    CHECK_FALSE(h.finite);
    CHECK(h.open_corridor->direction == LatticeDirection{1, 0});
    CHECK(h.open_corridor->gap_width == doctest::Approx(0.02).epsilon(1e-9));
  }

  TEST_CASE("default table is finite with bound from the largest checked direction") {
    const auto t = default_table();
    const auto& h = t.horizon();
    CHECK(h.finite);
    CHECK_FALSE(h.open_corridor);
    // (1,0) and (0,1) are the only coprime directions with p^2+q^2 < 1/(2*0.4)^2.
    CHECK(h.directions_checked == 2);
    CHECK(*h.max_free_path_bound == doctest::Approx(1.8));
  }

  TEST_CASE("corridor widths of two-family tables by hand") {
    // Along (1,0): y-projections [0.1,0.3] and [0.5,0.7] of period 1 leave 0.2 + 0.4.
    const auto h = BilliardTable({{{0.5, 0.2}, 0.1}, {{0.5, 0.6}, 0.1}}).horizon();
    CHECK_FALSE(h.finite);
    CHECK(h.open_corridor->gap_width >= 0.4 - 1e-12);
  }

  TEST_CASE("finite iff no corridor, on random tables") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
      const BilliardTable t(testing::random_disks(rng, 3));
      CHECK(t.horizon().finite == !t.horizon().open_corridor.has_value());
      CHECK(t.horizon().finite == t.horizon().max_free_path_bound.has_value());
    }
  }

  TEST_CASE("corridor check is invariant under a common translation") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
      auto disks = testing::random_disks(rng, 3);
      const auto a = corridor_check(disks);
      const double sx = u(rng), sy = u(rng);
      for (auto& d : disks) {
        d.center.x = std::fmod(d.center.x + sx, 1.0);
        d.center.y = std::fmod(d.center.y + sy, 1.0);
      }
      const auto b = corridor_check(disks);
      CHECK(a.finite == b.finite);
      if (!a.finite) {
        CHECK(std::abs(a.open_corridor->gap_width - b.open_corridor->gap_width) < 1e-9);
      }
    }
  }

  TEST_CASE("swapping axes maps direction (p,q) to (q,p)") {
    std::mt19937_64 rng(13);
    int compared = 0, matched = 0;
    for (int i = 0; i < 200; ++i) {
      auto disks = testing::random_disks(rng, 3);
      if (disks.size() < 2) continue;  // one disk ties (1,0) with (0,1)
      const auto a = corridor_check(disks);
      for (auto& d : disks) std::swap(d.center.x, d.center.y);
      const auto b = corridor_check(disks);
      REQUIRE(a.finite == b.finite);
      if (a.finite) continue;
      CHECK(std::abs(a.open_corridor->gap_width - b.open_corridor->gap_width) < 1e-9);
      auto [p, q] = a.open_corridor->direction;
      LatticeDirection swapped{q, p};
      if (swapped.p < 0 || (swapped.p == 0 && swapped.q < 0)) swapped = {-swapped.p, -swapped.q};
      ++compared;
      // Symmetric tables tie between (p,q) and (q,p); the first enumerated wins.
      if (b.open_corridor->direction == swapped) ++matched;
    }
    CHECK(compared > 20);
    CHECK(matched >= compared * 9 / 10);
  }

  TEST_CASE("ray probe finds the (1,0) corridor of the single r=0.4 disk") {
    const auto table = testing::single_disk(0.5, 0.5, 0.4);
    StepOptions opt;
    opt.mode = HorizonMode::permissive;
    opt.cell_cap = 1002;  // a ray of length 1000 crosses at most ~1001 cells
    const Billiard billiard(table, opt);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int free_lines = 0, free_in_gap = 0;
    for (int i = 0; i < 10000; ++i) {
      const double y = u(rng);
      try {
        billiard.cast({0, 0}, {0.0, y}, {1.0, 0.0});
      } catch (const HorizonExceeded&) {
        ++free_lines;
        const double off = std::abs(y - 0.5);
        if (off > 0.4) ++free_in_gap;
      }
    }
    CHECK(free_lines > 0);
    CHECK(free_lines == free_in_gap);
    // The gap is 20% of offsets.
    CHECK(std::abs(free_lines / 10000.0 - 0.2) < 0.02);
  }

  TEST_CASE("no unobstructed ray on the default table") {
    const auto table = default_table();
    StepOptions opt;
    opt.mode = HorizonMode::permissive;
    opt.cell_cap = 1002;
    const Billiard billiard(table, opt);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double longest = 0;
    for (int i = 0; i < 10000; ++i) {
      const Vec2 o{u(rng), u(rng)};
      // Skip origins inside an obstacle.
      bool inside = false;
      for (const auto& d : table.disks()) {
        for (int a = -1; a <= 1; ++a) {
          for (int b = -1; b <= 1; ++b) {
            inside |= norm(o - Vec2{d.center.x + a, d.center.y + b}) < d.radius;
          }
        }
      }
      if (inside) continue;
      const double th = 2 * std::numbers::pi * u(rng);
      const auto hit = billiard.cast({0, 0}, o, {std::cos(th), std::sin(th)});
      longest = std::max(longest, hit.t);
    }
    CHECK(longest <= *table.horizon().max_free_path_bound);
  }

  TEST_CASE("digest tracks the exact parameters") {
    const auto a = default_table();
    const BilliardTable b({{{0, 0}, 0.4}, {{0.5, 0.5}, 0.29}});
    CHECK(a.digest() != b.digest());
    CHECK(a.digest() == default_table().digest());
    CHECK(a.digest().size() == 16);
  }

  TEST_CASE("table json round trip and rejection") {
    const auto t = default_table();
    const auto doc = table_to_json(t);
    CHECK(table_from_json(doc).digest() == t.digest());
    CHECK_THROWS_AS(table_from_json(
                        {{"disks", {{{"center", {0.5, 0.5}}, {"radius", std::numeric_limits<double>::infinity()}}}}}),
                    ConfigError);
    CHECK_THROWS_AS(table_from_json(nlohmann::json::parse(R"({"disks":[{"center":[0.5,0.5]}]})")),
                    ConfigError);
    CHECK_THROWS_AS(table_from_json(nlohmann::json::parse(R"({"disks":[{"center":[0.5],"radius":0.1}]})")),
                    ConfigError);
    CHECK_THROWS_AS(table_from_json(nlohmann::json::parse(R"({"disks":[{"center":[0.5,0.5],"radius":"0.1"}]})")),
                    ConfigError);
    CHECK_THROWS_AS(table_from_json(nlohmann::json::parse(R"({"disk":[]})")), ConfigError);
    CHECK_THROWS_AS(read_table("/nonexistent/table.json"), ConfigError);
  }
}
