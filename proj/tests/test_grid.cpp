#include "doctest.h"
#include "generators.hpp"

#include "invasion/error.hpp"
#include "invasion/grid.hpp"

using namespace invasion;

TEST_CASE("cell centers on a 4x4 grid over [-2,2]") {
  const GridSpec g(-2.0, 2.0, 4, 4);
  CHECK(g.h1() == doctest::Approx(1.0));
  const Point first = g.cell_center(1);
  CHECK(first.x1 == doctest::Approx(-1.5));
  CHECK(first.x2 == doctest::Approx(-1.5));
  const Point last = g.cell_center(16);
  CHECK(last.x1 == doctest::Approx(1.5));
  CHECK(last.x2 == doctest::Approx(1.5));
  const Point sixth = g.cell_center(6);
  CHECK(sixth.x1 == doctest::Approx(-0.5));
  CHECK(sixth.x2 == doctest::Approx(-0.5));
}

TEST_CASE("neighbors on a 3x3 grid") {
  const GridSpec g(0.0, 1.0, 3, 3);
  CHECK(g.neighbor(1, Direction::PlusX) == 2u);
  CHECK_FALSE(g.neighbor(3, Direction::PlusX).has_value());
  CHECK(g.neighbor(2, Direction::PlusY) == 5u);
  CHECK_FALSE(g.neighbor(1, Direction::MinusX).has_value());
  CHECK_FALSE(g.neighbor(2, Direction::MinusY).has_value());
  CHECK_FALSE(g.neighbor(8, Direction::PlusY).has_value());
  CHECK(g.neighbor(5, Direction::MinusX) == 4u);
  CHECK(g.neighbor(5, Direction::MinusY) == 2u);
}

TEST_CASE("invalid grids and indices") {
  CHECK_THROWS_AS(GridSpec(1.0, 1.0, 4, 4), ConfigError);
  CHECK_THROWS_AS(GridSpec(0.0, 1.0, 2, 4), ConfigError);
  const GridSpec g(0.0, 1.0, 3, 4);
  CHECK_THROWS_AS(g.cell_center(0), IndexError);
  CHECK_THROWS_AS(g.cell_center(13), IndexError);
  CHECK_THROWS_AS(g.neighbor(13, Direction::PlusX), IndexError);
  CHECK_THROWS_AS(g.index(4, 1), IndexError);
}

TEST_CASE("index and ij are inverse") {
  testgen::Rng rng(11);
  for (int trial = 0; trial < testgen::kTrials; ++trial) {
    const GridSpec g = rng.grid();
    for (std::size_t k = 1; k <= g.n_cells(); ++k) {
      const auto [i, j] = g.ij(k);
      REQUIRE(g.index(i, j) == k);
      REQUIRE(i >= 1);
      REQUIRE(i <= g.nx());
      REQUIRE(j <= g.ny());
    }
  }
}

TEST_CASE("neighbor relation is symmetric and boundary-exact") {
  testgen::Rng rng(12);
  for (int trial = 0; trial < testgen::kTrials; ++trial) {
    const GridSpec g = rng.grid();
    std::size_t boundary_links = 0;
    for (std::size_t k = 1; k <= g.n_cells(); ++k) {
      const auto [i, j] = g.ij(k);
      const auto e = g.neighbor(k, Direction::PlusX);
      const auto n = g.neighbor(k, Direction::PlusY);
      REQUIRE(e.has_value() == (i < g.nx()));
      REQUIRE(n.has_value() == (j < g.ny()));
      if (e) REQUIRE(g.neighbor(*e, Direction::MinusX) == k);
      if (n) REQUIRE(g.neighbor(*n, Direction::MinusY) == k);
      for (Direction d : {Direction::PlusX, Direction::MinusX, Direction::PlusY, Direction::MinusY}) {
        boundary_links += g.neighbor(k, d) ? 0 : 1;
      }
    }
    REQUIRE(boundary_links == 2 * (g.nx() + g.ny()));
  }
}

TEST_CASE("cell centers tile the domain") {
  testgen::Rng rng(13);
  for (int trial = 0; trial < testgen::kTrials; ++trial) {
    const GridSpec g = rng.grid();
    double sx = 0.0;
    for (std::size_t k = 1; k <= g.n_cells(); ++k) {
      const Point p = g.cell_center(k);
      REQUIRE(p.x1 > g.a());
      REQUIRE(p.x1 < g.b());
      sx += p.x1;
    }
    CHECK(sx / static_cast<double>(g.n_cells()) == doctest::Approx(0.5 * (g.a() + g.b())));
    CHECK(g.cell_area() * static_cast<double>(g.n_cells()) ==
          doctest::Approx((g.b() - g.a()) * (g.b() - g.a())));
  }
}
