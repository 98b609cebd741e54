#include <cmath>

#include "doctest.h"
#include "helpers.hpp"

using namespace fmse;

TEST_SUITE("grid") {

TEST_CASE("1d example: box [-2,2], N=9, omega (-1,1)") {
  GridConfig cfg;
  cfg.n = 1;
  cfg.s = 0.5;
  cfg.box = {{-2.0, 2.0}};
  cfg.nodes_per_axis = 9;
  cfg.omega = OmegaBox{{{-1.0, 1.0}}};
  const GridPtr grid = build_grid(cfg);

  CHECK(grid->spacing() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(grid->node_count() == 9);
  // Omega is open: the nodes at +-1 are exterior.
  REQUIRE(grid->omega_nodes().size() == 3);
  CHECK(grid->node(grid->omega_nodes()[0])[0] == doctest::Approx(-0.5));
  CHECK(grid->node(grid->omega_nodes()[1])[0] == doctest::Approx(0.0));
  CHECK(grid->node(grid->omega_nodes()[2])[0] == doctest::Approx(0.5));
  CHECK(grid->exterior_nodes().size() == 6);
}

TEST_CASE("2d example: box [-1,1]^2, N=5, omega = open disk r=0.5") {
  GridConfig cfg;
  cfg.n = 2;
  cfg.s = 0.5;
  cfg.box = {{-1.0, 1.0}, {-1.0, 1.0}};
  cfg.nodes_per_axis = 5;
  cfg.omega = OmegaBall{{0.0, 0.0}, 0.5};
  const GridPtr grid = build_grid(cfg);

  // Only the origin lies strictly inside; nodes at distance 0.5 are exterior.
  REQUIRE(grid->omega_nodes().size() == 1);
  CHECK(grid->node(grid->omega_nodes()[0]).norm() == doctest::Approx(0.0));
  CHECK(grid->node_count() == 25);
}

TEST_CASE("construction rejects bad input") {
  GridConfig cfg;
  cfg.n = 1;
  cfg.s = 0.5;
  cfg.box = {{-2.0, 2.0}};
  cfg.nodes_per_axis = 2;  // collar impossible
  cfg.omega = OmegaBox{{{-1.0, 1.0}}};
  CHECK_THROWS_AS(build_grid(cfg), ConfigError);

  cfg.nodes_per_axis = 9;
  cfg.s = 0.0;
  CHECK_THROWS_AS(build_grid(cfg), ConfigError);
  cfg.s = 1.0;
  CHECK_THROWS_AS(build_grid(cfg), ConfigError);

  cfg.s = 0.5;
  cfg.n = 3;
  CHECK_THROWS_AS(build_grid(cfg), ConfigError);

  cfg.n = 1;
  cfg.omega = OmegaBox{{{5.0, 6.0}}};  // empty omega
  CHECK_THROWS_AS(build_grid(cfg), ConfigError);

  cfg.omega = OmegaBox{{{-3.0, 3.0}}};  // omega covers the box: no exterior
  CHECK_THROWS_AS(build_grid(cfg), ConfigError);

  cfg.omega = OmegaBox{{{-2.5, 0.0}}};  // touches the box boundary
  CHECK_THROWS_AS(build_grid(cfg), ConfigError);
}

TEST_CASE("inner product: constants on [0,1], N=11") {
  GridConfig cfg;
  cfg.n = 1;
  cfg.s = 0.5;
  cfg.box = {{0.0, 1.0}};
  cfg.nodes_per_axis = 11;
  cfg.omega = OmegaBox{{{0.35, 0.65}}};
  const GridPtr grid = build_grid(cfg);

  const ScalarField one = ScalarField::constant(grid, 1.0);
  CHECK(inner_product(one, one) == doctest::Approx(1.1).epsilon(1e-14));
}

TEST_CASE("inner product: odd times even about the box center vanishes") {
  const GridPtr grid = test::grid_1d(17);
  Eigen::VectorXd odd(grid->node_count()), even(grid->node_count());
  for (int i = 0; i < grid->node_count(); ++i) {
    const double x = grid->node(i)[0];
    odd[i] = x * x * x;
    even[i] = std::cos(x);
  }
  const double ip =
      inner_product(ScalarField(grid, odd), ScalarField(grid, even));
  CHECK(std::abs(ip) <= 1e-15);
}

TEST_CASE("inner product matches independent quadrature of a Gaussian") {
  // Oracle: plain high-resolution rectangle sum, no library code involved.
  const double half = 8.0;
  auto brute = [&](int nodes) {
    const double h = 2.0 * half / (nodes - 1);
    double acc = 0.0;
    for (int i = nodes - 1; i >= 0; --i) {
      const double x = -half + i * h;
      acc += std::exp(-x * x);
    }
    return h * acc;
  };
  const double reference = brute(20001);

  for (int nodes : {33, 65}) {
    GridConfig cfg;
    cfg.n = 1;
    cfg.s = 0.5;
    cfg.box = {{-half, half}};
    cfg.nodes_per_axis = nodes;
    cfg.omega = OmegaBox{{{-1.0, 1.0}}};
    const GridPtr grid = build_grid(cfg);
    Eigen::VectorXd u(grid->node_count());
    for (int i = 0; i < grid->node_count(); ++i)
      u[i] = std::exp(-0.5 * grid->node(i)[0] * grid->node(i)[0]);
    const ScalarField field(grid, u);
    const double h = grid->spacing();
    CHECK(std::abs(inner_product(field, field) - reference) <= h * h);
  }
}

TEST_CASE("inner product is symmetric, bilinear, positive definite") {
  const GridPtr grid = test::grid_1d(13);
  const ScalarField u = test::random_field(grid, 7);
  const ScalarField v = test::random_field(grid, 8);
  const ScalarField w = test::random_field(grid, 9);

  CHECK(inner_product(u, v) == inner_product(v, u));
  const ScalarField lin(grid, 2.0 * v.values() + 3.0 * w.values());
  CHECK(test::rel_err(inner_product(u, lin),
                      2.0 * inner_product(u, v) + 3.0 * inner_product(u, w)) <=
        1e-13);
  CHECK(inner_product(u, u) > 0.0);
}

TEST_CASE("grid hash is deterministic and configuration sensitive") {
  const GridPtr a = test::grid_1d(17);
  const GridPtr b = test::grid_1d(17);
  const GridPtr c = test::grid_1d(21);
  CHECK(a->hash() == b->hash());
  CHECK(a->hash() != c->hash());

  const ScalarField u = test::random_field(a, 1);
  const ScalarField v = test::random_field(b, 2);
  CHECK_NOTHROW(inner_product(u, v));  // equal hash, distinct objects
  const ScalarField w = test::random_field(c, 3);
  CHECK_THROWS_AS(inner_product(u, w), ConfigError);
}

TEST_CASE("grid config json round trip") {
  GridConfig cfg;
  cfg.n = 2;
  cfg.s = 0.37;
  cfg.box = {{-1.5, 1.5}, {-1.5, 1.5}};
  cfg.nodes_per_axis = 7;
  cfg.omega = OmegaBall{{0.1, -0.2}, 0.55};
  const GridConfig back = GridConfig::from_json(cfg.to_json());
  CHECK(build_grid(cfg)->hash() == build_grid(back)->hash());
}

}  // TEST_SUITE
