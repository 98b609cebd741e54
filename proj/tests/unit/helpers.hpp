#pragma once

#include <cmath>

#include "fmse/fields.hpp"
#include "fmse/grid.hpp"
#include "fmse/rng.hpp"

namespace fmse::test {

inline GridPtr grid_1d(int nodes = 17, double box_half = 2.0,
                       double omega_half = 0.75, double s = 0.5) {
  GridConfig cfg;
  cfg.n = 1;
  cfg.s = s;
  cfg.box = {{-box_half, box_half}};
  cfg.nodes_per_axis = nodes;
  cfg.omega = OmegaBox{{{-omega_half, omega_half}}};
  return build_grid(cfg);
}

inline GridPtr grid_2d(int nodes = 9, double box_half = 1.0,
                       double omega_half = 0.4, double s = 0.5) {
  GridConfig cfg;
  cfg.n = 2;
  cfg.s = s;
  cfg.box = {{-box_half, box_half}, {-box_half, box_half}};
  cfg.nodes_per_axis = nodes;
  cfg.omega = OmegaBox{{{-omega_half, omega_half}, {-omega_half, omega_half}}};
  return build_grid(cfg);
}

/// Random nodal values over the whole box, in [-1, 1].
inline ScalarField random_field(const GridPtr& grid, std::uint64_t seed) {
  RngStream rng(seed, 101);
  Eigen::VectorXd v(grid->node_count());
  for (int i = 0; i < grid->node_count(); ++i) v[i] = rng.next_uniform(-1.0, 1.0);
  return ScalarField(grid, std::move(v));
}

/// Random pair field over all ordered pairs, diagonal included.
inline BivariateVectorField random_pair_field(const GridPtr& grid,
                                              std::uint64_t seed) {
  RngStream rng(seed, 202);
  const int total = grid->node_count();
  std::vector<Eigen::MatrixXd> comp(grid->dim());
  for (int c = 0; c < grid->dim(); ++c) {
    comp[c].resize(total, total);
    for (int i = 0; i < total; ++i)
      for (int j = 0; j < total; ++j) comp[c](i, j) = rng.next_uniform(-1.0, 1.0);
  }
  return BivariateVectorField(grid, std::move(comp));
}

inline double rel_err(double value, double reference) {
  const double denom = std::max(std::abs(reference), 1e-300);
  return std::abs(value - reference) / denom;
}

inline double rel_frobenius(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double denom = std::max(a.norm(), b.norm());
  if (denom == 0.0) return 0.0;
  return (a - b).norm() / denom;
}

inline double max_abs_diff(const BivariateVectorField& a,
                           const BivariateVectorField& b) {
  return (a - b).max_abs();
}

}  // namespace fmse::test
