#include "fmse/gauge.hpp"

#include <algorithm>
#include <cmath>

#include "fmse/operators.hpp"

namespace fmse {

namespace {
constexpr double kGaugeTolerance = 1e-10;

/// Quarter turn in the configured plane; n = 2 only, so the plane is (0,1).
BivariateVectorField quarter_turn(const BivariateVectorField& a,
                                  std::pair<int, int> plane) {
  if (a.dim() != 2)
    throw ConfigError("gauge rotation branch requires a two-dimensional grid");
  if (!((plane.first == 0 && plane.second == 1) ||
        (plane.first == 1 && plane.second == 0)))
    throw ConfigError("rotation plane must be the axis pair (0,1)");
  // (a1, a2) -> (-a2, a1) in the (first, second) orientation.
  const int p = plane.first, q = plane.second;
  std::vector<Eigen::MatrixXd> comp(2);
  comp[p] = -a.component(q);
  comp[q] = a.component(p);
  return BivariateVectorField(a.grid(), std::move(comp));
}

}  // namespace

Potentials gauge_partner(const Potentials& p,
                         std::optional<std::pair<int, int>> rotation_plane) {
  const auto& grid = p.grid();
  const auto& a = p.A();
  if (a.max_abs() == 0.0)
    throw ConfigError("gauge_partner requires A not identically zero");

  const BivariateVectorField a_par = decompose(a, Part::Parallel);
  const BivariateVectorField a_perp = decompose(a, Part::Perpendicular);

  BivariateVectorField a_prime = BivariateVectorField::zero(grid);
  if (a_perp.max_abs() != 0.0) {
    a_prime = a_par - a_perp;
  } else {
    if (grid->dim() == 1)
      throw ConfigError(
          "no gauge partner construction exists for n = 1 with vanishing "
          "perpendicular part (the perpendicular space is trivial)");
    a_prime = a_par + quarter_turn(a_par, rotation_plane.value_or(std::pair{0, 1}));
  }

  // q' = q + h^n sum|A|^2 + (div)^s A_sp - h^n sum|A'|^2 - (div)^s A'_sp,
  // so Q' == Q by construction.
  const auto& grid_ref = grid;
  const int total = grid_ref->node_count();
  const double hn = grid_ref->cell_volume();

  auto square_integral = [&](const BivariateVectorField& field) {
    Eigen::VectorXd out(total);
    for (int i = 0; i < total; ++i) {
      double sum = 0.0;
      for (int j = 0; j < total; ++j) {
        if (j == i) continue;
        for (int c = 0; c < field.dim(); ++c) {
          const double v = field.component(c)(i, j);
          sum += v * v;
        }
      }
      out[i] = hn * sum;
    }
    return out;
  };

  const ScalarField div_spar = frac_divergence(
      decompose(decompose(a, Part::Symmetric), Part::Parallel));
  const ScalarField div_spar_prime = frac_divergence(
      decompose(decompose(a_prime, Part::Symmetric), Part::Parallel));

  Eigen::VectorXd q_prime = p.q().values() + square_integral(a) -
                            square_integral(a_prime) + div_spar.values() -
                            div_spar_prime.values();

  return Potentials(std::move(a_prime), ScalarField(grid, std::move(q_prime)));
}

GaugeReport is_sim_equivalent(const Potentials& p1, const Potentials& p2) {
  require_same_grid(p1.grid(), p2.grid(), "is_sim_equivalent");

  const BivariateVectorField apar1 =
      decompose(decompose(p1.A(), Part::Antisymmetric), Part::Parallel);
  const BivariateVectorField apar2 =
      decompose(decompose(p2.A(), Part::Antisymmetric), Part::Parallel);
  const ScalarField q1 = assemble_Q(p1);
  const ScalarField q2 = assemble_Q(p2);

  GaugeReport report;
  report.tolerance = kGaugeTolerance;
  report.a_apar_match = (apar1 - apar2).max_abs();
  report.q_match = (q1.values() - q2.values()).cwiseAbs().maxCoeff();

  const Eigen::MatrixXd m1 = assemble_expansion(p1).matrix();
  const Eigen::MatrixXd m2 = assemble_expansion(p2).matrix();
  const double scale = std::max(m1.norm(), m2.norm());
  report.operator_match = (scale > 0.0) ? (m1 - m2).norm() / scale : 0.0;

  const double a_scale = std::max({1.0, apar1.max_abs(), apar2.max_abs()});
  const double q_scale =
      std::max({1.0, q1.max_abs(), q2.max_abs()});
  report.verdict = report.a_apar_match <= kGaugeTolerance * a_scale &&
                   report.q_match <= kGaugeTolerance * q_scale;
  return report;
}

double approx_gauge_residual(const Potentials& p1, const Potentials& p2,
                             const ScalarField& phi) {
  require_same_grid(p1.grid(), phi.grid(), "approx_gauge_residual");
  require_same_grid(p1.grid(), p2.grid(), "approx_gauge_residual");
  if (!(phi.values().minCoeff() > 0.0))
    throw ConfigError("approx_gauge_residual: phi must be positive everywhere");
  for (int idx : phi.grid()->exterior_nodes())
    if (phi[idx] != 1.0)
      throw ConfigError(
          "approx_gauge_residual: phi must equal 1 on exterior nodes "
          "(membership in the conjugation group G)");

  const Eigen::MatrixXd m1 = assemble_expansion(p1).matrix();
  const Eigen::MatrixXd m2 = assemble_expansion(p2).matrix();
  const Eigen::MatrixXd commutated =
      m1 * phi.values().asDiagonal() -
      Eigen::MatrixXd(phi.values().asDiagonal()) * m2;

  double worst = 0.0;
  for (Eigen::Index i = 0; i < commutated.cols(); ++i)
    worst = std::max(worst, commutated.col(i).norm());
  return worst;
}

nlohmann::json GaugeReport::to_json() const {
  return {{"a_apar_match", a_apar_match},
          {"q_match", q_match},
          {"operator_match", operator_match},
          {"verdict", verdict},
          {"tolerance", tolerance}};
}

}  // namespace fmse
