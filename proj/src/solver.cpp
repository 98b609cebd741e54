#include "fmse/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fmse {

namespace {
constexpr double kConditionLimit = 1e12;
}

DnMatrix::DnMatrix(GridPtr grid, Eigen::MatrixXd m, std::uint64_t potentials_hash)
    : grid_(std::move(grid)), m_(std::move(m)), potentials_hash_(potentials_hash) {
  const int ext = static_cast<int>(grid_->exterior_nodes().size());
  if (m_.rows() != ext || m_.cols() != ext)
    throw ConfigError("DN matrix shape does not match exterior node count");
  if (symmetry_defect() > 1e-12)
    throw ConfigError("DN matrix failed its self-adjointness invariant");
}

double DnMatrix::symmetry_defect() const {
  const double norm = m_.norm();
  if (norm == 0.0) return 0.0;
  return (m_ - m_.transpose()).norm() / norm;
}

DirichletSystem::DirichletSystem(const Potentials& p)
    : grid_(p.grid()),
      k_(assemble_bilinear(p)),
      potentials_hash_(p.hash()) {
  const auto& interior = grid_->omega_nodes();
  const auto& exterior = grid_->exterior_nodes();
  const int ni = static_cast<int>(interior.size());
  const int ne = static_cast<int>(exterior.size());
  const auto& k = k_.matrix();

  k_ii_.resize(ni, ni);
  k_ie_.resize(ni, ne);
  k_ee_.resize(ne, ne);
  for (int a = 0; a < ni; ++a) {
    for (int b = 0; b < ni; ++b) k_ii_(a, b) = k(interior[a], interior[b]);
    for (int b = 0; b < ne; ++b) k_ie_(a, b) = k(interior[a], exterior[b]);
  }
  for (int a = 0; a < ne; ++a)
    for (int b = 0; b < ne; ++b) k_ee_(a, b) = k(exterior[a], exterior[b]);

  lu_ = Eigen::PartialPivLU<Eigen::MatrixXd>(k_ii_);
  const double rcond = lu_.rcond();
  condition_ = (rcond > 0.0) ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!std::isfinite(condition_) || condition_ > kConditionLimit) {
    std::ostringstream msg;
    msg << "interior operator block is numerically singular (condition estimate ";
    msg << condition_ << " > " << kConditionLimit
        << "): the standing assumption that 0 is not an eigenvalue of the "
           "equation fails for these potentials";
    throw WellPosednessError(msg.str());
  }

  solution_map_ = -lu_.solve(k_ie_);
}

DirichletSolution DirichletSystem::solve(const Eigen::VectorXd& exterior_values) const {
  const auto& interior = grid_->omega_nodes();
  const auto& exterior = grid_->exterior_nodes();
  const int ne = static_cast<int>(exterior.size());
  if (exterior_values.size() != ne)
    throw ConfigError("exterior data length does not match exterior node count");

  const Eigen::VectorXd u_i = solution_map_ * exterior_values;

  Eigen::VectorXd u(grid_->node_count());
  for (std::size_t a = 0; a < interior.size(); ++a) u[interior[a]] = u_i[a];
  for (std::size_t a = 0; a < exterior.size(); ++a)
    u[exterior[a]] = exterior_values[a];

  // Interior equations K_II u_I + K_IE f = 0, reported relative to the data.
  const Eigen::VectorXd residual = k_ii_ * u_i + k_ie_ * exterior_values;
  const double scale =
      std::max({(k_ii_ * u_i).norm(), (k_ie_ * exterior_values).norm(),
                std::numeric_limits<double>::min()});

  DirichletSolution sol{ScalarField(grid_, std::move(u)), exterior_values,
                        residual.norm() / scale, condition_, 0.0};
  const double fnorm = exterior_values.norm();
  sol.norm_ratio = (fnorm > 0.0) ? sol.u.values().norm() / fnorm : 0.0;
  return sol;
}

DnMatrix DirichletSystem::dn_matrix() const {
  // Schur complement in the form K_EE - X^T K_II X, whose computed asymmetry
  // is summation roundoff only.
  const Eigen::MatrixXd& x = solution_map_;
  Eigen::MatrixXd lambda = k_ee_ - x.transpose() * (k_ii_ * x);
  return DnMatrix(grid_, std::move(lambda), potentials_hash_);
}

double DirichletSystem::bilinear(const ScalarField& u, const ScalarField& w) const {
  require_same_grid(grid_, u.grid(), "bilinear");
  require_same_grid(grid_, w.grid(), "bilinear");
  return w.values().dot(k_.matrix() * u.values());
}

DirichletSolution solve_dirichlet(const Potentials& p,
                                  const Eigen::VectorXd& exterior_values) {
  return DirichletSystem(p).solve(exterior_values);
}

DnMatrix assemble_dn(const Potentials& p) { return DirichletSystem(p).dn_matrix(); }

DnMatrix assemble_dn_columnwise(const Potentials& p) {
  DirichletSystem system(p);
  const auto& grid = p.grid();
  const auto& exterior = grid->exterior_nodes();
  const int ne = static_cast<int>(exterior.size());
  const auto& k = system.stiffness().matrix();

  Eigen::MatrixXd lambda(ne, ne);
  for (int b = 0; b < ne; ++b) {
    Eigen::VectorXd basis = Eigen::VectorXd::Zero(ne);
    basis[b] = 1.0;
    const DirichletSolution sol = system.solve(basis);
    const Eigen::VectorXd ku = k * sol.u.values();
    for (int a = 0; a < ne; ++a) lambda(a, b) = ku[exterior[a]];
  }
  return DnMatrix(grid, std::move(lambda), p.hash());
}

}  // namespace fmse
