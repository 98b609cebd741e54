#pragma once

// Direct exterior-value problem for the discrete equation and the
// Dirichlet-to-Neumann matrix on the exterior nodal basis.

#include <cstdint>
#include <memory>

#include <Eigen/Dense>

#include "fmse/fields.hpp"
#include "fmse/operators.hpp"

namespace fmse {

struct DirichletSolution {
  ScalarField u;                  // all box nodes; equals f on exterior nodes
  Eigen::VectorXd exterior_data;  // echoed input, exterior enumeration order
  double interior_residual = 0.0;   // relative residual of interior equations
  double condition_estimate = 0.0;  // interior block, from LU diagnostics
  double norm_ratio = 0.0;          // ||u|| / ||f||, observed stability ratio
};

/// Dense DN matrix, indexed by the exterior node enumeration. The pairing
/// <Lambda f, g> is the plain dot product g . (Lambda f), quadrature weights
/// embedded.
class DnMatrix {
 public:
  DnMatrix(GridPtr grid, Eigen::MatrixXd m, std::uint64_t potentials_hash);

  const GridPtr& grid() const { return grid_; }
  const Eigen::MatrixXd& matrix() const { return m_; }
  std::uint64_t potentials_hash() const { return potentials_hash_; }
  std::uint64_t grid_hash() const { return grid_->hash(); }

  /// ||Lambda - Lambda^T|| / ||Lambda|| (Frobenius).
  double symmetry_defect() const;

 private:
  GridPtr grid_;
  Eigen::MatrixXd m_;
  std::uint64_t potentials_hash_;
};

/// Assembled stiffness matrix with its interior/exterior partition and the
/// factorized interior block; shared by the solver, DN assembly, and the
/// recovery pipeline so a system is factorized once.
class DirichletSystem {
 public:
  explicit DirichletSystem(const Potentials& p);

  const GridPtr& grid() const { return grid_; }
  const OperatorMatrix& stiffness() const { return k_; }
  double condition_estimate() const { return condition_; }

  /// u_I = -K_II^{-1} K_IE f, u_E = f; f in exterior enumeration order.
  DirichletSolution solve(const Eigen::VectorXd& exterior_values) const;

  /// Exterior-to-interior solution map S = -K_II^{-1} K_IE.
  const Eigen::MatrixXd& solution_map() const { return solution_map_; }

  /// Schur complement K_EE - X^T K_II X with X = K_II^{-1} K_IE.
  DnMatrix dn_matrix() const;

  /// B[u_f, w] for any w; depends only on w's exterior values when u_f
  /// solves the interior equations.
  double bilinear(const ScalarField& u, const ScalarField& w) const;

  std::uint64_t potentials_hash() const { return potentials_hash_; }

 private:
  GridPtr grid_;
  OperatorMatrix k_;
  Eigen::MatrixXd k_ii_;
  Eigen::MatrixXd k_ie_;
  Eigen::MatrixXd k_ee_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  Eigen::MatrixXd solution_map_;
  double condition_ = 0.0;
  std::uint64_t potentials_hash_ = 0;
};

/// Solves the exterior-value problem. Throws WellPosednessError if the
/// interior block is singular or has condition estimate above 1e12 (the
/// standing assumption that 0 is not an eigenvalue fails).
DirichletSolution solve_dirichlet(const Potentials& p,
                                  const Eigen::VectorXd& exterior_values);

/// DN matrix via the Schur complement over exterior nodes.
DnMatrix assemble_dn(const Potentials& p);

/// Independent route: one direct solve per exterior basis vector,
/// Lambda[:,b] = (K u_{e_b})|_E. Used to cross-check assemble_dn.
DnMatrix assemble_dn_columnwise(const Potentials& p);

}  // namespace fmse
