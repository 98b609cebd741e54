#pragma once

// Inverse-problem pipeline: the integral identity relating DN-map differences
// to interior potential differences, the exterior-to-interior rank check, and
// linear recovery of (sigma, Q) from DN data in inverse-crime mode.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "fmse/fields.hpp"
#include "fmse/solver.hpp"

namespace fmse {

/// |LHS - RHS| / (|LHS| + |RHS| + eps) for
///   LHS = f2^T (Lambda_1 - Lambda_2) f1,
///   RHS = 2 h^{2n} sum_{i,j} u2_i (A1 - A2)_ap(i,j) . grad^s u1 (i,j)
///         + h^n sum_i (Q1 - Q2)_i u1_i u2_i,
/// u1 solving under (p1, f1) and u2 under (p2, f2). Exact discretely.
double alessandrini_residual(const Potentials& p1, const Potentials& p2,
                             const Eigen::VectorXd& f1,
                             const Eigen::VectorXd& f2);

struct RankReport {
  Eigen::VectorXd singular_values;  // of S = -K_II^{-1} K_IE, descending
  int numerical_rank = 0;           // threshold 1e-10 * sigma_max
  int omega_count = 0;
  int exterior_count = 0;
  bool verdict = false;  // rank == omega_count
  std::string explanation;

  nlohmann::json to_json() const;
};

/// Discrete density analog of Runge approximation: the exterior-data to
/// interior-solution map should have full rank |omega|.
RankReport runge_rank(const Potentials& p);

/// Supplies the oracle solution u1 (all box nodes) for the exterior basis
/// datum e_a, a an index into the exterior enumeration.
using OracleSolutions = std::function<ScalarField(int exterior_index)>;

/// Inverse-crime oracle: solutions computed from the true potentials.
OracleSolutions oracle_from_potentials(const Potentials& truth);

struct RecoveryOptions {
  double reg = 0.0;                // Tikhonov weight; 0 = pseudoinverse only
  double rank_cutoff = 1e-10;      // relative singular-value cutoff
  std::vector<int> basis_a;        // exterior-enumeration subset, u1 side
  std::vector<int> basis_b;        // exterior-enumeration subset, u2 side
};

struct RecoveryResult {
  SigmaKernel sigma;               // sigma_ref + D_sigma, symmetric
  ScalarField q_effective;         // Q_ref + D_Q, zero off omega
  double data_fit_residual = 0.0;  // ||M x - rhs|| / (||rhs|| + eps)
  double condition = 0.0;          // sigma_max / sigma_min over retained
  int rank = 0;
  int equations = 0;
  int unknowns = 0;
  double reg = 0.0;
  bool rank_deficient = false;
  bool ill_conditioned = false;    // condition > 1e8; run flagged, not failed
  std::optional<double> parameter_rel_error;  // vs truth, when supplied

  nlohmann::json to_json() const;
};

/// Least-squares recovery of the sigma-kernel on omega pairs and the
/// effective potential on omega nodes from measured DN data, one linear
/// equation per exterior basis pair (a, b):
///   e_b^T (L_meas - L_ref) e_a
///     = h^{2n} C sum_{i<j} Dsig_ij [u2_i(u1_i - u1_j) + u2_j(u1_j - u1_i)]
///                          / |x_i - x_j|^{n+2s}
///       + h^n sum_i DQ_i u1_i u2_i,
/// with u1 = oracle(e_a) and u2 the reference solution for e_b. Only
/// interior values of u1, u2 enter. Unknown supports are hard-coded to
/// omega^2 and omega.
RecoveryResult recover(const DnMatrix& dn_measured, const Potentials& reference,
                       const OracleSolutions& oracle,
                       const std::optional<Potentials>& truth = std::nullopt,
                       const RecoveryOptions& options = {});

}  // namespace fmse
