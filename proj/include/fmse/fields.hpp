#pragma once

// Bivariate vector-field calculus: symmetric/antisymmetric/parallel/
// perpendicular decompositions, the J-norms, the sigma kernel attached to the
// antisymmetric-parallel part of a vector potential, and potential pairs with
// their (p1)-(p5) property report.

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "fmse/grid.hpp"

namespace fmse {

/// R^n-valued function on ordered node pairs, stored densely as one
/// node_count x node_count matrix per component.
class BivariateVectorField {
 public:
  BivariateVectorField(GridPtr grid, std::vector<Eigen::MatrixXd> components);

  static BivariateVectorField zero(GridPtr grid);

  const GridPtr& grid() const { return grid_; }
  int dim() const { return static_cast<int>(comp_.size()); }
  const Eigen::MatrixXd& component(int c) const { return comp_[c]; }

  Eigen::VectorXd value(int i, int j) const;
  double entry(int i, int j, int c) const { return comp_[c](i, j); }

  BivariateVectorField operator+(const BivariateVectorField& other) const;
  BivariateVectorField operator-(const BivariateVectorField& other) const;
  BivariateVectorField operator*(double scalar) const;

  double max_abs() const;
  bool supported_on_omega_pairs() const;  // entries vanish off omega x omega

 private:
  GridPtr grid_;
  std::vector<Eigen::MatrixXd> comp_;
};

/// h^{2n} * sum_{i,j} V(i,j) . W(i,j) over all ordered pairs, diagonal
/// included (gradient-type fields vanish there by convention).
double pair_inner_product(const BivariateVectorField& v,
                          const BivariateVectorField& w);

/// sqrt(pair_inner_product(v, v)).
double pair_norm(const BivariateVectorField& v);

enum class Part { Symmetric, Antisymmetric, Parallel, Perpendicular };

/// Part extraction. Parallel projects A(x,y) onto x-y for x != y and leaves
/// the diagonal untouched; perpendicular is the pointwise complement. The
/// four extractions are commuting projections.
BivariateVectorField decompose(const BivariateVectorField& a, Part part);

enum class JVariable { First, Second };

/// Nodal L2 norm of A in one variable:
///   (J1 A)(x_i) = (h^n sum_j |A(x_j, x_i)|^2)^{1/2},
///   (J2 A)(x_i) = (h^n sum_j |A(x_i, x_j)|^2)^{1/2}.
ScalarField j_norm_field(const BivariateVectorField& a, JVariable which);

/// Symmetric positive kernel on node pairs with unit diagonal; equals 1 off
/// omega x omega when it arises from a potential supported there.
class SigmaKernel {
 public:
  /// Validates symmetry (1e-12 relative), strict positivity, and a unit
  /// diagonal (1e-12, then snapped to exactly 1). Non-positive entries are an
  /// error, never clamped: the offending pairs are listed in the message.
  SigmaKernel(GridPtr grid, Eigen::MatrixXd sigma);

  static SigmaKernel unit(GridPtr grid);

  /// Conductivity-type kernel sqrt(gamma(x) gamma(y)) off the diagonal. The
  /// diagonal is stored as 1 by convention; no operation reads it.
  static SigmaKernel separable(const ScalarField& gamma);

  const GridPtr& grid() const { return grid_; }
  const Eigen::MatrixXd& values() const { return sigma_; }
  double value(int i, int j) const { return sigma_(i, j); }

  double min_value() const { return sigma_.minCoeff(); }
  /// True when sigma(i,j) == 1 exactly for every pair off omega x omega.
  bool unit_off_omega_pairs() const;

 private:
  GridPtr grid_;
  Eigen::MatrixXd sigma_;
};

/// sigma(i,j) = 1 + (sqrt(2)/C^{1/2}) |x_j-x_i|^{n/2+s}
///                  (A_ap(i,j) . (x_j-x_i)/|x_j-x_i|)   for i != j,
/// sigma(i,i) = 1, where A_ap is the antisymmetric-parallel part of a. Throws
/// if any pair comes out non-positive.
SigmaKernel sigma_from_A(const BivariateVectorField& a);

/// A_ap(i,j) = alpha(i,j) (sigma(i,j) - 1): antisymmetric and parallel by
/// construction; inverse of sigma_from_A on its range.
BivariateVectorField a_apar_from_sigma(const SigmaKernel& sigma);

/// Finite-grid diagnostics for properties (p1)-(p5). (p3) and (p5) are exact
/// booleans; (p1), (p2), (p4) are discrete norms reported for documentation
/// (every norm is finite on a finite grid).
struct PropertyReport {
  bool p3_sign_condition = false;  // A_ap(x,y).(y-x) >= 0 at every pair
  bool p5_support = false;         // A == 0 off omega x omega
  double p1_j1_norm = 0.0;         // ||J1 A||_{L^{2p}}
  double p1_j2_norm = 0.0;         // ||J2 A||_{L^{2p}}
  double p2_spar_norm = 0.0;       // ||A_sp||_{L^2(pairs)}
  double p4_q_norm = 0.0;          // ||q||_{L^p(omega)}
  double p_exponent = 0.0;         // p = max{2, n/(2s)}

  bool in_class_P() const { return p3_sign_condition && p5_support; }
  nlohmann::json to_json() const;
};

/// Vector/scalar potential pair (A, q). A is real-valued; q vanishes on
/// exterior nodes (enforced exactly at construction).
class Potentials {
 public:
  Potentials(BivariateVectorField a, ScalarField q);

  const GridPtr& grid() const { return a_.grid(); }
  const BivariateVectorField& A() const { return a_; }
  const ScalarField& q() const { return q_; }

  /// p = max{2, n/(2s)}, the norm-report exponent.
  double sobolev_exponent() const;

  std::uint64_t hash() const;

 private:
  BivariateVectorField a_;
  ScalarField q_;
};

PropertyReport check_potentials(const Potentials& p);

/// Effective potential Q(x_i) = q_i + h^n sum_{j != i} |A(i,j)|^2
///                            + ((div)^s A_sp)(x_i).
/// Together with A_ap this is the complete invariant of the ~ gauge.
ScalarField assemble_Q(const Potentials& p);

}  // namespace fmse
