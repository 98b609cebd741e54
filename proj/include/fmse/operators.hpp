#pragma once

// Discrete fractional and magnetic-fractional operators. All pair sums
// exclude the diagonal (principal value by diagonal exclusion), and operator
// matrices follow the weak convention: u^T K v equals the bilinear pairing
// B[u, v] with the quadrature weights inside K, so pointwise operator values
// are (K u) / h^n.

#include <array>
#include <memory>

#include <Eigen/Dense>

#include "json.hpp"

#include "fmse/fields.hpp"
#include "fmse/grid.hpp"

namespace fmse {

/// C_{n,s} = 4^s Gamma(n/2+s) / (pi^{n/2} |Gamma(-s)|), the normalization
/// making the nonlocal Laplacian's symbol |xi|^{2s}.
double fractional_constant(int n, double s);

/// alpha(i,j) = (C^{1/2}/sqrt(2)) (x_j-x_i)/|x_j-x_i|^{n/2+s+1}, zero on the
/// diagonal. Antisymmetric, parallel, and 2|alpha|^2 |x_i-x_j|^{n+2s} = C.
struct AlphaKernel {
  BivariateVectorField alpha;
  double c_ns = 0.0;

  static AlphaKernel build(const GridPtr& grid);
};

/// G(i,j) = (u_i - u_j) alpha(i,j); symmetric and parallel, zero diagonal.
BivariateVectorField frac_gradient(const ScalarField& u);

/// D(x_i) = 2 h^n sum_{j != i} V_sp(i,j) . alpha(i,j), the exact discrete
/// adjoint of frac_gradient: <D, u> = <V, grad^s u> for all V, u.
ScalarField frac_divergence(const BivariateVectorField& v);

/// G_A(i,j) = (u_i - u_j) alpha(i,j) + A(i,j) u_i.
BivariateVectorField magnetic_gradient(const ScalarField& u,
                                       const BivariateVectorField& a);

enum class AssemblyKind { AdjointComposition, Expansion, SigmaForm, Conductivity };

const char* to_string(AssemblyKind kind);

/// Dense weak-convention matrix over all box nodes.
class OperatorMatrix {
 public:
  OperatorMatrix(GridPtr grid, Eigen::MatrixXd m, AssemblyKind kind);

  const GridPtr& grid() const { return grid_; }
  const Eigen::MatrixXd& matrix() const { return m_; }
  AssemblyKind kind() const { return kind_; }

  /// Weak application: (K u) such that v . (K u) = B[u, v].
  ScalarField apply_weak(const ScalarField& u) const;
  /// Pointwise operator values, i.e. apply_weak scaled by 1/h^n.
  ScalarField apply_pointwise(const ScalarField& u) const;

 private:
  GridPtr grid_;
  Eigen::MatrixXd m_;
  AssemblyKind kind_;
};

/// K[a][b] = h^{2n} sum_{i != j} G_A(e_a)(i,j) . G_A(e_b)(i,j)
///           + h^n q_a [a == b].
OperatorMatrix assemble_bilinear(const Potentials& p);

/// Same operator through the expansion
///   (-Lap)^s u + 2 h^n sum_j A_ap . grad^s u
///   + ((div)^s A_sp + h^n sum_j |A|^2 + q) u,
/// in the weak convention. Agrees with assemble_bilinear up to roundoff.
OperatorMatrix assemble_expansion(const Potentials& p);

/// Expansion assembly for a scalar term not restricted to omega (the
/// conductivity reduction produces such a q').
OperatorMatrix assemble_expansion(const BivariateVectorField& a,
                                  const ScalarField& q);

/// Row i: h^n [ C h^n sum_{j != i} sigma(i,j)(u_i - u_j)/|x_i-x_j|^{n+2s}
///              + Q_i u_i ].
OperatorMatrix assemble_sigma_form(const SigmaKernel& sigma,
                                   const ScalarField& q_eff);

/// Magnetic conductivity operator u -> (div)^s_A(Theta . grad^s_A u) + q u
/// with Theta(i,j) = sqrt(gamma_i gamma_j). Requires gamma > 0 everywhere
/// and gamma == 1 on exterior nodes.
OperatorMatrix conductivity_matrix(const ScalarField& gamma,
                                   const Potentials& p);

/// Reduced scalar potential q' for which
///   C^s_{gamma,A}(gamma^{-1/2} w) + q gamma^{-1/2} w
///     = gamma^{1/2} ((-Lap)^s_A + q') w.
ScalarField reduction_qprime(const ScalarField& gamma, const Potentials& p);

struct SymbolFitReport {
  double k_fit = 0.0;
  double residual = 0.0;
  int N = 0;
  double s = 0.0;

  nlohmann::json to_json() const;
};

/// Fits the single scalar k in the pairwise-transform factorization
///   F(grad^s u)(xi, eta) = k i (xi/|xi|^{n/2+1-s} + eta/|eta|^{n/2+1-s})
///                            F u(xi + eta)
/// against a sampled Gaussian on the box, n = 1 only, N a power of two.
/// Frequencies are xi_a = 2 pi a/(N h), a in [-N/2, N/2); zero-frequency
/// rows/columns are excluded from the fit.
SymbolFitReport fourier_symbol_check(double s, int N,
                                     std::array<double, 2> box = {-8.0, 8.0});

}  // namespace fmse
