#pragma once

// Weighted long-jump random walk on the truncated lattice: jump distribution
// P(x,k) ~ sigma(x, x+hk) |k|^{-n-2s}, target-normalized master-equation
// evolution, Monte Carlo sampling with a counter-based generator, and the
// algebraic identity tying the walk generator to the sigma-kernel operator.

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "fmse/fields.hpp"
#include "fmse/grid.hpp"

namespace fmse {

struct WalkConfig {
  GridPtr grid;
  SigmaKernel sigma;
  double tau = 0.0;       // time step, h^{2s} exactly
  int max_jump = 0;       // lattice-radius cutoff (|k|_inf), set by the box
  std::uint64_t rng_seed = 0;

  /// tau = h^{2s}; max_jump defaults to the full box extent. Requires
  /// sigma > 0 (already enforced by SigmaKernel) and a cutoff consistent
  /// with the box.
  static WalkConfig make(GridPtr grid, SigmaKernel sigma,
                         std::uint64_t rng_seed, int max_jump = -1);
};

/// P(x, .) over admissible jumps k != 0 with x + hk a box node within the
/// cutoff. Jumps leaving the box carry zero mass; P is renormalized over
/// in-box targets and the excluded relative mass is reported.
struct JumpDistribution {
  int source = 0;                      // node id
  std::vector<int> targets;            // node ids, ascending
  std::vector<Eigen::VectorXi> jumps;  // integer jump vector per target
  Eigen::VectorXd probabilities;       // sums to 1
  double normalizer = 0.0;             // Z(x) = sum_k sigma |k|^{-n-2s}
  /// Upper bound on the relative mass lost to out-of-box jumps, from the
  /// lattice tail estimate at the cutoff radius.
  double truncation_bound = 0.0;
};

JumpDistribution jump_probabilities(const WalkConfig& cfg, int node);

/// u(x, t+tau) = sum_k P(x,k) u(x+hk, t); out-of-box neighbors contribute 0.
ScalarField master_step(const WalkConfig& cfg, const ScalarField& u);

/// max_x | Z(x) (master_step(u) - u)(x) / tau
///         - h^n sum_{j != i} sigma(i,j)(u_j - u_i) / |x_i - x_j|^{n+2s} |,
/// normalized by the largest right-hand-side magnitude. The two sides are the
/// same finite sum rearranged through |k|^{-n-2s} = h^{n+2s} |hk|^{-n-2s}, so
/// the residual is pure roundoff.
double generator_residual(const WalkConfig& cfg, const ScalarField& u);

/// Partial lattice sum of zeta = sum_{k != 0} |k|^{-n-2s} with a rigorous
/// remainder bracket: zeta lies in [partial_sum, partial_sum + tail_bound].
struct LatticeZeta {
  double partial_sum = 0.0;
  double tail_bound = 0.0;
  int cutoff = 0;
};

LatticeZeta zeta_lattice_sum(int n, double s, int cutoff = 200000);

/// Continuum kernel for the h -> 0 study: value(x, y) with value == 1
/// whenever |x - y| >= interaction_radius or either argument is outside the
/// weight's support.
struct ContinuumSigma {
  std::function<double(const Eigen::RowVectorXd&, const Eigen::RowVectorXd&)>
      value;
  double interaction_radius = 0.0;
};

struct ZConvergenceReport {
  std::vector<double> h_values;
  std::vector<double> max_deviation;  // max_x |Z_h(x) - zeta| per h
  bool monotone_decreasing = false;
  double zeta_partial = 0.0;
  double zeta_tail_bound = 0.0;

  nlohmann::json to_json() const;
};

/// Evaluates Z_h(x) - zeta = sum_{0 < |k| <= R/h} (sigma(x, x+hk) - 1)
/// |k|^{-n-2s} exactly (terms beyond the interaction radius vanish) at the
/// given evaluation points, for each spacing in the list (descending).
ZConvergenceReport z_limit_study(const ContinuumSigma& sigma,
                                 const Eigen::MatrixXd& eval_points, int n,
                                 double s, const std::vector<double>& h_list);

struct FrequencyTable {
  int source = 0;
  std::vector<int> targets;     // matches the JumpDistribution target order
  std::vector<long> counts;
  long total = 0;
};

/// Draws count independent jumps from P(x, .) by inverse CDF with the
/// seeded counter-based generator (one stream per node). Bitwise
/// reproducible for a fixed seed.
FrequencyTable sample_jumps(const WalkConfig& cfg, int node, long count);

/// Pearson statistic of observed counts against the exact distribution;
/// low-expectation bins (< 5) are pooled from the tail. Returns the
/// statistic and the degrees of freedom used.
struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
};

ChiSquareResult chi_square_test(const FrequencyTable& observed,
                                const JumpDistribution& expected);

/// Quantile of the chi-square distribution with dof degrees of freedom.
double chi_square_quantile(double probability, int dof);

}  // namespace fmse
