#pragma once

// Gauge relationships between potential pairs: explicit partners for the
// equality-of-operators gauge, its invariant-based characterization, and the
// residual witnessing that conjugation by a positive exterior-one function is
// not a gauge of this equation.

#include <optional>
#include <utility>

#include "json.hpp"

#include "fmse/fields.hpp"
#include "fmse/grid.hpp"

namespace fmse {

struct GaugeReport {
  double a_apar_match = 0.0;    // max entrywise |A_ap - A'_ap|
  double q_match = 0.0;         // max |Q - Q'|
  double operator_match = 0.0;  // relative Frobenius distance, expansion mats
  bool verdict = false;
  double tolerance = 0.0;

  nlohmann::json to_json() const;
};

/// Builds a distinct gauge-equivalent partner:
///   A' = A_par - A_perp          when A_perp is not identically zero,
///   A' = A_par + R A_par         otherwise (n = 2, R the quarter turn
///                                (a1, a2) -> (-a2, a1)),
/// with q' chosen so the effective potentials match:
///   q' = q + h^n sum|A|^2 + (div)^s A_sp - h^n sum|A'|^2 - (div)^s A'_sp.
/// Errors: A identically zero; n = 1 with A_perp identically zero (the
/// perpendicular space is trivial, no construction exists).
Potentials gauge_partner(const Potentials& p,
                         std::optional<std::pair<int, int>> rotation_plane =
                             std::nullopt);

/// Equivalence check through the complete invariant (A_ap, Q); the operator
/// metric is reported as a cross-check. Verdict tolerance is 1e-10 relative
/// (all quantities are exact finite sums; the slack covers roundoff only).
GaugeReport is_sim_equivalent(const Potentials& p1, const Potentials& p2);

/// Max over the nodal basis {e_i} of
///   || M_1(phi e_i) - diag(phi) M_2 e_i ||
/// in the weak convention, M_k the full expansion matrices including q.
/// Zero iff the conjugation identity holds for this phi. Requires phi > 0
/// everywhere and phi == 1 exactly on exterior nodes.
double approx_gauge_residual(const Potentials& p1, const Potentials& p2,
                             const ScalarField& phi);

}  // namespace fmse
