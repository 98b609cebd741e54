#pragma once

// Seeded deterministic instances used by the CLI and the test suites: every
// experiment in the acceptance battery can be reproduced from a preset name,
// a grid config and a seed, with no hand-authored inputs.

#include <cstdint>
#include <string>

#include "json.hpp"

#include "fmse/fields.hpp"
#include "fmse/grid.hpp"
#include "fmse/walk.hpp"

namespace fmse::presets {

/// Random scalar field supported on omega nodes, values in [-amp, amp].
ScalarField random_q(const GridPtr& grid, double amp, std::uint64_t seed);

/// Symmetric kernel sigma >= 1 with sigma - 1 strictly positive on all
/// off-diagonal omega pairs, unit elsewhere: 1 + base*b_i*b_j + rough_ij.
SigmaKernel random_sigma(const GridPtr& grid, double amp, std::uint64_t seed);

/// Random symmetric-parallel field supported on omega pairs.
BivariateVectorField random_spar(const GridPtr& grid, double amp,
                                 std::uint64_t seed);

/// Random perpendicular field supported on omega pairs (n = 2 only).
BivariateVectorField random_perp(const GridPtr& grid, double amp,
                                 std::uint64_t seed);

struct PotentialAmplitudes {
  double sigma = 0.25;  // antisymmetric-parallel part, via the sigma kernel
  double spar = 0.25;   // symmetric-parallel part
  double perp = 0.25;   // perpendicular part (ignored for n = 1)
  double q = 0.25;      // scalar potential
};

/// Random member of the admissible class: supp(A) in omega^2, the sign
/// condition (p3) holds, q supported on omega.
Potentials random_class_p(const GridPtr& grid, std::uint64_t seed,
                          const PotentialAmplitudes& amp = {});

/// Purely parallel A (zero perpendicular part), for the rotation branch of
/// the gauge construction. n = 2.
Potentials parallel_only(const GridPtr& grid, std::uint64_t seed,
                         const PotentialAmplitudes& amp = {});

/// Smooth conductivity: gamma = 1 + amp * bump on omega, exactly 1 on
/// exterior nodes, gamma > 0.
ScalarField smooth_gamma(const GridPtr& grid, double amp);

/// Random member of the conjugation group G: phi > 0 everywhere, phi == 1
/// exactly on exterior nodes, max |phi - 1| == amp on omega.
ScalarField random_phi(const GridPtr& grid, double amp, std::uint64_t seed);

/// Continuum kernel for the Z-limit study: 1 + eta * w(x) w(y) |x-y|^{n/2+s}
/// with w a smooth bump supported in the omega box.
ContinuumSigma continuum_sigma_bump(int n, double s, double eta,
                                    double omega_radius);

/// Named potentials factory for config files. Names: "zero",
/// "random-class-p", "parallel-only-2d", "perp-2d", "apar-only".
Potentials make_potentials(const std::string& name, const GridPtr& grid,
                           std::uint64_t seed, const nlohmann::json& params);

/// Named sigma factory: "unit", "separable", "from-potentials".
SigmaKernel make_sigma(const std::string& name, const GridPtr& grid,
                       std::uint64_t seed, const nlohmann::json& params);

}  // namespace fmse::presets
