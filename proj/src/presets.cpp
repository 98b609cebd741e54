#include "fmse/presets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fmse/rng.hpp"

namespace fmse::presets {

namespace {

// Fixed stream ids keep the preset components decoupled under one seed.
enum Stream : std::uint64_t {
  kStreamQ = 1,
  kStreamSigmaNode = 2,
  kStreamSigmaPair = 3,
  kStreamSpar = 4,
  kStreamPerp = 5,
  kStreamPhi = 6,
};

/// Bounding box of the omega nodes, for smooth bump placement.
struct OmegaBoxInfo {
  Eigen::RowVectorXd lo;
  Eigen::RowVectorXd hi;
};

OmegaBoxInfo omega_box(const GridPtr& grid) {
  const int n = grid->dim();
  OmegaBoxInfo info;
  info.lo = Eigen::RowVectorXd::Constant(n, std::numeric_limits<double>::max());
  info.hi = Eigen::RowVectorXd::Constant(n, std::numeric_limits<double>::lowest());
  for (int idx : grid->omega_nodes()) {
    for (int a = 0; a < n; ++a) {
      info.lo[a] = std::min(info.lo[a], grid->node(idx)[a]);
      info.hi[a] = std::max(info.hi[a], grid->node(idx)[a]);
    }
  }
  return info;
}

/// Product bump on the omega bounding box: 1 at the center, exactly 0 on the
/// box edge, in (0,1] inside.
double omega_bump(const GridPtr& grid, const OmegaBoxInfo& info, int node) {
  double w = 1.0;
  for (int a = 0; a < grid->dim(); ++a) {
    const double lo = info.lo[a], hi = info.hi[a];
    double u = 0.0;
    if (hi > lo) u = 2.0 * (grid->node(node)[a] - lo) / (hi - lo) - 1.0;
    const double t = 1.0 - u * u;
    w *= t * t;
  }
  return w;
}

}  // namespace

ScalarField random_q(const GridPtr& grid, double amp, std::uint64_t seed) {
  Eigen::VectorXd q = Eigen::VectorXd::Zero(grid->node_count());
  RngStream rng(seed, kStreamQ);
  for (int idx : grid->omega_nodes()) q[idx] = rng.next_uniform(-amp, amp);
  return ScalarField(grid, std::move(q));
}

SigmaKernel random_sigma(const GridPtr& grid, double amp, std::uint64_t seed) {
  if (!(amp >= 0.0)) throw ConfigError("sigma amplitude must be nonnegative");
  const int total = grid->node_count();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(total);
  RngStream node_rng(seed, kStreamSigmaNode);
  for (int idx : grid->omega_nodes()) b[idx] = node_rng.next_uniform(0.3, 1.0);

  Eigen::MatrixXd sigma = Eigen::MatrixXd::Ones(total, total);
  RngStream pair_rng(seed, kStreamSigmaPair);
  const auto& omega = grid->omega_nodes();
  for (std::size_t a = 0; a < omega.size(); ++a)
    for (std::size_t bo = a + 1; bo < omega.size(); ++bo) {
      const int i = omega[a], j = omega[bo];
      const double rough = pair_rng.next_uniform(0.1, 1.0);
      const double v = 1.0 + amp * (b[i] * b[j] + rough);
      sigma(i, j) = v;
      sigma(j, i) = v;
    }
  return SigmaKernel(grid, std::move(sigma));
}

BivariateVectorField random_spar(const GridPtr& grid, double amp, std::uint64_t seed) {
  const int total = grid->node_count();
  const int n = grid->dim();
  std::vector<Eigen::MatrixXd> comp(n, Eigen::MatrixXd::Zero(total, total));
  RngStream rng(seed, kStreamSpar);
  const auto& omega = grid->omega_nodes();
  // Antisymmetric scalar times the unit direction is symmetric-parallel.
  for (std::size_t a = 0; a < omega.size(); ++a)
    for (std::size_t b = a + 1; b < omega.size(); ++b) {
      const int i = omega[a], j = omega[b];
      const double m = rng.next_uniform(-amp, amp);
      const Eigen::RowVectorXd d = grid->node(i) - grid->node(j);
      const double dist = d.norm();
      for (int c = 0; c < n; ++c) {
        comp[c](i, j) = m * d[c] / dist;
        comp[c](j, i) = comp[c](i, j);
      }
    }
  return BivariateVectorField(grid, std::move(comp));
}

BivariateVectorField random_perp(const GridPtr& grid, double amp, std::uint64_t seed) {
  if (grid->dim() != 2)
    throw ConfigError("perpendicular preset requires a two-dimensional grid");
  const int total = grid->node_count();
  std::vector<Eigen::MatrixXd> comp(2, Eigen::MatrixXd::Zero(total, total));
  RngStream rng(seed, kStreamPerp);
  const auto& omega = grid->omega_nodes();
  for (std::size_t a = 0; a < omega.size(); ++a)
    for (std::size_t b = 0; b < omega.size(); ++b) {
      if (a == b) continue;
      const int i = omega[a], j = omega[b];
      const double m = rng.next_uniform(-amp, amp);
      const Eigen::RowVectorXd d = grid->node(i) - grid->node(j);
      const double dist = d.norm();
      comp[0](i, j) = -m * d[1] / dist;
      comp[1](i, j) = m * d[0] / dist;
    }
  return BivariateVectorField(grid, std::move(comp));
}

Potentials random_class_p(const GridPtr& grid, std::uint64_t seed,
                          const PotentialAmplitudes& amp) {
  BivariateVectorField a = a_apar_from_sigma(random_sigma(grid, amp.sigma, seed));
  if (amp.spar > 0.0) a = a + random_spar(grid, amp.spar, seed);
  if (grid->dim() == 2 && amp.perp > 0.0) a = a + random_perp(grid, amp.perp, seed);
  return Potentials(std::move(a), random_q(grid, amp.q, seed));
}

Potentials parallel_only(const GridPtr& grid, std::uint64_t seed,
                         const PotentialAmplitudes& amp) {
  if (grid->dim() != 2)
    throw ConfigError("parallel-only preset targets the n = 2 gauge branch");
  BivariateVectorField a = a_apar_from_sigma(random_sigma(grid, amp.sigma, seed));
  if (amp.spar > 0.0) a = a + random_spar(grid, amp.spar, seed);
  return Potentials(std::move(a), random_q(grid, amp.q, seed));
}

ScalarField smooth_gamma(const GridPtr& grid, double amp) {
  if (!(amp > -1.0)) throw ConfigError("gamma amplitude must keep gamma positive");
  const OmegaBoxInfo info = omega_box(grid);
  Eigen::VectorXd g = Eigen::VectorXd::Ones(grid->node_count());
  for (int idx : grid->omega_nodes())
    g[idx] = 1.0 + amp * omega_bump(grid, info, idx);
  return ScalarField(grid, std::move(g));
}

ScalarField random_phi(const GridPtr& grid, double amp, std::uint64_t seed) {
  if (!(amp >= 0.0 && amp < 1.0))
    throw ConfigError("phi amplitude must lie in [0, 1) to keep phi positive");
  Eigen::VectorXd raw = Eigen::VectorXd::Zero(grid->node_count());
  RngStream rng(seed, kStreamPhi);
  double max_abs = 0.0;
  for (int idx : grid->omega_nodes()) {
    raw[idx] = rng.next_uniform(-1.0, 1.0);
    max_abs = std::max(max_abs, std::abs(raw[idx]));
  }
  Eigen::VectorXd phi = Eigen::VectorXd::Ones(grid->node_count());
  if (max_abs > 0.0)
    for (int idx : grid->omega_nodes())
      phi[idx] = 1.0 + amp * raw[idx] / max_abs;  // hits ||phi - 1|| = amp
  return ScalarField(grid, std::move(phi));
}

ContinuumSigma continuum_sigma_bump(int n, double s, double eta,
                                    double omega_radius) {
  if (!(omega_radius > 0.0)) throw ConfigError("bump radius must be positive");
  const double reach = 2.0 * omega_radius;
  if (!(eta >= 0.0 && eta * std::pow(reach, 0.5 * n + s) < 1.0))
    throw ConfigError("bump strength would make sigma non-positive");
  const double rho = omega_radius;
  auto weight = [rho](const Eigen::RowVectorXd& x) {
    const double t = x.norm() / rho;
    if (t >= 1.0) return 0.0;
    const double u = 1.0 - t * t;
    return u * u;
  };
  ContinuumSigma sigma;
  sigma.interaction_radius = reach;
  sigma.value = [weight, eta, n, s](const Eigen::RowVectorXd& x,
                                    const Eigen::RowVectorXd& y) {
    const double wx = weight(x);
    if (wx == 0.0) return 1.0;
    const double wy = weight(y);
    if (wy == 0.0) return 1.0;
    return 1.0 + eta * wx * wy * std::pow((x - y).norm(), 0.5 * n + s);
  };
  return sigma;
}

Potentials make_potentials(const std::string& name, const GridPtr& grid,
                           std::uint64_t seed, const nlohmann::json& params) {
  PotentialAmplitudes amp;
  if (params.contains("amplitude")) {
    const double a = params.at("amplitude").get<double>();
    amp = PotentialAmplitudes{a, a, a, a};
  }
  if (params.contains("sigma_amplitude"))
    amp.sigma = params.at("sigma_amplitude").get<double>();
  if (params.contains("spar_amplitude"))
    amp.spar = params.at("spar_amplitude").get<double>();
  if (params.contains("perp_amplitude"))
    amp.perp = params.at("perp_amplitude").get<double>();
  if (params.contains("q_amplitude"))
    amp.q = params.at("q_amplitude").get<double>();

  if (name == "zero")
    return Potentials(BivariateVectorField::zero(grid), ScalarField::zero(grid));
  if (name == "random-class-p") return random_class_p(grid, seed, amp);
  if (name == "parallel-only-2d") return parallel_only(grid, seed, amp);
  if (name == "perp-2d") {
    if (grid->dim() != 2) throw ConfigError("preset perp-2d requires n = 2");
    return random_class_p(grid, seed, amp);
  }
  if (name == "apar-only") {
    BivariateVectorField a = a_apar_from_sigma(random_sigma(grid, amp.sigma, seed));
    return Potentials(std::move(a), random_q(grid, amp.q, seed));
  }
  throw ConfigError("unknown potentials preset: " + name);
}

SigmaKernel make_sigma(const std::string& name, const GridPtr& grid,
                       std::uint64_t seed, const nlohmann::json& params) {
  if (name == "unit") return SigmaKernel::unit(grid);
  if (name == "separable") {
    double amp = 0.5;
    if (params.contains("gamma_amplitude"))
      amp = params.at("gamma_amplitude").get<double>();
    return SigmaKernel::separable(smooth_gamma(grid, amp));
  }
  if (name == "from-potentials") {
    double amp = 0.25;
    if (params.contains("sigma_amplitude"))
      amp = params.at("sigma_amplitude").get<double>();
    return random_sigma(grid, amp, seed);
  }
  throw ConfigError("unknown sigma preset: " + name);
}

}  // namespace fmse::presets
