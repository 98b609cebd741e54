#include "fmse/walk.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/chi_squared.hpp>

#include "fmse/detail/kahan.hpp"
#include "fmse/rng.hpp"

namespace fmse {

namespace {

/// Integer axis indices of a node in the lexicographic ordering.
std::array<int, 2> axis_indices(const GridPtr& grid, int node) {
  const int N = grid->nodes_per_axis();
  if (grid->dim() == 1) return {node, 0};
  return {node / N, node % N};
}

/// Rigorous upper bound on sum_{|k| >= r, k in Z^n} |k|^{-n-2s}.
double lattice_tail_bound(int n, double s, double r) {
  if (r <= 2.0) r = 2.0;
  if (n == 1) return std::pow(r - 1.0, -2.0 * s) / s;
  // Each cell k + [-1/2,1/2]^2 with |k| >= r lies in |y| >= r - sqrt(2)/2 and
  // satisfies |k| >= |y| - sqrt(2)/2 there.
  const double shift = std::numbers::sqrt2 / 2.0;
  const double base = std::max(r - shift, 1.0);
  return 4.0 * std::numbers::pi * std::pow(base - shift, -2.0 * s) / (2.0 * s);
}

}  // namespace

WalkConfig WalkConfig::make(GridPtr grid, SigmaKernel sigma, std::uint64_t rng_seed,
                            int max_jump) {
  require_same_grid(grid, sigma.grid(), "walk config");
  const int full = grid->nodes_per_axis() - 1;
  if (max_jump < 0) max_jump = full;
  if (max_jump < 1 || max_jump > full)
    throw ConfigError("walk cutoff must lie in [1, nodes_per_axis - 1]");
  WalkConfig cfg{std::move(grid), std::move(sigma), 0.0, max_jump, rng_seed};
  cfg.tau = std::pow(cfg.grid->spacing(), 2.0 * cfg.grid->order());
  return cfg;
}

JumpDistribution jump_probabilities(const WalkConfig& cfg, int node) {
  const auto& grid = cfg.grid;
  const int total = grid->node_count();
  const int n = grid->dim();
  const double s = grid->order();
  if (node < 0 || node >= total) throw ConfigError("jump source node out of range");

  const auto src = axis_indices(grid, node);
  JumpDistribution dist;
  dist.source = node;

  std::vector<double> weights;
  detail::KahanSum z;
  for (int j = 0; j < total; ++j) {
    if (j == node) continue;  // k = 0 carries no mass
    const auto tgt = axis_indices(grid, j);
    Eigen::VectorXi k(n);
    k[0] = tgt[0] - src[0];
    if (n == 2) k[1] = tgt[1] - src[1];
    if (k.cwiseAbs().maxCoeff() > cfg.max_jump) continue;
    const double knorm = std::sqrt(static_cast<double>(k.squaredNorm()));
    const double f = cfg.sigma.value(node, j) * std::pow(knorm, -(n + 2.0 * s));
    dist.targets.push_back(j);
    dist.jumps.push_back(std::move(k));
    weights.push_back(f);
    z.add(f);
  }
  dist.normalizer = z.value();
  dist.probabilities =
      Eigen::Map<Eigen::VectorXd>(weights.data(), weights.size()) / dist.normalizer;

  // Out-of-box (and beyond-cutoff) jumps carry zero mass; report their
  // relative weight under the kernel bound.
  int nearest_excluded = cfg.max_jump + 1;
  const int N = grid->nodes_per_axis();
  for (int a = 0; a < n; ++a) {
    const int p = (a == 0) ? src[0] : src[1];
    nearest_excluded = std::min({nearest_excluded, p + 1, N - p});
  }
  const double sigma_bound = std::max(1.0, cfg.sigma.values().maxCoeff());
  dist.truncation_bound =
      sigma_bound * lattice_tail_bound(n, s, nearest_excluded) / dist.normalizer;
  return dist;
}

ScalarField master_step(const WalkConfig& cfg, const ScalarField& u) {
  require_same_grid(cfg.grid, u.grid(), "master_step");
  const int total = cfg.grid->node_count();
  Eigen::VectorXd out(total);
  for (int i = 0; i < total; ++i) {
    const JumpDistribution dist = jump_probabilities(cfg, i);
    detail::KahanSum sum;
    for (std::size_t t = 0; t < dist.targets.size(); ++t)
      sum.add(dist.probabilities[static_cast<Eigen::Index>(t)] * u[dist.targets[t]]);
    out[i] = sum.value();
  }
  return ScalarField(cfg.grid, std::move(out));
}

double generator_residual(const WalkConfig& cfg, const ScalarField& u) {
  require_same_grid(cfg.grid, u.grid(), "generator_residual");
  const auto& grid = cfg.grid;
  const int total = grid->node_count();
  const int n = grid->dim();
  const double s = grid->order();
  const double hn = grid->cell_volume();

  const ScalarField stepped = master_step(cfg, u);

  double worst = 0.0;
  double scale = 0.0;
  for (int i = 0; i < total; ++i) {
    const JumpDistribution dist = jump_probabilities(cfg, i);
    const double lhs = dist.normalizer * (stepped[i] - u[i]) / cfg.tau;

    detail::KahanSum rhs_sum;
    for (int j : dist.targets)
      rhs_sum.add(cfg.sigma.value(i, j) * (u[j] - u[i]) /
                  std::pow(grid->distance(i, j), n + 2.0 * s));
    const double rhs = hn * rhs_sum.value();

    worst = std::max(worst, std::abs(lhs - rhs));
    scale = std::max(scale, std::abs(rhs));
  }
  if (scale == 0.0) return worst;  // both sides vanish for constant u
  return worst / scale;
}

LatticeZeta zeta_lattice_sum(int n, double s, int cutoff) {
  if (n != 1 && n != 2) throw ConfigError("zeta sum supports n in {1,2}");
  if (cutoff < 2) throw ConfigError("zeta cutoff too small");
  LatticeZeta out;
  out.cutoff = cutoff;
  detail::KahanSum sum;
  if (n == 1) {
    // Descending magnitudes: sum small terms first.
    for (int k = cutoff; k >= 1; --k) sum.add(2.0 * std::pow(k, -(1.0 + 2.0 * s)));
    out.partial_sum = sum.value();
    out.tail_bound = std::pow(cutoff, -2.0 * s) / s;
  } else {
    for (int a = -cutoff; a <= cutoff; ++a)
      for (int b = -cutoff; b <= cutoff; ++b) {
        if (a == 0 && b == 0) continue;
        const double k2 = static_cast<double>(a) * a + static_cast<double>(b) * b;
        sum.add(std::pow(k2, -0.5 * (2.0 + 2.0 * s)));
      }
    out.partial_sum = sum.value();
    out.tail_bound = lattice_tail_bound(2, s, cutoff);
  }
  return out;
}

ZConvergenceReport z_limit_study(const ContinuumSigma& sigma,
                                 const Eigen::MatrixXd& eval_points, int n,
                                 double s, const std::vector<double>& h_list) {
  if (h_list.size() < 2)
    throw ConfigError("z_limit_study needs at least two spacings");
  if (eval_points.cols() != n)
    throw ConfigError("z_limit_study: evaluation point dimension mismatch");
  if (!sigma.value) throw ConfigError("z_limit_study: kernel is empty");

  ZConvergenceReport report;
  const LatticeZeta zeta = zeta_lattice_sum(n, s);
  report.zeta_partial = zeta.partial_sum;
  report.zeta_tail_bound = zeta.tail_bound;

  for (double h : h_list) {
    if (!(h > 0)) throw ConfigError("z_limit_study: spacings must be positive");
    const int reach = static_cast<int>(std::ceil(sigma.interaction_radius / h)) + 1;
    double max_dev = 0.0;
    for (Eigen::Index p = 0; p < eval_points.rows(); ++p) {
      const Eigen::RowVectorXd x = eval_points.row(p);
      // Z_h(x) - zeta: only pairs within the interaction radius contribute.
      detail::KahanSum dev;
      if (n == 1) {
        for (int k = -reach; k <= reach; ++k) {
          if (k == 0) continue;
          Eigen::RowVectorXd y = x;
          y[0] += h * k;
          dev.add((sigma.value(x, y) - 1.0) * std::pow(std::abs(k), -(1.0 + 2.0 * s)));
        }
      } else {
        for (int a = -reach; a <= reach; ++a)
          for (int b = -reach; b <= reach; ++b) {
            if (a == 0 && b == 0) continue;
            Eigen::RowVectorXd y = x;
            y[0] += h * a;
            y[1] += h * b;
            const double k2 = static_cast<double>(a) * a + static_cast<double>(b) * b;
            dev.add((sigma.value(x, y) - 1.0) * std::pow(k2, -0.5 * (2.0 + 2.0 * s)));
          }
      }
      max_dev = std::max(max_dev, std::abs(dev.value()));
    }
    report.h_values.push_back(h);
    report.max_deviation.push_back(max_dev);
  }

  report.monotone_decreasing = true;
  for (std::size_t i = 1; i < report.max_deviation.size(); ++i)
    if (report.max_deviation[i] > report.max_deviation[i - 1] &&
        report.max_deviation[i - 1] > 0.0)
      report.monotone_decreasing = false;
  return report;
}

nlohmann::json ZConvergenceReport::to_json() const {
  return {{"h_values", h_values},
          {"max_deviation", max_deviation},
          {"monotone_decreasing", monotone_decreasing},
          {"zeta_partial", zeta_partial},
          {"zeta_tail_bound", zeta_tail_bound}};
}

FrequencyTable sample_jumps(const WalkConfig& cfg, int node, long count) {
  if (count < 1) throw ConfigError("sample count must be positive");
  const JumpDistribution dist = jump_probabilities(cfg, node);

  std::vector<double> cumulative(dist.targets.size());
  double acc = 0.0;
  for (std::size_t t = 0; t < dist.targets.size(); ++t) {
    acc += dist.probabilities[static_cast<Eigen::Index>(t)];
    cumulative[t] = acc;
  }
  cumulative.back() = 1.0;

  FrequencyTable table;
  table.source = node;
  table.targets = dist.targets;
  table.counts.assign(dist.targets.size(), 0);
  table.total = count;

  // One counter-based stream per node: parallel sampling over nodes stays
  // reproducible.
  for (long c = 0; c < count; ++c) {
    const double r = uniform01(
        counter_hash(cfg.rng_seed, static_cast<std::uint64_t>(node),
                     static_cast<std::uint64_t>(c)));
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
    const std::size_t idx =
        std::min(static_cast<std::size_t>(it - cumulative.begin()),
                 cumulative.size() - 1);
    ++table.counts[idx];
  }
  return table;
}

ChiSquareResult chi_square_test(const FrequencyTable& observed,
                                const JumpDistribution& expected) {
  if (observed.targets != expected.targets)
    throw ConfigError("chi_square_test: frequency table does not match distribution");

  // Pool bins with expected count below 5 into a single tail bin.
  double pooled_obs = 0.0, pooled_exp = 0.0;
  double statistic = 0.0;
  int bins = 0;
  for (std::size_t t = 0; t < observed.targets.size(); ++t) {
    const double exp_count =
        expected.probabilities[static_cast<Eigen::Index>(t)] * observed.total;
    const double obs_count = static_cast<double>(observed.counts[t]);
    if (exp_count < 5.0) {
      pooled_obs += obs_count;
      pooled_exp += exp_count;
    } else {
      statistic += (obs_count - exp_count) * (obs_count - exp_count) / exp_count;
      ++bins;
    }
  }
  if (pooled_exp > 0.0) {
    statistic += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++bins;
  }
  return ChiSquareResult{statistic, std::max(bins - 1, 1)};
}

double chi_square_quantile(double probability, int dof) {
  boost::math::chi_squared dist(dof);
  return boost::math::quantile(dist, probability);
}

}  // namespace fmse
