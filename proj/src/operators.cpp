#include "fmse/operators.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <fftw3.h>

#include "fmse/detail/kahan.hpp"

namespace fmse {

double fractional_constant(int n, double s) {
  if (!(s > 0.0 && s < 1.0))
    throw ConfigError("fractional order s must lie strictly in (0,1)");
  if (n < 1) throw ConfigError("dimension must be positive");
  const double pi = std::numbers::pi;
  return std::pow(4.0, s) * std::tgamma(0.5 * n + s) /
         (std::pow(pi, 0.5 * n) * std::abs(std::tgamma(-s)));
}

AlphaKernel AlphaKernel::build(const GridPtr& grid) {
  const int n = grid->dim();
  const double s = grid->order();
  const double c_ns = fractional_constant(n, s);
  const double front = std::sqrt(c_ns) / std::sqrt(2.0);
  const int total = grid->node_count();

  std::vector<Eigen::MatrixXd> comp(n);
  for (int c = 0; c < n; ++c) comp[c].setZero(total, total);
  for (int i = 0; i < total; ++i)
    for (int j = 0; j < total; ++j) {
      if (i == j) continue;
      const Eigen::RowVectorXd d = grid->node(j) - grid->node(i);
      const double scale = front / std::pow(d.norm(), 0.5 * n + s + 1.0);
      for (int c = 0; c < n; ++c) comp[c](i, j) = scale * d[c];
    }
  return AlphaKernel{BivariateVectorField(grid, std::move(comp)), c_ns};
}

BivariateVectorField frac_gradient(const ScalarField& u) {
  const auto& grid = u.grid();
  const AlphaKernel alpha = AlphaKernel::build(grid);
  const int total = grid->node_count();
  std::vector<Eigen::MatrixXd> comp(grid->dim());
  for (int c = 0; c < grid->dim(); ++c) {
    comp[c].setZero(total, total);
    for (int i = 0; i < total; ++i)
      for (int j = 0; j < total; ++j) {
        if (i == j) continue;
        comp[c](i, j) = (u[i] - u[j]) * alpha.alpha.component(c)(i, j);
      }
  }
  return BivariateVectorField(grid, std::move(comp));
}

ScalarField frac_divergence(const BivariateVectorField& v) {
  const auto& grid = v.grid();
  const AlphaKernel alpha = AlphaKernel::build(grid);
  const int total = grid->node_count();
  const double hn = grid->cell_volume();

  // Only the symmetric-parallel part pairs with alpha; projecting first keeps
  // the adjoint identity and the reduction formula exact.
  BivariateVectorField vsp = decompose(decompose(v, Part::Symmetric), Part::Parallel);

  Eigen::VectorXd out(total);
  for (int i = 0; i < total; ++i) {
    detail::KahanSum sum;
    for (int j = 0; j < total; ++j) {
      if (j == i) continue;
      for (int c = 0; c < v.dim(); ++c)
        sum.add(vsp.component(c)(i, j) * alpha.alpha.component(c)(i, j));
    }
    out[i] = 2.0 * hn * sum.value();
  }
  return ScalarField(grid, std::move(out));
}

BivariateVectorField magnetic_gradient(const ScalarField& u,
                                       const BivariateVectorField& a) {
  require_same_grid(u.grid(), a.grid(), "magnetic_gradient");
  const auto& grid = u.grid();
  const AlphaKernel alpha = AlphaKernel::build(grid);
  const int total = grid->node_count();
  std::vector<Eigen::MatrixXd> comp(grid->dim());
  for (int c = 0; c < grid->dim(); ++c) {
    comp[c].resize(total, total);
    for (int i = 0; i < total; ++i)
      for (int j = 0; j < total; ++j)
        comp[c](i, j) = (u[i] - u[j]) * alpha.alpha.component(c)(i, j) +
                        a.component(c)(i, j) * u[i];
  }
  return BivariateVectorField(grid, std::move(comp));
}

const char* to_string(AssemblyKind kind) {
  switch (kind) {
    case AssemblyKind::AdjointComposition: return "adjoint-composition";
    case AssemblyKind::Expansion: return "expansion";
    case AssemblyKind::SigmaForm: return "sigma-form";
    case AssemblyKind::Conductivity: return "conductivity";
  }
  return "unknown";
}

OperatorMatrix::OperatorMatrix(GridPtr grid, Eigen::MatrixXd m, AssemblyKind kind)
    : grid_(std::move(grid)), m_(std::move(m)), kind_(kind) {
  if (m_.rows() != grid_->node_count() || m_.cols() != grid_->node_count())
    throw ConfigError("operator matrix shape does not match grid");
  if (!m_.allFinite()) throw ConfigError("operator matrix has non-finite entries");
}

ScalarField OperatorMatrix::apply_weak(const ScalarField& u) const {
  require_same_grid(grid_, u.grid(), "operator application");
  return ScalarField(grid_, m_ * u.values());
}

ScalarField OperatorMatrix::apply_pointwise(const ScalarField& u) const {
  require_same_grid(grid_, u.grid(), "operator application");
  return ScalarField(grid_, (m_ * u.values()) / grid_->cell_volume());
}

namespace {

/// Shared pairwise assembly of h^{2n} sum_{i != j} Theta_ij G_A(e_a).G_A(e_b):
/// the ordered pair (i,j) contributes the outer product of [alpha+A, -alpha]
/// over the basis slots {i, j}.
Eigen::MatrixXd assemble_pair_quadratic(const Potentials& p,
                                        const Eigen::VectorXd* theta_weight) {
  const auto& grid = p.grid();
  const auto& a = p.A();
  const AlphaKernel alpha = AlphaKernel::build(grid);
  const int total = grid->node_count();
  const int n = grid->dim();
  const double h2n = grid->pair_volume();
  const double hn = grid->cell_volume();

  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(total, total);
  Eigen::VectorXd root;
  if (theta_weight) root = theta_weight->cwiseSqrt();

  std::vector<double> gi(n), gj(n);
  for (int i = 0; i < total; ++i)
    for (int j = 0; j < total; ++j) {
      if (i == j) continue;
      double gigi = 0.0, gigj = 0.0, gjgj = 0.0;
      for (int c = 0; c < n; ++c) {
        const double al = alpha.alpha.component(c)(i, j);
        const double vi = al + a.component(c)(i, j);
        const double vj = -al;
        gigi += vi * vi;
        gigj += vi * vj;
        gjgj += vj * vj;
      }
      double w = h2n;
      if (theta_weight) w *= root[i] * root[j];
      k(i, i) += w * gigi;
      k(i, j) += w * gigj;
      k(j, i) += w * gigj;
      k(j, j) += w * gjgj;
    }

  for (int i = 0; i < total; ++i) k(i, i) += hn * p.q()[i];
  return k;
}

}  // namespace

OperatorMatrix assemble_bilinear(const Potentials& p) {
  return OperatorMatrix(p.grid(), assemble_pair_quadratic(p, nullptr),
                        AssemblyKind::AdjointComposition);
}

OperatorMatrix conductivity_matrix(const ScalarField& gamma, const Potentials& p) {
  require_same_grid(gamma.grid(), p.grid(), "conductivity_matrix");
  if (!(gamma.values().minCoeff() > 0.0))
    throw ConfigError("conductivity gamma must be positive everywhere");
  for (int idx : p.grid()->exterior_nodes())
    if (gamma[idx] != 1.0)
      throw ConfigError("conductivity gamma must equal 1 on exterior nodes");
  return OperatorMatrix(p.grid(), assemble_pair_quadratic(p, &gamma.values()),
                        AssemblyKind::Conductivity);
}

OperatorMatrix assemble_expansion(const BivariateVectorField& a,
                                  const ScalarField& q) {
  require_same_grid(a.grid(), q.grid(), "assemble_expansion");
  const auto& grid = a.grid();
  const AlphaKernel alpha = AlphaKernel::build(grid);
  const int total = grid->node_count();
  const int n = grid->dim();
  const double s = grid->order();
  const double hn = grid->cell_volume();
  const double c_ns = alpha.c_ns;

  BivariateVectorField apar =
      decompose(decompose(a, Part::Antisymmetric), Part::Parallel);
  BivariateVectorField spar =
      decompose(decompose(a, Part::Symmetric), Part::Parallel);
  ScalarField div_spar = frac_divergence(spar);

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(total, total);
  for (int i = 0; i < total; ++i) {
    detail::KahanSum lap_diag;
    detail::KahanSum mag_diag;
    detail::KahanSum a_sq;
    for (int j = 0; j < total; ++j) {
      if (j == i) continue;
      const double dist = grid->distance(i, j);
      const double lap = c_ns * hn / std::pow(dist, n + 2.0 * s);
      double mag = 0.0;
      for (int c = 0; c < n; ++c) {
        mag += apar.component(c)(i, j) * alpha.alpha.component(c)(i, j);
        const double av = a.component(c)(i, j);
        a_sq.add(av * av);
      }
      mag *= 2.0 * hn;
      m(i, j) = -(lap + mag);
      lap_diag.add(lap);
      mag_diag.add(mag);
    }
    m(i, i) = lap_diag.value() + mag_diag.value() + div_spar[i] +
              hn * a_sq.value() + q[i];
  }
  return OperatorMatrix(grid, hn * m, AssemblyKind::Expansion);
}

OperatorMatrix assemble_expansion(const Potentials& p) {
  return assemble_expansion(p.A(), p.q());
}

OperatorMatrix assemble_sigma_form(const SigmaKernel& sigma,
                                   const ScalarField& q_eff) {
  require_same_grid(sigma.grid(), q_eff.grid(), "assemble_sigma_form");
  const auto& grid = sigma.grid();
  const int total = grid->node_count();
  const int n = grid->dim();
  const double s = grid->order();
  const double hn = grid->cell_volume();
  const double c_ns = fractional_constant(n, s);

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(total, total);
  for (int i = 0; i < total; ++i) {
    detail::KahanSum diag;
    for (int j = 0; j < total; ++j) {
      if (j == i) continue;  // principal value: diagonal excluded
      const double w =
          c_ns * hn * sigma.value(i, j) / std::pow(grid->distance(i, j), n + 2.0 * s);
      m(i, j) = -w;
      diag.add(w);
    }
    m(i, i) = diag.value() + q_eff[i];
  }
  return OperatorMatrix(grid, hn * m, AssemblyKind::SigmaForm);
}

ScalarField reduction_qprime(const ScalarField& gamma, const Potentials& p) {
  require_same_grid(gamma.grid(), p.grid(), "reduction_qprime");
  if (!(gamma.values().minCoeff() > 0.0))
    throw ConfigError("reduction requires gamma > 0 everywhere");
  for (int idx : p.grid()->exterior_nodes())
    if (gamma[idx] != 1.0)
      throw ConfigError("reduction requires gamma == 1 on exterior nodes");

  const auto& grid = p.grid();
  const auto& a = p.A();
  const int total = grid->node_count();
  const int n = grid->dim();
  const double hn = grid->cell_volume();

  ScalarField root(grid, gamma.values().cwiseSqrt());

  // (div)^s A_sp and (div)^s (A(x,y) gamma^{1/2}(y)) share a code path, so
  // for gamma == 1 their difference cancels exactly.
  BivariateVectorField spar =
      decompose(decompose(a, Part::Symmetric), Part::Parallel);
  ScalarField div_spar = frac_divergence(spar);

  std::vector<Eigen::MatrixXd> wcomp(n);
  for (int c = 0; c < n; ++c)
    wcomp[c] = a.component(c) * root.values().asDiagonal();
  ScalarField div_w = frac_divergence(BivariateVectorField(grid, std::move(wcomp)));

  ScalarField lap_root = frac_divergence(frac_gradient(root));
  BivariateVectorField grad_root = frac_gradient(root);

  Eigen::VectorXd qprime(total);
  for (int i = 0; i < total; ++i) {
    const double gi = root[i];
    detail::KahanSum tail;
    for (int j = 0; j < total; ++j) {
      if (j == i) continue;
      double grad_dot_a = 0.0;
      double a_sq = 0.0;
      for (int c = 0; c < n; ++c) {
        grad_dot_a += grad_root.component(c)(i, j) * a.component(c)(i, j);
        a_sq += a.component(c)(i, j) * a.component(c)(i, j);
      }
      tail.add(-grad_dot_a / gi + a_sq * (root[j] / gi - 1.0));
    }
    qprime[i] = p.q()[i] / gamma[i] + (div_w[i] / gi - div_spar[i]) -
                lap_root[i] / gi + hn * tail.value();
  }
  return ScalarField(grid, std::move(qprime));
}

nlohmann::json SymbolFitReport::to_json() const {
  return {{"k_fit", k_fit}, {"residual", residual}, {"N", N}, {"s", s}};
}

SymbolFitReport fourier_symbol_check(double s, int N, std::array<double, 2> box) {
  if (!(s > 0.0 && s < 1.0))
    throw ConfigError("fourier_symbol_check: s must lie in (0,1)");
  if (N < 8 || (N & (N - 1)) != 0)
    throw ConfigError("fourier_symbol_check: N must be a power of two, N >= 8");
  if (!(box[1] > box[0]))
    throw ConfigError("fourier_symbol_check: box must have max > min");

  const double pi = std::numbers::pi;
  const double h = (box[1] - box[0]) / (N - 1);
  const double c_ns = fractional_constant(1, s);
  const double front = std::sqrt(c_ns) / std::sqrt(2.0);

  Eigen::VectorXd x(N), u(N);
  for (int i = 0; i < N; ++i) {
    x[i] = box[0] + i * h;
    u[i] = std::exp(-0.5 * x[i] * x[i]);
  }

  // Pairwise gradient samples G(i,j) = (u_i - u_j) alpha(x_i, x_j), n = 1.
  std::vector<std::complex<double>> g(static_cast<std::size_t>(N) * N, 0.0);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      if (i == j) continue;
      const double d = x[j] - x[i];
      const double al = front * d / std::pow(std::abs(d), 0.5 + s + 1.0);
      g[static_cast<std::size_t>(i) * N + j] = (u[i] - u[j]) * al;
    }

  std::vector<std::complex<double>> g_hat(g.size());
  {
    fftw_plan plan = fftw_plan_dft_2d(
        N, N, reinterpret_cast<fftw_complex*>(g.data()),
        reinterpret_cast<fftw_complex*>(g_hat.data()), FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }

  std::vector<std::complex<double>> u_c(N), u_hat(N);
  for (int i = 0; i < N; ++i) u_c[i] = u[i];
  {
    fftw_plan plan = fftw_plan_dft_1d(
        N, reinterpret_cast<fftw_complex*>(u_c.data()),
        reinterpret_cast<fftw_complex*>(u_hat.data()), FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }

  // Frequencies xi_a = 2 pi a/(N h) with a in [-N/2, N/2); the lattice phase
  // e^{-i x_min (xi+eta)} is common to both sides and cancels in the fit.
  const auto signed_freq = [&](int idx) {
    const int a = (idx < N / 2) ? idx : idx - N;
    return 2.0 * pi * a / (N * h);
  };
  const auto symbol_part = [&](double xi) {
    // xi / |xi|^{n/2 + 1 - s} for n = 1
    return (xi > 0 ? 1.0 : -1.0) * std::pow(std::abs(xi), s - 0.5);
  };

  const std::complex<double> iu(0.0, 1.0);
  double num = 0.0, den = 0.0;
  for (int ai = 0; ai < N; ++ai)
    for (int bi = 0; bi < N; ++bi) {
      const double xi = signed_freq(ai);
      const double eta = signed_freq(bi);
      if (xi == 0.0 || eta == 0.0) continue;  // model singular at 0
      const std::complex<double> lhs = h * h * g_hat[static_cast<std::size_t>(ai) * N + bi];
      const std::complex<double> model =
          iu * (symbol_part(xi) + symbol_part(eta)) * h * u_hat[(ai + bi) % N];
      num += std::real(std::conj(model) * lhs);
      den += std::norm(model);
    }
  const double k_fit = num / den;

  double err2 = 0.0, ref2 = 0.0;
  for (int ai = 0; ai < N; ++ai)
    for (int bi = 0; bi < N; ++bi) {
      const double xi = signed_freq(ai);
      const double eta = signed_freq(bi);
      if (xi == 0.0 || eta == 0.0) continue;
      const std::complex<double> lhs = h * h * g_hat[static_cast<std::size_t>(ai) * N + bi];
      const std::complex<double> model =
          iu * (symbol_part(xi) + symbol_part(eta)) * h * u_hat[(ai + bi) % N];
      err2 += std::norm(lhs - k_fit * model);
      ref2 += std::norm(lhs);
    }

  SymbolFitReport report;
  report.k_fit = k_fit;
  report.residual = std::sqrt(err2 / ref2);
  report.N = N;
  report.s = s;
  return report;
}

}  // namespace fmse
