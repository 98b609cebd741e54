#include "fmse/fields.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "fmse/detail/kahan.hpp"
#include "fmse/operators.hpp"

namespace fmse {

BivariateVectorField::BivariateVectorField(GridPtr grid,
                                           std::vector<Eigen::MatrixXd> components)
    : grid_(std::move(grid)), comp_(std::move(components)) {
  if (!grid_) throw ConfigError("bivariate field requires a grid");
  if (static_cast<int>(comp_.size()) != grid_->dim())
    throw ConfigError("bivariate field component count does not match grid dimension");
  const int total = grid_->node_count();
  for (const auto& c : comp_) {
    if (c.rows() != total || c.cols() != total)
      throw ConfigError("bivariate field component shape does not match grid");
    if (!c.allFinite())
      throw ConfigError("bivariate field contains non-finite values");
  }
}

BivariateVectorField BivariateVectorField::zero(GridPtr grid) {
  const int total = grid->node_count();
  std::vector<Eigen::MatrixXd> comp(grid->dim(),
                                    Eigen::MatrixXd::Zero(total, total));
  return BivariateVectorField(std::move(grid), std::move(comp));
}

Eigen::VectorXd BivariateVectorField::value(int i, int j) const {
  Eigen::VectorXd v(dim());
  for (int c = 0; c < dim(); ++c) v[c] = comp_[c](i, j);
  return v;
}

BivariateVectorField BivariateVectorField::operator+(
    const BivariateVectorField& other) const {
  require_same_grid(grid_, other.grid_, "field sum");
  std::vector<Eigen::MatrixXd> comp(comp_.size());
  for (std::size_t c = 0; c < comp_.size(); ++c) comp[c] = comp_[c] + other.comp_[c];
  return BivariateVectorField(grid_, std::move(comp));
}

BivariateVectorField BivariateVectorField::operator-(
    const BivariateVectorField& other) const {
  require_same_grid(grid_, other.grid_, "field difference");
  std::vector<Eigen::MatrixXd> comp(comp_.size());
  for (std::size_t c = 0; c < comp_.size(); ++c) comp[c] = comp_[c] - other.comp_[c];
  return BivariateVectorField(grid_, std::move(comp));
}

BivariateVectorField BivariateVectorField::operator*(double scalar) const {
  std::vector<Eigen::MatrixXd> comp(comp_.size());
  for (std::size_t c = 0; c < comp_.size(); ++c) comp[c] = comp_[c] * scalar;
  return BivariateVectorField(grid_, std::move(comp));
}

double BivariateVectorField::max_abs() const {
  double m = 0.0;
  for (const auto& c : comp_) m = std::max(m, c.cwiseAbs().maxCoeff());
  return m;
}

bool BivariateVectorField::supported_on_omega_pairs() const {
  const int total = grid_->node_count();
  for (int i = 0; i < total; ++i)
    for (int j = 0; j < total; ++j) {
      if (grid_->in_omega(i) && grid_->in_omega(j)) continue;
      for (const auto& c : comp_)
        if (c(i, j) != 0.0) return false;
    }
  return true;
}

double pair_inner_product(const BivariateVectorField& v,
                          const BivariateVectorField& w) {
  require_same_grid(v.grid(), w.grid(), "pair_inner_product");
  detail::KahanSum sum;
  const int total = v.grid()->node_count();
  for (int c = 0; c < v.dim(); ++c) {
    const auto& a = v.component(c);
    const auto& b = w.component(c);
    for (int i = 0; i < total; ++i)
      for (int j = 0; j < total; ++j) sum.add(a(i, j) * b(i, j));
  }
  return v.grid()->pair_volume() * sum.value();
}

double pair_norm(const BivariateVectorField& v) {
  return std::sqrt(pair_inner_product(v, v));
}

BivariateVectorField decompose(const BivariateVectorField& a, Part part) {
  const auto& grid = a.grid();
  const int n = a.dim();
  const int total = grid->node_count();
  std::vector<Eigen::MatrixXd> comp(n);

  switch (part) {
    case Part::Symmetric:
      for (int c = 0; c < n; ++c)
        comp[c] = 0.5 * (a.component(c) + a.component(c).transpose());
      break;
    case Part::Antisymmetric:
      for (int c = 0; c < n; ++c)
        comp[c] = 0.5 * (a.component(c) - a.component(c).transpose());
      break;
    case Part::Parallel: {
      if (n == 1) {
        // Every vector is parallel in one dimension, the diagonal included.
        comp[0] = a.component(0);
        break;
      }
      for (int c = 0; c < n; ++c) comp[c].setZero(total, total);
      for (int i = 0; i < total; ++i)
        for (int j = 0; j < total; ++j) {
          if (i == j) {
            for (int c = 0; c < n; ++c) comp[c](i, i) = a.component(c)(i, i);
            continue;
          }
          const Eigen::RowVectorXd d = grid->node(i) - grid->node(j);
          const double d2 = d.squaredNorm();
          double proj = 0.0;
          for (int c = 0; c < n; ++c) proj += a.component(c)(i, j) * d[c];
          proj /= d2;
          for (int c = 0; c < n; ++c) comp[c](i, j) = proj * d[c];
        }
      break;
    }
    case Part::Perpendicular: {
      BivariateVectorField par = decompose(a, Part::Parallel);
      for (int c = 0; c < n; ++c) comp[c] = a.component(c) - par.component(c);
      break;
    }
  }
  return BivariateVectorField(grid, std::move(comp));
}

ScalarField j_norm_field(const BivariateVectorField& a, JVariable which) {
  const auto& grid = a.grid();
  const int total = grid->node_count();
  const double hn = grid->cell_volume();
  Eigen::VectorXd out(total);
  for (int i = 0; i < total; ++i) {
    detail::KahanSum sum;
    for (int j = 0; j < total; ++j)
      for (int c = 0; c < a.dim(); ++c) {
        const double v = (which == JVariable::First) ? a.component(c)(j, i)
                                                     : a.component(c)(i, j);
        sum.add(v * v);
      }
    out[i] = std::sqrt(hn * sum.value());
  }
  return ScalarField(grid, std::move(out));
}

SigmaKernel::SigmaKernel(GridPtr grid, Eigen::MatrixXd sigma)
    : grid_(std::move(grid)), sigma_(std::move(sigma)) {
  if (!grid_) throw ConfigError("sigma kernel requires a grid");
  const int total = grid_->node_count();
  if (sigma_.rows() != total || sigma_.cols() != total)
    throw ConfigError("sigma kernel shape does not match grid");
  if (!sigma_.allFinite()) throw ConfigError("sigma kernel has non-finite entries");

  const double scale = std::max(1.0, sigma_.cwiseAbs().maxCoeff());
  const double asym = (sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale)
    throw ConfigError("sigma kernel is not symmetric");

  for (int i = 0; i < total; ++i) {
    if (std::abs(sigma_(i, i) - 1.0) > 1e-12)
      throw ConfigError("sigma kernel diagonal must equal 1");
    sigma_(i, i) = 1.0;
  }

  // sigma > 0 is essential for the random-walk interpretation; never clamp.
  std::ostringstream bad;
  int bad_count = 0;
  for (int i = 0; i < total; ++i)
    for (int j = 0; j < total; ++j)
      if (!(sigma_(i, j) > 0.0)) {
        if (bad_count < 8) bad << " (" << i << "," << j << ")=" << sigma_(i, j);
        ++bad_count;
      }
  if (bad_count > 0) {
    std::ostringstream msg;
    msg << "sigma kernel has " << bad_count
        << " non-positive pair(s), e.g.:" << bad.str();
    throw ConfigError(msg.str());
  }
}

SigmaKernel SigmaKernel::unit(GridPtr grid) {
  const int total = grid->node_count();
  return SigmaKernel(std::move(grid), Eigen::MatrixXd::Ones(total, total));
}

SigmaKernel SigmaKernel::separable(const ScalarField& gamma) {
  const auto& grid = gamma.grid();
  const int total = grid->node_count();
  if (!(gamma.values().minCoeff() > 0.0))
    throw ConfigError("separable sigma requires gamma > 0 everywhere");
  Eigen::VectorXd root = gamma.values().cwiseSqrt();
  Eigen::MatrixXd sigma = root * root.transpose();
  for (int i = 0; i < total; ++i) sigma(i, i) = 1.0;
  return SigmaKernel(grid, std::move(sigma));
}

bool SigmaKernel::unit_off_omega_pairs() const {
  const int total = grid_->node_count();
  for (int i = 0; i < total; ++i)
    for (int j = 0; j < total; ++j) {
      if (grid_->in_omega(i) && grid_->in_omega(j)) continue;
      if (sigma_(i, j) != 1.0) return false;
    }
  return true;
}

SigmaKernel sigma_from_A(const BivariateVectorField& a) {
  const auto& grid = a.grid();
  const int total = grid->node_count();
  const int n = grid->dim();
  const double s = grid->order();
  const double c_ns = fractional_constant(n, s);
  const double factor = std::sqrt(2.0) / std::sqrt(c_ns);

  BivariateVectorField apar =
      decompose(decompose(a, Part::Antisymmetric), Part::Parallel);

  Eigen::MatrixXd sigma(total, total);
  for (int i = 0; i < total; ++i) {
    sigma(i, i) = 1.0;
    for (int j = 0; j < total; ++j) {
      if (i == j) continue;
      const Eigen::RowVectorXd d = grid->node(j) - grid->node(i);
      const double dist = d.norm();
      double dot = 0.0;
      for (int c = 0; c < n; ++c) dot += apar.component(c)(i, j) * d[c];
      dot /= dist;
      sigma(i, j) = 1.0 + factor * std::pow(dist, 0.5 * n + s) * dot;
    }
  }
  return SigmaKernel(grid, std::move(sigma));  // ctor flags sigma <= 0
}

BivariateVectorField a_apar_from_sigma(const SigmaKernel& sigma) {
  const auto& grid = sigma.grid();
  const AlphaKernel alpha = AlphaKernel::build(grid);
  const int total = grid->node_count();
  std::vector<Eigen::MatrixXd> comp(grid->dim());
  for (int c = 0; c < grid->dim(); ++c) {
    comp[c].setZero(total, total);
    for (int i = 0; i < total; ++i)
      for (int j = 0; j < total; ++j) {
        if (i == j) continue;
        comp[c](i, j) = alpha.alpha.component(c)(i, j) * (sigma.value(i, j) - 1.0);
      }
  }
  return BivariateVectorField(grid, std::move(comp));
}

Potentials::Potentials(BivariateVectorField a, ScalarField q)
    : a_(std::move(a)), q_(std::move(q)) {
  require_same_grid(a_.grid(), q_.grid(), "potentials");
  for (int idx : a_.grid()->exterior_nodes())
    if (q_[idx] != 0.0)
      throw ConfigError("scalar potential q must vanish on exterior nodes");
}

double Potentials::sobolev_exponent() const {
  const auto& g = grid();
  return std::max(2.0, g->dim() / (2.0 * g->order()));
}

std::uint64_t Potentials::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  const std::uint64_t ghash = grid()->hash();
  mix(&ghash, sizeof(ghash));
  for (int c = 0; c < a_.dim(); ++c)
    mix(a_.component(c).data(), sizeof(double) * a_.component(c).size());
  mix(q_.values().data(), sizeof(double) * q_.values().size());
  return h;
}

namespace {

/// Discrete L^p norm (h^n sum |u_i|^p)^{1/p} over the given nodes.
double lp_norm(const ScalarField& u, const std::vector<int>& nodes, double p) {
  detail::KahanSum sum;
  for (int idx : nodes) sum.add(std::pow(std::abs(u[idx]), p));
  return std::pow(u.grid()->cell_volume() * sum.value(), 1.0 / p);
}

std::vector<int> all_nodes(const GridPtr& grid) {
  std::vector<int> idx(grid->node_count());
  for (int i = 0; i < grid->node_count(); ++i) idx[i] = i;
  return idx;
}

}  // namespace

PropertyReport check_potentials(const Potentials& p) {
  const auto& grid = p.grid();
  const auto& a = p.A();
  PropertyReport report;
  report.p_exponent = p.sobolev_exponent();

  BivariateVectorField apar =
      decompose(decompose(a, Part::Antisymmetric), Part::Parallel);
  bool p3 = true;
  const int total = grid->node_count();
  for (int i = 0; i < total && p3; ++i)
    for (int j = 0; j < total; ++j) {
      const Eigen::RowVectorXd d = grid->node(j) - grid->node(i);
      double dot = 0.0;
      for (int c = 0; c < a.dim(); ++c) dot += apar.component(c)(i, j) * d[c];
      if (dot < 0.0) {
        p3 = false;
        break;
      }
    }
  report.p3_sign_condition = p3;
  report.p5_support = a.supported_on_omega_pairs();

  const double two_p = 2.0 * report.p_exponent;
  report.p1_j1_norm = lp_norm(j_norm_field(a, JVariable::First), all_nodes(grid), two_p);
  report.p1_j2_norm = lp_norm(j_norm_field(a, JVariable::Second), all_nodes(grid), two_p);
  report.p2_spar_norm =
      pair_norm(decompose(decompose(a, Part::Symmetric), Part::Parallel));
  report.p4_q_norm = lp_norm(p.q(), grid->omega_nodes(), report.p_exponent);
  return report;
}

nlohmann::json PropertyReport::to_json() const {
  return {{"p3_sign_condition", p3_sign_condition},
          {"p5_support", p5_support},
          {"p1_j1_norm", p1_j1_norm},
          {"p1_j2_norm", p1_j2_norm},
          {"p2_spar_norm", p2_spar_norm},
          {"p4_q_norm", p4_q_norm},
          {"p_exponent", p_exponent},
          {"in_class_P", in_class_P()}};
}

ScalarField assemble_Q(const Potentials& p) {
  const auto& grid = p.grid();
  const auto& a = p.A();
  const int total = grid->node_count();
  const double hn = grid->cell_volume();

  BivariateVectorField spar =
      decompose(decompose(a, Part::Symmetric), Part::Parallel);
  ScalarField div_spar = frac_divergence(spar);

  Eigen::VectorXd q_eff(total);
  for (int i = 0; i < total; ++i) {
    detail::KahanSum sq;
    for (int j = 0; j < total; ++j) {
      if (j == i) continue;  // diagonal excluded throughout operator sums
      for (int c = 0; c < a.dim(); ++c) {
        const double v = a.component(c)(i, j);
        sq.add(v * v);
      }
    }
    q_eff[i] = p.q()[i] + hn * sq.value() + div_spar[i];
  }
  return ScalarField(grid, std::move(q_eff));
}

}  // namespace fmse
