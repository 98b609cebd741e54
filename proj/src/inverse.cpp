#include "fmse/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "fmse/detail/kahan.hpp"
#include "fmse/operators.hpp"

namespace fmse {

double alessandrini_residual(const Potentials& p1, const Potentials& p2,
                             const Eigen::VectorXd& f1, const Eigen::VectorXd& f2) {
  require_same_grid(p1.grid(), p2.grid(), "alessandrini_residual");
  const auto& grid = p1.grid();

  DirichletSystem sys1(p1);
  DirichletSystem sys2(p2);
  const DnMatrix dn1 = sys1.dn_matrix();
  const DnMatrix dn2 = sys2.dn_matrix();
  const ScalarField u1 = sys1.solve(f1).u;
  const ScalarField u2 = sys2.solve(f2).u;

  const double lhs = f2.dot((dn1.matrix() - dn2.matrix()) * f1);

  const BivariateVectorField apar_diff =
      decompose(decompose(p1.A() - p2.A(), Part::Antisymmetric), Part::Parallel);
  const BivariateVectorField grad_u1 = frac_gradient(u1);
  const ScalarField q_diff(grid, assemble_Q(p1).values() - assemble_Q(p2).values());

  const int total = grid->node_count();
  detail::KahanSum pair_term;
  for (int i = 0; i < total; ++i)
    for (int j = 0; j < total; ++j) {
      if (i == j) continue;
      double dot = 0.0;
      for (int c = 0; c < grid->dim(); ++c)
        dot += apar_diff.component(c)(i, j) * grad_u1.component(c)(i, j);
      pair_term.add(u2[i] * dot);
    }
  detail::KahanSum q_term;
  for (int i = 0; i < total; ++i) q_term.add(q_diff[i] * u1[i] * u2[i]);

  const double rhs = 2.0 * grid->pair_volume() * pair_term.value() +
                     grid->cell_volume() * q_term.value();

  const double eps = std::numeric_limits<double>::epsilon();
  return std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + eps);
}

RankReport runge_rank(const Potentials& p) {
  DirichletSystem system(p);
  const auto& grid = p.grid();

  RankReport report;
  report.omega_count = static_cast<int>(grid->omega_nodes().size());
  report.exterior_count = static_cast<int>(grid->exterior_nodes().size());

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(system.solution_map());
  report.singular_values = svd.singularValues();
  const double cutoff = 1e-10 * report.singular_values.maxCoeff();
  report.numerical_rank = 0;
  for (Eigen::Index i = 0; i < report.singular_values.size(); ++i)
    if (report.singular_values[i] > cutoff) ++report.numerical_rank;

  report.verdict = report.numerical_rank == report.omega_count;
  if (report.verdict) {
    report.explanation =
        "exterior data reaches every interior degree of freedom (full rank)";
  } else if (report.exterior_count < report.omega_count) {
    std::ostringstream msg;
    msg << "rank is bounded by the exterior node count (" << report.exterior_count
        << " < " << report.omega_count << " omega nodes)";
    report.explanation = msg.str();
  } else {
    report.explanation = "solution map is rank deficient";
  }
  return report;
}

nlohmann::json RankReport::to_json() const {
  std::vector<double> sv(singular_values.data(),
                         singular_values.data() + singular_values.size());
  return {{"singular_values", sv},       {"numerical_rank", numerical_rank},
          {"omega_count", omega_count},  {"exterior_count", exterior_count},
          {"verdict", verdict},          {"explanation", explanation}};
}

OracleSolutions oracle_from_potentials(const Potentials& truth) {
  auto system = std::make_shared<DirichletSystem>(truth);
  const int ne = static_cast<int>(truth.grid()->exterior_nodes().size());
  return [system, ne](int exterior_index) {
    if (exterior_index < 0 || exterior_index >= ne)
      throw ConfigError("oracle: exterior basis index out of range");
    Eigen::VectorXd basis = Eigen::VectorXd::Zero(ne);
    basis[exterior_index] = 1.0;
    return system->solve(basis).u;
  };
}

RecoveryResult recover(const DnMatrix& dn_measured, const Potentials& reference,
                       const OracleSolutions& oracle,
                       const std::optional<Potentials>& truth,
                       const RecoveryOptions& options) {
  const auto& grid = reference.grid();
  require_same_grid(grid, dn_measured.grid(), "recover");
  if (truth) require_same_grid(grid, truth->grid(), "recover (truth)");

  const auto& omega = grid->omega_nodes();
  const auto& exterior = grid->exterior_nodes();
  const int ni = static_cast<int>(omega.size());
  const int ne = static_cast<int>(exterior.size());
  const int n = grid->dim();
  const double s = grid->order();
  const double hn = grid->cell_volume();
  const double h2n = grid->pair_volume();
  const double c_ns = fractional_constant(n, s);

  std::vector<int> basis_a = options.basis_a;
  std::vector<int> basis_b = options.basis_b;
  if (basis_a.empty()) {
    basis_a.resize(ne);
    for (int i = 0; i < ne; ++i) basis_a[i] = i;
  }
  if (basis_b.empty()) basis_b = basis_a;
  for (int idx : basis_a)
    if (idx < 0 || idx >= ne) throw ConfigError("recover: basis_a index out of range");
  for (int idx : basis_b)
    if (idx < 0 || idx >= ne) throw ConfigError("recover: basis_b index out of range");

  // Unknown ordering: sigma on unordered omega pairs (lexicographic, i < j),
  // then Q on omega nodes. The pair parameterization makes the recovered
  // sigma exactly symmetric.
  const int n_pairs = ni * (ni - 1) / 2;
  const int n_unknowns = n_pairs + ni;
  auto pair_index = [&](int a, int b) {  // positions in the omega enumeration
    if (a > b) std::swap(a, b);
    return a * ni - a * (a + 1) / 2 + (b - a - 1);
  };

  DirichletSystem ref_system(reference);
  const DnMatrix dn_ref = ref_system.dn_matrix();

  // Cache solutions per basis index.
  std::vector<ScalarField> u1_cache, u2_cache;
  u1_cache.reserve(basis_a.size());
  for (int a : basis_a) u1_cache.push_back(oracle(a));
  u2_cache.reserve(basis_b.size());
  for (int b : basis_b) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(ne);
    e[b] = 1.0;
    u2_cache.push_back(ref_system.solve(e).u);
  }

  const Eigen::MatrixXd dn_diff = dn_measured.matrix() - dn_ref.matrix();

  const int n_equations = static_cast<int>(basis_a.size() * basis_b.size());
  Eigen::MatrixXd m(n_equations, n_unknowns);
  Eigen::VectorXd rhs(n_equations);

  int row = 0;
  for (std::size_t ai = 0; ai < basis_a.size(); ++ai) {
    const ScalarField& u1 = u1_cache[ai];
    for (std::size_t bi = 0; bi < basis_b.size(); ++bi, ++row) {
      const ScalarField& u2 = u2_cache[bi];
      rhs[row] = dn_diff(basis_b[bi], basis_a[ai]);  // e_b^T (dL) e_a

      for (int pa = 0; pa < ni; ++pa) {
        const int gi = omega[pa];
        for (int pb = pa + 1; pb < ni; ++pb) {
          const int gj = omega[pb];
          const double dist = grid->distance(gi, gj);
          const double coeff =
              h2n * c_ns *
              (u2[gi] * (u1[gi] - u1[gj]) + u2[gj] * (u1[gj] - u1[gi])) /
              std::pow(dist, n + 2.0 * s);
          m(row, pair_index(pa, pb)) = coeff;
        }
        m(row, n_pairs + pa) = hn * u1[gi] * u2[gi];
      }
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double sv_max = (sv.size() > 0) ? sv[0] : 0.0;
  const double cutoff = options.rank_cutoff * sv_max;

  int rank = 0;
  double sv_min_retained = 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff) {
      rank = static_cast<int>(i) + 1;
      sv_min_retained = sv[i];
    }

  // Pseudoinverse with rank cutoff; Tikhonov filter when reg > 0.
  const Eigen::VectorXd proj = svd.matrixU().transpose() * rhs;
  Eigen::VectorXd filtered = Eigen::VectorXd::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (options.reg > 0.0) {
      filtered[i] = proj[i] * sv[i] / (sv[i] * sv[i] + options.reg * options.reg);
    } else if (sv[i] > cutoff) {
      filtered[i] = proj[i] / sv[i];
    }
  }
  const Eigen::VectorXd x = svd.matrixV() * filtered;

  RecoveryResult result{
      SigmaKernel::unit(grid),  // replaced below
      ScalarField::zero(grid),
      0.0,
      (rank > 0) ? sv_max / sv_min_retained : 0.0,
      rank,
      n_equations,
      n_unknowns,
      options.reg,
      rank < n_unknowns,
      false,
      std::nullopt};
  result.ill_conditioned = result.condition > 1e8;

  const double eps = 1e-30;
  result.data_fit_residual = (m * x - rhs).norm() / (rhs.norm() + eps);

  // sigma = sigma_ref + D_sigma on omega pairs; Q = Q_ref + D_Q on omega.
  Eigen::MatrixXd sigma = sigma_from_A(reference.A()).values();
  for (int pa = 0; pa < ni; ++pa)
    for (int pb = pa + 1; pb < ni; ++pb) {
      const double d = x[pair_index(pa, pb)];
      sigma(omega[pa], omega[pb]) += d;
      sigma(omega[pb], omega[pa]) += d;
    }
  result.sigma = SigmaKernel(grid, std::move(sigma));

  Eigen::VectorXd q_eff = assemble_Q(reference).values();
  for (int pa = 0; pa < ni; ++pa) q_eff[omega[pa]] += x[n_pairs + pa];
  result.q_effective = ScalarField(grid, std::move(q_eff));

  if (truth) {
    const Eigen::MatrixXd sigma_true = sigma_from_A(truth->A()).values();
    const Eigen::MatrixXd sigma_ref = sigma_from_A(reference.A()).values();
    const Eigen::VectorXd q_true = assemble_Q(*truth).values();
    const Eigen::VectorXd q_ref = assemble_Q(reference).values();
    Eigen::VectorXd x_true(n_unknowns);
    for (int pa = 0; pa < ni; ++pa) {
      for (int pb = pa + 1; pb < ni; ++pb)
        x_true[pair_index(pa, pb)] =
            sigma_true(omega[pa], omega[pb]) - sigma_ref(omega[pa], omega[pb]);
      x_true[n_pairs + pa] = q_true[omega[pa]] - q_ref[omega[pa]];
    }
    const double denom = std::max(x_true.norm(), 1e-30);
    result.parameter_rel_error = (x - x_true).norm() / denom;
  }

  return result;
}

nlohmann::json RecoveryResult::to_json() const {
  nlohmann::json j{{"data_fit_residual", data_fit_residual},
                   {"condition", condition},
                   {"rank", rank},
                   {"equations", equations},
                   {"unknowns", unknowns},
                   {"reg", reg},
                   {"rank_deficient", rank_deficient},
                   {"ill_conditioned", ill_conditioned}};
  if (parameter_rel_error) j["parameter_rel_error"] = *parameter_rel_error;
  return j;
}

}  // namespace fmse
