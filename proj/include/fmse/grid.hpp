#pragma once

// Truncated uniform lattice standing in for R^n: interior (omega) / exterior
// node classification and the rectangle-rule inner products that replace
// integrals over R^n and R^2n. Grids and fields are immutable after
// construction; every operation on them is pure.

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "fmse/errors.hpp"

namespace fmse {

/// Open axis-aligned sub-box.
struct OmegaBox {
  std::vector<std::array<double, 2>> bounds;
};

/// Open ball.
struct OmegaBall {
  std::vector<double> center;
  double radius = 0.0;
};

using OmegaSpec = std::variant<OmegaBox, OmegaBall>;

struct GridConfig {
  int n = 1;                               // spatial dimension, 1 or 2
  double s = 0.5;                          // fractional order, strictly in (0,1)
  std::vector<std::array<double, 2>> box;  // computational box per axis
  int nodes_per_axis = 0;
  OmegaSpec omega;

  static GridConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

/// Uniform lattice over the computational box with deterministic
/// lexicographic node ordering (axis 0 slowest).
class Grid {
 public:
  int dim() const { return n_; }
  double order() const { return s_; }
  double spacing() const { return h_; }
  int nodes_per_axis() const { return nodes_per_axis_; }
  int node_count() const { return static_cast<int>(nodes_.rows()); }
  const std::vector<std::array<double, 2>>& box() const { return box_; }

  /// Node coordinates, one row per node.
  const Eigen::MatrixXd& nodes() const { return nodes_; }
  Eigen::RowVectorXd node(int i) const { return nodes_.row(i); }

  bool in_omega(int node) const { return omega_mask_[node]; }
  const std::vector<bool>& omega_mask() const { return omega_mask_; }
  const std::vector<int>& omega_nodes() const { return omega_nodes_; }
  const std::vector<int>& exterior_nodes() const { return exterior_nodes_; }

  double cell_volume() const { return cell_volume_; }  // h^n
  double pair_volume() const { return pair_volume_; }  // h^{2n}

  double distance(int i, int j) const {
    return (nodes_.row(i) - nodes_.row(j)).norm();
  }

  /// FNV-1a over the defining data; embedded in reports and file headers.
  std::uint64_t hash() const { return hash_; }

  friend GridPtr build_grid(const GridConfig& config);
  friend GridPtr build_grid(
      const GridConfig& config,
      const std::function<bool(const Eigen::RowVectorXd&)>& omega_predicate);

 private:
  Grid() = default;

  int n_ = 0;
  double s_ = 0.0;
  double h_ = 0.0;
  int nodes_per_axis_ = 0;
  std::vector<std::array<double, 2>> box_;
  Eigen::MatrixXd nodes_;
  std::vector<bool> omega_mask_;
  std::vector<int> omega_nodes_;
  std::vector<int> exterior_nodes_;
  double cell_volume_ = 0.0;
  double pair_volume_ = 0.0;
  std::uint64_t hash_ = 0;
};

/// Builds the lattice with omega taken from the config (sub-box or ball).
/// Nodes exactly on the boundary of omega are classified exterior (omega is
/// open). Rejects n outside {1,2}, s outside (0,1), empty omega, empty
/// exterior, and omega touching the box boundary (collar of at least one
/// exterior node is required on every side).
GridPtr build_grid(const GridConfig& config);

/// Same, with omega given by an arbitrary predicate on node coordinates.
GridPtr build_grid(
    const GridConfig& config,
    const std::function<bool(const Eigen::RowVectorXd&)>& omega_predicate);

/// Real-valued nodal function on a grid.
class ScalarField {
 public:
  ScalarField(GridPtr grid, Eigen::VectorXd values);

  static ScalarField zero(GridPtr grid);
  static ScalarField constant(GridPtr grid, double value);

  const GridPtr& grid() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  double value(int node) const { return values_[node]; }
  double operator[](int node) const { return values_[node]; }
  int size() const { return static_cast<int>(values_.size()); }

  double max_abs() const { return values_.cwiseAbs().maxCoeff(); }

 private:
  GridPtr grid_;
  Eigen::VectorXd values_;
};

/// h^n * sum_i u_i v_i, the rectangle rule over all box nodes (compensated
/// summation). Fields must live on the same grid.
double inner_product(const ScalarField& u, const ScalarField& v);

/// sqrt(inner_product(u, u)).
double l2_norm(const ScalarField& u);

/// Throws ConfigError unless both fields share a grid (same object or equal
/// hash).
void require_same_grid(const GridPtr& a, const GridPtr& b, const char* where);

}  // namespace fmse
