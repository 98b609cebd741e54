#include "fmse/grid.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

#include "fmse/detail/kahan.hpp"

namespace fmse {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

void hash_bytes(std::uint64_t& h, const void* data, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

void hash_double(std::uint64_t& h, double x) { hash_bytes(h, &x, sizeof(x)); }
void hash_int(std::uint64_t& h, std::int64_t x) { hash_bytes(h, &x, sizeof(x)); }

std::function<bool(const Eigen::RowVectorXd&)> omega_predicate_from_spec(
    const OmegaSpec& spec, int n) {
  if (const auto* box = std::get_if<OmegaBox>(&spec)) {
    if (static_cast<int>(box->bounds.size()) != n)
      throw ConfigError("omega box dimension does not match grid dimension");
    auto bounds = box->bounds;
    return [bounds, n](const Eigen::RowVectorXd& x) {
      for (int a = 0; a < n; ++a)
        if (!(x[a] > bounds[a][0] && x[a] < bounds[a][1])) return false;
      return true;
    };
  }
  const auto& ball = std::get<OmegaBall>(spec);
  if (static_cast<int>(ball.center.size()) != n)
    throw ConfigError("omega ball center dimension does not match grid dimension");
  if (!(ball.radius > 0)) throw ConfigError("omega ball radius must be positive");
  Eigen::RowVectorXd center(n);
  for (int a = 0; a < n; ++a) center[a] = ball.center[a];
  const double r = ball.radius;
  return [center, r](const Eigen::RowVectorXd& x) {
    return (x - center).norm() < r;
  };
}

}  // namespace

GridConfig GridConfig::from_json(const nlohmann::json& j) {
  GridConfig cfg;
  try {
    cfg.n = j.at("n").get<int>();
    cfg.s = j.at("s").get<double>();
    for (const auto& axis : j.at("box")) {
      if (!axis.is_array() || axis.size() != 2)
        throw ConfigError("grid box axis must be [min, max]");
      cfg.box.push_back({axis[0].get<double>(), axis[1].get<double>()});
    }
    cfg.nodes_per_axis = j.at("nodes_per_axis").get<int>();
    const auto& om = j.at("omega");
    if (om.contains("box")) {
      OmegaBox b;
      for (const auto& axis : om.at("box"))
        b.bounds.push_back({axis[0].get<double>(), axis[1].get<double>()});
      cfg.omega = b;
    } else if (om.contains("ball")) {
      OmegaBall b;
      for (const auto& c : om.at("ball").at("center")) b.center.push_back(c.get<double>());
      b.radius = om.at("ball").at("radius").get<double>();
      cfg.omega = b;
    } else {
      throw ConfigError("omega must contain \"box\" or \"ball\"");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed grid config: ") + e.what());
  }
  return cfg;
}

nlohmann::json GridConfig::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["s"] = s;
  j["box"] = nlohmann::json::array();
  for (const auto& axis : box) j["box"].push_back({axis[0], axis[1]});
  j["nodes_per_axis"] = nodes_per_axis;
  if (const auto* b = std::get_if<OmegaBox>(&omega)) {
    nlohmann::json ob = nlohmann::json::array();
    for (const auto& axis : b->bounds) ob.push_back({axis[0], axis[1]});
    j["omega"] = {{"box", ob}};
  } else {
    const auto& ball = std::get<OmegaBall>(omega);
    j["omega"] = {{"ball", {{"center", ball.center}, {"radius", ball.radius}}}};
  }
  return j;
}

GridPtr build_grid(const GridConfig& config) {
  return build_grid(config, omega_predicate_from_spec(config.omega, config.n));
}

GridPtr build_grid(
    const GridConfig& config,
    const std::function<bool(const Eigen::RowVectorXd&)>& omega_predicate) {
  const int n = config.n;
  const int N = config.nodes_per_axis;
  if (n != 1 && n != 2) throw ConfigError("grid dimension must be 1 or 2");
  if (!(config.s > 0.0 && config.s < 1.0))
    throw ConfigError("fractional order s must lie strictly in (0,1)");
  if (static_cast<int>(config.box.size()) != n)
    throw ConfigError("grid box must have one [min,max] pair per axis");
  if (N < 4)
    throw ConfigError(
        "nodes_per_axis must be at least 4 (an interior node with an exterior "
        "collar is impossible otherwise)");

  const double extent = config.box[0][1] - config.box[0][0];
  for (const auto& axis : config.box) {
    if (!(axis[1] > axis[0])) throw ConfigError("grid box axis must have max > min");
    if (std::abs((axis[1] - axis[0]) - extent) > 1e-12 * std::abs(extent))
      throw ConfigError("all box axes must have equal extent (single spacing h)");
  }

  auto grid = std::shared_ptr<Grid>(new Grid());
  grid->n_ = n;
  grid->s_ = config.s;
  grid->nodes_per_axis_ = N;
  grid->box_ = config.box;
  grid->h_ = extent / (N - 1);

  const int total = (n == 1) ? N : N * N;
  grid->nodes_.resize(total, n);
  for (int idx = 0; idx < total; ++idx) {
    int rem = idx;
    for (int a = n - 1; a >= 0; --a) {
      const int ia = rem % N;
      rem /= N;
      grid->nodes_(idx, a) = config.box[a][0] + ia * grid->h_;
    }
  }

  grid->omega_mask_.resize(total, false);
  for (int idx = 0; idx < total; ++idx) {
    const Eigen::RowVectorXd x = grid->nodes_.row(idx);
    if (omega_predicate(x)) {
      grid->omega_mask_[idx] = true;
      grid->omega_nodes_.push_back(idx);
    } else {
      grid->exterior_nodes_.push_back(idx);
    }
  }

  if (grid->omega_nodes_.empty())
    throw ConfigError("omega contains no lattice node");
  if (grid->exterior_nodes_.empty())
    throw ConfigError("exterior contains no lattice node");

  // Collar: omega must not reach the box boundary, so there is at least one
  // exterior node on every side of it.
  for (int idx : grid->omega_nodes_) {
    int rem = idx;
    for (int a = n - 1; a >= 0; --a) {
      const int ia = rem % N;
      rem /= N;
      if (ia == 0 || ia == N - 1)
        throw ConfigError(
            "omega touches the computational box boundary; enlarge the box so "
            "an exterior collar of at least one node surrounds omega");
    }
  }

  grid->cell_volume_ = std::pow(grid->h_, n);
  grid->pair_volume_ = grid->cell_volume_ * grid->cell_volume_;

  std::uint64_t h = kFnvOffset;
  hash_int(h, n);
  hash_double(h, grid->s_);
  hash_int(h, N);
  for (const auto& axis : config.box) {
    hash_double(h, axis[0]);
    hash_double(h, axis[1]);
  }
  for (int idx = 0; idx < total; ++idx)
    hash_int(h, grid->omega_mask_[idx] ? 1 : 0);
  grid->hash_ = h;

  return grid;
}

ScalarField::ScalarField(GridPtr grid, Eigen::VectorXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw ConfigError("scalar field requires a grid");
  if (values_.size() != grid_->node_count())
    throw ConfigError("scalar field value count does not match grid");
  if (!values_.allFinite())
    throw ConfigError("scalar field contains non-finite values");
}

ScalarField ScalarField::zero(GridPtr grid) {
  const int total = grid->node_count();
  return ScalarField(std::move(grid), Eigen::VectorXd::Zero(total));
}

ScalarField ScalarField::constant(GridPtr grid, double value) {
  const int total = grid->node_count();
  return ScalarField(std::move(grid), Eigen::VectorXd::Constant(total, value));
}

void require_same_grid(const GridPtr& a, const GridPtr& b, const char* where) {
  if (a == b) return;
  if (a && b && a->hash() == b->hash()) return;
  std::ostringstream msg;
  msg << where << ": operands live on different grids";
  throw ConfigError(msg.str());
}

double inner_product(const ScalarField& u, const ScalarField& v) {
  require_same_grid(u.grid(), v.grid(), "inner_product");
  detail::KahanSum sum;
  const auto& a = u.values();
  const auto& b = v.values();
  for (Eigen::Index i = 0; i < a.size(); ++i) sum.add(a[i] * b[i]);
  return u.grid()->cell_volume() * sum.value();
}

double l2_norm(const ScalarField& u) { return std::sqrt(inner_product(u, u)); }

}  // namespace fmse
