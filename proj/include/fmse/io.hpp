#pragma once

// File formats: CSV for scalar fields, exterior data and matrices; the FMSE
// binary container for pair-indexed data; FNV-1a hashing for provenance.

#include <cstdint>
#include <filesystem>
#include <string>

#include <Eigen/Dense>

#include "json.hpp"

#include "fmse/fields.hpp"
#include "fmse/grid.hpp"
#include "fmse/solver.hpp"

namespace fmse::io {

std::uint64_t fnv1a(const void* data, std::size_t size);
std::uint64_t fnv1a_string(const std::string& s);

/// Canonical-form hash of a JSON document (sorted keys, no whitespace).
std::uint64_t json_hash(const nlohmann::json& j);

// ---- CSV ----

/// Columns: node_index, coord_1..coord_n, value.
void write_scalar_csv(const std::filesystem::path& path, const ScalarField& u);
ScalarField read_scalar_csv(const std::filesystem::path& path, const GridPtr& grid);

/// Columns: i, j, comp_1..comp_n.
void write_field_csv(const std::filesystem::path& path,
                     const BivariateVectorField& a);
BivariateVectorField read_field_csv(const std::filesystem::path& path,
                                    const GridPtr& grid);

/// Columns: i, j, value (dense, row-major).
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path, int rows,
                                int cols);

/// Columns: exterior_node_index, value (indices into the exterior
/// enumeration; the legend maps them to nodes).
void write_exterior_csv(const std::filesystem::path& path, const GridPtr& grid,
                        const Eigen::VectorXd& values);
Eigen::VectorXd read_exterior_csv(const std::filesystem::path& path,
                                  const GridPtr& grid);

/// DN matrix plus a legend CSV mapping rows to node ids and coordinates.
void write_dn_csv(const std::filesystem::path& matrix_path,
                  const std::filesystem::path& legend_path, const DnMatrix& dn);

// ---- FMSE binary container ----
// magic "FMSE", format_version u32, n u32, node_count u32, then
// node_count^2 * n doubles, little endian, row-major pair order with the n
// components of each pair contiguous. Pair-scalar data (operator matrices,
// sigma kernels) uses n = 1.

void write_field_binary(const std::filesystem::path& path,
                        const BivariateVectorField& a);
BivariateVectorField read_field_binary(const std::filesystem::path& path,
                                       const GridPtr& grid);

void write_pair_scalar_binary(const std::filesystem::path& path,
                              const Eigen::MatrixXd& m);
Eigen::MatrixXd read_pair_scalar_binary(const std::filesystem::path& path);

}  // namespace fmse::io
