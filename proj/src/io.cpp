#include "fmse/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace fmse::io {

namespace {

constexpr std::uint32_t kFormatVersion = 1;
constexpr char kMagic[4] = {'F', 'M', 'S', 'E'};

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw ConfigError("cannot write file: " + path.string());
  return out;
}

void write_header(std::ofstream& out, std::uint32_t n, std::uint32_t node_count) {
  out.write(kMagic, 4);
  const std::uint32_t fields[3] = {kFormatVersion, n, node_count};
  out.write(reinterpret_cast<const char*>(fields), sizeof(fields));
}

void read_header(std::ifstream& in, std::uint32_t& n, std::uint32_t& node_count,
                 const std::filesystem::path& path) {
  char magic[4];
  std::uint32_t fields[3];
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(fields), sizeof(fields));
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw ConfigError("not an FMSE binary file: " + path.string());
  if (fields[0] != kFormatVersion)
    throw ConfigError("unsupported FMSE format version in " + path.string());
  n = fields[1];
  node_count = fields[2];
}

}  // namespace

std::uint64_t fnv1a(const void* data, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fnv1a_string(const std::string& s) { return fnv1a(s.data(), s.size()); }

std::uint64_t json_hash(const nlohmann::json& j) {
  return fnv1a_string(j.dump());  // nlohmann objects serialize with sorted keys
}

void write_scalar_csv(const std::filesystem::path& path, const ScalarField& u) {
  auto out = open_output(path);
  const auto& grid = u.grid();
  out << "node_index";
  for (int a = 0; a < grid->dim(); ++a) out << ",coord_" << (a + 1);
  out << ",value\n";
  for (int i = 0; i < grid->node_count(); ++i) {
    out << i;
    for (int a = 0; a < grid->dim(); ++a) out << ',' << format_double(grid->node(i)[a]);
    out << ',' << format_double(u[i]) << '\n';
  }
}

ScalarField read_scalar_csv(const std::filesystem::path& path, const GridPtr& grid) {
  auto in = open_input(path);
  std::string line;
  std::getline(in, line);  // header
  Eigen::VectorXd values = Eigen::VectorXd::Zero(grid->node_count());
  std::vector<bool> seen(grid->node_count(), false);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != grid->dim() + 2)
      throw ConfigError("malformed scalar CSV row in " + path.string());
    const int idx = std::stoi(cells[0]);
    if (idx < 0 || idx >= grid->node_count())
      throw ConfigError("node index out of range in " + path.string());
    values[idx] = std::stod(cells.back());
    seen[idx] = true;
  }
  for (int i = 0; i < grid->node_count(); ++i)
    if (!seen[i]) throw ConfigError("scalar CSV misses node values: " + path.string());
  return ScalarField(grid, std::move(values));
}

void write_field_csv(const std::filesystem::path& path, const BivariateVectorField& a) {
  auto out = open_output(path);
  out << "i,j";
  for (int c = 0; c < a.dim(); ++c) out << ",comp_" << (c + 1);
  out << '\n';
  const int total = a.grid()->node_count();
  for (int i = 0; i < total; ++i)
    for (int j = 0; j < total; ++j) {
      out << i << ',' << j;
      for (int c = 0; c < a.dim(); ++c) out << ',' << format_double(a.component(c)(i, j));
      out << '\n';
    }
}

BivariateVectorField read_field_csv(const std::filesystem::path& path,
                                    const GridPtr& grid) {
  auto in = open_input(path);
  std::string line;
  std::getline(in, line);
  const int total = grid->node_count();
  std::vector<Eigen::MatrixXd> comp(grid->dim(), Eigen::MatrixXd::Zero(total, total));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != grid->dim() + 2)
      throw ConfigError("malformed field CSV row in " + path.string());
    const int i = std::stoi(cells[0]);
    const int j = std::stoi(cells[1]);
    if (i < 0 || i >= total || j < 0 || j >= total)
      throw ConfigError("pair index out of range in " + path.string());
    for (int c = 0; c < grid->dim(); ++c) comp[c](i, j) = std::stod(cells[2 + c]);
  }
  return BivariateVectorField(grid, std::move(comp));
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  auto out = open_output(path);
  out << "i,j,value\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out << i << ',' << j << ',' << format_double(m(i, j)) << '\n';
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path, int rows, int cols) {
  auto in = open_input(path);
  std::string line;
  std::getline(in, line);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 3) throw ConfigError("malformed matrix CSV in " + path.string());
    const int i = std::stoi(cells[0]);
    const int j = std::stoi(cells[1]);
    if (i < 0 || i >= rows || j < 0 || j >= cols)
      throw ConfigError("matrix index out of range in " + path.string());
    m(i, j) = std::stod(cells[2]);
  }
  return m;
}

void write_exterior_csv(const std::filesystem::path& path, const GridPtr& grid,
                        const Eigen::VectorXd& values) {
  const int ne = static_cast<int>(grid->exterior_nodes().size());
  if (values.size() != ne)
    throw ConfigError("exterior data length does not match exterior node count");
  auto out = open_output(path);
  out << "exterior_node_index,value\n";
  for (int a = 0; a < ne; ++a) out << a << ',' << format_double(values[a]) << '\n';
}

Eigen::VectorXd read_exterior_csv(const std::filesystem::path& path,
                                  const GridPtr& grid) {
  auto in = open_input(path);
  std::string line;
  std::getline(in, line);
  const int ne = static_cast<int>(grid->exterior_nodes().size());
  Eigen::VectorXd values = Eigen::VectorXd::Zero(ne);
  std::vector<bool> seen(ne, false);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 2) throw ConfigError("malformed exterior CSV in " + path.string());
    const int idx = std::stoi(cells[0]);
    if (idx < 0 || idx >= ne)
      throw ConfigError("exterior index out of range in " + path.string());
    values[idx] = std::stod(cells[1]);
    seen[idx] = true;
  }
  for (int a = 0; a < ne; ++a)
    if (!seen[a]) throw ConfigError("exterior CSV misses indices: " + path.string());
  return values;
}

void write_dn_csv(const std::filesystem::path& matrix_path,
                  const std::filesystem::path& legend_path, const DnMatrix& dn) {
  write_matrix_csv(matrix_path, dn.matrix());
  auto out = open_output(legend_path);
  const auto& grid = dn.grid();
  out << "row,node_index";
  for (int a = 0; a < grid->dim(); ++a) out << ",coord_" << (a + 1);
  out << '\n';
  const auto& exterior = grid->exterior_nodes();
  for (std::size_t r = 0; r < exterior.size(); ++r) {
    out << r << ',' << exterior[r];
    for (int a = 0; a < grid->dim(); ++a)
      out << ',' << format_double(grid->node(exterior[r])[a]);
    out << '\n';
  }
}

void write_field_binary(const std::filesystem::path& path,
                        const BivariateVectorField& a) {
  auto out = open_output(path, true);
  const int total = a.grid()->node_count();
  const int n = a.dim();
  write_header(out, static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(total));
  // Row-major pair order, components contiguous per pair.
  std::vector<double> row(static_cast<std::size_t>(total) * n);
  for (int i = 0; i < total; ++i) {
    std::size_t pos = 0;
    for (int j = 0; j < total; ++j)
      for (int c = 0; c < n; ++c) row[pos++] = a.component(c)(i, j);
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(sizeof(double) * row.size()));
  }
}

BivariateVectorField read_field_binary(const std::filesystem::path& path,
                                       const GridPtr& grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  std::uint32_t n = 0, total = 0;
  read_header(in, n, total, path);
  if (static_cast<int>(n) != grid->dim() ||
      static_cast<int>(total) != grid->node_count())
    throw ConfigError("binary field dimensions do not match grid: " + path.string());

  std::vector<Eigen::MatrixXd> comp(n, Eigen::MatrixXd(total, total));
  std::vector<double> row(static_cast<std::size_t>(total) * n);
  for (std::uint32_t i = 0; i < total; ++i) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(sizeof(double) * row.size()));
    if (!in) throw ConfigError("truncated FMSE binary file: " + path.string());
    std::size_t pos = 0;
    for (std::uint32_t j = 0; j < total; ++j)
      for (std::uint32_t c = 0; c < n; ++c) comp[c](i, j) = row[pos++];
  }
  return BivariateVectorField(grid, std::move(comp));
}

void write_pair_scalar_binary(const std::filesystem::path& path,
                              const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols())
    throw ConfigError("pair-scalar binary expects a square matrix");
  auto out = open_output(path, true);
  const auto total = static_cast<std::uint32_t>(m.rows());
  write_header(out, 1, total);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
}

Eigen::MatrixXd read_pair_scalar_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  std::uint32_t n = 0, total = 0;
  read_header(in, n, total, path);
  if (n != 1) throw ConfigError("expected pair-scalar data in " + path.string());
  Eigen::MatrixXd m(total, total);
  for (std::uint32_t i = 0; i < total; ++i)
    for (std::uint32_t j = 0; j < total; ++j) {
      double v = 0.0;
      in.read(reinterpret_cast<char*>(&v), sizeof(v));
      if (!in) throw ConfigError("truncated FMSE binary file: " + path.string());
      m(i, j) = v;
    }
  return m;
}

}  // namespace fmse::io
