#include "viscogrid/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "viscogrid/error.hpp"

namespace viscogrid::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::trunc) {
  std::ofstream out(path, std::ios::out | mode);
  if (!out) throw ArgumentError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::string full(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace

std::string sci(double value) {
  if (std::isnan(value)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6e", value);
  return buf;
}

void write_nodes(std::ostream& out, const MeshLevel& mesh) {
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    out << full(mesh.nodes[i].x) << ' ' << full(mesh.nodes[i].y) << ' ' << int{mesh.is_boundary[i]} << '\n';
  }
}

void write_triangles(std::ostream& out, const MeshLevel& mesh) {
  for (const Triangle& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

void write_mesh(const std::filesystem::path& path, const MeshLevel& mesh) {
  std::ofstream out = open_out(path);
  write_nodes(out, mesh);
  out << '\n';
  write_triangles(out, mesh);
}

void write_field(std::ostream& out, const MeshLevel& mesh, const NodalField& u) {
  if (u.values.size() != mesh.num_nodes()) throw ArgumentError("write_field: field/mesh size mismatch");
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    out << full(mesh.nodes[i].x) << ' ' << full(mesh.nodes[i].y) << ' ' << full(u.values[i]) << '\n';
  }
}

void write_field(const std::filesystem::path& path, const MeshLevel& mesh, const NodalField& u) {
  std::ofstream out = open_out(path);
  write_field(out, mesh, u);
}

NodalField read_field(const std::filesystem::path& path, const MeshLevel& mesh) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open '" + path.string() + "'");
  NodalField u = NodalField::zeros(mesh);
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    double x = 0.0, y = 0.0, v = 0.0;
    if (!(in >> x >> y >> v)) throw ArgumentError(path.string() + ": truncated field at node " + std::to_string(i));
    if (std::abs(x - mesh.nodes[i].x) > 1e-12 || std::abs(y - mesh.nodes[i].y) > 1e-12) {
      throw ArgumentError(path.string() + ": node " + std::to_string(i) + " does not match the mesh");
    }
    u.values[i] = v;
  }
  return u;
}

void write_matrix(std::ostream& out, const SparseSymMatrix& a) {
  const Eigen::SparseMatrix<double>& m = a.matrix();
  for (int col = 0; col < m.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, col); it; ++it) {
      out << it.row() << ' ' << it.col() << ' ' << full(it.value()) << '\n';
    }
  }
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : path_(path), columns_(header.size()) {
  std::ofstream out = open_out(path_);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw ArgumentError("CsvWriter: row has wrong number of cells");
  std::ofstream out = open_out(path_, std::ios::app);
  for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
  out << '\n';
}

}  // namespace viscogrid::io
