#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "viscogrid/mesh.hpp"
#include "viscogrid/sparse.hpp"

namespace viscogrid::io {

/// `x y is_boundary` per node.
void write_nodes(std::ostream& out, const MeshLevel& mesh);
/// `i j k` per triangle, 0-based.
void write_triangles(std::ostream& out, const MeshLevel& mesh);
/// Nodes, a blank line, then triangles.
void write_mesh(const std::filesystem::path& path, const MeshLevel& mesh);

/// `x y u` per node, full precision.
void write_field(std::ostream& out, const MeshLevel& mesh, const NodalField& u);
void write_field(const std::filesystem::path& path, const MeshLevel& mesh, const NodalField& u);

/// Reads a field written by write_field; checks the coordinates against `mesh`.
NodalField read_field(const std::filesystem::path& path, const MeshLevel& mesh);

/// Coordinate-format triples `row col value`, 0-based.
void write_matrix(std::ostream& out, const SparseSymMatrix& a);

/// `%.6e`, independent of the global locale.
std::string sci(double value);

/// Minimal CSV writer: header row, then rows of preformatted cells.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);

 private:
  std::filesystem::path path_;
  std::size_t columns_;
};

}  // namespace viscogrid::io
