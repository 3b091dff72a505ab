#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "support.hpp"
#include "viscogrid/io.hpp"

using namespace viscogrid;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("viscogrid_io_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Io, SciFormat) {
  EXPECT_EQ(io::sci(0.0), "0.000000e+00");
  EXPECT_EQ(io::sci(1.5e-7), "1.500000e-07");
  EXPECT_EQ(io::sci(-123456.789), "-1.234568e+05");
}

TEST(Io, FieldRoundTrip) {
  const MeshLevel& mesh = viscogrid::testing::disk7().level(3);
  std::mt19937_64 rng(1);
  const NodalField u = viscogrid::testing::random_field(mesh, rng);
  const auto path = scratch_dir("field") / "u.txt";
  io::write_field(path, mesh, u);
  const NodalField back = io::read_field(path, mesh);
  EXPECT_EQ(back.level, u.level);
  EXPECT_EQ(back.values, u.values);
  // Nested levels share their leading nodes, so only a longer mesh is caught.
  EXPECT_THROW(io::read_field(path, viscogrid::testing::disk7().level(4)), std::exception);
  std::ofstream(path.parent_path() / "moved.txt") << "0.5 0 1\n";
  EXPECT_THROW(io::read_field(path.parent_path() / "moved.txt", mesh), std::exception);
  EXPECT_THROW(io::read_field(path.parent_path() / "missing.txt", mesh), std::exception);
}

TEST(Io, MeshFile) {
  const MeshLevel& mesh = viscogrid::testing::disk7().level(1);
  const auto path = scratch_dir("mesh") / "mesh.txt";
  io::write_mesh(path, mesh);
  std::ifstream in(path);
  std::string line;
  int node_lines = 0;
  while (std::getline(in, line) && !line.empty()) ++node_lines;
  int tri_lines = 0;
  while (std::getline(in, line)) tri_lines += line.empty() ? 0 : 1;
  EXPECT_EQ(node_lines, 13);
  EXPECT_EQ(tri_lines, 16);
}

TEST(Io, CsvWriter) {
  const auto path = scratch_dir("csv") / "t.csv";
  {
    io::CsvWriter w(path, {"a", "b"});
    w.row({"1", "2"});
    EXPECT_THROW(w.row({"1"}), std::exception);
  }
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "a,b\n1,2\n");
}
