#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "viscogrid/cli/commands.hpp"
#include "viscogrid/cli/config.hpp"
#include "viscogrid/error.hpp"

using namespace viscogrid;
using namespace viscogrid::cli;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("viscogrid_cli_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  return out;
}

// Small, fast problem: 545 nodes on three grids.
RunConfig small_run(const std::filesystem::path& out) {
  RunConfig c;
  c.finest = 5;
  c.levels = 3;
  c.output = out;
  return c;
}

}  // namespace

TEST(Config, ParsesKeyValueFile) {
  RunConfig c;
  std::istringstream in("# comment\nmodel = bingham\n\ng=0.4   # trailing\nnu1=1\nnu2 = 3\nmode=descent\n"
                        "transfer=injection\ncasson_preconditioner=sum\nreference=false\n");
  apply_config_stream(c, in, "test.cfg");
  EXPECT_EQ(c.model, "bingham");
  EXPECT_EQ(c.g, 0.4);
  EXPECT_EQ(c.nu1, 1);
  EXPECT_EQ(c.nu2, 3);
  EXPECT_EQ(c.mode, Mode::descent);
  EXPECT_EQ(c.transfer, IterateTransfer::injection);
  EXPECT_EQ(c.casson_preconditioner, CassonWeight::sum);
  EXPECT_FALSE(c.reference);
  EXPECT_TRUE(c.model_spec().variant.index() == 1);
}

TEST(Config, RejectsUnknownKeyWithLineNumber) {
  RunConfig c;
  std::istringstream in("g=0.1\ncolour=blue\n");
  try {
    apply_config_stream(c, in, "x.cfg");
    FAIL() << "no error";
  } catch (const ArgumentError& e) {
    EXPECT_NE(std::string(e.what()).find("x.cfg:2"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos) << e.what();
  }
}

TEST(Config, RejectsMalformedValues) {
  RunConfig c;
  EXPECT_THROW(apply_key(c, "g", "abc"), ArgumentError);
  EXPECT_THROW(apply_key(c, "nu1", "1.5"), ArgumentError);
  EXPECT_THROW(apply_key(c, "model", "newtonian"), ArgumentError);
  EXPECT_THROW(apply_key(c, "mode", "vcycle"), ArgumentError);
  std::istringstream no_equals("g 0.1\n");
  EXPECT_THROW(apply_config_stream(c, no_equals, "y.cfg"), ArgumentError);
  EXPECT_THROW(apply_config_file(c, "/nonexistent/viscogrid.cfg"), ArgumentError);
}

TEST(Config, LaterSettingsOverrideEarlier) {
  const auto dir = scratch_dir("override");
  std::ofstream(dir / "run.cfg") << "g=0.1\nnu1=3\n";
  RunConfig c;
  apply_config_file(c, dir / "run.cfg");
  apply_key(c, "g", "0.3");  // a command-line flag
  EXPECT_EQ(c.g, 0.3);
  EXPECT_EQ(c.nu1, 3);
}

TEST(Config, DumpRoundTrips) {
  RunConfig c;
  apply_key(c, "model", "casson");
  apply_key(c, "gamma", "250");
  apply_key(c, "levels", "3");
  std::istringstream in(dump(c));
  RunConfig back;
  apply_config_stream(back, in, "dump");
  EXPECT_EQ(dump(back), dump(c));
}

TEST(Config, Validation) {
  RunConfig c;
  c.levels = 8;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = {};
  c.finest = 3;
  c.levels = 5;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = {};
  c.p = 1.0;
  EXPECT_THROW(c.validate(), ArgumentError);
}

TEST(Cli, MeshInfoRows) {
  std::ostringstream out, err;
  ASSERT_EQ(cmd_mesh_info(7, out, err), kExitConverged);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "level,nodes,triangles,boundary,area");
  const int nodes[] = {5, 13, 41, 145, 545, 2113, 8321};
  for (int k = 0; k < 7; ++k) {
    ASSERT_TRUE(std::getline(in, line));
    const auto cells = split(line);
    ASSERT_EQ(cells.size(), 5u);
    EXPECT_EQ(std::stoi(cells[0]), k);
    EXPECT_EQ(std::stoi(cells[1]), nodes[k]);
  }
  EXPECT_EQ(cmd_mesh_info(0, out, err), kExitError);
}

TEST(Cli, SolveWritesOutputsAndConverges) {
  const auto dir = scratch_dir("solve");
  RunConfig c = small_run(dir);
  c.g = 0.0;
  c.cache_dir = dir / "cache";
  std::ostringstream out, err;
  ASSERT_EQ(cmd_solve(c, out, err), kExitConverged) << err.str();
  const auto lines = read_lines(dir / "report.csv");
  ASSERT_GE(lines.size(), 3u);
  EXPECT_EQ(lines[0], "cycle,energy,grad_norm,err_s,plug_flow,err_pf,alpha,wall_ms");
  const std::regex number(R"(-?\d\.\d{6}e[+-]\d{2})");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i]);
    ASSERT_EQ(cells.size(), 8u);
    EXPECT_EQ(std::stoi(cells[0]), static_cast<int>(i - 1));
    for (std::size_t j = 1; j < cells.size(); ++j) EXPECT_TRUE(std::regex_match(cells[j], number)) << cells[j];
  }
  EXPECT_EQ(read_lines(dir / "solution.txt").size(), 545u);
  EXPECT_TRUE(std::filesystem::exists(dir / "mesh.txt"));

  // The reference cache is a single ref_<16 hex digits>.txt file.
  std::vector<std::string> cached;
  for (const auto& entry : std::filesystem::directory_iterator(dir / "cache")) cached.push_back(entry.path().filename());
  ASSERT_EQ(cached.size(), 1u);
  EXPECT_TRUE(std::regex_match(cached[0], std::regex("ref_[0-9a-f]{16}\\.txt")));
  EXPECT_EQ(reference_path(dir / "cache", reference_key(c.model_spec(), c.finest, c.mgopt_config().smoother)),
            dir / "cache" / cached[0]);

  // A second run reuses it.
  std::ostringstream out2, err2;
  ASSERT_EQ(cmd_solve(c, out2, err2), kExitConverged);
  EXPECT_NE(err2.str().find("(cached)"), std::string::npos) << err2.str();
}

TEST(Cli, BudgetExitCode) {
  const auto dir = scratch_dir("budget");
  RunConfig c = small_run(dir);
  c.max_cycles = 1;
  c.reference = false;
  std::ostringstream out, err;
  EXPECT_EQ(cmd_solve(c, out, err), kExitBudget);
  EXPECT_EQ(read_lines(dir / "report.csv").size(), 3u);

  c.mode = Mode::descent;
  c.max_cycles = 2;
  EXPECT_EQ(cmd_solve(c, out, err), kExitBudget);
  EXPECT_EQ(read_lines(dir / "report.csv").size(), 4u);
}

TEST(Cli, ErrorExitCode) {
  const auto dir = scratch_dir("error");
  RunConfig c = small_run(dir);
  c.levels = 6;
  std::ostringstream out, err;
  EXPECT_EQ(cmd_solve(c, out, err), kExitError);
  EXPECT_FALSE(err.str().empty());
  ExperimentOptions opt;
  opt.output = dir;
  EXPECT_EQ(cmd_experiment(9, opt, out, err), kExitError);
}

TEST(Cli, ReportIsDeterministic) {
  const auto a = scratch_dir("det_a"), b = scratch_dir("det_b");
  for (const auto& dir : {a, b}) {
    RunConfig c = small_run(dir);
    c.model = "casson";
    c.reference = false;
    std::ostringstream out, err;
    ASSERT_EQ(cmd_solve(c, out, err), kExitConverged);
  }
  const auto la = read_lines(a / "report.csv"), lb = read_lines(b / "report.csv");
  ASSERT_EQ(la.size(), lb.size());
  for (std::size_t i = 0; i < la.size(); ++i) {
    auto ca = split(la[i]), cb = split(lb[i]);
    ca.pop_back();  // wall_ms
    cb.pop_back();
    EXPECT_EQ(ca, cb);
  }
  EXPECT_EQ(read_lines(a / "solution.txt"), read_lines(b / "solution.txt"));
}

TEST(Cli, FmgAndDescentModes) {
  const auto dir = scratch_dir("modes");
  RunConfig c = small_run(dir);
  c.reference = false;
  c.mode = Mode::fmg;
  std::ostringstream out, err;
  EXPECT_EQ(cmd_solve(c, out, err), kExitConverged);
  EXPECT_EQ(read_lines(dir / "report.csv").size(), 2u);

  c.mode = Mode::descent;
  c.model = "hb";
  c.g = 0.0;
  c.max_cycles = 500;
  EXPECT_EQ(cmd_solve(c, out, err), kExitConverged);
  const auto lines = read_lines(dir / "report.csv");
  double prev = 1e300;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const double energy = std::stod(split(lines[i])[1]);
    EXPECT_LE(energy, prev);
    prev = energy;
  }
}

TEST(Cli, ReferenceKeyDistinguishesProblems) {
  const SmootherConfig s;
  const std::string a = reference_key(ModelSpec::herschel_bulkley(1.75, 0.2), 7, s);
  EXPECT_NE(a, reference_key(ModelSpec::herschel_bulkley(1.75, 0.4), 7, s));
  EXPECT_NE(a, reference_key(ModelSpec::herschel_bulkley(1.75, 0.2), 6, s));
  EXPECT_NE(reference_path("d", a), reference_path("d", reference_key(ModelSpec::bingham(0.2), 7, s)));
  EXPECT_EQ(reference_path("d", a), reference_path("d", a));
}
