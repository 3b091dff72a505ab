#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "viscogrid/fem.hpp"
#include "viscogrid/mgopt.hpp"

namespace viscogrid::cli {

enum class Mode { mgopt, descent, fmg };

std::string to_string(Mode mode);

/// Everything a `solve` run needs. Set from a key=value file and/or flags.
struct RunConfig {
  std::string model = "hb";  ///< hb | bingham | casson
  double p = 1.75;
  double g = 0.2;
  double gamma = 1e3;
  double f = 1.0;
  int levels = 5;   ///< grids in the V-cycle
  int finest = 7;   ///< refinement level of the finest grid; 7 -> 8321 nodes
  int nu1 = 2;
  int nu2 = 2;
  Mode mode = Mode::mgopt;
  double sigma1 = 1e-4;
  double eps = 1e-6;
  double outer_tol = 1e-7;
  int max_cycles = 100;  ///< V-cycles, or iterations in descent mode
  IterateTransfer transfer = IterateTransfer::restriction;
  CassonWeight casson_preconditioner = CassonWeight::power;
  bool reference = true;  ///< compute Err_s against a cached reference solution
  std::filesystem::path output = ".";
  std::filesystem::path cache_dir;  ///< empty: same as output
  unsigned seed = 0;

  ModelSpec model_spec() const;
  MgoptConfig mgopt_config() const;
  std::filesystem::path cache_path() const { return cache_dir.empty() ? output : cache_dir; }

  /// Throws ArgumentError on out-of-range values.
  void validate() const;
};

/// Sets one key; throws ArgumentError for unknown keys or malformed values.
void apply_key(RunConfig& cfg, const std::string& key, const std::string& value);

/// Parses `key = value` lines; '#' starts a comment. Errors name the line.
void apply_config_stream(RunConfig& cfg, std::istream& in, const std::string& source);
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

/// Canonical `key=value` dump, one per line, readable by apply_config_stream.
std::string dump(const RunConfig& cfg);

}  // namespace viscogrid::cli
