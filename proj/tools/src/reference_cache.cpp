#include <cstdint>
#include <cstdio>
#include <ostream>

#include "viscogrid/cli/commands.hpp"
#include "viscogrid/io.hpp"

namespace viscogrid::cli {

namespace {

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::string reference_key(const ModelSpec& model, int finest, const SmootherConfig& smoother) {
  const ReferenceConfig defaults;
  std::string key = "model=" + model.name() + ";p=" + exact(model.p()) + ";g=" + exact(model.g) +
                    ";gamma=" + exact(model.gamma) + ";f=" + exact(model.f) + ";level=" + std::to_string(finest) +
                    ";eps=" + exact(smoother.eps) + ";sigma1=" + exact(smoother.sigma1) +
                    ";rel_tol=" + exact(defaults.rel_tol);
  if (model.is_casson()) key += smoother.casson_weight == CassonWeight::power ? ";casson=power" : ";casson=sum";
  return key;
}

std::filesystem::path reference_path(const std::filesystem::path& dir, const std::string& key) {
  char name[40];
  std::snprintf(name, sizeof name, "ref_%016llx.txt", static_cast<unsigned long long>(fnv1a(key)));
  return dir / name;
}

NodalField load_or_compute_reference(const ModelSpec& model, const Discretization& disc, int finest,
                                     const SmootherConfig& smoother, const std::filesystem::path& dir,
                                     std::ostream* log) {
  const std::string key = reference_key(model, finest, smoother);
  const std::filesystem::path path = reference_path(dir, key);
  if (std::filesystem::exists(path)) {
    if (log) *log << "reference: " << path.string() << " (cached)\n";
    return io::read_field(path, disc.mesh());
  }
  ReferenceConfig cfg;
  cfg.smoother.eps = smoother.eps;
  cfg.smoother.sigma1 = smoother.sigma1;
  cfg.smoother.casson_weight = smoother.casson_weight;
  if (log) *log << "reference: computing " << key << '\n';
  auto [ref, report] = reference_solution(model, disc, cfg);
  if (log) {
    *log << "reference: " << report.iterations << " iterations, stop " << to_string(report.stop)
         << ", gradient " << io::sci(report.initial_grad_norm) << " -> " << io::sci(report.best_grad_norm) << '\n';
  }
  std::filesystem::create_directories(dir);
  // Write to a temporary name first so an interrupted run leaves no partial cache.
  const std::filesystem::path tmp = path.string() + ".tmp";
  io::write_field(tmp, disc.mesh(), ref);
  std::filesystem::rename(tmp, path);
  return ref;
}

}  // namespace viscogrid::cli
