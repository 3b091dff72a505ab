#include "viscogrid/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

#include "viscogrid/error.hpp"
#include "viscogrid/io.hpp"

namespace viscogrid::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ArgumentError("'" + key + "': expected a number, got '" + value + "'");
  return out;
}

long to_long(const std::string& key, const std::string& value) {
  long out = 0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ArgumentError("'" + key + "': expected an integer, got '" + value + "'");
  return out;
}

int to_int(const std::string& key, const std::string& value) {
  const long v = to_long(key, value);
  if (v < -1000000000L || v > 1000000000L) throw ArgumentError("'" + key + "': value out of range");
  return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ArgumentError("'" + key + "': expected true/false, got '" + value + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"model",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v != "hb" && v != "bingham" && v != "casson") {
           throw ArgumentError("'" + k + "': expected hb, bingham or casson, got '" + v + "'");
         }
         c.model = v;
       }},
      {"p", [](RunConfig& c, const std::string& k, const std::string& v) { c.p = to_double(k, v); }},
      {"g", [](RunConfig& c, const std::string& k, const std::string& v) { c.g = to_double(k, v); }},
      {"gamma", [](RunConfig& c, const std::string& k, const std::string& v) { c.gamma = to_double(k, v); }},
      {"f", [](RunConfig& c, const std::string& k, const std::string& v) { c.f = to_double(k, v); }},
      {"levels", [](RunConfig& c, const std::string& k, const std::string& v) { c.levels = to_int(k, v); }},
      {"finest", [](RunConfig& c, const std::string& k, const std::string& v) { c.finest = to_int(k, v); }},
      {"nu1", [](RunConfig& c, const std::string& k, const std::string& v) { c.nu1 = to_int(k, v); }},
      {"nu2", [](RunConfig& c, const std::string& k, const std::string& v) { c.nu2 = to_int(k, v); }},
      {"mode",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "mgopt") c.mode = Mode::mgopt;
         else if (v == "descent") c.mode = Mode::descent;
         else if (v == "fmg") c.mode = Mode::fmg;
         else throw ArgumentError("'" + k + "': expected mgopt, descent or fmg, got '" + v + "'");
       }},
      {"sigma1", [](RunConfig& c, const std::string& k, const std::string& v) { c.sigma1 = to_double(k, v); }},
      {"eps", [](RunConfig& c, const std::string& k, const std::string& v) { c.eps = to_double(k, v); }},
      {"outer_tol", [](RunConfig& c, const std::string& k, const std::string& v) { c.outer_tol = to_double(k, v); }},
      {"max_cycles", [](RunConfig& c, const std::string& k, const std::string& v) { c.max_cycles = to_int(k, v); }},
      {"transfer",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "restriction") c.transfer = IterateTransfer::restriction;
         else if (v == "injection") c.transfer = IterateTransfer::injection;
         else throw ArgumentError("'" + k + "': expected restriction or injection, got '" + v + "'");
       }},
      {"casson_preconditioner",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "power") c.casson_preconditioner = CassonWeight::power;
         else if (v == "sum") c.casson_preconditioner = CassonWeight::sum;
         else throw ArgumentError("'" + k + "': expected power or sum, got '" + v + "'");
       }},
      {"reference", [](RunConfig& c, const std::string& k, const std::string& v) { c.reference = to_bool(k, v); }},
      {"output", [](RunConfig& c, const std::string&, const std::string& v) { c.output = v; }},
      {"cache_dir", [](RunConfig& c, const std::string&, const std::string& v) { c.cache_dir = v; }},
      {"seed",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const long s = to_long(k, v);
         if (s < 0 || s > 0xffffffffL) throw ArgumentError("'" + k + "': expected 0..4294967295");
         c.seed = static_cast<unsigned>(s);
       }},
  };
  return table;
}

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::mgopt: return "mgopt";
    case Mode::descent: return "descent";
    case Mode::fmg: return "fmg";
  }
  return "unknown";
}

ModelSpec RunConfig::model_spec() const {
  if (model == "bingham") return ModelSpec::bingham(g, gamma, f);
  if (model == "casson") return ModelSpec::casson(g, gamma, f);
  return ModelSpec::herschel_bulkley(p, g, gamma, f);
}

MgoptConfig RunConfig::mgopt_config() const {
  MgoptConfig cfg;
  cfg.nu1 = nu1;
  cfg.nu2 = nu2;
  cfg.outer_tol = outer_tol;
  cfg.max_cycles = max_cycles;
  cfg.iterate_transfer = transfer;
  cfg.smoother.sigma1 = sigma1;
  cfg.smoother.eps = eps;
  cfg.smoother.casson_weight = casson_preconditioner;
  return cfg;
}

void RunConfig::validate() const {
  model_spec();
  if (finest < 1 || finest > 9) throw ArgumentError("finest must lie in 1..9");
  if (levels < 1 || levels > finest) throw ArgumentError("levels must lie in 1..finest");
  if (mode == Mode::mgopt && levels < 2) throw ArgumentError("mode=mgopt needs levels >= 2");
  if (max_cycles < 1) throw ArgumentError("max_cycles must be >= 1");
  mgopt_config().validate();
}

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ArgumentError("unknown key '" + key + "'");
  it->second(cfg, key, value);
}

void apply_config_stream(RunConfig& cfg, std::istream& in, const std::string& source) {
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    const std::string where = source + ":" + std::to_string(number) + ": ";
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ArgumentError(where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ArgumentError(where + "empty key or value");
    try {
      apply_key(cfg, key, value);
    } catch (const ArgumentError& e) {
      throw ArgumentError(where + e.what());
    }
  }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open config file '" + path.string() + "'");
  apply_config_stream(cfg, in, path.string());
}

std::string dump(const RunConfig& cfg) {
  std::ostringstream out;
  out << "model=" << cfg.model << '\n'
      << "p=" << io::sci(cfg.p) << '\n'
      << "g=" << io::sci(cfg.g) << '\n'
      << "gamma=" << io::sci(cfg.gamma) << '\n'
      << "f=" << io::sci(cfg.f) << '\n'
      << "levels=" << cfg.levels << '\n'
      << "finest=" << cfg.finest << '\n'
      << "nu1=" << cfg.nu1 << '\n'
      << "nu2=" << cfg.nu2 << '\n'
      << "mode=" << to_string(cfg.mode) << '\n'
      << "sigma1=" << io::sci(cfg.sigma1) << '\n'
      << "eps=" << io::sci(cfg.eps) << '\n'
      << "outer_tol=" << io::sci(cfg.outer_tol) << '\n'
      << "max_cycles=" << cfg.max_cycles << '\n'
      << "transfer=" << (cfg.transfer == IterateTransfer::restriction ? "restriction" : "injection") << '\n'
      << "casson_preconditioner=" << (cfg.casson_preconditioner == CassonWeight::power ? "power" : "sum") << '\n'
      << "reference=" << (cfg.reference ? "true" : "false") << '\n'
      << "output=" << cfg.output.string() << '\n';
  if (!cfg.cache_dir.empty()) out << "cache_dir=" << cfg.cache_dir.string() << '\n';
  out << "seed=" << cfg.seed << '\n';
  return out.str();
}

}  // namespace viscogrid::cli
