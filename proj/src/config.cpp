#include "thicknerve/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "thicknerve/errors.hpp"
#include "thicknerve/lattice.hpp"
#include "thicknerve/net.hpp"

namespace thicknerve {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("config: bad value '" + text + "' for " + key);
  return v;
}

std::string format(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

double RunConfig::delta_for(int m) const { return delta ? *delta : default_net_spacing(epsilon, m); }

double RunConfig::resolution_for(int m) const { return resolution ? *resolution : delta_for(m) / 16.0; }

void RunConfig::validate(int m) const {
  if (level < 3)
    throw ConfigError("level N = " + std::to_string(level) +
                      ": Gamma(N) is torsion-free only for N >= 3 (Gamma(2) contains -I and elliptic classes)");
  if (level > 12) throw ConfigError("level N = " + std::to_string(level) + " is above the supported maximum 12");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(10.0 * epsilon < hyperbolic_translation_floor()))
    throw ConfigError("10 eps = " + format(10.0 * epsilon) + " must be below 2 arccosh(3/2) = " +
                      format(hyperbolic_translation_floor()));
  const double b = b_constant(epsilon);
  const double d = delta_for(m);
  if (!(d > 0.0 && d < epsilon / (m * (b + 1.0))))
    throw ConfigError("delta = " + format(d) + " must lie in (0, eps/(m(b+1))) = (0, " +
                      format(epsilon / (m * (b + 1.0))) + ")");
  const double r = resolution_for(m);
  if (!(r > 0.0 && r <= d / 2.0))
    throw ConfigError("resolution = " + format(r) + " must lie in (0, delta/2] = (0, " + format(d / 2.0) + "]");
  if (!(tie_tolerance >= 0.0) || !(flow_tolerance > 0.0)) throw ConfigError("tolerances must be nonnegative");
  if (dimension_cap < 2 || dimension_cap > 16) throw ConfigError("dimension_cap must lie in [2, 16]");
  if (margulis_samples < 1 || flow_starts < 0 || hausdorff_samples < 0)
    throw ConfigError("sample counts must be nonnegative (margulis_samples >= 1)");
  if (count_n_max < 0 || count_d_max < 0) throw ConfigError("count ranges must be nonnegative");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  return {{"level", std::to_string(level)},
          {"epsilon", format(epsilon)},
          {"delta", delta ? format(*delta) : "default"},
          {"resolution", resolution ? format(*resolution) : "default"},
          {"tie_tolerance", format(tie_tolerance)},
          {"flow_tolerance", format(flow_tolerance)},
          {"dimension_cap", std::to_string(dimension_cap)},
          {"seed", std::to_string(seed)},
          {"margulis_samples", std::to_string(margulis_samples)},
          {"flow_starts", std::to_string(flow_starts)},
          {"hausdorff_samples", std::to_string(hausdorff_samples)},
          {"count_n_max", std::to_string(count_n_max)},
          {"count_d_max", std::to_string(count_d_max)}};
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters{
      {"level", [&](const std::string& v) { c.level = parse_number<int>(key, v); }},
      {"epsilon", [&](const std::string& v) { c.epsilon = parse_number<double>(key, v); }},
      {"delta",
       [&](const std::string& v) {
         if (v == "default") c.delta.reset();
         else c.delta = parse_number<double>(key, v);
       }},
      {"resolution",
       [&](const std::string& v) {
         if (v == "default") c.resolution.reset();
         else c.resolution = parse_number<double>(key, v);
       }},
      {"tie_tolerance", [&](const std::string& v) { c.tie_tolerance = parse_number<double>(key, v); }},
      {"flow_tolerance", [&](const std::string& v) { c.flow_tolerance = parse_number<double>(key, v); }},
      {"dimension_cap", [&](const std::string& v) { c.dimension_cap = parse_number<int>(key, v); }},
      {"seed", [&](const std::string& v) { c.seed = parse_number<std::uint64_t>(key, v); }},
      {"output_dir", [&](const std::string& v) { c.output_dir = v; }},
      {"margulis_samples", [&](const std::string& v) { c.margulis_samples = parse_number<int>(key, v); }},
      {"flow_starts", [&](const std::string& v) { c.flow_starts = parse_number<int>(key, v); }},
      {"hausdorff_samples", [&](const std::string& v) { c.hausdorff_samples = parse_number<int>(key, v); }},
      {"count_n_max", [&](const std::string& v) { c.count_n_max = parse_number<int>(key, v); }},
      {"count_d_max", [&](const std::string& v) { c.count_d_max = parse_number<int>(key, v); }},
  };
  const auto it = setters.find(key);
  if (it == setters.end()) throw ConfigError("config: unknown key '" + key + "'");
  it->second(value);
}

RunConfig parse_config(std::istream& is, RunConfig base) {
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(number) + ": expected key = value");
    apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  return parse_config(in, std::move(base));
}

std::string resolve_output_dir(const RunConfig& c, bool explicit_flag) {
  if (!explicit_flag)
    if (const char* env = std::getenv("THICKNERVE_OUT"); env && *env) return env;
  return c.output_dir;
}

}  // namespace thicknerve
