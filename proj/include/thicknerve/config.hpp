#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace thicknerve {

struct RunConfig {
  int level{3};
  double epsilon{0.19};
  /// Net spacing; default 0.9 eps / (m (b + 1)).
  std::optional<double> delta;
  /// Sample grid step; default delta / 16.
  std::optional<double> resolution;
  double tie_tolerance{1e-9};
  double flow_tolerance{1e-9};
  int dimension_cap{8};
  std::uint64_t seed{1};
  std::string output_dir{"thicknerve_out"};
  int margulis_samples{50};
  int flow_starts{100};
  int hausdorff_samples{200};
  int count_n_max{9};
  int count_d_max{3};

  double delta_for(int m) const;
  double resolution_for(int m) const;

  /// Re-checks N >= 3, 10 eps below the translation floor 2 arccosh(3/2),
  /// delta < eps/(m(b+1)), resolution <= delta/2, and the remaining ranges.
  void validate(int m = 1) const;

  /// Every field as (key, value) text, unset optionals as "default".
  std::vector<std::pair<std::string, std::string>> entries() const;
};

/// Sets one field from its key; ConfigError on an unknown key or bad value.
void apply_setting(RunConfig& c, const std::string& key, const std::string& value);

/// Flat "key = value" lines; '#' starts a comment.
RunConfig parse_config(std::istream& is, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

/// Output directory after the THICKNERVE_OUT override.
std::string resolve_output_dir(const RunConfig& c, bool explicit_flag);

}  // namespace thicknerve
