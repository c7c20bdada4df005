#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "thicknerve/bounds.hpp"
#include "thicknerve/config.hpp"
#include "thicknerve/counting.hpp"
#include "thicknerve/homology.hpp"
#include "thicknerve/presentation.hpp"

namespace thicknerve {

using Json = nlohmann::ordered_json;

/// Stage outputs are kept once and every report field is read from them.
class Pipeline {
 public:
  /// Validates the configuration and runs the Margulis witness.
  explicit Pipeline(RunConfig config);

  const RunConfig& config() const { return config_; }
  const CongruenceLattice& lattice() const { return *lattice_; }
  const CoverConstants& constants() const { return constants_; }

  /// Thick/thin sampling; optional CSV x,y,label,delta of the chart samples.
  Json decompose(std::ostream* csv = nullptr);
  /// Random collar starts flowed to the thick part, and the Hausdorff check.
  Json flow(std::ostream* csv = nullptr);
  Json net(std::ostream* csv = nullptr);
  Json nerve(std::ostream* simplices = nullptr, std::ostream* adjacency = nullptr);
  Json invariants(std::ostream* presentation = nullptr);
  Json bounds();
  Json envelope(std::ostream* csv = nullptr);

  /// Configuration, lattice and constants block shared by every report.
  Json header() const;

  /// Checks that failed on real data, in the order they were found.
  const std::vector<std::string>& falsifications() const { return falsifications_; }
  const std::vector<std::pair<std::string, double>>& timings() const { return timings_; }

 private:
  void ensure_samples();
  void ensure_net();
  void ensure_nerve();
  void falsify(bool ok, const std::string& what);
  void time(const std::string& stage, double seconds) { timings_.emplace_back(stage, seconds); }

  RunConfig config_;
  std::unique_ptr<CongruenceLattice> lattice_;
  MargulisData margulis_;
  ThinConfig thin_;
  CoverConstants constants_;
  double resolution_{0};
  double fine_radius_{0};
  double fine_level_{0};
  std::unique_ptr<QuotientSpace> space_;
  std::optional<SampleSet> samples_;
  std::optional<NetCover> net_;
  std::unique_ptr<ChartIndex> fine_index_;
  std::optional<NerveBuild> nerve_;
  std::vector<std::string> falsifications_;
  std::vector<std::pair<std::string, double>> timings_;
};

struct PipelineOutcome {
  Json report;
  std::vector<std::string> falsifications;
  ExitCode exit_code{ExitCode::ok};
};

/// Full run: decompose, flow checks, net, nerve, invariants, bounds and the
/// census envelope. Writes report.json, summary.txt, timings.json and the CSV
/// series into the output directory.
PipelineOutcome run_pipeline(const RunConfig& config, const std::string& output_dir);

/// Pretty-printed JSON with a trailing newline.
std::string dump_report(const Json& j);

}  // namespace thicknerve
