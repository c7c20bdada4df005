#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "thicknerve/pipeline.hpp"

using namespace thicknerve;
namespace fs = std::filesystem;

namespace {

struct Flags {
  std::string config_file;
  std::vector<std::pair<std::string, std::string>> overrides;
  bool output_given{false};
};

// Flags mirror the RunConfig keys; they are applied after the config file.
void add_config_flags(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--config", flags.config_file, "flat key = value configuration file");
  const std::vector<std::pair<std::string, std::string>> keys{
      {"level", "congruence level N"},
      {"epsilon", "Margulis constant eps"},
      {"delta", "net spacing (default 0.9 eps/(m(b+1)))"},
      {"resolution", "sample grid step (default delta/16)"},
      {"tie-tolerance", "Chebyshev acceptance tolerance"},
      {"flow-tolerance", "flow step error tolerance"},
      {"dimension-cap", "highest nerve dimension"},
      {"seed", "random seed"},
      {"output", "output directory"},
      {"margulis-samples", "base points for the Margulis witness"},
      {"flow-starts", "random flow starts"},
      {"hausdorff-samples", "boundary points per Hausdorff radius"},
      {"n-max", "largest graph size for count"},
      {"d-max", "largest degree for count"}};
  for (const auto& [flag, help] : keys) {
    std::string key = flag;
    std::replace(key.begin(), key.end(), '-', '_');
    if (key == "output") key = "output_dir";
    if (key == "n_max") key = "count_n_max";
    if (key == "d_max") key = "count_d_max";
    cmd->add_option_function<std::string>(
        "--" + flag,
        [&flags, key](const std::string& v) {
          flags.overrides.emplace_back(key, v);
          if (key == "output_dir") flags.output_given = true;
        },
        help);
  }
}

RunConfig resolve(const Flags& flags, std::string& out_dir) {
  RunConfig c;
  if (!flags.config_file.empty()) c = load_config(flags.config_file);
  for (const auto& [k, v] : flags.overrides) apply_setting(c, k, v);
  out_dir = resolve_output_dir(c, flags.output_given);
  c.output_dir = out_dir;
  return c;
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream f(fs::path(dir) / name);
  if (!f) throw ConfigError("cannot write " + (fs::path(dir) / name).string());
  return f;
}

int finish(const Pipeline& p, Json report, const std::string& dir, const std::string& name) {
  report["falsifications"] = p.falsifications();
  report["status"] = p.falsifications().empty() ? "ok" : "falsified";
  open_out(dir, name) << dump_report(report);
  std::cout << dump_report(report);
  for (const auto& f : p.falsifications()) std::cerr << "falsified: " << f << '\n';
  return static_cast<int>(p.falsifications().empty() ? ExitCode::ok : ExitCode::falsification);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thick-part nerves of congruence surfaces"};
  app.require_subcommand(1);
  Flags flags;
  std::map<std::string, CLI::App*> cmds;
  for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
           {"decompose", "label thick/thin samples (samples.csv)"},
           {"flow", "flow random collar starts to the thick part and check the Hausdorff bound"},
           {"net", "greedy maximal net on the thick part (centers.csv)"},
           {"nerve", "nerve of the fine ball cover (nerve_simplices.txt, nerve_adjacency.csv)"},
           {"invariants", "Euler characteristic, homology and pi_1 presentation"},
           {"count", "bounded-degree graph counts and the census envelope"},
           {"pipeline", "full run with report.json"}}) {
    cmds[name] = app.add_subcommand(name, help);
    add_config_flags(cmds[name], flags);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ExitCode::config);
  }

  try {
    std::string dir;
    const RunConfig config = resolve(flags, dir);
    if (cmds["pipeline"]->parsed()) {
      const PipelineOutcome out = run_pipeline(config, dir);
      std::cout << dump_report(out.report);
      for (const auto& f : out.falsifications) std::cerr << "falsified: " << f << '\n';
      return static_cast<int>(out.exit_code);
    }
    if (cmds["count"]->parsed()) {
      config.validate(1);
      const auto rows = count_table(config.count_n_max, config.count_d_max);
      {
        auto f = open_out(dir, "count.csv");
        write_count_csv(f, rows);
      }
      // Census constants for m = 1, the value the Margulis witness returns for every Gamma(N).
      const CoverConstants c = cover_constants(config.epsilon, 1, config.delta_for(1));
      std::vector<CensusEnvelope> curve;
      for (int k = 1; k <= 40; ++k) curve.push_back(census_envelope(k * 2.5, c.alpha, c.d));
      {
        auto f = open_out(dir, "envelope.csv");
        f.precision(12);
        write_envelope_csv(f, curve);
      }
      Json table = Json::array();
      for (const auto& r : rows)
        table.push_back({{"n", r.n},
                         {"d_max", r.d_max},
                         {"labeled", r.labeled},
                         {"classes", r.classes},
                         {"max_triangles", r.max_triangles},
                         {"max_paths2", r.max_paths2},
                         {"triangle_bound", r.triangle_bound},
                         {"skeletons", r.skeletons.str()},
                         {"envelope", r.envelope.str()},
                         {"within_envelope", r.within_envelope}});
      Json report = {{"n_max", config.count_n_max},
                     {"d_max", config.count_d_max},
                     {"graph_envelope", "labeled graphs with max degree <= d on n vertices <= (sum_{j<=d} C(n-1, j))^n <= n^(d n)"},
                     {"c1", c.alpha},
                     {"d", c.d},
                     {"c2", curve.front().c2},
                     {"C", curve.front().big_c},
                     {"rows", table},
                     {"status", "ok"}};
      open_out(dir, "count.json") << dump_report(report);
      std::cout << dump_report(report);
      return 0;
    }

    Pipeline p(config);
    Json report = p.header();
    if (cmds["decompose"]->parsed()) {
      auto f = open_out(dir, "samples.csv");
      report["decompose"] = p.decompose(&f);
      return finish(p, report, dir, "decompose.json");
    }
    if (cmds["flow"]->parsed()) {
      auto f = open_out(dir, "flow.csv");
      report["flow"] = p.flow(&f);
      return finish(p, report, dir, "flow.json");
    }
    if (cmds["net"]->parsed()) {
      auto f = open_out(dir, "centers.csv");
      report["net"] = p.net(&f);
      return finish(p, report, dir, "net.json");
    }
    if (cmds["nerve"]->parsed()) {
      auto s = open_out(dir, "nerve_simplices.txt");
      auto a = open_out(dir, "nerve_adjacency.csv");
      report["net"] = p.net();
      report["nerve"] = p.nerve(&s, &a);
      return finish(p, report, dir, "nerve.json");
    }
    if (cmds["invariants"]->parsed()) {
      auto f = open_out(dir, "presentation.txt");
      report["net"] = p.net();
      report["nerve"] = p.nerve();
      report["invariants"] = p.invariants(&f);
      return finish(p, report, dir, "invariants.json");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(exit_code_of(e));
  }
  return static_cast<int>(ExitCode::config);
}
