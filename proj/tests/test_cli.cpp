#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("thicknerve_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Run run(const std::string& args, const std::string& env = "") {
  const fs::path dir = scratch("io");
  const std::string cmd = env + " '" + std::string(THICKNERVE_CLI) + "' " + args + " >'" + (dir / "out").string() +
                          "' 2>'" + (dir / "err").string() + "'";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(dir / "out"), slurp(dir / "err")};
}

}  // namespace

TEST_CASE("invalid level is a configuration error") {
  const fs::path d = scratch("bad");
  const Run r = run("decompose --level 2 --output '" + d.string() + "'");
  CHECK(r.code == 2);
  CHECK(r.err.find("torsion-free") != std::string::npos);
}

TEST_CASE("bad flags and values exit with 2") {
  CHECK(run("decompose --no-such-flag").code == 2);
  CHECK(run("decompose --epsilon abc").code == 2);
  CHECK(run("decompose --epsilon 0.3").code == 2);
  CHECK(run("").code == 2);
  CHECK(run("--help").code == 0);
}

TEST_CASE("decompose output is deterministic") {
  const fs::path a = scratch("dec_a"), b = scratch("dec_b");
  const std::string common = "decompose --level 3 --epsilon 0.19 --resolution 0.005 --output ";
  REQUIRE(run(common + "'" + a.string() + "'").code == 0);
  REQUIRE(run(common + "'" + b.string() + "'").code == 0);
  const std::string csv = slurp(a / "samples.csv");
  CHECK(csv.rfind("x,y,label,delta\n", 0) == 0);
  CHECK(csv.find(",thick,") != std::string::npos);
  CHECK(csv.find(",thin,") != std::string::npos);
  CHECK(csv == slurp(b / "samples.csv"));
  CHECK(slurp(a / "decompose.json") == slurp(b / "decompose.json"));
}

TEST_CASE("count command") {
  const fs::path d = scratch("count");
  const Run r = run("count --n-max 3 --d-max 1 --output '" + d.string() + "'");
  REQUIRE(r.code == 0);
  const std::string csv = slurp(d / "count.csv");
  CHECK(csv.rfind("n,d_max,labeled,", 0) == 0);
  CHECK(csv.find("\n3,1,4,") != std::string::npos);
  CHECK(r.out.find("\"status\": \"ok\"") != std::string::npos);

  const fs::path e = scratch("count_empty");
  REQUIRE(run("count --n-max 0 --output '" + e.string() + "'").code == 0);
  CHECK(slurp(e / "count.csv") == "n,d_max,labeled,classes,max_triangles,max_paths2,triangle_bound,skeletons,envelope,log_envelope\n");

  CHECK(run("count --n-max 12 --output '" + e.string() + "'").code == 2);
}

TEST_CASE("output directory from the environment and config file") {
  const fs::path env_dir = scratch("env");
  REQUIRE(run("count --n-max 2", "THICKNERVE_OUT='" + env_dir.string() + "'").code == 0);
  CHECK(fs::exists(env_dir / "count.csv"));

  // An explicit --output wins over the environment.
  const fs::path flag_dir = scratch("flag"), ignored = scratch("ignored");
  REQUIRE(run("count --n-max 2 --output '" + flag_dir.string() + "'", "THICKNERVE_OUT='" + ignored.string() + "'").code == 0);
  CHECK(fs::exists(flag_dir / "count.csv"));
  CHECK_FALSE(fs::exists(ignored / "count.csv"));

  const fs::path cfg_dir = scratch("cfg");
  {
    std::ofstream cfg(cfg_dir / "run.cfg");
    cfg << "# small count\ncount_n_max = 4\ncount_d_max = 2\noutput_dir = " << (cfg_dir / "out").string() << "\n";
  }
  REQUIRE(run("count --config '" + (cfg_dir / "run.cfg").string() + "'").code == 0);
  const std::string csv = slurp(cfg_dir / "out" / "count.csv");
  CHECK(csv.find("\n4,2,") != std::string::npos);
  CHECK(csv.find("\n4,3,") == std::string::npos);

  {
    std::ofstream cfg(cfg_dir / "bad.cfg");
    cfg << "colour = blue\n";
  }
  const Run bad = run("count --config '" + (cfg_dir / "bad.cfg").string() + "'");
  CHECK(bad.code == 2);
  CHECK(bad.err.find("unknown key") != std::string::npos);
}
