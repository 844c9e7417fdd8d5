#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(CLI_BIN_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("gronwall_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("missing seed exits with code 2") {
  const auto save = std::getenv("GRONWALL_LAB_SEED");
  REQUIRE(save == nullptr);  // test environment must not preseed
  const auto dir = fresh_dir("noseed");
  CHECK(run_cli("jump --p 0.5 --out " + dir.string()) == 2);
}

TEST_CASE("env var seed is accepted, flag wins") {
  const auto dir = fresh_dir("envseed");
  setenv("GRONWALL_LAB_SEED", "5", 1);
  CHECK(run_cli("jump --p 0.5 --out " + (dir / "a").string()) == 0);
  CHECK(run_cli("jump --p 0.5 --seed 5 --out " + (dir / "b").string()) == 0);
  unsetenv("GRONWALL_LAB_SEED");
  CHECK(slurp(dir / "a" / "jump.json") == slurp(dir / "b" / "jump.json"));
}

TEST_CASE("bad config exits with code 2") {
  const auto dir = fresh_dir("badcfg");
  const auto cfg = dir / "bad.ini";
  std::ofstream(cfg) << "seed = 1\n[x]\ntarget = nope\n";
  CHECK(run_cli("run " + cfg.string()) == 2);
  CHECK(run_cli("run " + (dir / "missing.ini").string()) == 2);
}

TEST_CASE("constraint violations exit with code 2") {
  const auto dir = fresh_dir("constraint");
  CHECK(run_cli("gronwall --p 0.5 --mu 2 --nu 2 --seed 1 --n 1000 --out " +
                dir.string()) == 2);  // p nu >= 1
  CHECK(run_cli("prop1 --model bogus --seed 1 --out " + dir.string()) == 2);
}

TEST_CASE("jump subcommand writes parseable reports and passes") {
  const auto dir = fresh_dir("jump");
  CHECK(run_cli("jump --p 0.5 --q-grid 1.0 --delta-grid 0.1:0.9:0.1 "
                "--seed 3 --out " +
                dir.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "jump.json"));
  CHECK(j.at("pass").get<bool>());
  for (const auto& row : j.at("rows")) {
    CHECK(row.at("grid_supremum").get<double>() <= 1.0 + 1e-12);
  }
  CHECK(fs::exists(dir / "jump.csv"));
  CHECK(fs::exists(dir / "summary.csv"));
}

TEST_CASE("config run is deterministic across invocations and workers") {
  const auto dir = fresh_dir("determinism");
  const auto cfg_path = dir / "small.ini";
  {
    std::ofstream cfg(cfg_path);
    cfg << "seed = 7\n"
           "out = " << (dir / "r1").string() << "\n"
           "[jump-scan]\n"
           "target = jump\n"
           "p = 0.5\n"
           "[sharp]\n"
           "target = sharpness\n"
           "p = 0.25\n"
           "n = 20000\n"
           "[divergence-demo]\n"
           "target = divergence\n"
           "n = 20000\n";
  }
  CHECK(run_cli("run " + cfg_path.string()) == 0);
  const std::string first = slurp(dir / "r1" / "sharp.json") +
                            slurp(dir / "r1" / "jump-scan.json") +
                            slurp(dir / "r1" / "summary.csv");
  // Rerun with a worker pool; files are overwritten in place.
  CHECK(run_cli("run " + cfg_path.string() + " --workers 3") == 0);
  const std::string second = slurp(dir / "r1" / "sharp.json") +
                             slurp(dir / "r1" / "jump-scan.json") +
                             slurp(dir / "r1" / "summary.csv");
  CHECK(first == second);
}

TEST_CASE("constants subcommand emits the documented columns") {
  const auto dir = fresh_dir("constants");
  CHECK(run_cli("constants --p-grid 0.1:0.9:0.1 --seed 1 --out " +
                dir.string()) == 0);
  const std::string csv = slurp(dir / "constants.csv");
  CHECK(csv.find("p,pi_p_over_sin,c_p,improved_constant") == 0);
  // Spot row p = 0.5: c_p = pi.
  CHECK(csv.find("3.141592653589") != std::string::npos);
}
