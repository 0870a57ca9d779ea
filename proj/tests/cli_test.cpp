#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* p = std::getenv("SWAPREGRET_CLI");
  REQUIRE_MESSAGE(p != nullptr, "SWAPREGRET_CLI must point at the cli binary");
  return p;
}

int run(const std::string& args) {
  std::string cmd = cli_path() + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE_MESSAGE(is.good(), "missing output file " + p.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("swapregret-cli-test-" + tag);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("unknown experiment kinds exit with the usage code") {
  CHECK(run("--experiment no-such-thing --out " + temp_dir("usage").string()) == 2);
}

TEST_CASE("module errors surface as nonzero exits") {
  // hardseq with n mismatch inside the adversary mapping.
  CHECK(run("--experiment regret-curve --adversary hardseq --n 5 --K 2 --L 1 --out " +
            temp_dir("err").string()) == 1);
}

TEST_CASE("same config and seed produce byte-identical artifacts") {
  fs::path a = temp_dir("det-a");
  fs::path b = temp_dir("det-b");
  std::string base =
      " --experiment hardseq --K 2 --L 3 --delta 0.05 --seed 77 --out ";
  REQUIRE(run(base + a.string()) == 0);
  REQUIRE(run(base + b.string()) == 0);
  CHECK(slurp(a / "hardseq_stream.csv") == slurp(b / "hardseq_stream.csv"));
  CHECK(slurp(a / "hardseq_summary.csv") == slurp(b / "hardseq_summary.csv"));
}

TEST_CASE("config file entries override flags") {
  fs::path dir = temp_dir("config");
  fs::create_directories(dir);
  fs::path cfg = dir / "run.cfg";
  {
    std::ofstream os(cfg);
    os << "seed 123\n";
    os << "L 2\n";
  }
  fs::path out1 = temp_dir("config-a");
  fs::path out2 = temp_dir("config-b");
  // Flag says L=1 seed=5, but the config forces L=2 seed=123.
  REQUIRE(run("--experiment hardseq --K 2 --L 1 --seed 5 --config " + cfg.string() + " --out " +
              out1.string()) == 0);
  REQUIRE(run("--experiment hardseq --K 2 --L 2 --seed 123 --out " + out2.string()) == 0);
  CHECK(slurp(out1 / "hardseq_stream.csv") == slurp(out2 / "hardseq_stream.csv"));
}

TEST_CASE("eq3 experiment emits the bound column and ends consistent") {
  fs::path dir = temp_dir("eq3");
  REQUIRE(run("--experiment eq3-check --n 4 --H 4 --S 2 --adversary adaptive --seed 3 --out " +
              dir.string()) == 0);
  std::ifstream is(dir / "eq3_check.csv");
  std::string header;
  std::getline(is, header);
  CHECK(header == "day,swap_regret_so_far,eq3_bound");
  std::string line;
  std::string last;
  std::int64_t rows = 0;
  while (std::getline(is, line)) {
    if (!line.empty()) {
      last = line;
      ++rows;
    }
  }
  CHECK(rows == 256);
  auto c1 = last.find(',');
  auto c2 = last.find(',', c1 + 1);
  double swap = std::strtod(last.substr(c1 + 1, c2 - c1 - 1).c_str(), nullptr);
  double bound = std::strtod(last.substr(c2 + 1).c_str(), nullptr);
  CHECK(swap <= bound);
}

TEST_CASE("worker count does not change results") {
  fs::path a = temp_dir("workers-a");
  fs::path b = temp_dir("workers-b");
  std::string base = "--experiment twocoin --runs 2000 --delta 0.05 --seed 11 --out ";
  REQUIRE(std::system(("SWAPREGRET_WORKERS=1 " + cli_path() + " " + base + a.string() +
                       " > /dev/null 2>&1").c_str()) == 0);
  REQUIRE(std::system(("SWAPREGRET_WORKERS=8 " + cli_path() + " " + base + b.string() +
                       " > /dev/null 2>&1").c_str()) == 0);
  CHECK(slurp(a / "twocoin_gains.csv") == slurp(b / "twocoin_gains.csv"));
}
