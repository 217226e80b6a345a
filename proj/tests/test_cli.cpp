#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "emon/report.hpp"

namespace fs = std::filesystem;

namespace {

std::string g_emon;

// ----- process helpers -----

int run_cli(const std::string& args, const std::string& stdout_file = "") {
  std::string cmd = g_emon + " " + args;
  if (stdout_file.empty())
    cmd += " >/dev/null 2>&1";
  else
    cmd += " >" + stdout_file + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() /
           ("emon_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str(const std::string& child = "") const {
    return child.empty() ? path.string() : (path / child).string();
  }
};

// Drops the timestamp line and the output-directory echo, which legitimately
// differ between runs that should otherwise be byte-identical.
std::vector<std::string> stable_lines(const std::string& file) {
  std::ifstream in(file);
  REQUIRE(in.good());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line))
    if (line.find("generated_at") == std::string::npos &&
        line.find("\"output\"") == std::string::npos)
      out.push_back(line);
  return out;
}

emon::Json read_json(const std::string& file) {
  std::ifstream in(file);
  REQUIRE(in.good());
  emon::Json j;
  in >> j;
  return j;
}

}  // namespace

// ----- determinism -----

TEST_CASE("same seed gives byte-identical reports") {
  TempDir dir("det");
  const std::string args =
      " --seed 7 classical-min --functional z2 --delta 0.5 --v 0.5"
      " --restarts 6";
  CHECK(run_cli("--output " + dir.str("a") + args) == 0);
  CHECK(run_cli("--output " + dir.str("b") + args) == 0);
  CHECK(stable_lines(dir.str("a") + "/classical_min.json") ==
        stable_lines(dir.str("b") + "/classical_min.json"));

  const std::string sweep = " --seed 3 sweep-d --model hq1 --d 4,6";
  CHECK(run_cli("--output " + dir.str("c") + sweep) == 0);
  CHECK(run_cli("--output " + dir.str("d") + sweep) == 0);
  CHECK(stable_lines(dir.str("c") + "/sweep_d.csv") ==
        stable_lines(dir.str("d") + "/sweep_d.csv"));
  CHECK(stable_lines(dir.str("c") + "/sweep_d.json") ==
        stable_lines(dir.str("d") + "/sweep_d.json"));
}

// ----- dry run -----

TEST_CASE("dry run validates and writes nothing") {
  TempDir dir("dry");
  const std::string out = dir.str("never_created");
  CHECK(run_cli("--output " + out + " --dry-run two-site --restarts 4") == 0);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("dry run prints the resolved plan") {
  TempDir dir("plan");
  const std::string plan_file = dir.str("plan.json");
  CHECK(run_cli("--output " + dir.str("x") +
                    " --seed 11 --dry-run berry --steps 32",
                plan_file) == 0);
  const emon::Json plan = read_json(plan_file);
  CHECK(plan.at("dry_run").get<bool>());
  CHECK(plan.at("config").at("command").get<std::string>() == "berry");
  CHECK(plan.at("config").at("seed").get<int>() == 11);
  CHECK(plan.at("config").at("steps").get<int>() == 32);
  REQUIRE(plan.at("artifacts").size() == 1);
  const std::string artifact = plan.at("artifacts")[0].get<std::string>();
  CHECK(artifact.find("berry.json") != std::string::npos);
}

// ----- config handling -----

TEST_CASE("config file fills options and flags take precedence") {
  TempDir dir("cfg");
  {
    std::ofstream cfg(dir.str("cfg.json"));
    cfg << R"({"seed": 42, "two-site": {"restarts": 7, "lambda": 0.5}})";
  }
  const std::string base =
      "--config " + dir.str("cfg.json") + " --dry-run two-site";

  const std::string plain = dir.str("plain.json");
  CHECK(run_cli(base, plain) == 0);
  emon::Json cfg = read_json(plain).at("config");
  CHECK(cfg.at("seed").get<int>() == 42);
  CHECK(cfg.at("restarts").get<int>() == 7);
  CHECK(cfg.at("lambda").get<double>() == doctest::Approx(0.5));

  const std::string flags = dir.str("flags.json");
  CHECK(run_cli(base + " --seed 100 --restarts 3", flags) == 0);
  cfg = read_json(flags).at("config");
  CHECK(cfg.at("seed").get<int>() == 100);
  CHECK(cfg.at("restarts").get<int>() == 3);
  CHECK(cfg.at("lambda").get<double>() == doctest::Approx(0.5));
}

TEST_CASE("sections for other commands are ignored") {
  TempDir dir("other");
  {
    std::ofstream cfg(dir.str("cfg.json"));
    cfg << R"({"basis": {"d": 6}, "berry": {"steps": 16}})";
  }
  const std::string plan = dir.str("plan.json");
  CHECK(run_cli("--config " + dir.str("cfg.json") + " --dry-run berry", plan) ==
        0);
  CHECK(read_json(plan).at("config").at("steps").get<int>() == 16);
}

TEST_CASE("unknown config keys are rejected") {
  TempDir dir("badkey");
  {
    std::ofstream cfg(dir.str("top.json"));
    cfg << R"({"bogus_key": 1})";
  }
  CHECK(run_cli("--config " + dir.str("top.json") + " basis") == 2);
  {
    std::ofstream cfg(dir.str("nested.json"));
    cfg << R"({"basis": {"bogus": 1}})";
  }
  CHECK(run_cli("--config " + dir.str("nested.json") + " basis") == 2);
  {
    std::ofstream cfg(dir.str("broken.json"));
    cfg << "{ not json";
  }
  CHECK(run_cli("--config " + dir.str("broken.json") + " basis") == 2);
  CHECK(run_cli("--config " + dir.str("missing.json") + " basis") == 2);
}

// ----- exit codes -----

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("basis --nonsense") == 2);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("no-such-command") == 2);
  TempDir dir("usage");
  CHECK(run_cli("--output " + dir.str("x") +
                " skyrmion-check --demo no_such_demo") == 2);
  CHECK(run_cli("--output " + dir.str("x") + " symplectic-check --alpha 0") ==
        2);
}

TEST_CASE("degenerate doublets exit with code 3") {
  TempDir dir("ambig");
  CHECK(run_cli("--output " + dir.str("x") +
                " noise-report --model hq0 --delta 0 --policy plain") == 3);
}

TEST_CASE("help exits cleanly") {
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("spectrum --help") == 0);
}

// ----- report format -----

TEST_CASE("csv reports carry a timestamp line, header, and fixed format") {
  TempDir dir("csv");
  CHECK(run_cli("--output " + dir.str() + " coherent-check --d-list 2,4") == 0);
  std::ifstream in(dir.str("coherent_check.csv"));
  REQUIRE(in.good());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line.rfind("# generated_at=", 0) == 0);
  REQUIRE(std::getline(in, line));
  CHECK(line == "d,quantum,classical,deviation");
  REQUIRE(std::getline(in, line));
  std::stringstream row(line);
  std::vector<std::string> cells;
  std::string cell;
  while (std::getline(row, cell, ',')) cells.push_back(cell);
  REQUIRE(cells.size() == 4);
  CHECK(cells[0] == "2");
  // 12 significant digits in scientific notation
  CHECK(cells[1].find('e') != std::string::npos);
  CHECK(cells[1].size() >= 17);
}

TEST_CASE("json reports carry schema, timestamp, and config echo") {
  TempDir dir("json");
  CHECK(run_cli("--output " + dir.str() + " --seed 5 berry --steps 32") == 0);
  const emon::Json report = read_json(dir.str("berry.json"));
  CHECK(report.at("schema_version").get<std::string>() == "1.0");
  CHECK(report.contains("generated_at"));
  CHECK(report.at("config").at("command").get<std::string>() == "berry");
  CHECK(report.at("config").at("seed").get<int>() == 5);
  CHECK(report.contains("phase"));
}

TEST_CASE("output directories are created on demand") {
  TempDir dir("mkdir");
  const std::string nested = dir.str("a/b/c");
  CHECK(run_cli("--output " + nested + " basis --d 4") == 0);
  CHECK(fs::exists(nested + "/basis.json"));
}

TEST_CASE("demo textures are written next to the skyrmion report") {
  TempDir dir("demo");
  CHECK(run_cli("--output " + dir.str() +
                " skyrmion-check --demo winding --n 24") == 0);
  CHECK(fs::exists(dir.str("texture_winding.csv")));
  const emon::Json report = read_json(dir.str("skyrmion_check.json"));
  CHECK(std::abs(report.at("re_z").get<double>()) < 1e-10);
  CHECK(std::abs(report.at("im_z").get<double>()) < 1e-10);

  // the emitted texture file round-trips through --texture
  TempDir dir2("demo2");
  CHECK(run_cli("--output " + dir2.str() + " skyrmion-check --texture " +
                dir.str("texture_winding.csv")) == 0);
  CHECK(run_cli("--output " + dir2.str() +
                " skyrmion-check --demo winding --texture x.csv") == 2);
  CHECK(run_cli("--output " + dir2.str() + " skyrmion-check") == 2);
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli [doctest options] <emon binary>\n");
    return 1;
  }
  g_emon = argv[argc - 1];
  doctest::Context context;
  context.applyCommandLine(argc - 1, argv);
  return context.run();
}
