#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "vaxsde/cli.hpp"
#include "vaxsde/csv.hpp"
#include "vaxsde/scenario.hpp"

using namespace vaxsde;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"(# minimal
[params]
mu = 0.02
beta = 100
gamma = 16.59090909090909
kappa = 1.69
omega = 0.1
delta = 0.5
sigma1_sq = 0.16
sigma2_sq = 0.15
sigma3_sq = 0.2

[initial]
S = 0.4
I = 0.4
x = 0.8
)";

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("vaxsde_test_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int cli(std::vector<std::string> args, std::string* out = nullptr, std::string* err = nullptr) {
  args.insert(args.begin(), "vaxsde");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return code;
}

}  // namespace

TEST_CASE("bundled scenarios round-trip through serialization") {
  for (const char* name : {"fig1a", "fig1b", "fig2b", "fig3b", "fig3c", "fig4", "fig5a", "fig5b", "fig6"}) {
    CAPTURE(name);
    const Scenario s = load_scenario(resolve_scenario_path(name));
    CHECK_NOTHROW(s.validate());
    CHECK(parse_scenario_text(serialize(s)) == s);
    CHECK(one_line(s).find('\n') == std::string::npos);
  }
}

TEST_CASE("scenario parsing defaults and errors") {
  const Scenario s = parse_scenario_text(kMinimal);
  CHECK(s.params.beta == 100.0);
  CHECK(s.initial.x == 0.8);
  CHECK_FALSE(s.sweep);
  CHECK_FALSE(s.control);
  CHECK(s.integrator == IntegratorConfig{});

  CHECK_THROWS_WITH_AS(parse_scenario_text(std::string(kMinimal) + "bogus = 1\n"), doctest::Contains("bogus"),
                       ScenarioError);
  CHECK_THROWS_AS(parse_scenario_text(std::string(kMinimal) + "[nonsense]\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario_text(std::string(kMinimal) + "x = 0.2\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario_text(std::string(kMinimal) + "[run]\nseed = -4\n"), ScenarioError);

  const std::string control = std::string(kMinimal) + "[control]\nalpha1 = 0\nalpha2 = 1000\nu_max = 0.8\nt_final = 150\n";
  CHECK_THROWS_WITH_AS(parse_scenario_text(control), doctest::Contains("alpha3"), ScenarioError);
  CHECK_NOTHROW(parse_scenario_text(control + "alpha3 = 100\n"));

  std::string no_beta = kMinimal;
  no_beta.erase(no_beta.find("beta = 100\n"), 11);
  CHECK_THROWS_WITH_AS(parse_scenario_text(no_beta), doctest::Contains("beta"), ScenarioError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/file.scn"), ScenarioError);
}

TEST_CASE("number formatting is shortest round-trip") {
  CHECK(format_real(0.1) == "0.1");
  CHECK(format_real(1.0 / 3.0) == "0.3333333333333333");
  CHECK(format_real(1e-300) == "1e-300");
  CHECK(format_real(std::nan("")) == "nan");
}

TEST_CASE("absorption csv reader drops a truncated last row") {
  AbsorptionCell a{0.1, 0.5, 0.3, 200, 120, 0.6, 0.0346, 0, ""};
  AbsorptionCell b = a;
  b.x0 = 0.4;
  std::ostringstream os;
  write_absorption_header(os, "hdr");
  write_absorption_row(os, a);
  write_absorption_row(os, b);
  const std::string full = os.str();

  std::istringstream in(full);
  auto f = read_absorption_csv(in);
  CHECK(f.header == "hdr");
  REQUIRE(f.rows.size() == 2);
  CHECK(f.rows[1].x0 == 0.4);
  CHECK(f.rows[0].p_hat == 0.6);
  CHECK(f.rows[0].n == 200);

  std::istringstream cut(full.substr(0, full.size() - 5));
  CHECK(read_absorption_csv(cut).rows.size() == 1);
  std::istringstream no_newline(full.substr(0, full.size() - 1));
  CHECK(read_absorption_csv(no_newline).rows.size() == 1);

  AbsorptionCell failed = a;
  failed.error = "boom";
  std::ostringstream fs_;
  write_absorption_row(fs_, failed);
  CHECK(fs_.str().find("nan") != std::string::npos);
}

TEST_CASE("path csv layout") {
  Path p;
  p.times = {0.0, 0.5};
  p.states = {State{0.4, 0.4, 0.5}, State{0.3, 0.45, 0.5}};
  std::ostringstream os;
  write_path_csv(os, "scenario=x seed=1", p);
  CHECK(os.str() == "# scenario=x seed=1\nt,S,I,x\n0,0.4,0.4,0.5\n0.5,0.3,0.45,0.5\n");
}

TEST_CASE("cli report") {
  std::string out;
  REQUIRE(cli({"report", "--scenario", "fig1a"}, &out) == 0);
  CHECK(out.find("r0=1.866") != std::string::npos);
  CHECK(out.find("r0s=0.980") != std::string::npos);
  CHECK(out.find("extinction=CII") != std::string::npos);

  REQUIRE(cli({"report", "--scenario", "fig5b"}, &out) == 0);
  CHECK(out.find("s_d=0.1679") != std::string::npos);
  CHECK(out.find("hit_s=0.832") != std::string::npos);

  REQUIRE(cli({"report", "--scenario", "fig5a"}, &out) == 0);
  CHECK(out.find("r0s=r0") != std::string::npos);

  CHECK(cli({"report", "--scenario", "no_such_scenario"}) == 2);
  CHECK(cli({"frobnicate"}) != 0);
}

TEST_CASE("cli simulate is reproducible and echoes overrides") {
  TempDir a("sim_a"), b("sim_b");
  const std::vector<std::string> base = {"simulate", "--scenario", "fig1a", "--seed", "42", "--t-end", "2", "--dt", "0.002"};
  auto args_a = base, args_b = base;
  args_a.insert(args_a.end(), {"--out", a.path.string()});
  args_b.insert(args_b.end(), {"--out", b.path.string()});
  std::string out;
  REQUIRE(cli(args_a, &out) == 0);
  REQUIRE(cli(args_b) == 0);
  const auto csv_a = slurp(a.path / "fig1a_path.csv");
  CHECK(csv_a == slurp(b.path / "fig1a_path.csv"));
  CHECK(csv_a.rfind("# vaxsde simulate scenario=fig1a seed=42 ", 0) == 0);
  CHECK(csv_a.substr(0, csv_a.find('\n')).find("dt=0.002") != std::string::npos);
  CHECK(out.find("I_absorbed") != std::string::npos);
}

TEST_CASE("cli sweep on a single cell, then resumes") {
  TempDir dir("sweep");
  const auto scn = dir.path / "tiny.scn";
  {
    std::ofstream f(scn);
    f << kMinimal << "[integrator]\nt_end = 1\ndt = 0.01\n[sweep]\nsigma2_sq = 0.15\nsigma3_sq = 0.2\nx0 = 0.8\nn_per_cell = 1\n";
  }
  std::string out, err;
  REQUIRE(cli({"sweep", "--scenario", scn.string(), "--out", dir.path.string()}, &out, &err) == 0);
  const auto file = dir.path / "tiny_absorption.csv";
  const auto first = slurp(file);
  std::istringstream in(first);
  const auto table = read_absorption_csv(in);
  REQUIRE(table.rows.size() == 1);
  CHECK(table.rows[0].n == 1);

  REQUIRE(cli({"sweep", "--scenario", scn.string(), "--out", dir.path.string()}, &out, &err) == 0);
  CHECK(err.find("resuming after 1") != std::string::npos);
  CHECK(slurp(file) == first);
}
