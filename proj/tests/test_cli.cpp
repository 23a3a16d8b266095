#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "polylat/rule_io.hpp"

using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::filesystem::path scratch() {
  static const auto dir = [] {
    auto d = std::filesystem::temp_directory_path() / ("polylat_cli_" + std::to_string(::getpid()));
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& args) {
  const auto out = scratch() / "stdout";
  const auto err = scratch() / "stderr";
  const std::string cmd = std::string(POLYLAT_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string path(const std::string& name) { return (scratch() / name).string(); }

}  // namespace

TEST_CASE("degenerate construct") {
  const auto r = run("construct -s 1 -m 0 --alpha 2 --weights prod:1.0");
  REQUIRE(r.code == 0);
  const auto f = polylat::read_rule(r.out);
  CHECK(f.rule.s == 1);
  CHECK(f.rule.generators.size() == 1);
  CHECK(f.provenance.construction == "cbc_fast");
}

TEST_CASE("construct, criterion and points") {
  const std::string rule = path("r.json");
  const std::string report = path("report.json");
  REQUIRE(run("construct -s 3 -m 6 --weights prod:0.5^j -o " + rule + " --report " + report).code == 0);
  const auto rep = json::parse(slurp(report));
  CHECK(rep["bound_holds"] == true);
  CHECK(rep["steps"].size() == 3);

  const auto a = run("criterion --rule " + rule);
  const auto b = run("criterion --rule " + rule);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto crit = json::parse(a.out);
  CHECK(crit["value"].get<double>() > 0);
  CHECK(crit["lambda_bounds"].size() > 10);
  CHECK(crit["value"].get<double>() == doctest::Approx(rep["B"].get<double>()).epsilon(1e-12));

  const auto orc = json::parse(run("criterion --rule " + rule + " --oracle 4096").out);
  CHECK(std::fabs(orc["oracle"]["value"].get<double>() - orc["value"].get<double>()) <=
        orc["oracle"]["tail"].get<double>() + 1e-15);

  const auto csv = run("points --rule " + rule + " --seed 3");
  REQUIRE(csv.code == 0);
  CHECK(std::count(csv.out.begin(), csv.out.end(), '\n') == 64);
  CHECK(csv.out == run("points --rule " + rule + " --seed 3").out);
  CHECK(csv.out != run("points --rule " + rule + " --seed 3 --replicate 1").out);

  REQUIRE(run("points --rule " + rule + " --format bin -o " + path("p.bin")).code == 0);
  std::ifstream in(path("p.bin"), std::ios::binary);
  const auto pts = polylat::read_points_binary(in);
  CHECK(pts.s == 3);
  CHECK(pts.points.size() == 64);
  CHECK(pts.points.precision() == 6);
}

TEST_CASE("integrate and convergence") {
  const std::string rule = path("r2.json");
  REQUIRE(run("construct -s 2 -m 5 --weights prod:1,0.5 -o " + rule).code == 0);
  const auto r = run("integrate --rule " + rule + " --integrand b2prod -R 4 --seed 1");
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["per_replicate"].size() == 4);
  CHECK(j["exact"] == 1.0);
  CHECK(r.out == run("integrate --rule " + rule + " --integrand b2prod -R 4 --seed 1").out);

  const auto c = run("convergence -s 2 --alpha 2 --weights prod:0.5^j --m-lo 3 --m-hi 5 -R 4 --no-mse");
  REQUIRE(c.code == 0);
  CHECK(c.out.rfind("m,N,mprime,B,mse_mean,mse_stderr,rms_err", 0) == 0);
  CHECK(std::count(c.out.begin(), c.out.end(), '\n') == 4);
}

TEST_CASE("general weights through the CLI") {
  {
    std::ofstream out(path("w.json"));
    out << R"([{"u": [1], "gamma": 1}, {"u": [2], "gamma": 0.5}, {"u": [1, 2], "gamma": 0.1}])";
  }
  const auto r = run("construct -s 2 -m 4 --weights general:@" + path("w.json"));
  REQUIRE(r.code == 0);
  CHECK(polylat::read_rule(r.out).provenance.construction == "cbc_slow");
  const auto bad = run("construct -s 2 -m 4 --method fast --weights general:@" + path("w.json"));
  CHECK(bad.code != 0);
}

TEST_CASE("errors are reported as JSON") {
  for (const std::string args : {"construct -s 2 -m 4 --weights prod:x", "criterion --rule /nonexistent.json",
                                 "construct -s 2 -m 8 --mprime 4 --weights prod:1", "frobnicate", ""}) {
    const auto r = run(args);
    CHECK(r.code != 0);
    const auto j = json::parse(r.err);
    CHECK(j["error"]["message"].get<std::string>().size() > 0);
    CHECK(j["error"]["kind"].is_string());
  }
  {
    std::ofstream out(path("broken.json"));
    out << "{\"version\": 1}";
  }
  const auto r = run("criterion --rule " + path("broken.json"));
  CHECK(r.code != 0);
  CHECK(json::parse(r.err)["error"]["kind"] == "validation");
}

TEST_CASE("selftest and help") {
  const auto s = run("selftest");
  CHECK(s.code == 0);
  CHECK(s.out.find("FAIL") == std::string::npos);
  const auto c = run("selftest --constants");
  REQUIRE(c.code == 0);
  CHECK(json::parse(c.out)["constants"][0]["D_alpha"]["exact"] == "59/144");
  CHECK(run("--help").code == 0);
  CHECK(run("--version").out.find(polylat::kToolVersion) != std::string::npos);
}
