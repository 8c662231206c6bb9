#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// stdout of `holomet <args>`; stderr is folded in when `merge` is set
Run run(const std::string& args, bool merge = false) {
  const std::string cmd = std::string(HOLOMET_CLI) + " " + args + (merge ? " 2>&1" : " 2>/dev/null");
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

nlohmann::json parse(const Run& r) { return nlohmann::json::parse(r.out); }

}  // namespace

TEST_CASE("distance examples") {
  const Run e = run("distance --p 2 --n 2 --x 0.5,0 --y 0,0.5");
  REQUIRE(e.code == 0);
  CHECK(parse(e)["s"].get<double>() == doctest::Approx(0.661438).epsilon(1e-6));
  const Run inf = run("distance --p inf --n 2 --x 0,0 --y 0.5,0.2");
  REQUIRE(inf.code == 0);
  CHECK(parse(inf)["distance"].get<double>() == doctest::Approx(0.549306).epsilon(1e-6));
  const Run poly = run("polydisc --x 0,0 --y 0.5,0.2i");
  REQUIRE(poly.code == 0);
  CHECK(parse(poly)["distance"] == parse(inf)["distance"]);
}

TEST_CASE("solve output verifies") {
  const auto dir = std::filesystem::temp_directory_path() / "holomet_cli_test";
  std::filesystem::create_directories(dir);
  const auto file = dir / "geod.json";
  for (const char* p : {"1", "1.5", "3"}) {
    const Run s = run(std::string("solve --p ") + p + " --x 0.3+0.1i,-0.2,0.1 --y 0.1,0.4i,-0.2");
    REQUIRE(s.code == 0);
    std::ofstream(file) << s.out;
    const Run v = run("verify --params " + file.string());
    CHECK(v.code == 0);
    CHECK(parse(v)["pass"] == true);
  }
}

TEST_CASE("verification failure exits 4") {
  const auto file = std::filesystem::temp_directory_path() / "holomet_cli_bad.json";
  std::ofstream(file) << R"({"p": 2, "gamma": [0, 0], "alpha": [[0, 0], [0, 0]], "beta": [1, 0], "c": [[1.1, 0], [0, 0]]})";
  const Run v = run("verify --params " + file.string());
  CHECK(v.code == 4);
  CHECK(parse(v)["verdict"]["constraints"] == false);
}

TEST_CASE("exit codes and error objects") {
  const Run outside = run("distance --p 2 --x 1.2,0 --y 0,0.5", true);
  CHECK(outside.code == 2);
  CHECK(parse(outside).contains("error"));
  CHECK(run("distance --p 2 --x 0.1,0 --y 0.1,0").code == 2);
  CHECK(run("distance --p 2 --n 3 --x 0.1,0 --y 0,0.1").code == 2);
  CHECK(run("distance --p 0.5 --x 0.1,0 --y 0,0.1").code == 2);
  CHECK(run("distance --x 0.1,0 --y zz").code == 2);
  CHECK(run("distance --x 0.1,0 --y 0,0.1 --beta sometimes").code == 2);
  CHECK(run("verify --params /nonexistent/geod.json").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("").code == 2);
  CHECK(run("distance --p 2 --x 0.5,0 --y 0,0.5 --max-iterations 3").code == 2);
}

TEST_CASE("deterministic output") {
  const std::string args = "solve --p 1.5 --x 0.2,0.3i --y -0.4,0.1 --seed 7";
  const Run a = run(args), b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const std::string mod = "modulus --p 1 --n 2 --eps 0.1,0.01 --trials 4 --format csv";
  CHECK(run(mod).out == run(mod).out);
}

TEST_CASE("csv tables") {
  const Run m = run("modulus --p 1 --n 2 --eps 0.1,0.01 --trials 4 --format csv");
  REQUIRE(m.code == 0);
  CHECK(m.out.rfind("epsilon,delta,omega_c,slope\n0.1,0.435889894354,", 0) == 0);
  const Run c = run("curvature --p 2 --n 2 --samples 2 --format csv");
  REQUIRE(c.code == 0);
  CHECK(c.out.rfind("index,kappa,metric,check_gap\n0,-4", 0) == 0);
  const Run j = run("curvature --p 2 --x 0.2,0.1 --v 1,1");
  REQUIRE(j.code == 0);
  CHECK(parse(j)["kappa"].get<double>() == doctest::Approx(-4.0).epsilon(1e-3));
}

TEST_CASE("direct sums are experimental") {
  const Run d = run("distance --n1 1 --n2 1 --p1 1 --p2 2 --r 3 --x 0.2,0.1 --y -0.1,0.3i");
  REQUIRE(d.code == 0);
  CHECK(parse(d)["experimental"] == true);
}
