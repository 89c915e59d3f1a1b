#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "config.hpp"
#include "output.hpp"

using namespace gspt::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  const fs::path d = fs::temp_directory_path() / "gspt_cli_test";
  fs::create_directories(d);
  return d;
}

int run(const std::string& args) {
  const std::string cmd = std::string(GSPT_EXE) + " " + args + " --quiet > /dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

fs::path write(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("CSV writer quoting and number format") {
  CsvWriter w({"a", "b,c"});
  w.row().add(0.1).add("x\"y");
  CHECK(w.str() == "a,\"b,c\"\r\n0.10000000000000001,\"x\"\"y\"\r\n");
  CHECK(format_double(1.0 / 0.0) == "inf");
}

TEST_CASE("config parsing: ladders and unknown keys") {
  const RunConfig c = parse_config(R"({"model": {"name": "minimal"}, "eps": {"min": 1e-4, "max": 1e-2, "count": 3}})");
  REQUIRE(c.eps.size() == 3);
  CHECK(c.eps[0] == 1e-4);
  CHECK(c.eps[1] == doctest::Approx(1e-3));
  CHECK(c.eps[2] == 1e-2);
  try {
    parse_config(R"({"model": {"name": "minimal", "parms": {}}})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.where == "/model/parms");
  }
  try {
    parse_config("{\n\"eps\": 1,,\n}");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.where.find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config(R"({"eps": -1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"model": {"name": "nope"}})"), ConfigError);
}

TEST_CASE("analyze on the minimal model writes one contact point") {
  const fs::path cfg = write("analyze.json", R"({"model": {"name": "minimal"}})");
  const fs::path out = scratch() / "analyze";
  REQUIRE(run("analyze --config " + cfg.string() + " --out " + out.string()) == 0);
  CHECK(slurp(out / "contact_points.csv") == "x,y,order,regular,jump\r\n1,0,1,true,off\r\n");
  const std::string svg = slurp(out / "phase_portrait.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("stroke=\"green\"") != std::string::npos);
  CHECK(svg.find("fill=\"red\"") != std::string::npos);
}

TEST_CASE("strokes corners are 2 and 4") {
  const fs::path cfg = write("strokes.json", R"({"strokes": {"eps": [0.01, 5], "delta": [0.01, 5]}})");
  const fs::path out = scratch() / "strokes";
  REQUIRE(run("strokes --config " + cfg.string() + " --out " + out.string()) == 0);
  const std::string csv = slurp(out / "phase_diagram.csv");
  CHECK(csv.find("0.01,5,2\r\n") != std::string::npos);
  CHECK(csv.find("5,0.01,4\r\n") != std::string::npos);
}

TEST_CASE("list-models prints six rows") {
  const fs::path out = scratch() / "models";
  REQUIRE(run("list-models --out " + out.string()) == 0);
  const std::string csv = slurp(out / "models.csv");
  int lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 7);  // header + 6
}

TEST_CASE("exit codes") {
  CHECK(run("analyze --config " + write("bad.json", R"({"modle": 1})").string()) == 2);
  CHECK(run("analyze --config /nonexistent.json") == 2);
  CHECK(run("analyze") == 2);
  const fs::path neg = write("neg.json", R"({"riccati": {"b1": -1}})");
  CHECK(run("riccati --config " + neg.string() + " --out " + (scratch() / "neg").string()) == 3);
}

TEST_CASE("identical config gives byte-identical CSV") {
  const fs::path cfg = write("ric.json", R"({"riccati": {"count": 51}})");
  REQUIRE(run("riccati --config " + cfg.string() + " --out " + (scratch() / "r1").string()) == 0);
  REQUIRE(run("riccati --config " + cfg.string() + " --out " + (scratch() / "r2").string()) == 0);
  CHECK(slurp(scratch() / "r1" / "riccati.csv") == slurp(scratch() / "r2" / "riccati.csv"));
  CHECK(slurp(scratch() / "r1" / "riccati_summary.csv") == slurp(scratch() / "r2" / "riccati_summary.csv"));
}
