#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "shiftmod/json_io.hpp"
#include "shiftmod/run.hpp"

using namespace shiftmod;

namespace {

std::string fixture(const std::string& name) { return std::string(SHIFTMOD_FIXTURE_DIR) + "/" + name; }

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("shiftmod_cli_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> failing_checks(const json& report) {
  std::vector<std::string> out;
  for (const auto& st : report["stages"])
    for (const auto& c : st["checks"])
      if (!c["pass"].get<bool>()) out.push_back(st["stage"].get<std::string>() + "/" + c["name"].get<std::string>());
  return out;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("command names") {
    CHECK(parse_command("reconstruct") == Command::reconstruct);
    CHECK(parse_command("gallery") == Command::gallery);
    CHECK_FALSE(parse_command("reconstruction").has_value());
    for (Command c : {Command::reconstruct, Command::wold, Command::verify, Command::gallery})
      CHECK(parse_command(to_string(c)) == c);
  }

  TEST_CASE("report schema") {
    RunConfig cfg;
    cfg.command = Command::gallery;
    cfg.scenario = "weyl";
    const RunResult r = run(cfg);
    CHECK(r.exit_code == exit_pass);
    CHECK(r.report["schema_version"] == 1);
    CHECK(r.report["tool"] == "shiftmod");
    CHECK(r.report["command"] == "gallery");
    CHECK(r.report["pass"] == true);
    CHECK_FALSE(r.report.contains("timing"));
    CHECK(r.report["config"]["grid"].is_null());
    REQUIRE(r.report["stages"].size() >= 1);
    CHECK(r.report["stages"][0].contains("checks"));
    cfg.timing = true;
    CHECK(run(cfg).report.contains("timing"));
  }

  TEST_CASE("disguised reconstruction recovers the fiber") {
    RunConfig cfg;
    cfg.fixture = fixture("disguised_shift.json");
    const RunResult r = run(cfg);
    CHECK(r.exit_code == exit_pass);
    CHECK(failing_checks(r.report).empty());
    CHECK(r.report["fiber"]["block_dims"] == json::array({1, 2}));
    CHECK(r.report["fiber"]["frame_size"] == 1);
    REQUIRE(r.curves.size() == 1);
    CHECK(r.curves[0].name == "limit_convergence");
  }

  TEST_CASE("non-pure control exits with check failure") {
    RunConfig cfg;
    cfg.fixture = fixture("nonpure_shift.json");
    const RunResult r = run(cfg);
    CHECK(r.exit_code == exit_check_failure);
    const auto failed = failing_checks(r.report);
    CHECK(std::find(failed.begin(), failed.end(), "equivalence/surjectivity") != failed.end());
  }

  TEST_CASE("wold fixtures") {
    for (const char* name : {"wold_mixed.json", "wold_phase.json"}) {
      RunConfig cfg;
      cfg.command = Command::wold;
      cfg.fixture = fixture(name);
      const RunResult r = run(cfg);
      CHECK_MESSAGE(r.exit_code == exit_pass, name);
      CHECK(r.report["fiber"]["unitary_dims"] == r.report["fiber"]["expected_unitary_dims"]);
    }
  }

  TEST_CASE("input errors exit with 2 and still report") {
    const auto dir = scratch("errors");
    std::ofstream(dir / "empty.json").close();
    RunConfig cfg;
    cfg.fixture = (dir / "empty.json").string();
    cfg.report = (dir / "report.json").string();
    CHECK(execute(cfg) == exit_input_error);
    const json report = json::parse(slurp(dir / "report.json"));
    CHECK(report["error"]["kind"] == "input");
    CHECK(report["pass"] == false);

    RunConfig unknown;
    unknown.command = Command::gallery;
    unknown.scenario = "nope";
    CHECK(run(unknown).exit_code == exit_input_error);

    RunConfig coarse;
    coarse.command = Command::gallery;
    coarse.scenario = "nonsc";
    coarse.grid = 64;
    CHECK(run(coarse).exit_code == exit_input_error);

    RunConfig wide;
    wide.fixture = fixture("disguised_shift.json");
    wide.horizon = 2;
    CHECK(run(wide).exit_code == exit_input_error);

    RunConfig missing;
    missing.fixture = (dir / "missing.json").string();
    CHECK(run(missing).exit_code == exit_input_error);

    RunConfig wrong_kind;
    wrong_kind.command = Command::wold;
    wrong_kind.fixture = fixture("standard_shift.json");
    const RunResult w = run(wrong_kind);
    CHECK(w.exit_code == exit_input_error);
    CHECK(w.report["error"]["location"] == "/kind");
  }

  TEST_CASE("identical configurations give identical bytes") {
    for (Command c : {Command::reconstruct, Command::wold, Command::verify}) {
      RunConfig cfg;
      cfg.command = c;
      cfg.seed = 9;
      CHECK(render_report(run(cfg).report) == render_report(run(cfg).report));
    }
    RunConfig a, b;
    a.seed = 1;
    b.seed = 2;
    a.fixture = b.fixture = fixture("disguised_shift.json");
    CHECK(render_report(run(a).report) != render_report(run(b).report));
  }

  TEST_CASE("files: report and one CSV per curve") {
    const auto dir = scratch("files");
    RunConfig cfg;
    cfg.command = Command::gallery;
    cfg.scenario = "all";
    cfg.report = (dir / "report.json").string();
    cfg.csv_dir = (dir / "csv").string();
    CHECK(execute(cfg) == exit_pass);
    const RunResult r = run(cfg);
    CHECK(slurp(dir / "report.json") == render_report(r.report));
    for (const auto& curve : r.curves) {
      const std::string text = slurp(dir / "csv" / (curve.name + ".csv"));
      CHECK(text == render_csv(curve));
      CHECK(text.rfind("x,value,bound\n", 0) == 0);
    }
    CHECK(r.curves.size() >= 4);
  }

  TEST_CASE("csv rendering") {
    const Curve c{"demo", {{1.0, 0.5, 2.0}, {2.0, 0.25, std::nullopt}}};
    CHECK(render_csv(c) == "x,value,bound\n1,0.5,2\n2,0.25,\n");
  }
}
