#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "qdshield/errors.hpp"
#include "qdshield/scenario.hpp"

using namespace qds;
namespace fs = std::filesystem;

namespace {

const double kExactTransition = std::sqrt(std::pow(5.0 / 3.0, 4) - 1.0) / (2.0 * std::numbers::pi);

Scenario small_scenario(const std::string& state, std::vector<int> nx, double t_final) {
  Scenario s;
  s.name = "small";
  s.initial_state.name = state;
  s.n_x_list = std::move(nx);
  s.t_final = t_final;
  return s;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

const RunRecord& fig4_record() {
  static const RunRecord record = run_scenario(figure_scenario("fig4"));
  return record;
}

}  // namespace

TEST_CASE("named initial states") {
  const DensityMatrix r0 = build_initial_state("bell_phi_plus");
  CHECK(concurrence(r0) == doctest::Approx(1.0));
  const auto eig = hermitian_eigenvalues(r0.matrix());
  CHECK(eig[0] == doctest::Approx(1.0));
  CHECK(std::abs(eig[1]) < 1e-12);

  const auto c = correlation_vector(build_initial_state("mixed_rho2").matrix());
  CHECK(c[0] == doctest::Approx(1.0));
  CHECK(c[1] == doctest::Approx(-0.6));
  CHECK(c[2] == doctest::Approx(0.6));

  const ComplexMatrix r1 = build_initial_state("mixed_rho1").matrix();
  CHECK(r1.trace().real() == doctest::Approx(1.0));
  CHECK((r1 * r1).trace().real() == doctest::Approx(0.5));

  try {
    build_initial_state("werner");
    FAIL("expected invalid argument");
  } catch (const InvalidArgument& e) {
    const std::string msg = e.what();
    for (const auto& name : initial_state_names()) CHECK(msg.find(name) != std::string::npos);
  }
}

TEST_CASE("scenario validation") {
  Scenario s = small_scenario("mixed_rho2", {}, 0.1);
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s.n_x_list = {0, 2, 2};
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s.n_x_list = {-1};
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s.n_x_list = {0, 2};
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("config parsing") {
  const std::string text = R"({
    "scenario": {"name": "demo", "initial_state": "mixed_rho2", "nx_list": [0, 4], "t_on": 0.1},
    "bath": {"eta": 0.0625, "omega_c": 6.283185307179586, "temperature": 2.0},
    "run": {"t_final": 0.5, "dt": 0.0005, "quad_tol": 1e-9, "sample_stride": 20}
  })";
  const ScenarioConfig cfg = parse_scenario_config(text);
  CHECK(cfg.scenario.name == "demo");
  CHECK(cfg.scenario.initial_state.name == "mixed_rho2");
  CHECK(cfg.scenario.n_x_list == std::vector<int>{0, 4});
  CHECK(cfg.scenario.t_on == 0.1);
  CHECK(cfg.scenario.bath.beta() == doctest::Approx(0.5));
  CHECK(cfg.scenario.t_final == 0.5);
  CHECK(cfg.settings.dt == 0.0005);
  CHECK(cfg.settings.quad_tol == 1e-9);
  CHECK(cfg.settings.sample_stride == 20);

  // Defaults for omitted sections.
  const ScenarioConfig minimal = parse_scenario_config(
      R"({"scenario": {"name": "m", "initial_state": "bell_phi_plus", "nx_list": [0]}})");
  CHECK(minimal.scenario.bath.zero_temperature());
  CHECK(minimal.scenario.bath.eta() == 1.0 / 16.0);
  CHECK(minimal.settings.dt == 1e-3);
  CHECK(minimal.scenario.t_final == 3.0);

  // Inline matrix with complex entries and an explicit measure selection.
  const ScenarioConfig inline_cfg = parse_scenario_config(R"({"scenario": {
      "name": "i", "nx_list": [0], "outputs": ["concurrence"],
      "initial_state": [[0.5, 0, 0, [0, 0.5]], [0, 0, 0, 0], [0, 0, 0, 0], [[0, -0.5], 0, 0, [0.5, 0]]]}})");
  REQUIRE(inline_cfg.scenario.initial_state.matrix.has_value());
  CHECK((*inline_cfg.scenario.initial_state.matrix)(0, 3) == cplx(0.0, 0.5));
  CHECK_FALSE(inline_cfg.scenario.outputs.discord);
  CHECK(inline_cfg.scenario.outputs.concurrence);
  CHECK_THROWS(parse_scenario_config(R"({"scenario": {"name": "h", "nx_list": [0],
      "initial_state": [[0.5, 0, 0, [0, 0.5]], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0.5]]}})"));

  CHECK_THROWS_AS(parse_scenario_config(R"({"scenario": {"name": "x", "initial_state": "mixed_rho2", "nx_list": [0], "colour": 1}})"),
                  InvalidArgument);
  CHECK_THROWS_AS(parse_scenario_config(R"({"scenario": {"name": "x", "initial_state": "mixed_rho2", "nx_list": [0]}, "extra": {}})"),
                  InvalidArgument);
  CHECK_THROWS_AS(parse_scenario_config(R"({"scenario": {"name": "x", "initial_state": "mixed_rho2", "nx_list": [0]}, "bath": {"T": 1}})"),
                  InvalidArgument);
  CHECK_THROWS_AS(parse_scenario_config("{not json"), InvalidArgument);
  CHECK_THROWS_AS(parse_scenario_config(R"({"scenario": {"name": "x", "initial_state": "mixed_rho2", "nx_list": []}})"),
                  InvalidArgument);
  CHECK_THROWS_AS(parse_scenario_config(R"({"scenario": {"name": "x", "initial_state": "mixed_rho2", "nx_list": [1.5]}})"),
                  InvalidArgument);
  CHECK_THROWS_AS(parse_scenario_config(R"({"scenario": {"name": "x", "initial_state": "mixed_rho2", "nx_list": [0]}, "bath": {"eta": "big"}})"),
                  InvalidArgument);
}

TEST_CASE("config hash is stable and sensitive") {
  const Scenario a = small_scenario("mixed_rho2", {0, 2}, 0.3);
  Scenario b = a;
  CHECK(config_hash(a, {}) == config_hash(b, {}));
  CHECK(config_hash(a, {}).size() == 16);
  b.t_on = 0.1;
  CHECK(config_hash(a, {}) != config_hash(b, {}));
  RunSettings finer;
  finer.dt = 5e-4;
  CHECK(config_hash(a, {}) != config_hash(a, finer));
}

TEST_CASE("empty measure selection keeps trajectories only") {
  Scenario s = small_scenario("bell_phi_plus", {0, 2}, 0.1);
  s.outputs = MeasureSelection::none();
  const RunRecord r = run_scenario(s);
  REQUIRE(r.series.size() == 2);
  CHECK(r.series[0].trajectory.size() == 11);
  CHECK_FALSE(r.series[0].measures[3].discord.has_value());
  CHECK_FALSE(r.derived.t_star.has_value());
  CHECK(r.derived.t_e.empty());
  std::ostringstream csv;
  write_csv(r, csv);
  const auto rows = lines_of(csv.str());
  CHECK(rows[1].find(",nan,nan,nan,") != std::string::npos);
}

TEST_CASE("CSV layout, ordering and determinism across thread counts") {
  Scenario s = small_scenario("mixed_rho1", {3, 0, 1}, 0.2);
  RunSettings one;
  one.threads = 1;
  RunSettings many;
  many.threads = 3;
  std::ostringstream a, b;
  write_csv(run_scenario(s, one), a);
  write_csv(run_scenario(s, many), b);
  CHECK(a.str() == b.str());
  const auto rows = lines_of(a.str());
  REQUIRE(rows.size() == 1 + 3 * 21);
  CHECK(rows[0] == "t,nx,discord,concurrence,superfidelity,trace_error,min_eigenvalue");
  CHECK(rows[1].rfind("0,3,", 0) == 0);
  CHECK(rows[22].rfind("0,0,", 0) == 0);
  CHECK(rows[43].rfind("0,1,", 0) == 0);
  CHECK(a.str().find('\r') == std::string::npos);
  CHECK(a.str().back() == '\n');
  // Twelve significant digits.
  std::istringstream row(rows[5]);
  std::string field;
  std::getline(row, field, ',');
  CHECK(field == "0.04");
  std::getline(row, field, ',');
  std::getline(row, field, ',');
  CHECK(field.size() <= 18);
}

TEST_CASE("sidecar JSON carries derived times and provenance") {
  std::ostringstream out;
  write_sidecar_json(fig4_record(), out);
  const auto doc = nlohmann::json::parse(out.str());
  CHECK(doc["scenario"] == "fig4");
  CHECK(doc["provenance"]["engine_version"] == kEngineVersion);
  CHECK(doc["provenance"]["config_hash"].get<std::string>().size() == 16);
  CHECK(doc["provenance"]["dt"] == 1e-3);
  const auto t_star = doc["derived"]["t_star"];
  CHECK(t_star["lower"].get<double>() <= t_star["value"].get<double>());
  CHECK(t_star["value"].get<double>() <= t_star["upper"].get<double>());
  for (const char* n : {"1", "2", "3", "4"}) CHECK(doc["derived"]["t_e"].contains(n));
}

TEST_CASE("sudden transition time") {
  const auto t = sudden_transition_time(fig4_record());
  REQUIRE(t.has_value());
  CHECK(std::abs(t->value - 0.412) <= 0.02);
  CHECK(std::abs(t->value - kExactTransition) <= 1e-3);
  CHECK(t->lower <= t->value);
  CHECK(t->value <= t->upper);

  Scenario bell = small_scenario("bell_phi_plus", {0}, 1.0);
  bell.outputs = {true, false, false};
  CHECK_FALSE(sudden_transition_time(run_scenario(bell)).has_value());

  Scenario strong = small_scenario("mixed_rho2", {0}, 1.0);
  strong.outputs = {true, false, false};
  strong.bath = BathParams(2.0 / 16.0, kDefaultOmegaC);
  const auto earlier = sudden_transition_time(run_scenario(strong));
  REQUIRE(earlier.has_value());
  CHECK(earlier->value < t->value);

  Scenario driven_only = small_scenario("mixed_rho2", {2}, 0.2);
  CHECK_THROWS_AS(sudden_transition_time(run_scenario(driven_only)), InvalidArgument);
}

TEST_CASE("effectiveness time") {
  const RunRecord& r = fig4_record();
  const auto t_star = sudden_transition_time(r);
  for (int n : {1, 2, 3, 4}) {
    const auto te = effectiveness_time(r, n);
    REQUIRE(te.has_value());
    CHECK(te->value > t_star->value);
    CHECK(te->lower <= te->value);
    CHECK(te->value <= te->upper);
  }
  CHECK_FALSE(effectiveness_time(r, 0).has_value());
  CHECK_THROWS_AS(effectiveness_time(r, 7), InvalidArgument);
}

TEST_CASE("temperature sweep") {
  const Scenario base = figure_scenario("fig6");
  CHECK(temperature_sweep(base, {}).empty());
  CHECK_THROWS_AS(temperature_sweep(base, {1.0, 0.5}), InvalidArgument);
  CHECK_THROWS_AS(temperature_sweep(base, {-1.0}), InvalidArgument);
  const auto rows = temperature_sweep(base, {0.0});
  REQUIRE(rows.size() == 1);
  const auto fig4_te = effectiveness_time(fig4_record(), 4);
  REQUIRE(rows[0].t_e.has_value());
  CHECK(rows[0].t_e->value == fig4_te->value);

  std::ostringstream csv;
  write_sweep_csv(rows, 4, csv);
  const auto lines = lines_of(csv.str());
  CHECK(lines[0] == "temperature,nx,t_star,t_e");
  CHECK(lines[1].rfind("0,4,", 0) == 0);
}

TEST_CASE("derived times report") {
  const auto report = derived_times("mixed_rho2", 4, 0.0);
  REQUIRE(report.t_star.has_value());
  REQUIRE(report.t_e.has_value());
  CHECK(report.t_e->value > report.t_star->value);
  CHECK_THROWS_AS(derived_times("nope", 4, 0.0), InvalidArgument);
}

TEST_CASE("figure catalogue and file output") {
  CHECK(figure_ids().size() == 7);
  CHECK_THROWS_AS(figure_scenario("fig9"), InvalidArgument);
  CHECK(figure_scenario("fig5_late").t_on == 0.4);
  CHECK(figure_scenario("fig1").n_x_list == std::vector<int>{0, 2, 3, 4});

  const fs::path dir = fs::temp_directory_path() / "qdshield_scenario_test";
  fs::remove_all(dir);
  RunSettings coarse;
  coarse.sample_stride = 50;
  const auto paths = write_figure("fig3", dir.string(), coarse);
  CHECK(paths.size() == 2);
  CHECK(fs::exists(dir / "fig3.csv"));
  CHECK(fs::exists(dir / "fig3.json"));
  std::ifstream in(dir / "fig3.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,nx,discord,concurrence,superfidelity,trace_error,min_eigenvalue");

  // A failed run leaves nothing behind.
  RunSettings broken = coarse;
  broken.dt = 0.5;
  CHECK_THROWS_AS(write_figure("fig2", dir.string(), broken), InvalidArgument);
  CHECK_FALSE(fs::exists(dir / "fig2.csv"));
  for (const auto& entry : fs::directory_iterator(dir))
    CHECK(entry.path().extension() != ".part");

  // An output path that is a regular file is an I/O error.
  CHECK_THROWS_AS(write_figure("fig1", (dir / "fig3.csv").string(), coarse), IoError);
  fs::remove_all(dir);
}

TEST_CASE("self checks pass") {
  for (const auto& r : run_self_checks()) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.passed);
  }
}

TEST_CASE("thread count resolution") {
  CHECK(resolve_thread_count(3) == 3);
  CHECK(resolve_thread_count(0) >= 1);
}
