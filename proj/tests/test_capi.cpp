#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qdshield/qdshield.h"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qdshield_capi_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* kConfig = R"({
  "scenario": {"name": "capi", "initial_state": "mixed_rho2", "nx_list": [0, 4]},
  "run": {"t_final": 0.6, "sample_stride": 10}
})";

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(qds_version()) == "1.0.0");
  CHECK(std::string(qds_status_name(QDS_OK)) == "ok");
  CHECK(std::string(qds_status_name(QDS_NUMERICAL_FAILURE)) == "numerical-failure");
  CHECK(std::string(qds_status_name(static_cast<qds_status>(1234))) == "unknown-error");
}

TEST_CASE("run a config document and query derived times") {
  qds_run* run = nullptr;
  REQUIRE(qds_run_config_json(kConfig, nullptr, &run) == QDS_OK);
  REQUIRE(run != nullptr);
  const char* name = nullptr;
  CHECK(qds_run_name(run, &name) == QDS_OK);
  CHECK(std::string(name) == "capi");

  double t_star = 0.0;
  int found = 0;
  CHECK(qds_run_transition_time(run, &t_star, &found) == QDS_OK);
  CHECK(found == 1);
  CHECK(std::abs(t_star - 0.412) < 0.02);

  double t_e = 0.0;
  CHECK(qds_run_effectiveness_time(run, 4, &t_e, &found) == QDS_OK);
  CHECK(found == 1);
  CHECK(t_e > t_star);
  CHECK(qds_run_effectiveness_time(run, 3, &t_e, &found) == QDS_INVALID_ARGUMENT);
  CHECK(std::string(qds_last_error()).find("n_x = 3") != std::string::npos);

  const fs::path dir = scratch("run");
  const std::string csv = (dir / "capi.csv").string();
  const std::string json = (dir / "capi.json").string();
  CHECK(qds_run_write_csv(run, csv.c_str()) == QDS_OK);
  CHECK(qds_run_write_json(run, json.c_str()) == QDS_OK);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,nx,discord,concurrence,superfidelity,trace_error,min_eigenvalue");
  CHECK(fs::file_size(json) > 0);
  CHECK(qds_run_write_csv(run, (dir / "missing" / "x.csv").string().c_str()) == QDS_IO_ERROR);
  CHECK_FALSE(fs::exists(dir / "missing"));
  qds_run_free(run);
  fs::remove_all(dir);
}

TEST_CASE("config files, options and errors") {
  const fs::path dir = scratch("files");
  const fs::path cfg = dir / "cfg.json";
  std::ofstream(cfg) << kConfig;
  qds_run_options options{5e-4, 0.0, 20, 1};
  qds_run* run = nullptr;
  CHECK(qds_run_config_file(cfg.string().c_str(), &options, &run) == QDS_OK);
  qds_run_free(run);

  run = reinterpret_cast<qds_run*>(0x1);
  CHECK(qds_run_config_file((dir / "absent.json").string().c_str(), nullptr, &run) == QDS_IO_ERROR);
  CHECK(run == nullptr);
  CHECK(qds_run_config_json(R"({"scenario": {"name": "x"}, "oops": 1})", nullptr, &run) ==
        QDS_INVALID_ARGUMENT);
  CHECK(std::string(qds_last_error()).find("oops") != std::string::npos);
  CHECK(qds_run_config_json(nullptr, nullptr, &run) == QDS_INVALID_ARGUMENT);
  CHECK(qds_run_name(nullptr, nullptr) == QDS_INVALID_ARGUMENT);
  qds_run_free(nullptr);
  fs::remove_all(dir);
}

TEST_CASE("figure catalogue and writer") {
  CHECK(qds_figure_count() == 7);
  CHECK(std::string(qds_figure_id(0)) == "fig1");
  CHECK(qds_figure_id(99) == nullptr);
  const fs::path dir = scratch("figs");
  qds_run_options coarse{0.0, 0.0, 50, 0};
  CHECK(qds_figures_write("fig1", dir.string().c_str(), &coarse) == QDS_OK);
  CHECK(fs::exists(dir / "fig1.csv"));
  CHECK(qds_figures_write("fig7", dir.string().c_str(), &coarse) == QDS_INVALID_ARGUMENT);
  fs::remove_all(dir);
}

TEST_CASE("derived times, self check and standalone measures") {
  double t_star = 0, t_e = 0;
  int has_star = 0, has_te = 0;
  CHECK(qds_derived_times("mixed_rho2", 4, 0.0, nullptr, &t_star, &has_star, &t_e, &has_te) == QDS_OK);
  CHECK(has_star == 1);
  CHECK(has_te == 1);
  CHECK(t_e > t_star);
  CHECK(qds_derived_times("bell_phi_plus", 2, 0.0, nullptr, &t_star, &has_star, &t_e, &has_te) == QDS_OK);
  CHECK(has_star == 0);

  int all = 0, count = 0;
  auto cb = [](const char*, int, const char*, void* user) { ++*static_cast<int*>(user); };
  CHECK(qds_self_check(cb, &count, &all) == QDS_OK);
  CHECK(all == 1);
  CHECK(count >= 5);

  std::vector<double> bell(32, 0.0);
  bell[0] = bell[2 * 3] = bell[2 * 12] = bell[2 * 15] = 0.5;
  double value = 0.0;
  CHECK(qds_discord(bell.data(), &value) == QDS_OK);
  CHECK(value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(qds_concurrence(bell.data(), &value) == QDS_OK);
  CHECK(value == doctest::Approx(1.0).epsilon(1e-10));
  bell[0] = 2.0;
  CHECK(qds_discord(bell.data(), &value) == QDS_STATE_CORRUPTION);
  CHECK(qds_discord(nullptr, &value) == QDS_INVALID_ARGUMENT);
}
