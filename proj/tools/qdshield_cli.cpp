// Command-line front end. Talks to the engine only through the C interface.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qdshield/qdshield.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFailure = 2;

int report(qds_status status, const std::string& context) {
  if (status == QDS_OK) return kExitOk;
  std::cerr << "qdshield: " << context << ": " << qds_status_name(status) << ": "
            << qds_last_error() << '\n';
  return status == QDS_INVALID_ARGUMENT ? kExitUsage : kExitFailure;
}

nlohmann::json optional_time(double value, int found) {
  if (!found) return nullptr;
  return value;
}

struct Overrides {
  double dt = 0.0;
  int threads = 0;

  qds_run_options options() const { return {dt, 0.0, 0, threads}; }
};

int cmd_run(const std::string& config, const std::string& out_dir, const Overrides& o) {
  const qds_run_options options = o.options();
  qds_run* run = nullptr;
  if (int rc = report(qds_run_config_file(config.c_str(), &options, &run), config)) return rc;

  const char* name = nullptr;
  qds_run_name(run, &name);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  const std::string base = (std::filesystem::path(out_dir) / name).string();
  const std::string csv = base + ".csv";
  const std::string json = base + ".json";
  int rc = report(qds_run_write_csv(run, csv.c_str()), config);
  if (rc == kExitOk) {
    rc = report(qds_run_write_json(run, json.c_str()), config);
    if (rc != kExitOk) std::remove(csv.c_str());
  }
  qds_run_free(run);
  if (rc == kExitOk) std::cout << csv << '\n' << json << '\n';
  return rc;
}

int cmd_figures(const std::vector<std::string>& ids, const std::string& out_dir,
                const Overrides& o) {
  const qds_run_options options = o.options();
  for (const auto& id : ids) {
    if (int rc = report(qds_figures_write(id.c_str(), out_dir.c_str(), &options), id)) return rc;
    std::cout << id << " -> " << out_dir << '\n';
  }
  return kExitOk;
}

int cmd_te(const std::string& state, int n_x, double temperature, const Overrides& o) {
  const qds_run_options options = o.options();
  double t_star = 0.0, t_e = 0.0;
  int has_star = 0, has_te = 0;
  const qds_status st = qds_derived_times(state.c_str(), n_x, temperature, &options, &t_star,
                                          &has_star, &t_e, &has_te);
  if (int rc = report(st, state)) return rc;
  nlohmann::json out = {{"t_star", optional_time(t_star, has_star)},
                        {"t_e", optional_time(t_e, has_te)}};
  std::cout << out.dump() << '\n';
  return kExitOk;
}

int cmd_check() {
  int all = 0;
  auto print = [](const char* name, int passed, const char* detail, void*) {
    std::cout << (passed ? "PASS " : "FAIL ") << name << " (" << detail << ")\n";
  };
  if (int rc = report(qds_self_check(print, nullptr, &all), "check")) return rc;
  return all ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-qubit dephasing under continuous decoupling fields"};
  app.set_version_flag("--version", std::string(qds_version()));
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  Overrides overrides;
  app.add_option("--dt", overrides.dt, "Override the integration step")
      ->check(CLI::PositiveNumber);
  app.add_option("--threads", overrides.threads, "Worker threads (default: env or all cores)")
      ->check(CLI::PositiveNumber);

  std::string config;
  std::string run_out = ".";
  auto* run = app.add_subcommand("run", "Run one scenario config; writes <name>.csv/.json");
  run->add_option("config", config, "Scenario JSON file")->required();
  run->add_option("--out", run_out, "Output directory");

  std::vector<std::string> figure_ids;
  std::string fig_out;
  auto* figures = app.add_subcommand("figures", "Write the built-in figure datasets");
  std::vector<std::string> valid = {"all"};
  for (size_t i = 0; i < qds_figure_count(); ++i) valid.emplace_back(qds_figure_id(i));
  figures->add_option("ids", figure_ids, "Figure ids or 'all'")
      ->required()
      ->check(CLI::IsMember(valid));
  figures->add_option("--out", fig_out, "Output directory")->required();

  std::string state;
  int n_x = 4;
  double temperature = 0.0;
  auto* te = app.add_subcommand("te", "Print derived times as JSON");
  te->add_option("--state", state, "Named initial state")->required();
  te->add_option("--nx", n_x, "Field multiplier")->required()->check(CLI::PositiveNumber);
  te->add_option("--temperature", temperature, "Bath temperature (natural units)")
      ->required()
      ->check(CLI::NonNegativeNumber);

  auto* check = app.add_subcommand("check", "Run the oracle self-tests");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (run->parsed()) return cmd_run(config, run_out, overrides);
  if (figures->parsed()) return cmd_figures(figure_ids, fig_out, overrides);
  if (te->parsed()) return cmd_te(state, n_x, temperature, overrides);
  if (check->parsed()) return cmd_check();
  return kExitUsage;
}
