#include "qdshield/qdshield.h"

#include <cstdio>
#include <exception>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "qdshield/correlation_measures.hpp"
#include "qdshield/errors.hpp"
#include "qdshield/scenario.hpp"

struct qds_run {
  qds::RunRecord record;
};

namespace {

thread_local std::string g_last_error;

qds_status status_of(qds::ErrorCode code) {
  return static_cast<qds_status>(static_cast<int>(code));
}

template <class F>
qds_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return QDS_OK;
  } catch (const qds::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return QDS_UNKNOWN_ERROR;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return QDS_UNKNOWN_ERROR;
  } catch (...) {
    g_last_error = "unknown exception";
    return QDS_UNKNOWN_ERROR;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw qds::InvalidArgument(std::string(what) + " must not be null");
}

void apply(const qds_run_options* o, qds::RunSettings& s) {
  if (o == nullptr) return;
  if (o->dt != 0.0) s.dt = o->dt;
  if (o->quad_tol != 0.0) s.quad_tol = o->quad_tol;
  if (o->sample_stride != 0) s.sample_stride = o->sample_stride;
  if (o->threads != 0) s.threads = o->threads;
}

std::string read_file(const char* path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qds::IoError(std::string("cannot read ") + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class Writer>
void write_file(const char* path, Writer&& w) {
  const std::string temp = std::string(path) + ".part";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw qds::IoError("cannot open " + temp + " for writing");
    w(out);
    out.flush();
    if (!out) {
      out.close();
      std::remove(temp.c_str());
      throw qds::IoError("failed writing " + temp);
    }
  }
  if (std::rename(temp.c_str(), path) != 0) {
    std::remove(temp.c_str());
    throw qds::IoError(std::string("cannot rename into ") + path);
  }
}

qds::DensityMatrix unpack(const double* re_im) {
  require(re_im, "rho");
  qds::ComplexMatrix m(4);
  for (std::size_t k = 0; k < 16; ++k) m(k / 4, k % 4) = {re_im[2 * k], re_im[2 * k + 1]};
  return qds::validate_density_matrix(m);
}

void store(const std::optional<qds::TimeEstimate>& t, double* value, int* found) {
  if (found) *found = t ? 1 : 0;
  if (value) *value = t ? t->value : 0.0;
}

}  // namespace

extern "C" {

const char* qds_version(void) { return qds::kEngineVersion; }

const char* qds_last_error(void) { return g_last_error.c_str(); }

const char* qds_status_name(qds_status status) {
  switch (status) {
    case QDS_OK: return "ok";
    case QDS_INVALID_ARGUMENT: return "invalid-argument";
    case QDS_DOMAIN_ERROR: return "domain-error";
    case QDS_STATE_CORRUPTION: return "state-corruption";
    case QDS_POSITIVITY_VIOLATION: return "positivity-violation";
    case QDS_NUMERICAL_FAILURE: return "numerical-failure";
    case QDS_INTERNAL_CONSISTENCY: return "internal-consistency";
    case QDS_INTEGRATION_ABORT: return "integration-abort";
    case QDS_IO_ERROR: return "io-error";
    default: return "unknown-error";
  }
}

qds_status qds_run_config_json(const char* json_text, const qds_run_options* options,
                               qds_run** out) {
  return guarded([&] {
    require(json_text, "json_text");
    require(out, "out");
    *out = nullptr;
    qds::ScenarioConfig cfg = qds::parse_scenario_config(json_text);
    apply(options, cfg.settings);
    *out = new qds_run{qds::run_scenario(cfg.scenario, cfg.settings)};
  });
}

qds_status qds_run_config_file(const char* path, const qds_run_options* options,
                               qds_run** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    const std::string text = read_file(path);
    qds::ScenarioConfig cfg = qds::parse_scenario_config(text);
    apply(options, cfg.settings);
    *out = new qds_run{qds::run_scenario(cfg.scenario, cfg.settings)};
  });
}

void qds_run_free(qds_run* run) { delete run; }

qds_status qds_run_name(const qds_run* run, const char** out) {
  return guarded([&] {
    require(run, "run");
    require(out, "out");
    *out = run->record.scenario.name.c_str();
  });
}

qds_status qds_run_write_csv(const qds_run* run, const char* path) {
  return guarded([&] {
    require(run, "run");
    require(path, "path");
    write_file(path, [&](std::ostream& o) { qds::write_csv(run->record, o); });
  });
}

qds_status qds_run_write_json(const qds_run* run, const char* path) {
  return guarded([&] {
    require(run, "run");
    require(path, "path");
    write_file(path, [&](std::ostream& o) { qds::write_sidecar_json(run->record, o); });
  });
}

qds_status qds_run_transition_time(const qds_run* run, double* value, int* found) {
  return guarded([&] {
    require(run, "run");
    store(run->record.derived.t_star, value, found);
  });
}

qds_status qds_run_effectiveness_time(const qds_run* run, int n_x, double* value, int* found) {
  return guarded([&] {
    require(run, "run");
    store(qds::effectiveness_time(run->record, n_x), value, found);
  });
}

size_t qds_figure_count(void) { return qds::figure_ids().size(); }

const char* qds_figure_id(size_t index) {
  const auto& ids = qds::figure_ids();
  return index < ids.size() ? ids[index].c_str() : nullptr;
}

qds_status qds_figures_write(const char* id, const char* out_dir,
                             const qds_run_options* options) {
  return guarded([&] {
    require(id, "id");
    require(out_dir, "out_dir");
    qds::RunSettings settings;
    apply(options, settings);
    if (std::string(id) == "all") {
      for (const auto& f : qds::figure_ids()) qds::write_figure(f, out_dir, settings);
    } else {
      qds::write_figure(id, out_dir, settings);
    }
  });
}

qds_status qds_derived_times(const char* state, int n_x, double temperature,
                             const qds_run_options* options, double* t_star, int* t_star_found,
                             double* t_e, int* t_e_found) {
  return guarded([&] {
    require(state, "state");
    qds::RunSettings settings;
    apply(options, settings);
    const auto report = qds::derived_times(state, n_x, temperature, settings);
    store(report.t_star, t_star, t_star_found);
    store(report.t_e, t_e, t_e_found);
  });
}

qds_status qds_self_check(qds_check_callback report, void* user, int* all_passed) {
  return guarded([&] {
    bool ok = true;
    for (const auto& r : qds::run_self_checks()) {
      ok = ok && r.passed;
      if (report) report(r.name.c_str(), r.passed ? 1 : 0, r.detail.c_str(), user);
    }
    if (all_passed) *all_passed = ok ? 1 : 0;
  });
}

qds_status qds_discord(const double* rho_re_im, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = qds::quantum_discord(unpack(rho_re_im)).discord;
  });
}

qds_status qds_concurrence(const double* rho_re_im, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = qds::concurrence(unpack(rho_re_im));
  });
}

}  // extern "C"
