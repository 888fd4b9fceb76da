#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "qdshield/errors.hpp"
#include "qdshield/scenario.hpp"

namespace qds {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt_optional(const std::optional<double>& v) {
  return v ? fmt_double(*v) : std::string("nan");
}

void reject_unknown_keys(const json& obj, const std::string& where,
                         const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw InvalidArgument("config: '" + where + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw InvalidArgument("config: unknown key '" + (where.empty() ? key : where + "." + key) +
                            "'");
    }
  }
}

double number_at(const json& obj, const char* key, const std::string& where, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) {
    throw InvalidArgument("config: '" + where + "." + key + "' must be a number");
  }
  return v.get<double>();
}

cplx parse_entry(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw InvalidArgument("config: matrix entries must be numbers or [re, im] pairs");
}

ComplexMatrix parse_matrix(const json& rows) {
  if (!rows.is_array() || rows.size() != 4) {
    throw InvalidArgument("config: inline initial_state must be a 4x4 array");
  }
  ComplexMatrix m(4);
  for (std::size_t r = 0; r < 4; ++r) {
    if (!rows[r].is_array() || rows[r].size() != 4) {
      throw InvalidArgument("config: inline initial_state must be a 4x4 array");
    }
    for (std::size_t c = 0; c < 4; ++c) m(r, c) = parse_entry(rows[r][c]);
  }
  return m;
}

MeasureSelection parse_outputs(const json& list) {
  if (!list.is_array()) throw InvalidArgument("config: 'scenario.outputs' must be an array");
  MeasureSelection sel = MeasureSelection::none();
  for (const auto& item : list) {
    const std::string name = item.is_string() ? item.get<std::string>() : "";
    if (name == "discord") {
      sel.discord = true;
    } else if (name == "concurrence") {
      sel.concurrence = true;
    } else if (name == "superfidelity") {
      sel.superfidelity = true;
    } else {
      throw InvalidArgument("config: unknown measure '" + item.dump() + "' in scenario.outputs");
    }
  }
  return sel;
}

json canonical(const Scenario& s, const RunSettings& settings) {
  json state;
  if (s.initial_state.matrix) {
    json rows = json::array();
    const ComplexMatrix& m = *s.initial_state.matrix;
    for (std::size_t r = 0; r < 4; ++r) {
      json row = json::array();
      for (std::size_t c = 0; c < 4; ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
      rows.push_back(row);
    }
    state = rows;
  } else {
    state = s.initial_state.name;
  }
  return json{
      {"scenario",
       {{"name", s.name},
        {"initial_state", state},
        {"nx_list", s.n_x_list},
        {"t_on", s.t_on},
        {"outputs",
         {s.outputs.discord, s.outputs.concurrence, s.outputs.superfidelity}}}},
      {"bath",
       {{"eta", s.bath.eta()},
        {"omega_c", s.bath.omega_c()},
        {"temperature", s.bath.temperature()}}},
      {"run",
       {{"t_final", s.t_final},
        {"dt", settings.dt},
        {"quad_tol", settings.quad_tol},
        {"sample_stride", settings.sample_stride},
        {"t_c", settings.t_c}}},
  };
}

json time_estimate(const std::optional<TimeEstimate>& t) {
  if (!t) return nullptr;
  return json{{"value", t->value}, {"lower", t->lower}, {"upper", t->upper}};
}

json provenance_json(const std::string& hash, const RunSettings& settings) {
  return json{{"config_hash", hash},
              {"engine_version", kEngineVersion},
              {"dt", settings.dt},
              {"quad_tol", settings.quad_tol},
              {"sample_stride", settings.sample_stride},
              {"t_c", settings.t_c}};
}

}  // namespace

ScenarioConfig parse_scenario_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config: malformed JSON: ") + e.what());
  }
  reject_unknown_keys(doc, "", {"scenario", "bath", "run"});
  if (!doc.contains("scenario")) throw InvalidArgument("config: missing 'scenario' section");

  const json& sc = doc.at("scenario");
  reject_unknown_keys(sc, "scenario", {"name", "initial_state", "nx_list", "t_on", "outputs"});
  ScenarioConfig cfg;
  Scenario& s = cfg.scenario;
  if (!sc.contains("name") || !sc.at("name").is_string()) {
    throw InvalidArgument("config: 'scenario.name' must be a string");
  }
  s.name = sc.at("name").get<std::string>();
  if (!sc.contains("initial_state")) {
    throw InvalidArgument("config: missing 'scenario.initial_state'");
  }
  const json& state = sc.at("initial_state");
  if (state.is_string()) {
    s.initial_state.name = state.get<std::string>();
  } else {
    s.initial_state.matrix = parse_matrix(state);
  }
  if (!sc.contains("nx_list") || !sc.at("nx_list").is_array()) {
    throw InvalidArgument("config: 'scenario.nx_list' must be an array of integers");
  }
  for (const auto& v : sc.at("nx_list")) {
    if (!v.is_number_integer()) {
      throw InvalidArgument("config: 'scenario.nx_list' must contain integers");
    }
    s.n_x_list.push_back(v.get<int>());
  }
  s.t_on = number_at(sc, "t_on", "scenario", 0.0);
  if (sc.contains("outputs")) s.outputs = parse_outputs(sc.at("outputs"));

  double eta = kDefaultEta;
  double omega_c = kDefaultOmegaC;
  double temperature = 0.0;
  if (doc.contains("bath")) {
    const json& b = doc.at("bath");
    reject_unknown_keys(b, "bath", {"eta", "omega_c", "temperature"});
    eta = number_at(b, "eta", "bath", eta);
    omega_c = number_at(b, "omega_c", "bath", omega_c);
    temperature = number_at(b, "temperature", "bath", temperature);
  }
  s.bath = BathParams::from_temperature(eta, omega_c, temperature);

  if (doc.contains("run")) {
    const json& r = doc.at("run");
    reject_unknown_keys(r, "run", {"t_final", "dt", "quad_tol", "sample_stride"});
    s.t_final = number_at(r, "t_final", "run", s.t_final);
    cfg.settings.dt = number_at(r, "dt", "run", cfg.settings.dt);
    cfg.settings.quad_tol = number_at(r, "quad_tol", "run", cfg.settings.quad_tol);
    if (r.contains("sample_stride")) {
      if (!r.at("sample_stride").is_number_integer()) {
        throw InvalidArgument("config: 'run.sample_stride' must be an integer");
      }
      cfg.settings.sample_stride = r.at("sample_stride").get<int>();
    }
  }
  s.validate();
  return cfg;
}

std::string config_hash(const Scenario& s, const RunSettings& settings) {
  // FNV-1a over the canonical (key-sorted) JSON form.
  const std::string text = canonical(s, settings).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_csv(const RunRecord& record, std::ostream& out) {
  out << "t,nx,discord,concurrence,superfidelity,trace_error,min_eigenvalue\n";
  for (const auto& series : record.series) {
    const Trajectory& traj = series.trajectory;
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const MeasureRow& m = series.measures[k];
      out << fmt_double(traj.times[k]) << ',' << series.n_x << ',' << fmt_optional(m.discord)
          << ',' << fmt_optional(m.concurrence) << ',' << fmt_optional(m.superfidelity) << ','
          << fmt_double(traj.diagnostics[k].trace_error) << ','
          << fmt_double(traj.diagnostics[k].min_eigenvalue) << '\n';
    }
  }
}

void write_sidecar_json(const RunRecord& record, std::ostream& out) {
  json t_e = json::object();
  for (const auto& [n_x, estimate] : record.derived.t_e) {
    t_e[std::to_string(n_x)] = time_estimate(estimate);
  }
  const Scenario& s = record.scenario;
  json doc = {
      {"scenario", s.name},
      {"initial_state", s.initial_state.label()},
      {"nx_list", s.n_x_list},
      {"t_on", s.t_on},
      {"t_final", s.t_final},
      {"bath",
       {{"eta", s.bath.eta()},
        {"omega_c", s.bath.omega_c()},
        {"temperature", s.bath.temperature()}}},
      {"derived", {{"t_star", time_estimate(record.derived.t_star)}, {"t_e", t_e}}},
      {"provenance", provenance_json(record.provenance.config_hash, record.settings)},
  };
  out << doc.dump(2) << '\n';
}

void write_sweep_csv(const std::vector<SweepRow>& rows, int n_x, std::ostream& out) {
  out << "temperature,nx,t_star,t_e\n";
  for (const auto& row : rows) {
    out << fmt_double(row.temperature) << ',' << n_x << ','
        << fmt_optional(row.t_star ? std::optional<double>(row.t_star->value) : std::nullopt)
        << ','
        << fmt_optional(row.t_e ? std::optional<double>(row.t_e->value) : std::nullopt)
        << '\n';
  }
}

void write_sweep_json(const std::vector<SweepRow>& rows, int n_x, const Scenario& base,
                      const RunSettings& settings, std::ostream& out) {
  json table = json::array();
  for (const auto& row : rows) {
    table.push_back({{"temperature", row.temperature},
                     {"t_star", time_estimate(row.t_star)},
                     {"t_e", time_estimate(row.t_e)}});
  }
  json doc = {{"scenario", base.name},
              {"initial_state", base.initial_state.label()},
              {"nx", n_x},
              {"sweep", table},
              {"provenance", provenance_json(config_hash(base, settings), settings)}};
  out << doc.dump(2) << '\n';
}

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids = {"fig1", "fig2", "fig3", "fig4",
                                               "fig5", "fig6", "rho1"};
  return ids;
}

Scenario figure_scenario(const std::string& id) {
  Scenario s;
  s.name = id;
  const MeasureSelection fidelity_pair{false, true, true};
  const MeasureSelection discord_only{true, false, false};
  if (id == "fig1") {
    s.initial_state.name = "bell_phi_plus";
    s.n_x_list = {0, 2, 3, 4};
    s.outputs = fidelity_pair;
  } else if (id == "fig2") {
    s.initial_state.name = "bell_phi_plus";
    s.n_x_list = {0, 2, 3, 4};
    s.outputs = discord_only;
  } else if (id == "rho1") {
    s.initial_state.name = "mixed_rho1";
    s.n_x_list = {0, 2, 3, 4};
    s.outputs = discord_only;
  } else if (id == "fig3") {
    s.initial_state.name = "mixed_rho2";
    s.n_x_list = {0, 2, 3, 4};
    s.outputs = fidelity_pair;
  } else if (id == "fig4" || id == "fig5" || id == "fig6") {
    s.initial_state.name = "mixed_rho2";
    s.n_x_list = {0, 1, 2, 3, 4};
    s.outputs = discord_only;
  } else if (id == "fig5_late") {
    s.initial_state.name = "mixed_rho2";
    s.n_x_list = {0, 1, 2, 3, 4};
    s.t_on = 0.4;
    s.outputs = discord_only;
  } else {
    std::string valid;
    for (const auto& f : figure_ids()) valid += (valid.empty() ? "" : ", ") + f;
    throw InvalidArgument("unknown figure '" + id + "' (valid: " + valid + ", all)");
  }
  return s;
}

namespace {

// Collects files written so far and deletes them unless committed.
class OutputTransaction {
 public:
  explicit OutputTransaction(std::filesystem::path dir) : dir_(std::move(dir)) {}
  ~OutputTransaction() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& p : written_) std::filesystem::remove(p, ec);
  }

  template <class Writer>
  void write(const std::string& filename, Writer&& writer) {
    const std::filesystem::path final_path = dir_ / filename;
    const std::filesystem::path temp_path = dir_ / (filename + ".part");
    {
      std::ofstream out(temp_path, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError("cannot open " + temp_path.string() + " for writing");
      written_.push_back(temp_path);
      writer(out);
      out.flush();
      if (!out) throw IoError("failed writing " + temp_path.string());
    }
    std::filesystem::rename(temp_path, final_path);
    written_.back() = final_path;
  }

  std::vector<std::string> commit() {
    committed_ = true;
    std::vector<std::string> paths;
    for (const auto& p : written_) paths.push_back(p.string());
    return paths;
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> written_;
  bool committed_ = false;
};

}  // namespace

std::vector<std::string> write_figure(const std::string& id, const std::string& out_dir,
                                      const RunSettings& settings) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
  OutputTransaction tx(out_dir);

  if (id == "fig6") {
    const Scenario base = figure_scenario("fig6");
    const auto rows = temperature_sweep(base, kFigureTemperatures, settings, 4);
    tx.write("fig6.csv", [&](std::ostream& o) { write_sweep_csv(rows, 4, o); });
    tx.write("fig6.json", [&](std::ostream& o) { write_sweep_json(rows, 4, base, settings, o); });
    return tx.commit();
  }

  std::vector<std::string> ids = {id};
  if (id == "fig5") ids.push_back("fig5_late");
  for (const auto& part : ids) {
    const RunRecord record = run_scenario(figure_scenario(part), settings);
    tx.write(part + ".csv", [&](std::ostream& o) { write_csv(record, o); });
    tx.write(part + ".json", [&](std::ostream& o) { write_sidecar_json(record, o); });
  }
  return tx.commit();
}

}  // namespace qds
