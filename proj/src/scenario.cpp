#include "qdshield/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <sstream>
#include <thread>

#include "qdshield/errors.hpp"

namespace qds {

namespace {

// Plateau detection for the sudden transition.
constexpr int kMinPlateauSamples = 5;
constexpr double kPlateauFlatness = 1e-6;
// Slopes below this (per tau) are treated as optimizer noise.
constexpr double kSlopeFloor = 1e-3;
constexpr double kBellDiagonalTolerance = 1e-9;
// Protected discord must stay above the unprotected one this many samples.
constexpr int kPersistenceSamples = 10;

// Rethrows the active exception with a context prefix, keeping its type.
[[noreturn]] void rethrow_with_context(const std::string& context) {
  const auto msg = [&](const std::exception& e) { return context + ": " + e.what(); };
  try {
    throw;
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(msg(e));
  } catch (const DomainError& e) {
    throw DomainError(msg(e));
  } catch (const StateCorruption& e) {
    throw StateCorruption(msg(e));
  } catch (const PositivityViolation& e) {
    throw PositivityViolation(msg(e), e.eigenvalue());
  } catch (const NumericalFailure& e) {
    throw NumericalFailure(msg(e), e.estimate());
  } catch (const InternalConsistency& e) {
    throw InternalConsistency(msg(e));
  } catch (const IntegrationAbort& e) {
    throw IntegrationAbort(msg(e), e.time(), e.eigenvalue());
  } catch (const IoError& e) {
    throw IoError(msg(e));
  } catch (const Error& e) {
    throw Error(e.code(), msg(e));
  } catch (const std::exception& e) {
    throw InternalConsistency(msg(e));
  }
}

}  // namespace

const std::vector<std::string>& initial_state_names() {
  static const std::vector<std::string> names = {"bell_phi_plus", "mixed_rho1",
                                                 "mixed_rho2"};
  return names;
}

DensityMatrix build_initial_state(const std::string& name) {
  const double r2 = std::numbers::sqrt2 / 2.0;
  if (name == "bell_phi_plus") {
    return validate_density_matrix(ComplexMatrix::outer({r2, 0.0, 0.0, r2}));
  }
  if (name == "mixed_rho1") {
    const ComplexMatrix psi1 = ComplexMatrix::outer({0.5, 0.5, 0.5, 0.5});
    const ComplexMatrix psi2 = ComplexMatrix::outer({r2, 0.0, 0.0, -r2});
    return validate_density_matrix(0.5 * (psi1 + psi2));
  }
  if (name == "mixed_rho2") {
    const ComplexMatrix phi = ComplexMatrix::outer({r2, 0.0, 0.0, r2});
    const ComplexMatrix psi = ComplexMatrix::outer({0.0, r2, r2, 0.0});
    return validate_density_matrix(0.8 * phi + 0.2 * psi);
  }
  std::string valid;
  for (const auto& n : initial_state_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw InvalidArgument("unknown initial state '" + name + "' (valid: " + valid + ")");
}

DensityMatrix InitialStateSpec::resolve() const {
  if (matrix) return validate_density_matrix(*matrix);
  return build_initial_state(name);
}

void Scenario::validate() const {
  if (n_x_list.empty()) throw InvalidArgument("scenario '" + name + "': nx_list is empty");
  for (int n : n_x_list) {
    if (n < 0) throw InvalidArgument("scenario '" + name + "': negative n_x");
  }
  for (std::size_t i = 0; i < n_x_list.size(); ++i)
    for (std::size_t j = i + 1; j < n_x_list.size(); ++j)
      if (n_x_list[i] == n_x_list[j]) {
        throw InvalidArgument("scenario '" + name + "': duplicate n_x " +
                              std::to_string(n_x_list[i]));
      }
  if (!(t_on >= 0.0)) throw InvalidArgument("scenario '" + name + "': t_on must be >= 0");
  if (!(t_final > 0.0)) throw InvalidArgument("scenario '" + name + "': t_final must be > 0");
  if (initial_state.resolve().dim() != 4) {
    throw InvalidArgument("scenario '" + name + "': initial state must be 4x4");
  }
}

const SeriesResult& RunRecord::series_for(int n_x) const {
  for (const auto& s : series)
    if (s.n_x == n_x) return s;
  throw InvalidArgument("run record for scenario '" + scenario.name +
                        "' has no trajectory with n_x = " + std::to_string(n_x));
}

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv(kThreadsEnvVar)) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

// Runs tasks[i]() on a bounded pool; results keep declared order. The first
// failure (in declared order) is rethrown.
template <class Result, class Task>
std::vector<Result> run_ordered(std::size_t count, int threads, Task task) {
  std::vector<std::optional<Result>> results(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i].emplace(task(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  std::vector<Result> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*results[i]));
  }
  return out;
}

SeriesResult run_series(const Scenario& s, const RunSettings& settings,
                        const DensityMatrix& initial, int n_x) {
  SimulationConfig cfg(s.bath, ControlSchedule(n_x, settings.t_c, s.t_on), initial);
  cfg.t_final = s.t_final;
  cfg.dt = settings.dt;
  cfg.quad_tol = settings.quad_tol;
  cfg.sample_stride = settings.sample_stride;
  SeriesResult out{n_x, evolve(cfg), {}};
  out.measures.reserve(out.trajectory.size());
  for (const auto& rho : out.trajectory.states_interaction) {
    MeasureRow row;
    if (s.outputs.discord) row.discord = quantum_discord(rho, settings.optimizer).discord;
    if (s.outputs.concurrence) row.concurrence = concurrence(rho);
    // The ideal evolution is U0 rho(0) U0^dagger, i.e. rho(0) in the interaction frame.
    if (s.outputs.superfidelity) row.superfidelity = superfidelity(rho, initial);
    out.measures.push_back(row);
  }
  return out;
}

bool has_discord(const SeriesResult& s) {
  return !s.measures.empty() && s.measures.front().discord.has_value();
}

std::vector<double> discord_series(const SeriesResult& s, const RunRecord& record) {
  if (!has_discord(s)) {
    throw InvalidArgument("scenario '" + record.scenario.name +
                          "': discord was not computed for n_x = " + std::to_string(s.n_x));
  }
  std::vector<double> d;
  d.reserve(s.measures.size());
  for (const auto& m : s.measures) d.push_back(*m.discord);
  return d;
}

bool bell_diagonal(const ComplexMatrix& rho) {
  const auto c = correlation_vector(rho);
  return max_abs_diff(rho, bell_diagonal_state(c[0], c[1], c[2])) <= kBellDiagonalTolerance;
}

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double upper = v[mid];
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

std::size_t argmax_abs(const std::array<double, 3>& c) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < 3; ++i)
    if (std::abs(c[i]) > std::abs(c[best])) best = i;
  return best;
}

// Locates where |c_a| = |c_b| on the piecewise-linear interpolation of the
// correlation vectors over samples [first, last].
std::optional<TimeEstimate> bell_crossing(const Trajectory& traj, std::size_t first,
                                          std::size_t last, std::size_t a, std::size_t b) {
  std::vector<std::array<double, 3>> c;
  for (std::size_t k = first; k <= last; ++k)
    c.push_back(correlation_vector(traj.states_interaction[k].matrix()));
  auto gap = [&](std::size_t j, double frac) {
    const double ca = (1.0 - frac) * c[j][a] + frac * c[j + 1][a];
    const double cb = (1.0 - frac) * c[j][b] + frac * c[j + 1][b];
    return std::abs(ca) - std::abs(cb);
  };
  for (std::size_t j = 0; j + 1 < c.size(); ++j) {
    double lo = 0.0;
    double hi = 1.0;
    const double g_lo = gap(j, lo);
    if (g_lo < 0.0 || gap(j, hi) > 0.0) continue;
    for (int it = 0; it < 100 && hi - lo > 1e-14; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (gap(j, mid) >= 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double t0 = traj.times[first + j];
    const double t1 = traj.times[first + j + 1];
    return TimeEstimate{t0 + 0.5 * (lo + hi) * (t1 - t0), t0, t1};
  }
  return std::nullopt;
}

}  // namespace

std::optional<TimeEstimate> sudden_transition_time(const RunRecord& record) {
  const SeriesResult& free = record.series_for(0);
  const std::vector<double> d = discord_series(free, record);
  const Trajectory& traj = free.trajectory;
  if (d.size() < static_cast<std::size_t>(kMinPlateauSamples) + 2) return std::nullopt;
  for (int k = 1; k <= kMinPlateauSamples; ++k) {
    if (std::abs(d[k] - d[0]) > kPlateauFlatness) return std::nullopt;
  }

  std::vector<double> slopes;
  for (std::size_t k = 1; k < d.size(); ++k) {
    const double slope = std::abs(d[k] - d[k - 1]) / (traj.times[k] - traj.times[k - 1]);
    if (k > static_cast<std::size_t>(kMinPlateauSamples)) {
      const double threshold = std::max(10.0 * median(slopes), kSlopeFloor);
      if (slope > threshold) {
        const std::size_t first = k >= 2 ? k - 2 : 0;
        const std::size_t last = std::min(k + 1, d.size() - 1);
        bool diagonal = true;
        for (std::size_t j = first; j <= last && diagonal; ++j)
          diagonal = bell_diagonal(traj.states_interaction[j].matrix());
        if (diagonal) {
          const auto before =
              argmax_abs(correlation_vector(traj.states_interaction[first].matrix()));
          const auto after =
              argmax_abs(correlation_vector(traj.states_interaction[last].matrix()));
          if (before != after) {
            if (auto t = bell_crossing(traj, first, last, before, after)) return t;
          }
        }
        return TimeEstimate{traj.times[k - 1], traj.times[k - 1], traj.times[k]};
      }
    }
    slopes.push_back(slope);
  }
  return std::nullopt;
}

std::optional<TimeEstimate> effectiveness_time(const RunRecord& record, int n_x) {
  const SeriesResult& free = record.series_for(0);
  const SeriesResult& driven = record.series_for(n_x);
  const std::vector<double> u = discord_series(free, record);
  const std::vector<double> p = discord_series(driven, record);
  const auto& times = free.trajectory.times;
  if (u.size() != p.size() || driven.trajectory.times != times) {
    throw InternalConsistency("effectiveness_time: trajectories are sampled differently");
  }
  // Ties within optimizer precision do not count as overtaking.
  constexpr double kMargin = 1e-12;
  for (std::size_t k = 1; k < u.size(); ++k) {
    if (p[k] - u[k] <= kMargin) continue;
    const std::size_t end = std::min(u.size(), k + 1 + kPersistenceSamples);
    bool persists = true;
    for (std::size_t j = k + 1; j < end && persists; ++j) persists = p[j] - u[j] > kMargin;
    if (!persists) continue;
    const double d0 = p[k - 1] - u[k - 1];
    const double d1 = p[k] - u[k];
    const double frac = d0 >= 0.0 ? 0.0 : -d0 / (d1 - d0);
    return TimeEstimate{times[k - 1] + frac * (times[k] - times[k - 1]), times[k - 1],
                        times[k]};
  }
  return std::nullopt;
}

RunRecord run_scenario(const Scenario& s, const RunSettings& settings) {
  s.validate();
  const DensityMatrix initial = s.initial_state.resolve();
  RunRecord record{s, settings, {}, {}, {config_hash(s, settings), kEngineVersion,
                                         settings.dt, settings.quad_tol}};
  record.series = run_ordered<SeriesResult>(
      s.n_x_list.size(), resolve_thread_count(settings.threads), [&](std::size_t i) {
        try {
          return run_series(s, settings, initial, s.n_x_list[i]);
        } catch (...) {
          rethrow_with_context("scenario '" + s.name + "', n_x = " +
                               std::to_string(s.n_x_list[i]));
        }
      });

  const bool has_free = std::find(s.n_x_list.begin(), s.n_x_list.end(), 0) != s.n_x_list.end();
  if (has_free && s.outputs.discord) {
    record.derived.t_star = sudden_transition_time(record);
    for (int n : s.n_x_list) {
      if (n != 0) record.derived.t_e.emplace_back(n, effectiveness_time(record, n));
    }
  }
  return record;
}

std::vector<SweepRow> temperature_sweep(const Scenario& base,
                                        const std::vector<double>& temperatures,
                                        const RunSettings& settings, int n_x) {
  for (std::size_t i = 0; i < temperatures.size(); ++i) {
    if (!(temperatures[i] >= 0.0)) throw InvalidArgument("temperature_sweep: negative temperature");
    if (i > 0 && temperatures[i] < temperatures[i - 1]) {
      throw InvalidArgument("temperature_sweep: temperatures must be ascending");
    }
  }
  if (n_x <= 0) throw InvalidArgument("temperature_sweep: n_x must be positive");
  RunSettings inner = settings;
  inner.threads = 1;
  return run_ordered<SweepRow>(
      temperatures.size(), resolve_thread_count(settings.threads), [&](std::size_t i) {
        Scenario s = base;
        s.n_x_list = {0, n_x};
        s.outputs = {true, false, false};
        s.bath = BathParams::from_temperature(base.bath.eta(), base.bath.omega_c(),
                                              temperatures[i]);
        std::ostringstream name;
        name << base.name << "@T=" << temperatures[i];
        s.name = name.str();
        const RunRecord r = run_scenario(s, inner);
        return SweepRow{temperatures[i], r.derived.t_star, effectiveness_time(r, n_x)};
      });
}

DerivedTimesReport derived_times(const std::string& state, int n_x, double temperature,
                                 const RunSettings& settings) {
  if (n_x < 0) throw InvalidArgument("n_x must be non-negative");
  Scenario s;
  s.name = "te";
  s.initial_state.name = state;
  s.n_x_list = n_x == 0 ? std::vector<int>{0} : std::vector<int>{0, n_x};
  s.bath = BathParams::from_temperature(kDefaultEta, kDefaultOmegaC, temperature);
  s.outputs = {true, false, false};
  const RunRecord r = run_scenario(s, settings);
  DerivedTimesReport out{r.derived.t_star, std::nullopt};
  if (n_x != 0) out.t_e = effectiveness_time(r, n_x);
  return out;
}

}  // namespace qds
