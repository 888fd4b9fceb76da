#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>

#include "qdshield/bath_kernel.hpp"
#include "qdshield/control_field.hpp"
#include "qdshield/correlation_measures.hpp"
#include "qdshield/redfield_engine.hpp"
#include "qdshield/scenario.hpp"

namespace qds {

namespace {

std::string fmt(const char* pattern, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

SelfCheckResult guarded(const std::string& name, const std::function<SelfCheckResult()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return {name, false, std::string("threw: ") + e.what()};
  }
}

}  // namespace

std::vector<SelfCheckResult> run_self_checks() {
  std::vector<SelfCheckResult> out;
  const BathParams vacuum(kDefaultEta, kDefaultOmegaC);

  out.push_back(guarded("trigamma(1) = pi^2/6", [] {
    const double got = trigamma(cplx(1.0, 0.0)).real();
    const double want = std::numbers::pi * std::numbers::pi / 6.0;
    return SelfCheckResult{"trigamma(1) = pi^2/6", std::abs(got - want) < 1e-12,
                           fmt("got %.15g want %.15g", got, want)};
  }));

  out.push_back(guarded("kernel integral matches Simpson", [&] {
    const double x = 0.7;
    const int n = 4000;
    const double h = x / n;
    cplx acc = kernel_D(0.0, vacuum) + kernel_D(x, vacuum);
    for (int k = 1; k < n; ++k) acc += (k % 2 ? 4.0 : 2.0) * kernel_D(k * h, vacuum);
    acc *= h / 3.0;
    const double err = std::abs(acc - kernel_integral(x, vacuum));
    return SelfCheckResult{"kernel integral matches Simpson", err < 1e-9,
                           fmt("abs error %.3g (x = %.2f)", err, x)};
  }));

  out.push_back(guarded("decoupling residual vanishes for integer n_x", [] {
    double worst = 0.0;
    for (int n = 1; n <= 4; ++n) worst = std::max(worst, decoupling_residual(ControlSchedule(n)));
    return SelfCheckResult{"decoupling residual vanishes for integer n_x", worst < 1e-10,
                           fmt("max residual %.3g over n_x = 1..%.0f", worst, 4.0)};
  }));

  out.push_back(guarded("discord matches Bell-diagonal closed form", [] {
    const double c1 = 1.0, c2 = -0.6, c3 = 0.6;
    const DensityMatrix rho = validate_density_matrix(bell_diagonal_state(c1, c2, c3));
    const double got = quantum_discord(rho).discord;
    const double want = bell_diagonal_discord_oracle(c1, c2, c3);
    return SelfCheckResult{"discord matches Bell-diagonal closed form",
                           std::abs(got - want) < 1e-8, fmt("got %.12g want %.12g", got, want)};
  }));

  out.push_back(guarded("undriven single-qubit coherence matches closed form", [&] {
    // |+><+| on A, |0><0| on B: the A coherence follows the single-qubit law.
    ComplexMatrix plus(2, {0.5, 0.5, 0.5, 0.5});
    ComplexMatrix zero(2, {1.0, 0.0, 0.0, 0.0});
    SimulationConfig cfg(vacuum, ControlSchedule(0),
                         validate_density_matrix(tensor_product(plus, zero)));
    cfg.t_final = 0.5;
    cfg.sample_stride = 50;
    const Trajectory traj = evolve(cfg);
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const DensityMatrix a = partial_trace(traj.states_interaction[k], Subsystem::A);
      const double coherence = 2.0 * std::abs(a.matrix()(0, 1));
      worst = std::max(worst,
                       std::abs(coherence - dephasing_oracle_coherence(traj.times[k], vacuum)));
    }
    return SelfCheckResult{"undriven single-qubit coherence matches closed form", worst < 1e-3,
                           fmt("max deviation %.3g up to t = %.2f", worst, 0.5)};
  }));

  return out;
}

}  // namespace qds
