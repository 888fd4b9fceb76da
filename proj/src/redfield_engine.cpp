#include "qdshield/redfield_engine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "qdshield/errors.hpp"

namespace qds {

void SimulationConfig::validate() const {
  if (initial_state.dim() != 4) {
    throw InvalidArgument("initial state must be a two-qubit (4x4) density matrix");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
  if (!(t_final >= dt)) throw InvalidArgument("t_final must be at least dt");
  if (sample_stride < 1) throw InvalidArgument("sample_stride must be >= 1");
  if (!(quad_tol > 0.0)) throw InvalidArgument("quad_tol must be positive");
  if (!schedule.field_off()) {
    const double limit = schedule.t_c() / (40.0 * std::max(schedule.multiplier(), 1.0));
    if (dt > limit * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "dt = " << dt << " does not resolve the drive; need dt <= " << limit;
      throw InvalidArgument(os.str());
    }
  }
}

ComplexMatrix memory_operator(double t, Subsystem qubit, const KernelMoments& moments,
                              const ControlSchedule& s, const BathParams& p) {
  if (!s.active_at(t)) {
    return on_qubit(kernel_integral(t, p) * pauli::Z(), qubit);
  }
  if (std::abs(moments.t - t) > 1e-12 * std::max(1.0, std::abs(t)) ||
      moments.segment_origin != s.t_on()) {
    std::ostringstream os;
    os << "memory_operator: moments at t = " << moments.t << " (origin "
       << moments.segment_origin << ") are stale for t = " << t;
    throw InternalConsistency(os.str());
  }
  const double lag = t - s.t_on();
  const double phase = s.modulation_frequency() * lag;
  const double c = std::cos(phase);
  const double sn = std::sin(phase);
  cplx k_z = c * moments.A + sn * moments.B;
  const cplx k_y = sn * moments.A - c * moments.B;
  if (s.t_on() > 0.0) {
    // Lags beyond the active segment reach back to before turn-on, where
    // Lambda = sz.
    k_z += kernel_integral(t, p) - kernel_integral(lag, p);
  }
  return on_qubit(k_z * pauli::Z() + k_y * pauli::Y(), qubit);
}

ComplexMatrix master_rhs(double t, const ComplexMatrix& rho_I, const ComplexMatrix& k1,
                         const ComplexMatrix& k2, const ControlSchedule& s) {
  const ComplexMatrix lambda = lambda_operator(t, s);
  ComplexMatrix out(4);
  const std::pair<Subsystem, const ComplexMatrix*> terms[] = {{Subsystem::A, &k1},
                                                              {Subsystem::B, &k2}};
  for (const auto& [qubit, k] : terms) {
    const ComplexMatrix l = on_qubit(lambda, qubit);
    const ComplexMatrix x = commutator(l, rho_I * (*k));
    out += x;
    out += x.adjoint();
  }
  return out;
}

namespace {

SampleDiagnostics diagnose(const ComplexMatrix& m) {
  return {std::abs(m.trace() - 1.0), hermitian_eigenvalues(m).back(),
          m.hermiticity_defect()};
}

DensityMatrix checked_state(const ComplexMatrix& m, double t) {
  try {
    return validate_density_matrix(m, kTrajectoryNegativityTolerance);
  } catch (const PositivityViolation& e) {
    std::ostringstream os;
    os << "integration aborted at t = " << t << ": eigenvalue " << e.eigenvalue()
       << " below -" << kTrajectoryNegativityTolerance;
    throw IntegrationAbort(os.str(), t, e.eigenvalue());
  }
}

}  // namespace

Trajectory evolve(const SimulationConfig& cfg) {
  cfg.validate();
  const ControlSchedule& s = cfg.schedule;
  const BathParams& p = cfg.bath;
  const double nu = s.modulation_frequency();

  const auto steps = std::max<long long>(1, std::llround(cfg.t_final / cfg.dt));
  const double h = cfg.t_final / static_cast<double>(steps);

  Trajectory traj;
  auto store = [&](double t, const ComplexMatrix& rho) {
    const ComplexMatrix u = u0_two_qubit(t, s);
    traj.times.push_back(t);
    traj.states_interaction.push_back(checked_state(rho, t));
    traj.states_schrodinger.push_back(checked_state(u * rho * u.adjoint(), t));
    traj.diagnostics.push_back(diagnose(rho));
  };

  ComplexMatrix rho = cfg.initial_state.matrix();
  store(0.0, rho);

  // Moments of the active segment, current at max(t, t_on).
  KernelMoments moments = KernelMoments::start(s.t_on());
  auto moments_at = [&](const KernelMoments& from, double t) {
    return s.active_at(t) ? advance_moments(from, t, nu, p, cfg.quad_tol) : from;
  };
  auto rhs = [&](double t, const ComplexMatrix& r, const KernelMoments& m) {
    const ComplexMatrix k1 = memory_operator(t, Subsystem::A, m, s, p);
    const ComplexMatrix k2 = memory_operator(t, Subsystem::B, m, s, p);
    return master_rhs(t, r, k1, k2, s);
  };

  for (long long k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * h;
    const double t_half = t + 0.5 * h;
    const double t_next = static_cast<double>(k + 1) * h;
    const KernelMoments m_half = moments_at(moments, t_half);
    const KernelMoments m_next = moments_at(m_half, t_next);

    const ComplexMatrix d1 = rhs(t, rho, moments);
    const ComplexMatrix d2 = rhs(t_half, rho + (0.5 * h) * d1, m_half);
    const ComplexMatrix d3 = rhs(t_half, rho + (0.5 * h) * d2, m_half);
    const ComplexMatrix d4 = rhs(t_next, rho + h * d3, m_next);
    rho += (h / 6.0) * (d1 + 2.0 * d2 + 2.0 * d3 + d4);
    moments = m_next;

    if ((k + 1) % cfg.sample_stride == 0 || k + 1 == steps) store(t_next, rho);
  }
  return traj;
}

namespace {

// Adaptive Simpson on a real integrand.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double dephasing_oracle_coherence(double t, const BathParams& p) {
  if (t < 0.0) throw InvalidArgument("dephasing_oracle_coherence: negative time");
  const double wc = p.omega_c();
  if (p.zero_temperature()) return std::pow(1.0 + wc * wc * t * t, -2.0 * p.eta());
  if (t == 0.0) return 1.0;
  // Gamma(t) = 4 int_0^t Re kappa(s) ds = 4 int_0^t (t - u) Re D(u) du.
  const std::function<double(double)> f = [&](double u) {
    return (t - u) * kernel_D(u, p).real();
  };
  const double fa = f(0.0);
  const double fm = f(0.5 * t);
  const double fb = f(t);
  const double whole = t / 6.0 * (fa + 4.0 * fm + fb);
  const double integral = adaptive_simpson(f, 0.0, t, fa, fm, fb, whole, 1e-12, 40);
  return std::exp(-4.0 * integral);
}

}  // namespace qds
