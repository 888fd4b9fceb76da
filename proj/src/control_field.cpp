#include "qdshield/control_field.hpp"

#include <cmath>
#include <numbers>

#include "qdshield/errors.hpp"

namespace qds {

namespace {

void check_period(double t_c, double t_on) {
  if (!(t_c > 0.0) || !std::isfinite(t_c)) {
    throw InvalidArgument("control period t_c must be positive");
  }
  if (!(t_on >= 0.0)) throw InvalidArgument("turn-on time must be non-negative");
}

}  // namespace

ControlSchedule::ControlSchedule(int n_x, double t_c, double t_on)
    : ControlSchedule(static_cast<double>(n_x), t_c, t_on, true) {
  if (n_x < 0) throw InvalidArgument("field multiplier n_x must be non-negative");
}

ControlSchedule::ControlSchedule(double multiplier, double t_c, double t_on, bool)
    : multiplier_(multiplier), t_c_(t_c), t_on_(t_on) {
  check_period(t_c, t_on);
}

ControlSchedule ControlSchedule::with_fractional_multiplier(double multiplier, double t_c,
                                                            double t_on) {
  if (!(multiplier >= 0.0)) throw InvalidArgument("field multiplier must be non-negative");
  return ControlSchedule(multiplier, t_c, t_on, true);
}

double ControlSchedule::omega() const noexcept { return 2.0 * std::numbers::pi / t_c_; }

double ControlSchedule::modulation_frequency() const noexcept {
  return 2.0 * multiplier_ * omega();
}

LambdaCoefficients lambda_coefficients(double t, const ControlSchedule& s) {
  if (!s.active_at(t)) return {1.0, 0.0};
  const double phase = s.modulation_frequency() * (t - s.t_on());
  return {std::cos(phase), std::sin(phase)};
}

ComplexMatrix lambda_operator(double t, const ControlSchedule& s) {
  const auto [c_z, c_y] = lambda_coefficients(t, s);
  return c_z * pauli::Z() + c_y * pauli::Y();
}

ComplexMatrix u0_two_qubit(double t, const ControlSchedule& s) {
  if (!s.active_at(t)) return ComplexMatrix::identity(4);
  // exp(-i nx w t sx) = su2_exponential(x, 2 nx w t)
  const double angle = s.modulation_frequency() * (t - s.t_on());
  const ComplexMatrix single = su2_exponential({1.0, 0.0, 0.0}, angle);
  return tensor_product(single, single);
}

double decoupling_residual(const ControlSchedule& s, int quad_points) {
  if (quad_points < 64) throw InvalidArgument("decoupling_residual: quad_points must be >= 64");
  const int n = quad_points % 2 == 0 ? quad_points : quad_points + 1;
  // Evaluate over one control period measured from turn-on.
  const ControlSchedule from_zero =
      s.n_x() == s.multiplier()
          ? ControlSchedule(s.n_x(), s.t_c(), 0.0)
          : ControlSchedule::with_fractional_multiplier(s.multiplier(), s.t_c(), 0.0);
  const double h = s.t_c() / n;
  const ComplexMatrix sz1 = on_qubit(pauli::Z(), Subsystem::A);
  ComplexMatrix avg(4);
  for (int k = 0; k <= n; ++k) {
    const double t = k * h;
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    const ComplexMatrix u = u0_two_qubit(t, from_zero);
    avg += (w * h / 3.0) * (u.adjoint() * sz1 * u);
  }
  avg *= 1.0 / s.t_c();
  return operator_norm(avg);
}

}  // namespace qds
