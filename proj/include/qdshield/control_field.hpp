#pragma once

// Continuous decoupling drive H0 = nx * w * (sx(1) + sx(2)), w = 2 pi / tc,
// switched on at t_on with its phase counted from t_on. In the frame of H0
// the dephasing operator becomes
//
//   Lambda_i(t) = U0^dagger(t) sz(i) U0(t) = cz(t) sz(i) + cy(t) sy(i),
//   cz = cos(2 nx w (t - t_on)),  cy = sin(2 nx w (t - t_on)).

#include "qdshield/operator_core.hpp"

namespace qds {

class ControlSchedule {
 public:
  explicit ControlSchedule(int n_x, double t_c = 1.0, double t_on = 0.0);

  // Accepts a non-integer field multiplier; only meant for exercising the
  // decoupling condition away from integer amplitudes.
  static ControlSchedule with_fractional_multiplier(double multiplier, double t_c = 1.0,
                                                    double t_on = 0.0);

  double multiplier() const noexcept { return multiplier_; }
  int n_x() const noexcept { return static_cast<int>(multiplier_); }
  double t_c() const noexcept { return t_c_; }
  double t_on() const noexcept { return t_on_; }
  double omega() const noexcept;
  bool field_off() const noexcept { return multiplier_ == 0.0; }
  // True when the drive acts at time t.
  bool active_at(double t) const noexcept { return !field_off() && t >= t_on_; }
  // Angular frequency 2 nx w of the rotated coupling.
  double modulation_frequency() const noexcept;

 private:
  ControlSchedule(double multiplier, double t_c, double t_on, bool);

  double multiplier_;
  double t_c_;
  double t_on_;
};

struct LambdaCoefficients {
  double c_z;
  double c_y;
};

LambdaCoefficients lambda_coefficients(double t, const ControlSchedule& s);

// Lambda operator on one qubit as a 2x2 matrix.
ComplexMatrix lambda_operator(double t, const ControlSchedule& s);

ComplexMatrix u0_two_qubit(double t, const ControlSchedule& s);

// || (1/tc) int_0^tc U0^dagger (sz x I) U0 dt ||, composite Simpson rule.
double decoupling_residual(const ControlSchedule& s, int quad_points = 256);

}  // namespace qds
