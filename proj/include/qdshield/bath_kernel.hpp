#pragma once

// Ohmic dephasing bath: spectral density, Bose occupation and the two-time
// correlation kernel
//
//   D(u) = eta wc^2 / (1 + i wc u)^2
//        + (2 eta / beta^2) Re psi1(1 + 1/(beta wc) - i u / beta),
//
// which is the closed form of  int_0^inf J(w) [(2 n(w) + 1) cos(w u)
// - i sin(w u)] dw  for J(w) = eta w exp(-w / wc).
//
// Time unit is tau = 1; frequencies are per tau.

#include <complex>
#include <limits>

namespace qds {

using cplx = std::complex<double>;

class BathParams {
 public:
  static constexpr double kZeroTemperature = std::numeric_limits<double>::infinity();

  // beta = kZeroTemperature selects the vacuum kernel.
  BathParams(double eta, double omega_c, double beta = kZeroTemperature);
  // temperature = 0 selects the vacuum kernel.
  static BathParams from_temperature(double eta, double omega_c, double temperature);

  double eta() const noexcept { return eta_; }
  double omega_c() const noexcept { return omega_c_; }
  double beta() const noexcept { return beta_; }
  bool zero_temperature() const noexcept { return zero_temperature_; }
  double temperature() const noexcept { return zero_temperature_ ? 0.0 : 1.0 / beta_; }

 private:
  double eta_;
  double omega_c_;
  double beta_;
  bool zero_temperature_;
};

double spectral_density(double omega, const BathParams& p);
double occupation(double omega, const BathParams& p);

// Polygamma functions of complex argument. Throw DomainError at poles.
cplx trigamma(cplx z);
cplx digamma(cplx z);

cplx kernel_D(double u, const BathParams& p);

// int_0^x D(u) du in closed form (digamma antiderivative of the thermal term).
cplx kernel_integral(double x, const BathParams& p);

// Cumulative modulated moments over lags u in [0, t - segment_origin]:
//   A = int D(u) cos(nu u) du,  B = int D(u) sin(nu u) du.
struct KernelMoments {
  double t = 0.0;
  cplx A{};
  cplx B{};
  double segment_origin = 0.0;

  static KernelMoments start(double origin) { return {origin, {}, {}, origin}; }
};

inline constexpr double kDefaultQuadTolerance = 1e-10;

// Extends the moments to t_next. modulation_frequency is the angular
// frequency nu of the cos/sin factor. Throws NumericalFailure if the
// adaptive rule cannot reach quad_tol.
KernelMoments advance_moments(const KernelMoments& m, double t_next,
                              double modulation_frequency, const BathParams& p,
                              double quad_tol = kDefaultQuadTolerance);

}  // namespace qds
