#pragma once

// Second-order interaction-picture master equation for two qubits, each
// dephased by its own (identical) ohmic bath:
//
//   d rho_I / dt = sum_i [Lambda_i(t), rho_I K_i(t)] + [K_i(t)^dagger rho_I, Lambda_i(t)],
//   K_i(t) = int_0^t D(t - t') Lambda_i(t') dt'.
//
// rho_I(t) sits outside the memory integral, so the equation is a linear
// ODE with time-dependent coefficients. Because D depends only on the lag,
// K_i(t) is assembled from the cumulative kernel moments A, B of the active
// control segment plus a closed-form contribution from before turn-on.

#include <utility>
#include <vector>

#include "qdshield/bath_kernel.hpp"
#include "qdshield/control_field.hpp"
#include "qdshield/operator_core.hpp"

namespace qds {

// Tolerance for stored trajectory states; looser than the construction
// tolerance because second-order dynamics may dip slightly below zero.
inline constexpr double kTrajectoryNegativityTolerance = 1e-4;

inline constexpr double kDefaultEta = 1.0 / 16.0;
inline constexpr double kDefaultOmegaC = 2.0 * 3.14159265358979323846;

struct SimulationConfig {
  SimulationConfig(BathParams bath_, ControlSchedule schedule_, DensityMatrix initial)
      : bath(bath_), schedule(schedule_), initial_state(std::move(initial)) {}

  BathParams bath;
  ControlSchedule schedule;
  DensityMatrix initial_state;
  double t_final = 3.0;
  double dt = 1e-3;
  double quad_tol = kDefaultQuadTolerance;
  int sample_stride = 10;

  // Throws InvalidArgument when an invariant is violated.
  void validate() const;
};

struct SampleDiagnostics {
  double trace_error;
  double min_eigenvalue;
  double hermiticity_defect;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states_interaction;
  std::vector<DensityMatrix> states_schrodinger;
  std::vector<SampleDiagnostics> diagnostics;

  std::size_t size() const noexcept { return times.size(); }
};

// K_i(t) as a 4x4 operator on `qubit`. `moments` must be current at t for
// the active segment (ignored while the drive is off).
ComplexMatrix memory_operator(double t, Subsystem qubit, const KernelMoments& moments,
                              const ControlSchedule& s, const BathParams& p);

ComplexMatrix master_rhs(double t, const ComplexMatrix& rho_I, const ComplexMatrix& k1,
                         const ComplexMatrix& k2, const ControlSchedule& s);

Trajectory evolve(const SimulationConfig& cfg);

// Closed-form single-qubit coherence |2 rho_01(t)| / |2 rho_01(0)| for the
// undriven model at zero temperature: (1 + wc^2 t^2)^(-2 eta).
double dephasing_oracle_coherence(double t, const BathParams& p);

}  // namespace qds
