#pragma once

// Two-qubit correlation measures. Entropies are in bits. One-way discord
// and classical correlation condition qubit A on projective measurements
// performed on qubit B.

#include <array>

#include "qdshield/operator_core.hpp"

namespace qds {

struct MeasurementBasis {
  double theta = 0.0;  // polar angle in [0, pi]
  double phi = 0.0;    // azimuth in [0, 2 pi)

  std::array<double, 3> bloch() const;
};

struct DiscordResult {
  double discord;
  double classical_correlation;
  double mutual_information;
  MeasurementBasis optimal_basis;
};

struct OptimizerSettings {
  int theta_points = 32;
  int phi_points = 64;
  int refine_starts = 3;
  double value_tolerance = 1e-10;
  int max_iterations = 200;
};

double von_neumann_entropy(const DensityMatrix& rho);
double superfidelity(const DensityMatrix& rho, const DensityMatrix& sigma);
double concurrence(const DensityMatrix& rho);
double mutual_information(const DensityMatrix& rho);

struct ClassicalCorrelation {
  double value;
  MeasurementBasis basis;
};

// S_A - sum_k p_k S(rho_A|k) for one projective basis on B.
double conditional_information(const DensityMatrix& rho, const MeasurementBasis& basis);

ClassicalCorrelation classical_correlation(const DensityMatrix& rho,
                                           const OptimizerSettings& opt = {});
DiscordResult quantum_discord(const DensityMatrix& rho, const OptimizerSettings& opt = {});

// (I + sum_i c_i s_i x s_i) / 4
ComplexMatrix bell_diagonal_state(double c1, double c2, double c3);
// Correlation vector <s_i x s_i>, i = x, y, z.
std::array<double, 3> correlation_vector(const ComplexMatrix& rho);
double bell_diagonal_discord_oracle(double c1, double c2, double c3);

}  // namespace qds
