#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "qdshield/correlation_measures.hpp"
#include "qdshield/errors.hpp"
#include "support/test_support.hpp"

using namespace qds;

namespace {

const double kR2 = std::numbers::sqrt2 / 2.0;

DensityMatrix state(const ComplexMatrix& m) { return validate_density_matrix(m); }
DensityMatrix phi_plus() { return state(ComplexMatrix::outer({kR2, 0, 0, kR2})); }
DensityMatrix maximally_mixed(std::size_t dim = 4) {
  return state((1.0 / dim) * ComplexMatrix::identity(dim));
}
DensityMatrix product_state() {
  const ComplexMatrix a(2, {0.7, cplx(0.1, 0.2), cplx(0.1, -0.2), 0.3});
  const ComplexMatrix b(2, {0.4, 0.25, 0.25, 0.6});
  return state(tensor_product(a, b));
}

// Exhaustive grid over measurement angles on B (about 10^6 points).
double grid_discord(const DensityMatrix& rho) {
  double best = -1.0;
  const int nt = 700, np = 1400;
  for (int i = 0; i <= nt; ++i)
    for (int j = 0; j < np; ++j) {
      const MeasurementBasis b{std::numbers::pi * i / nt, 2.0 * std::numbers::pi * j / np};
      best = std::max(best, conditional_information(rho, b));
    }
  return mutual_information(rho) - best;
}

}  // namespace

TEST_CASE("von Neumann entropy") {
  CHECK(von_neumann_entropy(phi_plus()) == doctest::Approx(0.0));
  CHECK(von_neumann_entropy(maximally_mixed(2)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(von_neumann_entropy(maximally_mixed(4)) == doctest::Approx(2.0).epsilon(1e-14));
  // Small admissible negativity is clamped inside the logarithm.
  const DensityMatrix nearly = state(ComplexMatrix::diagonal({0.5 + 5e-7, 0.5, -5e-7, 0}));
  CHECK(std::isfinite(von_neumann_entropy(nearly)));
  CHECK(von_neumann_entropy(nearly) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("superfidelity") {
  CHECK(superfidelity(phi_plus(), phi_plus()) == doctest::Approx(1.0).epsilon(1e-14));
  const DensityMatrix zero = state(ComplexMatrix::diagonal({1, 0}));
  const DensityMatrix one = state(ComplexMatrix::diagonal({0, 1}));
  CHECK(superfidelity(zero, one) == doctest::Approx(0.0));
  CHECK(superfidelity(maximally_mixed(2), maximally_mixed(2)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(superfidelity(zero, phi_plus()), InvalidArgument);
  std::mt19937_64 rng(21);
  for (int k = 0; k < 50; ++k) {
    const DensityMatrix a = testing::random_state(rng), b = testing::random_state(rng);
    CHECK(superfidelity(a, b) == doctest::Approx(superfidelity(b, a)).epsilon(1e-14));
    CHECK(superfidelity(a, b) <= 1.0 + 1e-12);
  }
}

TEST_CASE("concurrence") {
  CHECK(concurrence(phi_plus()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(concurrence(maximally_mixed()) == doctest::Approx(0.0));
  const DensityMatrix werner = state(0.8 * phi_plus().matrix() + 0.05 * ComplexMatrix::identity(4));
  CHECK(concurrence(werner) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(concurrence(product_state()) < 1e-8);
  // Werner family closed form max(0, (3p - 1) / 2).
  for (double p = 0.0; p <= 1.0; p += 0.05) {
    const DensityMatrix w = state(p * phi_plus().matrix() + (1.0 - p) / 4.0 * ComplexMatrix::identity(4));
    CHECK(concurrence(w) == doctest::Approx(std::max(0.0, (3.0 * p - 1.0) / 2.0)).epsilon(1e-10));
  }
}

TEST_CASE("mutual information") {
  CHECK(mutual_information(product_state()) == doctest::Approx(0.0));
  CHECK(mutual_information(phi_plus()) == doctest::Approx(2.0).epsilon(1e-12));
  const DensityMatrix classical = state(ComplexMatrix::diagonal({0.5, 0, 0, 0.5}));
  CHECK(mutual_information(classical) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("measurement basis") {
  const auto n = MeasurementBasis{std::numbers::pi / 2.0, std::numbers::pi / 2.0}.bloch();
  CHECK(std::abs(n[0]) < 1e-15);
  CHECK(n[1] == doctest::Approx(1.0));
  CHECK(std::abs(n[2]) < 1e-15);
}

TEST_CASE("classical correlation and discord examples") {
  const ClassicalCorrelation prod = classical_correlation(product_state());
  CHECK(std::abs(prod.value) < 1e-9);
  CHECK(classical_correlation(phi_plus()).value == doctest::Approx(1.0).epsilon(1e-10));
  const DensityMatrix rho2 = state(bell_diagonal_state(1.0, -0.6, 0.6));
  CHECK(classical_correlation(rho2).value == doctest::Approx(1.0).epsilon(1e-10));

  const DiscordResult bell = quantum_discord(phi_plus());
  CHECK(bell.discord == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(bell.mutual_information == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(quantum_discord(product_state()).discord) < 1e-9);
  CHECK(std::abs(quantum_discord(state(ComplexMatrix::diagonal({0.5, 0, 0, 0.5}))).discord) < 1e-9);

  const DiscordResult r2 = quantum_discord(rho2);
  CHECK(std::abs(r2.discord - bell_diagonal_discord_oracle(1.0, -0.6, 0.6)) < 1e-6);
  CHECK(r2.discord + r2.classical_correlation == doctest::Approx(r2.mutual_information).epsilon(1e-12));
  // Optimal measurement on rho2 is along x (|c1| = 1 dominates).
  const auto axis = r2.optimal_basis.bloch();
  CHECK(std::abs(axis[0]) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("Bell-diagonal construction and oracle") {
  const ComplexMatrix bd = bell_diagonal_state(1.0, -1.0, 1.0);
  CHECK(max_abs_diff(bd, phi_plus().matrix()) < 1e-15);
  const auto c = correlation_vector(state(bell_diagonal_state(0.3, -0.2, 0.1)).matrix());
  CHECK(c[0] == doctest::Approx(0.3));
  CHECK(c[1] == doctest::Approx(-0.2));
  CHECK(c[2] == doctest::Approx(0.1));
  const auto c2 = correlation_vector(state(0.8 * phi_plus().matrix() +
                                           0.2 * ComplexMatrix::outer({0, kR2, kR2, 0})).matrix());
  CHECK(c2[0] == doctest::Approx(1.0));
  CHECK(c2[1] == doctest::Approx(-0.6));
  CHECK(c2[2] == doctest::Approx(0.6));

  CHECK(bell_diagonal_discord_oracle(1.0, -1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(bell_diagonal_discord_oracle(0.0, 0.0, 0.0)) < 1e-15);
  CHECK(bell_diagonal_discord_oracle(1.0, -0.6, 0.6) == doctest::Approx(0.278071905113).epsilon(1e-10));
  CHECK_THROWS_AS(bell_diagonal_discord_oracle(1.0, 1.0, 1.0), InvalidArgument);
}

TEST_CASE("exhaustive measurement grid agrees with the optimizer and the oracle") {
  const DensityMatrix rho2 = state(bell_diagonal_state(1.0, -0.6, 0.6));
  const double brute = grid_discord(rho2);
  CHECK(std::abs(brute - bell_diagonal_discord_oracle(1.0, -0.6, 0.6)) < 1e-6);
  CHECK(std::abs(brute - quantum_discord(rho2).discord) < 1e-6);

  std::mt19937_64 rng(22);
  const DensityMatrix generic = testing::random_state(rng);
  CHECK(quantum_discord(generic).discord <= grid_discord(generic) + 1e-9);
}

TEST_CASE("refinement never loses to the coarse grid") {
  std::mt19937_64 rng(23);
  const OptimizerSettings opt;
  for (int k = 0; k < 30; ++k) {
    const DensityMatrix rho = testing::random_state(rng);
    double grid_best = -1.0;
    for (int i = 0; i <= opt.theta_points; ++i)
      for (int j = 0; j < opt.phi_points; ++j) {
        const MeasurementBasis b{std::numbers::pi * i / opt.theta_points,
                                 2.0 * std::numbers::pi * j / opt.phi_points};
        grid_best = std::max(grid_best, conditional_information(rho, b));
      }
    CHECK(classical_correlation(rho, opt).value >= grid_best - 1e-12);
  }
}
