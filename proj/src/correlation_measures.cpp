#include "qdshield/correlation_measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "qdshield/errors.hpp"

namespace qds {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

double entropy_of(const std::vector<double>& eigenvalues, double tol_neg) {
  double s = 0.0;
  for (double v : eigenvalues) {
    if (v < -tol_neg) {
      std::ostringstream os;
      os << "entropy: eigenvalue " << v << " below -" << tol_neg;
      throw PositivityViolation(os.str(), v);
    }
    s -= xlog2x(std::max(v, 0.0));
  }
  return std::max(s, 0.0);
}

void require_two_qubit(const DensityMatrix& rho, const char* fn) {
  if (rho.dim() != 4) {
    throw InvalidArgument(std::string(fn) + ": expects a two-qubit (4x4) state");
  }
}

// Eigenvalues of a 2x2 Hermitian block [[a, b], [conj b, d]].
std::array<double, 2> eigenvalues_2x2(const ComplexMatrix& m) {
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  const double r = std::hypot(0.5 * (a - d), std::abs(m(0, 1)));
  return {0.5 * (a + d) + r, 0.5 * (a + d) - r};
}

double partial_entropy(const ComplexMatrix& rho, Subsystem keep, double tol_neg) {
  const auto ev = eigenvalues_2x2(partial_trace(rho, keep));
  return entropy_of({ev[0], ev[1]}, tol_neg);
}

// Precomputed pieces of the conditional-information objective.
class ConditionalObjective {
 public:
  explicit ConditionalObjective(const DensityMatrix& rho)
      : rho_(rho.matrix()),
        tol_(rho.negativity_tolerance()),
        s_a_(partial_entropy(rho.matrix(), Subsystem::A, tol_)) {}

  double operator()(double theta, double phi) const {
    const std::array<double, 3> n = {std::sin(theta) * std::cos(phi),
                                     std::sin(theta) * std::sin(phi), std::cos(theta)};
    double average = 0.0;
    for (double sign : {1.0, -1.0}) {
      // Projector on B: (I + sign n.sigma) / 2
      const cplx p00 = 0.5 * (1.0 + sign * n[2]);
      const cplx p11 = 0.5 * (1.0 - sign * n[2]);
      const cplx p01 = 0.5 * sign * cplx(n[0], -n[1]);
      const cplx p10 = std::conj(p01);
      const cplx proj[2][2] = {{p00, p01}, {p10, p11}};
      // M_{a a'} = sum_{b b'} rho_{(a b),(a' b')} P_{b' b}
      ComplexMatrix m(2);
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t ap = 0; ap < 2; ++ap) {
          cplx acc = 0.0;
          for (std::size_t b = 0; b < 2; ++b)
            for (std::size_t bp = 0; bp < 2; ++bp)
              acc += rho_(2 * a + b, 2 * ap + bp) * proj[bp][b];
          m(a, ap) = acc;
        }
      const double prob = m.trace().real();
      if (prob < 1e-14) continue;
      const auto ev = eigenvalues_2x2(m);
      average += prob * entropy_of({ev[0] / prob, ev[1] / prob}, tol_);
    }
    return s_a_ - average;
  }

  double s_a() const { return s_a_; }

 private:
  ComplexMatrix rho_;
  double tol_;
  double s_a_;
};

MeasurementBasis normalized(double theta, double phi) {
  theta = std::fmod(theta, kTwoPi);
  if (theta < 0.0) theta += kTwoPi;
  if (theta > std::numbers::pi) {
    theta = kTwoPi - theta;
    phi += std::numbers::pi;
  }
  phi = std::fmod(phi, kTwoPi);
  if (phi < 0.0) phi += kTwoPi;
  return {theta, phi};
}

struct Vertex {
  double x[2];
  double f;  // objective value (maximized)
};

// Nelder-Mead maximization in (theta, phi). Returns the best vertex and
// whether the simplex values agreed within tolerance.
std::pair<Vertex, bool> nelder_mead(const ConditionalObjective& obj, double theta,
                                    double phi, double step_theta, double step_phi,
                                    const OptimizerSettings& opt) {
  auto eval = [&](double t, double p) { return Vertex{{t, p}, obj(t, p)}; };
  std::array<Vertex, 3> s = {eval(theta, phi), eval(theta + step_theta, phi),
                             eval(theta, phi + step_phi)};
  auto by_value = [](const Vertex& a, const Vertex& b) { return a.f > b.f; };
  for (int it = 0; it < opt.max_iterations; ++it) {
    std::sort(s.begin(), s.end(), by_value);
    if (s[0].f - s[2].f <= opt.value_tolerance) return {s[0], true};
    const double cx = 0.5 * (s[0].x[0] + s[1].x[0]);
    const double cy = 0.5 * (s[0].x[1] + s[1].x[1]);
    const Vertex r = eval(cx + (cx - s[2].x[0]), cy + (cy - s[2].x[1]));
    if (r.f > s[0].f) {
      const Vertex e = eval(cx + 2.0 * (cx - s[2].x[0]), cy + 2.0 * (cy - s[2].x[1]));
      s[2] = e.f > r.f ? e : r;
    } else if (r.f > s[1].f) {
      s[2] = r;
    } else {
      const bool outside = r.f > s[2].f;
      const Vertex& ref = outside ? r : s[2];
      const Vertex c = eval(cx + 0.5 * (ref.x[0] - cx), cy + 0.5 * (ref.x[1] - cy));
      if (c.f > ref.f) {
        s[2] = c;
      } else {
        for (int k = 1; k < 3; ++k) {
          s[k] = eval(s[0].x[0] + 0.5 * (s[k].x[0] - s[0].x[0]),
                      s[0].x[1] + 0.5 * (s[k].x[1] - s[0].x[1]));
        }
      }
    }
  }
  std::sort(s.begin(), s.end(), by_value);
  return {s[0], s[0].f - s[2].f <= opt.value_tolerance};
}

}  // namespace

std::array<double, 3> MeasurementBasis::bloch() const {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
          std::cos(theta)};
}

double von_neumann_entropy(const DensityMatrix& rho) {
  return entropy_of(hermitian_eigenvalues(rho.matrix()), rho.negativity_tolerance());
}

double superfidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw InvalidArgument("superfidelity: dimension mismatch");
  }
  const ComplexMatrix& a = rho.matrix();
  const ComplexMatrix& b = sigma.matrix();
  const double overlap = (a * b).trace().real();
  auto radicand = [](const ComplexMatrix& m, double tol_neg) {
    const double r = 1.0 - (m * m).trace().real();
    // Slightly negative spectra push the purity a little above one.
    if (r < -std::max(1e-12, 4.0 * tol_neg)) {
      throw InvalidArgument("superfidelity: purity exceeds one");
    }
    return std::max(r, 0.0);
  };
  return overlap + std::sqrt(radicand(a, rho.negativity_tolerance())) *
                       std::sqrt(radicand(b, sigma.negativity_tolerance()));
}

double concurrence(const DensityMatrix& rho) {
  require_two_qubit(rho, "concurrence");
  const ComplexMatrix yy = tensor_product(pauli::Y(), pauli::Y());
  const ComplexMatrix& m = rho.matrix();
  const ComplexMatrix r = m * yy * m.conjugate() * yy;
  const auto eig = general_eigenvalues(r);
  const double scale = std::max(r.norm(), 1e-300);
  std::vector<double> roots;
  for (const cplx& e : eig) {
    if (std::abs(e.imag()) > 1e-8 * scale) {
      std::ostringstream os;
      os << "concurrence: eigenvalue " << e << " has a significant imaginary part";
      throw NumericalFailure(os.str(), std::abs(e.imag()));
    }
    roots.push_back(std::sqrt(std::max(e.real(), 0.0)));
  }
  std::sort(roots.begin(), roots.end(), std::greater<>());
  return std::clamp(roots[0] - roots[1] - roots[2] - roots[3], 0.0, 1.0);
}

double mutual_information(const DensityMatrix& rho) {
  require_two_qubit(rho, "mutual_information");
  const double tol = rho.negativity_tolerance();
  const double value = partial_entropy(rho.matrix(), Subsystem::A, tol) +
                       partial_entropy(rho.matrix(), Subsystem::B, tol) -
                       von_neumann_entropy(rho);
  if (value < -1e-9) {
    throw NumericalFailure("mutual_information: negative value", value);
  }
  return std::max(value, 0.0);
}

double conditional_information(const DensityMatrix& rho, const MeasurementBasis& basis) {
  require_two_qubit(rho, "conditional_information");
  return ConditionalObjective(rho)(basis.theta, basis.phi);
}

ClassicalCorrelation classical_correlation(const DensityMatrix& rho,
                                           const OptimizerSettings& opt) {
  require_two_qubit(rho, "classical_correlation");
  if (opt.theta_points < 2 || opt.phi_points < 2 || opt.refine_starts < 1) {
    throw InvalidArgument("classical_correlation: optimizer grid too small");
  }
  const ConditionalObjective obj(rho);
  const double d_theta = std::numbers::pi / opt.theta_points;
  const double d_phi = kTwoPi / opt.phi_points;

  struct GridPoint {
    double theta, phi, value;
  };
  std::vector<GridPoint> grid;
  grid.reserve(static_cast<std::size_t>(opt.theta_points) * opt.phi_points);
  for (int i = 0; i < opt.theta_points; ++i) {
    const double theta = i * d_theta;
    for (int j = 0; j < opt.phi_points; ++j) {
      const double phi = j * d_phi;
      grid.push_back({theta, phi, obj(theta, phi)});
    }
  }
  const std::size_t starts =
      std::min<std::size_t>(static_cast<std::size_t>(opt.refine_starts), grid.size());
  std::partial_sort(grid.begin(), grid.begin() + static_cast<std::ptrdiff_t>(starts),
                    grid.end(),
                    [](const GridPoint& a, const GridPoint& b) { return a.value > b.value; });

  double best = grid.front().value;
  MeasurementBasis best_basis{grid.front().theta, grid.front().phi};
  bool converged = false;
  for (std::size_t k = 0; k < starts; ++k) {
    const auto [vertex, ok] =
        nelder_mead(obj, grid[k].theta, grid[k].phi, 0.5 * d_theta, 0.5 * d_phi, opt);
    converged = converged || ok;
    if (vertex.f > best) {
      best = vertex.f;
      best_basis = normalized(vertex.x[0], vertex.x[1]);
    }
  }
  if (!converged) {
    std::ostringstream os;
    os << "classical_correlation: simplex refinement did not converge (best value "
       << best << ")";
    throw NumericalFailure(os.str(), best);
  }
  return {std::max(best, 0.0), best_basis};
}

DiscordResult quantum_discord(const DensityMatrix& rho, const OptimizerSettings& opt) {
  const double info = mutual_information(rho);
  const ClassicalCorrelation cc = classical_correlation(rho, opt);
  double discord = info - cc.value;
  if (discord < -1e-8) {
    throw NumericalFailure("quantum_discord: classical correlation exceeds mutual information",
                           discord);
  }
  discord = std::max(discord, 0.0);
  return {discord, info - discord, info, cc.basis};
}

ComplexMatrix bell_diagonal_state(double c1, double c2, double c3) {
  ComplexMatrix m = ComplexMatrix::identity(4);
  m += c1 * tensor_product(pauli::X(), pauli::X());
  m += c2 * tensor_product(pauli::Y(), pauli::Y());
  m += c3 * tensor_product(pauli::Z(), pauli::Z());
  m *= 0.25;
  return m;
}

std::array<double, 3> correlation_vector(const ComplexMatrix& rho) {
  return {(rho * tensor_product(pauli::X(), pauli::X())).trace().real(),
          (rho * tensor_product(pauli::Y(), pauli::Y())).trace().real(),
          (rho * tensor_product(pauli::Z(), pauli::Z())).trace().real()};
}

double bell_diagonal_discord_oracle(double c1, double c2, double c3) {
  const std::array<double, 4> weights = {
      0.25 * (1.0 + c1 - c2 + c3),  // Phi+
      0.25 * (1.0 - c1 + c2 + c3),  // Phi-
      0.25 * (1.0 + c1 + c2 - c3),  // Psi+
      0.25 * (1.0 - c1 - c2 - c3),  // Psi-
  };
  for (double w : weights) {
    if (w < -1e-12) {
      std::ostringstream os;
      os << "bell_diagonal_discord_oracle: correlation vector (" << c1 << ", " << c2
         << ", " << c3 << ") is not a valid state";
      throw InvalidArgument(os.str());
    }
  }
  double info = 2.0;
  for (double w : weights) info += xlog2x(std::max(w, 0.0));
  const double chi = std::max({std::abs(c1), std::abs(c2), std::abs(c3)});
  const double classical = 0.5 * (xlog2x(1.0 + chi) + xlog2x(1.0 - chi));
  return info - classical;
}

}  // namespace qds
