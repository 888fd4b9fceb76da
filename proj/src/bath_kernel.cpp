#include "qdshield/bath_kernel.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "qdshield/errors.hpp"

namespace qds {

BathParams::BathParams(double eta, double omega_c, double beta)
    : eta_(eta), omega_c_(omega_c), beta_(beta), zero_temperature_(std::isinf(beta)) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw InvalidArgument("bath damping eta must be positive");
  }
  if (!(omega_c > 0.0) || !std::isfinite(omega_c)) {
    throw InvalidArgument("bath cutoff omega_c must be positive");
  }
  if (!(beta > 0.0)) {
    throw InvalidArgument("inverse temperature beta must be positive or infinite");
  }
}

BathParams BathParams::from_temperature(double eta, double omega_c, double temperature) {
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw InvalidArgument("temperature must be finite and non-negative");
  }
  return BathParams(eta, omega_c, temperature == 0.0 ? kZeroTemperature : 1.0 / temperature);
}

double spectral_density(double omega, const BathParams& p) {
  if (omega < 0.0) throw InvalidArgument("spectral_density: negative frequency");
  return p.eta() * omega * std::exp(-omega / p.omega_c());
}

double occupation(double omega, const BathParams& p) {
  if (!(omega > 0.0)) throw InvalidArgument("occupation: frequency must be positive");
  if (p.zero_temperature()) return 0.0;
  return 1.0 / std::expm1(p.beta() * omega);
}

namespace {

constexpr double kShiftThreshold = 12.0;

// B_2 .. B_12
constexpr std::array<double, 6> kBernoulli = {
    1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0};

void check_pole(cplx z, const char* fn) {
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real())) {
    std::ostringstream os;
    os << fn << ": pole at z = " << z.real();
    throw DomainError(os.str());
  }
}

cplx trigamma_asymptotic(cplx z) {
  const cplx inv = 1.0 / z;
  const cplx inv2 = inv * inv;
  cplx sum = 0.0;
  cplx power = inv * inv2;  // z^{-3}
  for (double b : kBernoulli) {
    sum += b * power;
    power *= inv2;
  }
  return inv + 0.5 * inv2 + sum;
}

cplx digamma_asymptotic(cplx z) {
  const cplx inv = 1.0 / z;
  const cplx inv2 = inv * inv;
  cplx sum = 0.0;
  cplx power = inv2;
  for (std::size_t k = 0; k < kBernoulli.size(); ++k) {
    sum += kBernoulli[k] / (2.0 * static_cast<double>(k + 1)) * power;
    power *= inv2;
  }
  return std::log(z) - 0.5 * inv - sum;
}

}  // namespace

cplx trigamma(cplx z) {
  check_pole(z, "trigamma");
  if (z.real() < 0.5) {
    // psi1(1 - z) + psi1(z) = pi^2 / sin^2(pi z)
    const cplx s = std::sin(std::numbers::pi * z);
    return std::numbers::pi * std::numbers::pi / (s * s) - trigamma(1.0 - z);
  }
  cplx acc = 0.0;
  while (z.real() < kShiftThreshold) {
    acc += 1.0 / (z * z);
    z += 1.0;
  }
  return acc + trigamma_asymptotic(z);
}

cplx digamma(cplx z) {
  check_pole(z, "digamma");
  if (z.real() < 0.5) {
    // psi(1 - z) - psi(z) = pi cot(pi z)
    return digamma(1.0 - z) - std::numbers::pi / std::tan(std::numbers::pi * z);
  }
  cplx acc = 0.0;
  while (z.real() < kShiftThreshold) {
    acc -= 1.0 / z;
    z += 1.0;
  }
  return acc + digamma_asymptotic(z);
}

cplx kernel_D(double u, const BathParams& p) {
  const double wc = p.omega_c();
  const cplx denom(1.0, wc * u);
  cplx d = p.eta() * wc * wc / (denom * denom);
  if (!p.zero_temperature()) {
    const double beta = p.beta();
    const cplx z(1.0 + 1.0 / (beta * wc), -u / beta);
    d += 2.0 * p.eta() / (beta * beta) * trigamma(z).real();
  }
  return d;
}

cplx kernel_integral(double x, const BathParams& p) {
  const double wc = p.omega_c();
  const cplx i(0.0, 1.0);
  cplx f = i * p.eta() * wc * (1.0 / cplx(1.0, wc * x) - 1.0);
  if (!p.zero_temperature()) {
    // d/du psi(1 + a - i u / beta) = (-i / beta) psi1(...), and psi(1 + a) is
    // real, so the thermal part integrates to -(2 eta / beta) Im psi(...).
    const double beta = p.beta();
    const cplx z(1.0 + 1.0 / (beta * wc), -x / beta);
    f += -2.0 * p.eta() / beta * digamma(z).imag();
  }
  return f;
}

namespace {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct MomentPair {
  cplx a{};
  cplx b{};
};

struct Estimate {
  MomentPair value;
  double error;
};

Estimate gauss_kronrod(double lo, double hi, double nu, const BathParams& p) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  auto f = [&](double u) {
    const cplx d = kernel_D(u, p);
    return MomentPair{d * std::cos(nu * u), d * std::sin(nu * u)};
  };
  const MomentPair fc = f(center);
  MomentPair kron{fc.a * kWgk[7], fc.b * kWgk[7]};
  MomentPair gauss{fc.a * kWg[3], fc.b * kWg[3]};
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const MomentPair f1 = f(center - dx);
    const MomentPair f2 = f(center + dx);
    kron.a += kWgk[j] * (f1.a + f2.a);
    kron.b += kWgk[j] * (f1.b + f2.b);
    if (j % 2 == 1) {
      gauss.a += kWg[j / 2] * (f1.a + f2.a);
      gauss.b += kWg[j / 2] * (f1.b + f2.b);
    }
  }
  kron.a *= half;
  kron.b *= half;
  gauss.a *= half;
  gauss.b *= half;
  const double err = std::abs(kron.a - gauss.a) + std::abs(kron.b - gauss.b);
  return {kron, err};
}

constexpr int kMaxSubdivisions = 4096;

}  // namespace

KernelMoments advance_moments(const KernelMoments& m, double t_next,
                              double modulation_frequency, const BathParams& p,
                              double quad_tol) {
  if (t_next < m.t) {
    throw InvalidArgument("advance_moments: t_next precedes the current moment time");
  }
  if (!(quad_tol > 0.0)) throw InvalidArgument("advance_moments: quad_tol must be positive");
  if (t_next == m.t) return m;

  const double lo = m.t - m.segment_origin;
  const double hi = t_next - m.segment_origin;
  const double total = hi - lo;

  struct Pending {
    double lo, hi;
  };
  std::vector<Pending> stack{{lo, hi}};
  MomentPair sum;
  double achieved = 0.0;
  int evaluated = 0;
  while (!stack.empty()) {
    const Pending seg = stack.back();
    stack.pop_back();
    const Estimate e = gauss_kronrod(seg.lo, seg.hi, modulation_frequency, p);
    const double budget = quad_tol * (seg.hi - seg.lo) / total;
    ++evaluated;
    if (e.error <= budget || evaluated >= kMaxSubdivisions) {
      if (e.error > budget) {
        std::ostringstream os;
        os << "advance_moments: quadrature did not converge on [" << lo << ", " << hi
           << "] (error estimate " << achieved + e.error << ")";
        throw NumericalFailure(os.str(), achieved + e.error);
      }
      sum.a += e.value.a;
      sum.b += e.value.b;
      achieved += e.error;
      continue;
    }
    const double mid = 0.5 * (seg.lo + seg.hi);
    stack.push_back({mid, seg.hi});
    stack.push_back({seg.lo, mid});
  }

  KernelMoments out = m;
  out.t = t_next;
  out.A += sum.a;
  out.B += sum.b;
  return out;
}

}  // namespace qds
