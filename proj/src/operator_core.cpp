#include "qdshield/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "qdshield/errors.hpp"

namespace qds {

namespace {

void require_dim(std::size_t dim) {
  if (dim != 2 && dim != 4) {
    throw InvalidArgument("operator dimension must be 2 or 4, got " +
                          std::to_string(dim));
  }
}

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) {
    throw InvalidArgument("operator dimension mismatch: " +
                          std::to_string(a.dim()) + " vs " +
                          std::to_string(b.dim()));
  }
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim) { require_dim(dim); }

ComplexMatrix::ComplexMatrix(std::size_t dim, std::initializer_list<cplx> entries)
    : dim_(dim) {
  require_dim(dim);
  if (entries.size() != dim * dim) {
    throw InvalidArgument("expected " + std::to_string(dim * dim) +
                          " entries, got " + std::to_string(entries.size()));
  }
  std::copy(entries.begin(), entries.end(), data_.begin());
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::initializer_list<double> values) {
  ComplexMatrix m(values.size());
  std::size_t i = 0;
  for (double v : values) {
    m(i, i) = v;
    ++i;
  }
  return m;
}

ComplexMatrix ComplexMatrix::outer(const std::vector<cplx>& ket) {
  ComplexMatrix m(ket.size());
  for (std::size_t r = 0; r < ket.size(); ++r)
    for (std::size_t c = 0; c < ket.size(); ++c) m(r, c) = ket[r] * std::conj(ket[c]);
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix m(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) m(r, c) = std::conj((*this)(c, r));
  return m;
}

ComplexMatrix ComplexMatrix::conjugate() const {
  ComplexMatrix m(dim_);
  for (std::size_t i = 0; i < dim_ * dim_; ++i) m.data_[i] = std::conj(data_[i]);
  return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix m(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) m(r, c) = (*this)(c, r);
  return m;
}

cplx ComplexMatrix::trace() const {
  cplx t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::hermiticity_defect() const {
  double d = 0.0;
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = r; c < dim_; ++c)
      d = std::max(d, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
  return d;
}

double ComplexMatrix::max_abs() const {
  double d = 0.0;
  for (std::size_t i = 0; i < dim_ * dim_; ++i) d = std::max(d, std::abs(data_[i]));
  return d;
}

double ComplexMatrix::norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < dim_ * dim_; ++i) s += std::norm(data_[i]);
  return std::sqrt(s);
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  require_same_dim(*this, o);
  for (std::size_t i = 0; i < dim_ * dim_; ++i) data_[i] += o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  require_same_dim(*this, o);
  for (std::size_t i = 0; i < dim_ * dim_; ++i) data_[i] -= o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (std::size_t i = 0; i < dim_ * dim_; ++i) data_[i] *= s;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b);
  const std::size_t n = a.dim();
  ComplexMatrix m(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < n; ++k) {
      const cplx ark = a(r, k);
      if (ark == cplx{}) continue;
      for (std::size_t c = 0; c < n; ++c) m(r, c) += ark * b(k, c);
    }
  return m;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).max_abs();
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b - b * a;
}

namespace pauli {
ComplexMatrix I() { return ComplexMatrix::identity(2); }
ComplexMatrix X() { return ComplexMatrix(2, {0.0, 1.0, 1.0, 0.0}); }
ComplexMatrix Y() {
  return ComplexMatrix(2, {0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0});
}
ComplexMatrix Z() { return ComplexMatrix(2, {1.0, 0.0, 0.0, -1.0}); }
}  // namespace pauli

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != 2 || b.dim() != 2) {
    throw InvalidArgument("tensor_product expects two 2x2 operators");
  }
  ComplexMatrix m(4);
  for (std::size_t ar = 0; ar < 2; ++ar)
    for (std::size_t ac = 0; ac < 2; ++ac)
      for (std::size_t br = 0; br < 2; ++br)
        for (std::size_t bc = 0; bc < 2; ++bc)
          m(2 * ar + br, 2 * ac + bc) = a(ar, ac) * b(br, bc);
  return m;
}

ComplexMatrix on_qubit(const ComplexMatrix& op, Subsystem qubit) {
  return qubit == Subsystem::A ? tensor_product(op, pauli::I())
                               : tensor_product(pauli::I(), op);
}

namespace {

HermitianEigensystem sorted(std::vector<double> values,
                            std::vector<std::vector<cplx>> vectors) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] > values[j]; });
  HermitianEigensystem out;
  for (std::size_t i : order) {
    out.values.push_back(values[i]);
    out.vectors.push_back(std::move(vectors[i]));
  }
  return out;
}

HermitianEigensystem eigensystem_2x2(const ComplexMatrix& m) {
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  const cplx b = 0.5 * (m(0, 1) + std::conj(m(1, 0)));
  const double half_diff = 0.5 * (a - d);
  const double radius = std::hypot(half_diff, std::abs(b));
  const double mean = 0.5 * (a + d);
  const double hi = mean + radius;
  const double lo = mean - radius;
  if (std::abs(b) == 0.0) {
    if (a >= d) return {{a, d}, {{1.0, 0.0}, {0.0, 1.0}}};
    return {{d, a}, {{0.0, 1.0}, {1.0, 0.0}}};
  }
  // Upper eigenvector (b, hi - a) is well conditioned when a <= d; the
  // lower one (lo - d, conj(b)) likewise. Use the orthogonal complement for
  // the other to keep the pair exactly orthonormal.
  std::vector<cplx> v_hi;
  if (a >= d) {
    v_hi = {hi - d, std::conj(b)};
  } else {
    v_hi = {b, hi - a};
  }
  const double n = std::sqrt(std::norm(v_hi[0]) + std::norm(v_hi[1]));
  v_hi[0] /= n;
  v_hi[1] /= n;
  std::vector<cplx> v_lo = {-std::conj(v_hi[1]), std::conj(v_hi[0])};
  return {{hi, lo}, {v_hi, v_lo}};
}

// Cyclic complex Jacobi for small Hermitian matrices.
HermitianEigensystem eigensystem_jacobi(const ComplexMatrix& input) {
  const std::size_t n = input.dim();
  ComplexMatrix a = input;
  // Symmetrize so the iteration sees an exactly Hermitian matrix.
  for (std::size_t r = 0; r < n; ++r) {
    a(r, r) = a(r, r).real();
    for (std::size_t c = r + 1; c < n; ++c) {
      const cplx v = 0.5 * (a(r, c) + std::conj(a(c, r)));
      a(r, c) = v;
      a(c, r) = std::conj(v);
    }
  }
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double scale = std::max(a.norm(), std::numeric_limits<double>::min());

  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = r + 1; c < n; ++c) off += std::norm(a(r, c));
    if (std::sqrt(off) <= 1e-17 * scale) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double mag = std::abs(a(p, q));
        if (mag <= 1e-300) continue;
        const cplx phase = a(p, q) / mag;
        const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // G acts on the (p, q) plane: [[c, s], [-s e^{-i phi}, c e^{-i phi}]].
        const cplx g_pp = c;
        const cplx g_pq = s;
        const cplx g_qp = -s * std::conj(phase);
        const cplx g_qq = c * std::conj(phase);

        // a <- a G
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p);
          const cplx akq = a(k, q);
          a(k, p) = akp * g_pp + akq * g_qp;
          a(k, q) = akp * g_pq + akq * g_qq;
          const cplx vkp = v(k, p);
          const cplx vkq = v(k, q);
          v(k, p) = vkp * g_pp + vkq * g_qp;
          v(k, q) = vkp * g_pq + vkq * g_qq;
        }
        // a <- G^dagger a
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k);
          const cplx aqk = a(q, k);
          a(p, k) = std::conj(g_pp) * apk + std::conj(g_qp) * aqk;
          a(q, k) = std::conj(g_pq) * apk + std::conj(g_qq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }

  std::vector<double> values(n);
  std::vector<std::vector<cplx>> vectors(n, std::vector<cplx>(n));
  for (std::size_t k = 0; k < n; ++k) {
    values[k] = a(k, k).real();
    for (std::size_t r = 0; r < n; ++r) vectors[k][r] = v(r, k);
  }
  return sorted(std::move(values), std::move(vectors));
}

}  // namespace

HermitianEigensystem hermitian_eigensystem(const ComplexMatrix& m) {
  const double defect = m.hermiticity_defect();
  if (defect > 1e-8) {
    std::ostringstream os;
    os << "hermitian_eigensystem: matrix is not Hermitian (defect " << defect
       << ")";
    throw InvalidArgument(os.str());
  }
  if (m.dim() == 2) return eigensystem_2x2(m);
  return eigensystem_jacobi(m);
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) {
  return hermitian_eigensystem(m).values;
}

namespace {

// Householder reduction to upper Hessenberg form.
void to_hessenberg(ComplexMatrix& h) {
  const std::size_t n = h.dim();
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double xnorm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) xnorm += std::norm(h(i, k));
    xnorm = std::sqrt(xnorm);
    if (xnorm == 0.0) continue;
    const cplx x0 = h(k + 1, k);
    const cplx phase = std::abs(x0) > 0 ? x0 / std::abs(x0) : cplx(1.0);
    const cplx alpha = -phase * xnorm;
    std::array<cplx, ComplexMatrix::kMaxDim> v{};
    for (std::size_t i = k + 1; i < n; ++i) v[i] = h(i, k);
    v[k + 1] -= alpha;
    double vnorm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm += std::norm(v[i]);
    if (vnorm == 0.0) continue;
    // h <- (I - 2 v v^dagger / |v|^2) h
    for (std::size_t c = 0; c < n; ++c) {
      cplx s = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) s += std::conj(v[i]) * h(i, c);
      s *= 2.0 / vnorm;
      for (std::size_t i = k + 1; i < n; ++i) h(i, c) -= v[i] * s;
    }
    // h <- h (I - 2 v v^dagger / |v|^2)
    for (std::size_t r = 0; r < n; ++r) {
      cplx s = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) s += h(r, i) * v[i];
      s *= 2.0 / vnorm;
      for (std::size_t i = k + 1; i < n; ++i) h(r, i) -= s * std::conj(v[i]);
    }
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }
}

cplx wilkinson_shift(cplx a, cplx b, cplx c, cplx d) {
  const cplx tr = a + d;
  const cplx det = a * d - b * c;
  const cplx disc = std::sqrt(tr * tr * 0.25 - det);
  const cplx l1 = tr * 0.5 + disc;
  const cplx l2 = tr * 0.5 - disc;
  return std::abs(l1 - d) < std::abs(l2 - d) ? l1 : l2;
}

}  // namespace

std::vector<cplx> general_eigenvalues(const ComplexMatrix& m) {
  const std::size_t n = m.dim();
  ComplexMatrix h = m;
  to_hessenberg(h);
  std::vector<cplx> eig(n);
  const double eps = std::numeric_limits<double>::epsilon();
  const double scale = std::max(h.max_abs(), std::numeric_limits<double>::min());

  std::size_t hi = n - 1;
  int iter = 0;
  int total = 0;
  while (true) {
    if (hi == 0) {
      eig[0] = h(0, 0);
      break;
    }
    std::size_t lo = hi;
    while (lo > 0) {
      const double sub = std::abs(h(lo, lo - 1));
      const double diag = std::abs(h(lo, lo)) + std::abs(h(lo - 1, lo - 1));
      if (sub <= eps * (diag > 0 ? diag : scale)) {
        h(lo, lo - 1) = 0.0;
        break;
      }
      --lo;
    }
    if (lo == hi) {
      eig[hi] = h(hi, hi);
      --hi;
      iter = 0;
      continue;
    }
    if (++total > 200 * static_cast<int>(n)) {
      throw NumericalFailure("general_eigenvalues: QR iteration did not converge",
                             std::abs(h(hi, hi - 1)));
    }
    ++iter;
    cplx mu = wilkinson_shift(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1),
                              h(hi, hi));
    if (iter % 11 == 0) {
      // Exceptional shift to break cycles.
      mu = h(hi, hi) + std::abs(h(hi, hi - 1)) * cplx(0.75, 0.4375);
    }

    for (std::size_t i = lo; i <= hi; ++i) h(i, i) -= mu;
    std::array<std::array<cplx, 4>, ComplexMatrix::kMaxDim> rot{};
    for (std::size_t k = lo; k < hi; ++k) {
      const cplx x = h(k, k);
      const cplx y = h(k + 1, k);
      const double r = std::sqrt(std::norm(x) + std::norm(y));
      cplx g00 = 1.0, g01 = 0.0, g10 = 0.0, g11 = 1.0;
      if (r > 0.0) {
        g00 = std::conj(x) / r;
        g01 = std::conj(y) / r;
        g10 = -y / r;
        g11 = x / r;
      }
      rot[k] = {g00, g01, g10, g11};
      for (std::size_t c = k; c <= hi; ++c) {
        const cplx u = h(k, c);
        const cplx w = h(k + 1, c);
        h(k, c) = g00 * u + g01 * w;
        h(k + 1, c) = g10 * u + g11 * w;
      }
    }
    for (std::size_t k = lo; k < hi; ++k) {
      const auto& g = rot[k];
      const std::size_t rmax = std::min(k + 2, hi);
      for (std::size_t r = lo; r <= rmax; ++r) {
        const cplx u = h(r, k);
        const cplx w = h(r, k + 1);
        h(r, k) = u * std::conj(g[0]) + w * std::conj(g[1]);
        h(r, k + 1) = u * std::conj(g[2]) + w * std::conj(g[3]);
      }
    }
    for (std::size_t i = lo; i <= hi; ++i) h(i, i) += mu;
  }
  return eig;
}

ComplexMatrix su2_exponential(const std::array<double, 3>& axis, double angle) {
  const double len = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  if (std::abs(len - 1.0) > 1e-12) {
    throw InvalidArgument("su2_exponential: axis must be a unit vector");
  }
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  const cplx mi(0.0, -1.0);
  // c I - i s (n . sigma)
  return ComplexMatrix(2, {c + mi * s * axis[2], mi * s * cplx(axis[0], -axis[1]),
                           mi * s * cplx(axis[0], axis[1]), c - mi * s * axis[2]});
}

double operator_norm(const ComplexMatrix& m) {
  const auto values = hermitian_eigenvalues(m.adjoint() * m);
  return std::sqrt(std::max(0.0, values.front()));
}

DensityMatrix validate_density_matrix(const ComplexMatrix& m, double tol_neg) {
  const double defect = m.hermiticity_defect();
  if (defect > 1e-10) {
    std::ostringstream os;
    os << "density matrix is not Hermitian (defect " << defect << ")";
    throw StateCorruption(os.str());
  }
  const cplx tr = m.trace();
  if (std::abs(tr - 1.0) > 1e-6) {
    std::ostringstream os;
    os << "density matrix trace deviates from 1 (trace " << tr.real() << ")";
    throw StateCorruption(os.str());
  }
  const auto values = hermitian_eigenvalues(m);
  const double min_eig = values.back();
  if (min_eig < -tol_neg) {
    std::ostringstream os;
    os << "density matrix has eigenvalue " << min_eig << " below -" << tol_neg;
    throw PositivityViolation(os.str(), min_eig);
  }
  return DensityMatrix(m, tol_neg, min_eig);
}

ComplexMatrix partial_trace(const ComplexMatrix& m, Subsystem keep) {
  if (m.dim() != 4) throw InvalidArgument("partial_trace expects a 4x4 operator");
  ComplexMatrix r(2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k) {
        if (keep == Subsystem::A) {
          r(i, j) += m(2 * i + k, 2 * j + k);
        } else {
          r(i, j) += m(2 * k + i, 2 * k + j);
        }
      }
  return r;
}

DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep) {
  return validate_density_matrix(partial_trace(rho.matrix(), keep),
                                 rho.negativity_tolerance());
}

}  // namespace qds
