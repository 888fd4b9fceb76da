#pragma once

// Dense complex operators of dimension 2 (one qubit) or 4 (two qubits).
//
// Two-qubit basis ordering is |00>, |01>, |10>, |11> with qubit A (qubit 1)
// the left tensor factor, so the basis index of |a b> is 2*a + b.

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace qds {

using cplx = std::complex<double>;

enum class Subsystem { A, B };

class ComplexMatrix {
 public:
  static constexpr std::size_t kMaxDim = 4;

  // Zero matrix of the given dimension (2 or 4).
  explicit ComplexMatrix(std::size_t dim = 4);
  // Row-major entries; entries.size() must equal dim*dim.
  ComplexMatrix(std::size_t dim, std::initializer_list<cplx> entries);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix diagonal(std::initializer_list<double> values);
  static ComplexMatrix outer(const std::vector<cplx>& ket);

  std::size_t dim() const noexcept { return dim_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const {
    return data_[r * dim_ + c];
  }

  ComplexMatrix adjoint() const;
  ComplexMatrix conjugate() const;
  ComplexMatrix transpose() const;
  cplx trace() const;

  // max |M - M^dagger| over entries.
  double hermiticity_defect() const;
  double max_abs() const;
  // Frobenius norm.
  double norm() const;

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(cplx s);

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) {
    return a += b;
  }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) {
    return a -= b;
  }
  friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

 private:
  std::size_t dim_;
  std::array<cplx, kMaxDim * kMaxDim> data_{};
};

// Max entrywise distance; dimensions must agree.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

namespace pauli {
ComplexMatrix I();
ComplexMatrix X();
ComplexMatrix Y();
ComplexMatrix Z();
}  // namespace pauli

// Kronecker product of two 2x2 operators.
ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);

// Lifts a single-qubit operator onto the given qubit of the two-qubit space.
ComplexMatrix on_qubit(const ComplexMatrix& op, Subsystem qubit);

struct HermitianEigensystem {
  std::vector<double> values;        // descending
  std::vector<std::vector<cplx>> vectors;  // vectors[k] pairs with values[k]
};

HermitianEigensystem hermitian_eigensystem(const ComplexMatrix& m);
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m);

// Eigenvalues of an arbitrary square operator, unordered.
std::vector<cplx> general_eigenvalues(const ComplexMatrix& m);

// exp(-i * angle * (axis . sigma) / 2).
ComplexMatrix su2_exponential(const std::array<double, 3>& axis, double angle);

// Largest singular value.
double operator_norm(const ComplexMatrix& m);

class DensityMatrix {
 public:
  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  std::size_t dim() const noexcept { return matrix_.dim(); }
  // Eigenvalues in [-tolerance, 0) are treated as zero inside entropies.
  double negativity_tolerance() const noexcept { return tol_neg_; }
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  friend DensityMatrix validate_density_matrix(const ComplexMatrix&, double);
  DensityMatrix(const ComplexMatrix& m, double tol_neg, double min_eig)
      : matrix_(m), tol_neg_(tol_neg), min_eigenvalue_(min_eig) {}

  ComplexMatrix matrix_;
  double tol_neg_;
  double min_eigenvalue_;
};

inline constexpr double kDefaultNegativityTolerance = 1e-6;

// Throws StateCorruption when the trace is off by more than 1e-6 or the
// matrix is not Hermitian within 1e-10, PositivityViolation when an
// eigenvalue lies below -tol_neg.
DensityMatrix validate_density_matrix(
    const ComplexMatrix& m, double tol_neg = kDefaultNegativityTolerance);

DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep);
// Unvalidated variant for intermediate operators.
ComplexMatrix partial_trace(const ComplexMatrix& m, Subsystem keep);

}  // namespace qds
