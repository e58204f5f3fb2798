#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qslkit {

using cplx = std::complex<double>;

enum class Errc {
  ok = 0,
  bad_argument,
  parse_error,
  not_hermitian,
  not_psd,
  dimension_mismatch,
  bloch_out_of_ball,
  bad_index,
  too_many_qubits,
  rate_pole,
  degenerate_denominator,
  mixed_factor_singular,
  complex_radicand,
  unknown_figure,
  numeric_failure,
};

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

// Dense complex square matrix, row-major. Everything downstream works on
// qubit registers, so dimensions stay tiny (<= 16); no blocking, no BLAS.
class Matrix {
public:
  Matrix() = default;
  explicit Matrix(int dim);
  static Matrix identity(int dim);

  int dim() const noexcept { return d_; }
  cplx& operator()(int i, int j) { return a_[idx(i, j)]; }
  const cplx& operator()(int i, int j) const { return a_[idx(i, j)]; }

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(cplx s);
  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, cplx s) { return a *= s; }
  friend Matrix operator*(cplx s, Matrix a) { return a *= s; }
  friend Matrix operator*(const Matrix& a, const Matrix& b);

  Matrix dagger() const;
  cplx trace() const;
  double hs_norm() const;              // Frobenius
  double max_abs() const;
  double hermiticity_defect() const;   // max_ij |a(i,j) - conj(a(j,i))|
  bool is_hermitian(double tol = 1e-9) const { return hermiticity_defect() <= tol; }
  Matrix hermitized() const;           // (A + A^dag)/2

private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * d_ + j; }
  int d_ = 0;
  std::vector<cplx> a_;
};

// Eigenvalues sorted descending; eigenvectors are the matching columns.
struct Eigensystem {
  std::vector<double> values;
  Matrix vectors;
};

struct Norms {
  double op;
  double hs;
  double tr;
};

// Cyclic complex Jacobi. Throws NotHermitian when the symmetry defect
// exceeds 1e-9; converges to off-diagonal Frobenius mass < 1e-13 (relative
// to the matrix scale).
Eigensystem eig_hermitian(const Matrix& m);

// Schatten op/hs/tr norms. Hermitian input: |eigenvalues|; otherwise
// singular values via m^dag m.
Norms matrix_norms(const Matrix& m);

// Principal square root of a PSD Hermitian matrix. Eigenvalues in
// (-1e-9, 0) are clipped to zero; below that throws NotPSD.
Matrix sqrt_psd(const Matrix& m);

Matrix tensor(const Matrix& a, const Matrix& b);

// Coefficients B_0..B_n of det(lambda I - rho) = sum_i (-1)^i B_i lambda^(n-i),
// i.e. the elementary symmetric polynomials of the spectrum, computed by
// Faddeev-LeVerrier without an eigendecomposition. Hermitian rho with unit
// trace is PSD iff every B_i >= 0 (up to slack).
std::vector<double> positivity_coefficients(const Matrix& rho);
bool psd_by_coefficients(const Matrix& rho, double slack = 1e-10);

// Hermitian, unit-trace, PSD (within slack) operator on n qubits (dim = 2^n).
class DensityMatrix {
public:
  explicit DensityMatrix(const Matrix& m);
  static DensityMatrix pure(const std::vector<cplx>& amplitudes);

  const Matrix& matrix() const noexcept { return m_; }
  int dim() const noexcept { return m_.dim(); }
  int n_qubits() const noexcept { return n_; }

private:
  Matrix m_;
  int n_ = 0;
};

double purity(const DensityMatrix& rho);  // tr rho^2

// Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2, clamped into [0,1].
double bures_fidelity(const DensityMatrix& a, const DensityMatrix& b);

// tr(ab) + sqrt((1 - tr a^2)(1 - tr b^2)); upper bound on the Uhlmann
// fidelity, exact for a pair of qubits.
double superfidelity(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace qslkit
