#include "matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qslkit {

Matrix::Matrix(int dim) : d_(dim), a_(static_cast<std::size_t>(dim) * dim) {
  if (dim <= 0) throw Error(Errc::bad_argument, "matrix dimension must be positive");
}

Matrix Matrix::identity(int dim) {
  Matrix m(dim);
  for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

Matrix& Matrix::operator+=(const Matrix& o) {
  if (d_ != o.d_) throw Error(Errc::dimension_mismatch, "matrix add: dimension mismatch");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  if (d_ != o.d_) throw Error(Errc::dimension_mismatch, "matrix sub: dimension mismatch");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
  return *this;
}

Matrix& Matrix::operator*=(cplx s) {
  for (auto& x : a_) x *= s;
  return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.d_ != b.d_) throw Error(Errc::dimension_mismatch, "matmul: dimension mismatch");
  const int d = a.d_;
  Matrix c(d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      for (int j = 0; j < d; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Matrix Matrix::dagger() const {
  Matrix m(d_);
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) m(j, i) = std::conj((*this)(i, j));
  return m;
}

cplx Matrix::trace() const {
  cplx t = 0;
  for (int i = 0; i < d_; ++i) t += (*this)(i, i);
  return t;
}

double Matrix::hs_norm() const {
  double s = 0;
  for (const auto& x : a_) s += std::norm(x);
  return std::sqrt(s);
}

double Matrix::max_abs() const {
  double m = 0;
  for (const auto& x : a_) m = std::max(m, std::abs(x));
  return m;
}

double Matrix::hermiticity_defect() const {
  double m = 0;
  for (int i = 0; i < d_; ++i)
    for (int j = i; j < d_; ++j)
      m = std::max(m, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
  return m;
}

Matrix Matrix::hermitized() const {
  Matrix m(d_);
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j)
      m(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
  return m;
}

Eigensystem eig_hermitian(const Matrix& m) {
  const int d = m.dim();
  if (d == 0) throw Error(Errc::bad_argument, "eig_hermitian: empty matrix");
  if (m.hermiticity_defect() > 1e-9)
    throw Error(Errc::not_hermitian, "eig_hermitian: matrix is not Hermitian");

  Matrix a = m.hermitized();
  Matrix v = Matrix::identity(d);
  const double scale = std::max(1.0, a.hs_norm());

  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0;
    for (int i = 0; i < d - 1; ++i)
      for (int j = i + 1; j < d; ++j) off += 2.0 * std::norm(a(i, j));
    if (std::sqrt(off) < 1e-13 * scale) break;

    for (int p = 0; p < d - 1; ++p) {
      for (int q = p + 1; q < d; ++q) {
        const double apq = std::abs(a(p, q));
        if (apq < 1e-300) {
          a(p, q) = 0;
          a(q, p) = 0;
          continue;
        }
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const cplx phase = a(p, q) / apq;
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = tau >= 0 ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                  : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // Plane unitary: U(p,p)=c, U(p,q)=s, U(q,p)=-s*conj(phase), U(q,q)=c*conj(phase).
        const cplx uqp = -s * std::conj(phase);
        const cplx uqq = c * std::conj(phase);

        for (int k = 0; k < d; ++k) {  // A <- A U
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * c + akq * uqp;
          a(k, q) = akp * s + akq * uqq;
        }
        for (int k = 0; k < d; ++k) {  // A <- U^dag A
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk + std::conj(uqp) * aqk;
          a(q, k) = s * apk + std::conj(uqq) * aqk;
        }
        for (int k = 0; k < d; ++k) {  // V <- V U
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * c + vkq * uqp;
          v(k, q) = vkp * s + vkq * uqq;
        }
        a(p, q) = 0;
        a(q, p) = 0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }

  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> lam(d);
  for (int i = 0; i < d; ++i) lam[i] = a(i, i).real();
  std::sort(order.begin(), order.end(), [&](int i, int j) { return lam[i] > lam[j]; });

  Eigensystem es;
  es.values.resize(d);
  es.vectors = Matrix(d);
  for (int j = 0; j < d; ++j) {
    es.values[j] = lam[order[j]];
    for (int i = 0; i < d; ++i) es.vectors(i, j) = v(i, order[j]);
  }
  return es;
}

Norms matrix_norms(const Matrix& m) {
  std::vector<double> sv;
  sv.reserve(m.dim());
  if (m.hermiticity_defect() <= 1e-9) {
    const Eigensystem es = eig_hermitian(m);
    for (double l : es.values) sv.push_back(std::abs(l));
  } else {
    const Matrix g = (m.dagger() * m).hermitized();
    const Eigensystem es = eig_hermitian(g);
    for (double l : es.values) sv.push_back(std::sqrt(std::max(0.0, l)));
  }
  Norms n{0, 0, 0};
  double sq = 0;
  for (double s : sv) {
    n.op = std::max(n.op, s);
    sq += s * s;
    n.tr += s;
  }
  n.hs = std::sqrt(sq);
  return n;
}

Matrix sqrt_psd(const Matrix& m) {
  const Eigensystem es = eig_hermitian(m);
  const int d = m.dim();
  std::vector<double> r(d);
  for (int i = 0; i < d; ++i) {
    double l = es.values[i];
    if (l < -1e-9)
      throw Error(Errc::not_psd, "sqrt_psd: eigenvalue " + std::to_string(l) + " below PSD slack");
    r[i] = std::sqrt(std::max(0.0, l));
  }
  Matrix out(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      cplx s = 0;
      for (int k = 0; k < d; ++k) s += es.vectors(i, k) * r[k] * std::conj(es.vectors(j, k));
      out(i, j) = s;
    }
  return out.hermitized();
}

Matrix tensor(const Matrix& a, const Matrix& b) {
  const int da = a.dim(), db = b.dim();
  Matrix c(da * db);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < da; ++j) {
      const cplx aij = a(i, j);
      if (aij == cplx{}) continue;
      for (int k = 0; k < db; ++k)
        for (int l = 0; l < db; ++l) c(i * db + k, j * db + l) = aij * b(k, l);
    }
  return c;
}

std::vector<double> positivity_coefficients(const Matrix& rho) {
  if (rho.hermiticity_defect() > 1e-9)
    throw Error(Errc::not_hermitian, "positivity_coefficients: matrix is not Hermitian");
  const int n = rho.dim();
  const Matrix a = rho.hermitized();
  Matrix m = Matrix::identity(n);
  std::vector<double> c(n + 1, 0.0);
  c[n] = 1.0;
  for (int k = 1; k <= n; ++k) {
    const Matrix am = a * m;
    const double ck = -am.trace().real() / k;
    c[n - k] = ck;
    m = am;
    for (int i = 0; i < n; ++i) m(i, i) += ck;
  }
  std::vector<double> b(n + 1);
  for (int i = 0; i <= n; ++i) b[i] = (i % 2 ? -1.0 : 1.0) * c[n - i];
  return b;
}

bool psd_by_coefficients(const Matrix& rho, double slack) {
  for (double b : positivity_coefficients(rho))
    if (b < -slack) return false;
  return true;
}

namespace {

int qubit_count(int dim) {
  int n = 0, d = dim;
  while (d > 1 && d % 2 == 0) {
    d /= 2;
    ++n;
  }
  if (d != 1 || n == 0)
    throw Error(Errc::bad_argument,
                "density matrix dimension " + std::to_string(dim) + " is not a power of two");
  return n;
}

}  // namespace

DensityMatrix::DensityMatrix(const Matrix& m) {
  n_ = qubit_count(m.dim());
  if (m.hermiticity_defect() > 1e-9)
    throw Error(Errc::not_hermitian, "density matrix is not Hermitian");
  m_ = m.hermitized();
  const double tr = m_.trace().real();
  if (std::abs(tr - 1.0) > 1e-10)
    throw Error(Errc::bad_argument, "density matrix trace " + std::to_string(tr) + " != 1");
  const Eigensystem es = eig_hermitian(m_);
  if (es.values.back() < -1e-10)
    throw Error(Errc::not_psd,
                "density matrix eigenvalue " + std::to_string(es.values.back()) + " below slack");
}

DensityMatrix DensityMatrix::pure(const std::vector<cplx>& amplitudes) {
  const int d = static_cast<int>(amplitudes.size());
  double n2 = 0;
  for (const auto& x : amplitudes) n2 += std::norm(x);
  if (n2 <= 0) throw Error(Errc::bad_argument, "pure state: zero vector");
  Matrix m(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = amplitudes[i] * std::conj(amplitudes[j]) / n2;
  return DensityMatrix(m);
}

double purity(const DensityMatrix& rho) {
  // tr rho^2 = sum |rho_ij|^2 for Hermitian rho
  double s = 0;
  const int d = rho.dim();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) s += std::norm(rho.matrix()(i, j));
  return s;
}

double bures_fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim())
    throw Error(Errc::dimension_mismatch, "bures_fidelity: dimension mismatch");
  const Matrix sa = sqrt_psd(a.matrix());
  const Matrix inner = (sa * b.matrix() * sa).hermitized();
  const double t = sqrt_psd(inner).trace().real();
  return std::clamp(t * t, 0.0, 1.0);
}

double superfidelity(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim())
    throw Error(Errc::dimension_mismatch, "superfidelity: dimension mismatch");
  cplx tab = 0;
  const int d = a.dim();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) tab += a.matrix()(i, j) * b.matrix()(j, i);
  const double va = std::max(0.0, 1.0 - purity(a));
  const double vb = std::max(0.0, 1.0 - purity(b));
  return std::clamp(tab.real() + std::sqrt(va * vb), 0.0, 1.0);
}

}  // namespace qslkit
