#include "states.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace qslkit {

namespace {

std::string lowered(std::string_view s) {
  std::string v;
  v.reserve(s.size());
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c)))
      v.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return v;
}

double parse_number(const std::string& tok, const std::string& ctx) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::parse_error, "bad number '" + tok + "' in " + ctx);
  }
}

int parse_int(const std::string& tok, const std::string& ctx) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::parse_error, "bad integer '" + tok + "' in " + ctx);
  }
}

std::vector<std::string> split(const std::string& s, char sep, std::size_t max_parts = 0) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    if (max_parts && out.size() + 1 == max_parts) {
      out.push_back(s.substr(start));
      break;
    }
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double entropy(const std::vector<double>& probs) {
  double s = 0;
  for (double p : probs)
    if (p > 1e-15) s -= p * std::log(p);
  return s;
}

}  // namespace

DensityMatrix bloch_state(const BlochVector& eta) {
  const double n2 = eta.x * eta.x + eta.y * eta.y + eta.z * eta.z;
  if (n2 > 1.0 + 1e-12)
    throw Error(Errc::bloch_out_of_ball,
                "bloch_state: |eta| = " + std::to_string(std::sqrt(n2)) + " > 1");
  Matrix m(2);
  m(0, 0) = 0.5 * (1.0 + eta.z);
  m(1, 1) = 0.5 * (1.0 - eta.z);
  m(0, 1) = 0.5 * cplx(eta.x, -eta.y);
  m(1, 0) = 0.5 * cplx(eta.x, eta.y);
  return DensityMatrix(m);
}

BlochVector bloch_of(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw Error(Errc::dimension_mismatch, "bloch_of: not a qubit");
  const Matrix& m = rho.matrix();
  return BlochVector{2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(),
                     (m(0, 0) - m(1, 1)).real()};
}

BellDiagonalState bell_triple(BellLabel which) {
  switch (which) {
    case BellLabel::phi_plus: return {1, -1, 1};
    case BellLabel::phi_minus: return {-1, 1, 1};
    case BellLabel::psi_plus: return {1, 1, -1};
    case BellLabel::psi_minus: return {-1, -1, -1};
  }
  throw Error(Errc::bad_argument, "bell_triple: bad label");
}

DensityMatrix bell_state(BellLabel which) { return bell_diagonal_state(bell_triple(which)); }

DensityMatrix bell_diagonal_state(const BellDiagonalState& k) {
  if (std::abs(k.k1) > 1.0 || std::abs(k.k2) > 1.0 || std::abs(k.k3) > 1.0)
    throw Error(Errc::bad_argument, "bell_diagonal_state: correlations outside [-1,1]");
  Matrix m(4);
  m(0, 0) = m(3, 3) = 0.25 * (1.0 + k.k3);
  m(1, 1) = m(2, 2) = 0.25 * (1.0 - k.k3);
  m(0, 3) = m(3, 0) = 0.25 * (k.k1 - k.k2);
  m(1, 2) = m(2, 1) = 0.25 * (k.k1 + k.k2);
  return DensityMatrix(m);
}

BellDiagonalState triple_of(const DensityMatrix& rho) {
  if (rho.dim() != 4) throw Error(Errc::dimension_mismatch, "triple_of: not two qubits");
  const Matrix& m = rho.matrix();
  BellDiagonalState k;
  k.k1 = 2.0 * (m(0, 3) + m(1, 2)).real();
  k.k2 = 2.0 * (m(1, 2) - m(0, 3)).real();
  k.k3 = (m(0, 0) - m(1, 1) - m(2, 2) + m(3, 3)).real();
  return k;
}

DensityMatrix ghz_state(const GhzIndex& g) {
  if (g.n_qubits < 2 || g.n_qubits > 4)
    throw Error(Errc::bad_index, "ghz_state: n_qubits must be 2..4");
  const int half = 1 << (g.n_qubits - 1);
  if (g.index < 1 || g.index > half)
    throw Error(Errc::bad_index, "ghz_state: index " + std::to_string(g.index) +
                                     " outside 1.." + std::to_string(half));
  if (g.sign != 1 && g.sign != -1) throw Error(Errc::bad_index, "ghz_state: sign must be +-1");
  const int d = 1 << g.n_qubits;
  const int s = g.index - 1;
  const int sbar = ~s & (d - 1);
  std::vector<cplx> amp(d, 0.0);
  const double r = 1.0 / std::sqrt(2.0);
  amp[s] = r;
  amp[sbar] = g.sign * r;
  return DensityMatrix::pure(amp);
}

DensityMatrix werner_state(double q, const DensityMatrix& rho) {
  if (q < 0.0 || q > 1.0)
    throw Error(Errc::bad_argument, "werner_state: q = " + std::to_string(q) + " outside [0,1]");
  const int d = rho.dim();
  Matrix m = rho.matrix() * cplx(q);
  for (int i = 0; i < d; ++i) m(i, i) += (1.0 - q) / d;
  return DensityMatrix(m);
}

Matrix coherence_mixing_unitary() {
  Matrix u(4);
  const double r = 1.0 / std::sqrt(2.0);
  u(0, 0) = u(0, 2) = r;
  u(1, 1) = u(1, 3) = r;
  u(2, 0) = r;
  u(2, 2) = -r;
  u(3, 1) = r;
  u(3, 3) = -r;
  return u;
}

DensityMatrix max_coherent_entangled(BellLabel which) {
  const Matrix u = coherence_mixing_unitary();
  return DensityMatrix((u * bell_state(which).matrix() * u.dagger()).hermitized());
}

double l1_coherence(const DensityMatrix& rho) {
  double s = 0;
  const int d = rho.dim();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (i != j) s += std::abs(rho.matrix()(i, j));
  return s;
}

double relative_entropy_coherence(const DensityMatrix& rho) {
  const int d = rho.dim();
  std::vector<double> diag(d);
  for (int i = 0; i < d; ++i) diag[i] = std::max(0.0, rho.matrix()(i, i).real());
  const Eigensystem es = eig_hermitian(rho.matrix());
  std::vector<double> lam;
  for (double l : es.values) lam.push_back(std::max(0.0, l));
  return std::max(0.0, entropy(diag) - entropy(lam));
}

double linear_entropy(const DensityMatrix& rho) {
  const double d = rho.dim();
  return d / (d - 1.0) * std::max(0.0, 1.0 - purity(rho));
}

double mcl(const DensityMatrix& rho) {
  const double d = rho.dim();
  const double c = l1_coherence(rho) / (d - 1.0);
  return c * c + linear_entropy(rho);
}

double relative_purity(const DensityMatrix& rho0, const DensityMatrix& rho_t) {
  if (rho0.dim() != rho_t.dim())
    throw Error(Errc::dimension_mismatch, "relative_purity: dimension mismatch");
  cplx tr = 0;
  const int d = rho0.dim();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) tr += rho_t.matrix()(i, j) * rho0.matrix()(j, i);
  return tr.real() / purity(rho0);
}

BellLabel parse_bell_label(std::string_view s) {
  const std::string v = lowered(s);
  if (v == "phi+") return BellLabel::phi_plus;
  if (v == "phi-") return BellLabel::phi_minus;
  if (v == "psi+") return BellLabel::psi_plus;
  if (v == "psi-") return BellLabel::psi_minus;
  throw Error(Errc::parse_error, "unknown Bell label '" + std::string(s) + "'");
}

std::string_view bell_label_name(BellLabel which) {
  switch (which) {
    case BellLabel::phi_plus: return "phi+";
    case BellLabel::phi_minus: return "phi-";
    case BellLabel::psi_plus: return "psi+";
    case BellLabel::psi_minus: return "psi-";
  }
  return "?";
}

DensityMatrix parse_state(std::string_view spec) {
  const std::string s = lowered(spec);
  const std::size_t colon = s.find(':');
  if (colon == std::string::npos)
    throw Error(Errc::parse_error, "state spec '" + std::string(spec) + "' has no ':'");
  const std::string head = s.substr(0, colon);
  const std::string rest = s.substr(colon + 1);

  if (head == "bloch") {
    const auto parts = split(rest, ',');
    if (parts.size() != 3)
      throw Error(Errc::parse_error, "bloch spec needs 3 components: '" + std::string(spec) + "'");
    return bloch_state({parse_number(parts[0], "bloch spec"),
                        parse_number(parts[1], "bloch spec"),
                        parse_number(parts[2], "bloch spec")});
  }
  if (head == "bell") return bell_state(parse_bell_label(rest));
  if (head == "ghz") {
    const auto parts = split(rest, ',');
    if (parts.size() != 3)
      throw Error(Errc::parse_error, "ghz spec needs N,k,sign: '" + std::string(spec) + "'");
    int sign;
    if (parts[2] == "+")
      sign = 1;
    else if (parts[2] == "-")
      sign = -1;
    else
      throw Error(Errc::parse_error, "ghz sign must be + or -: '" + std::string(spec) + "'");
    return ghz_state({parse_int(parts[0], "ghz spec"), parse_int(parts[1], "ghz spec"), sign});
  }
  if (head == "werner") {
    const auto parts = split(rest, ',', 2);
    if (parts.size() != 2)
      throw Error(Errc::parse_error, "werner spec needs q,<state>: '" + std::string(spec) + "'");
    return werner_state(parse_number(parts[0], "werner spec"), parse_state(parts[1]));
  }
  if (head == "mcb") return max_coherent_entangled(parse_bell_label(rest));
  if (head == "mcbw") {
    const auto parts = split(rest, ',', 2);
    if (parts.size() != 2)
      throw Error(Errc::parse_error, "mcbw spec needs q,<bell>: '" + std::string(spec) + "'");
    return werner_state(parse_number(parts[0], "mcbw spec"),
                        max_coherent_entangled(parse_bell_label(parts[1])));
  }
  throw Error(Errc::parse_error, "unknown state family '" + head + "' in '" + std::string(spec) +
                                     "' (bloch|bell|ghz|werner|mcb|mcbw)");
}

}  // namespace qslkit
