#include "channels.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

namespace qslkit {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0))
    throw Error(Errc::bad_argument, std::string("channel config: ") + what + " must be positive");
}

// Regime discriminants. RTN switches between damped oscillation and
// overdamped decay at 2c/kappa = 1; NMAD at lambda = 2 kappa.
double rtn_w2(const ChannelConfig& cfg) {
  const double r = 2.0 * cfg.c / cfg.kappa;
  return r * r - 1.0;
}

double nmad_d2(const ChannelConfig& cfg) {
  return cfg.lambda * cfg.lambda - 2.0 * cfg.kappa * cfg.lambda;
}

constexpr double kRegimeEps = 1e-9;

}  // namespace

ChannelConfig ChannelConfig::oun_config(double kappa, double lambda) {
  require_positive(kappa, "kappa");
  require_positive(lambda, "lambda");
  return ChannelConfig{ChannelKind::oun, kappa, lambda, 0.0};
}

ChannelConfig ChannelConfig::rtn_config(double kappa, double c) {
  require_positive(kappa, "kappa");
  require_positive(c, "c");
  return ChannelConfig{ChannelKind::rtn, kappa, 0.0, c};
}

ChannelConfig ChannelConfig::nmad_config(double kappa, double lambda) {
  require_positive(kappa, "kappa");
  require_positive(lambda, "lambda");
  return ChannelConfig{ChannelKind::nmad, kappa, lambda, 0.0};
}

std::string_view channel_kind_name(ChannelKind k) {
  switch (k) {
    case ChannelKind::oun: return "oun";
    case ChannelKind::rtn: return "rtn";
    case ChannelKind::nmad: return "nmad";
  }
  return "?";
}

ChannelKind parse_channel_kind(std::string_view s) {
  std::string v(s);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "oun") return ChannelKind::oun;
  if (v == "rtn") return ChannelKind::rtn;
  if (v == "nmad") return ChannelKind::nmad;
  throw Error(Errc::parse_error, "unknown channel kind '" + std::string(s) + "' (oun|rtn|nmad)");
}

double decoherence_function(const ChannelConfig& cfg, double t) {
  if (t < 0) throw Error(Errc::bad_argument, "decoherence_function: t < 0");
  const double k = cfg.kappa;
  switch (cfg.kind) {
    case ChannelKind::oun:
      return std::exp(-0.5 * k * (t + std::expm1(-cfg.lambda * t) / cfg.lambda));
    case ChannelKind::rtn: {
      const double w2 = rtn_w2(cfg);
      const double kt = k * t;
      if (w2 > kRegimeEps) {
        const double w = std::sqrt(w2);
        const double u = w * kt;
        return std::exp(-kt) * (std::cos(u) + std::sin(u) / w);
      }
      if (w2 < -kRegimeEps) {
        const double mu = std::sqrt(-w2);
        const double u = mu * kt;
        return std::exp(-kt) * (std::cosh(u) + std::sinh(u) / mu);
      }
      return std::exp(-kt) * (1.0 + kt - w2 * kt * kt * (3.0 + kt) / 6.0);
    }
    case ChannelKind::nmad: {
      const double l = cfg.lambda;
      const double d2 = nmad_d2(cfg);
      const double scale = l * l + 2.0 * k * l;
      if (d2 > kRegimeEps * scale) {
        const double d = std::sqrt(d2);
        const double u = 0.5 * d * t;
        return std::exp(-0.5 * l * t) * (std::cosh(u) + l / d * std::sinh(u));
      }
      if (d2 < -kRegimeEps * scale) {
        const double d = std::sqrt(-d2);
        const double u = 0.5 * d * t;
        return std::exp(-0.5 * l * t) * (std::cos(u) + l / d * std::sin(u));
      }
      return std::exp(-0.5 * l * t) *
             (1.0 + 0.5 * l * t + d2 * t * t * (1.0 / 8.0 + l * t / 48.0));
    }
  }
  throw Error(Errc::bad_argument, "decoherence_function: bad channel kind");
}

double decoherence_function_derivative(const ChannelConfig& cfg, double t) {
  if (t < 0) throw Error(Errc::bad_argument, "decoherence_function_derivative: t < 0");
  const double k = cfg.kappa;
  switch (cfg.kind) {
    case ChannelKind::oun:
      return decoherence_function(cfg, t) * (-0.5 * k) * (-std::expm1(-cfg.lambda * t));
    case ChannelKind::rtn: {
      const double w2 = rtn_w2(cfg);
      const double kt = k * t;
      const double amp = 1.0 + w2;  // (2c/kappa)^2
      if (w2 > kRegimeEps) {
        const double w = std::sqrt(w2);
        return -std::exp(-kt) * k * amp * std::sin(w * kt) / w;
      }
      if (w2 < -kRegimeEps) {
        const double mu = std::sqrt(-w2);
        return -std::exp(-kt) * k * amp * std::sinh(mu * kt) / mu;
      }
      return -std::exp(-kt) * k * amp * kt * (1.0 - w2 * kt * kt / 6.0);
    }
    case ChannelKind::nmad: {
      const double l = cfg.lambda;
      const double d2 = nmad_d2(cfg);
      const double scale = l * l + 2.0 * k * l;
      if (d2 > kRegimeEps * scale) {
        const double d = std::sqrt(d2);
        return -(k * l / d) * std::exp(-0.5 * l * t) * std::sinh(0.5 * d * t);
      }
      if (d2 < -kRegimeEps * scale) {
        const double d = std::sqrt(-d2);
        return -(k * l / d) * std::exp(-0.5 * l * t) * std::sin(0.5 * d * t);
      }
      return -k * l * std::exp(-0.5 * l * t) * (0.5 * t + d2 * t * t * t / 48.0);
    }
  }
  throw Error(Errc::bad_argument, "decoherence_function_derivative: bad channel kind");
}

// The decay envelope cancels in pdot/p, so the ratio is formed from the
// oscillatory factors alone and the pole test sees them at their natural
// scale even when p itself has decayed below double precision.
double decoherence_rate(const ChannelConfig& cfg, double t) {
  if (t < 0) throw Error(Errc::bad_argument, "decoherence_rate: t < 0");
  const double k = cfg.kappa;
  double num = 0, den = 1, den_scale = 1;
  switch (cfg.kind) {
    case ChannelKind::oun:
      return 0.25 * k * (-std::expm1(-cfg.lambda * t));
    case ChannelKind::rtn: {
      const double w2 = rtn_w2(cfg);
      const double kt = k * t;
      const double amp = 1.0 + w2;
      if (w2 > kRegimeEps) {
        const double w = std::sqrt(w2);
        const double u = w * kt;
        num = 0.5 * k * amp * std::sin(u);
        den = w * std::cos(u) + std::sin(u);
        den_scale = std::sqrt(amp);
      } else if (w2 < -kRegimeEps) {
        const double mu = std::sqrt(-w2);
        const double u = mu * kt;
        num = 0.5 * k * amp * std::sinh(u);
        den = mu * std::cosh(u) + std::sinh(u);
      } else {
        num = 0.5 * k * amp * kt * (1.0 - w2 * kt * kt / 6.0);
        den = 1.0 + kt - w2 * kt * kt * (3.0 + kt) / 6.0;
      }
      break;
    }
    case ChannelKind::nmad: {
      const double l = cfg.lambda;
      const double d2 = nmad_d2(cfg);
      const double scale = l * l + 2.0 * k * l;
      if (d2 > kRegimeEps * scale) {
        const double d = std::sqrt(d2);
        const double u = 0.5 * d * t;
        num = 2.0 * k * l * std::sinh(u);
        den = d * std::cosh(u) + l * std::sinh(u);
        den_scale = std::sqrt(d2 + l * l);
      } else if (d2 < -kRegimeEps * scale) {
        const double d = std::sqrt(-d2);
        const double u = 0.5 * d * t;
        num = 2.0 * k * l * std::sin(u);
        den = d * std::cos(u) + l * std::sin(u);
        den_scale = std::sqrt(2.0 * k * l);
      } else {
        num = 2.0 * k * l * (0.5 * t + d2 * t * t * t / 48.0);
        den = 1.0 + 0.5 * l * t + d2 * t * t * (1.0 / 8.0 + l * t / 48.0);
      }
      break;
    }
  }
  if (std::abs(den) < 1e-12 * den_scale)
    throw Error(Errc::rate_pole,
                "decoherence_rate: p(t) vanishes at t = " + std::to_string(t));
  return num / den;
}

std::vector<double> p_zero_times(const ChannelConfig& cfg, double horizon) {
  std::vector<double> zeros;
  if (horizon <= 0) return zeros;
  if (cfg.kind == ChannelKind::rtn) {
    const double w2 = rtn_w2(cfg);
    if (w2 <= kRegimeEps) return zeros;  // overdamped/critical p stays positive
    const double w = std::sqrt(w2);
    const double base = std::numbers::pi - std::atan(w);
    for (int k = 0;; ++k) {
      const double t = (base + k * std::numbers::pi) / (w * cfg.kappa);
      if (t > horizon) break;
      zeros.push_back(t);
    }
  } else if (cfg.kind == ChannelKind::nmad) {
    const double d2 = nmad_d2(cfg);
    if (d2 >= -kRegimeEps * (cfg.lambda * cfg.lambda + 2.0 * cfg.kappa * cfg.lambda))
      return zeros;
    const double d = std::sqrt(-d2);
    const double base = std::numbers::pi - std::atan(d / cfg.lambda);
    for (int k = 0;; ++k) {
      const double t = 2.0 * (base + k * std::numbers::pi) / d;
      if (t > horizon) break;
      zeros.push_back(t);
    }
  }
  return zeros;
}

namespace {

Matrix pauli_z2() {
  Matrix z(2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  return z;
}

Matrix lower2() {  // |0><1|
  Matrix s(2);
  s(0, 1) = 1.0;
  return s;
}

Matrix embed(const Matrix& op, int q, int n) {
  Matrix out = (q == 0) ? op : Matrix::identity(1 << q);
  if (q != 0) out = tensor(out, op);
  const int rest = n - q - 1;
  if (rest > 0) out = tensor(out, Matrix::identity(1 << rest));
  return out;
}

using MapPairs = std::vector<std::pair<Matrix, Matrix>>;

Matrix apply_map(const Matrix& rho, const MapPairs& pairs, int q, int n) {
  Matrix acc(rho.dim());
  for (const auto& [a, b] : pairs) {
    const Matrix ea = embed(a, q, n);
    const Matrix eb = embed(b, q, n);
    acc += ea * rho * eb.dagger();
  }
  return acc;
}

MapPairs channel_map(const ChannelConfig& cfg, double t) {
  const double p = decoherence_function(cfg, t);
  MapPairs pairs;
  if (cfg.dephasing()) {
    const double a0 = std::sqrt(std::max(0.0, 0.5 * (1.0 + p)));
    const double a1 = std::sqrt(std::max(0.0, 0.5 * (1.0 - p)));
    pairs.emplace_back(Matrix::identity(2) * cplx(a0), Matrix::identity(2) * cplx(a0));
    pairs.emplace_back(pauli_z2() * cplx(a1), pauli_z2() * cplx(a1));
  } else {
    Matrix e0(2);
    e0(0, 0) = 1.0;
    e0(1, 1) = p;
    const Matrix e1 = lower2() * cplx(std::sqrt(std::max(0.0, 1.0 - p * p)));
    pairs.emplace_back(e0, e0);
    pairs.emplace_back(e1, e1);
  }
  return pairs;
}

// Time derivative of the channel as a superoperator. The two-sided (A, B)
// form keeps every coefficient polynomial in p, so this stays finite at
// p = +-1 and p = 0 where individual Kraus derivatives blow up.
MapPairs channel_map_derivative(const ChannelConfig& cfg, double t) {
  const double p = decoherence_function(cfg, t);
  const double pdot = decoherence_function_derivative(cfg, t);
  MapPairs pairs;
  if (cfg.dephasing()) {
    // d/dt [ (1+p)/2 rho + (1-p)/2 Z rho Z ] = pdot/2 (rho - Z rho Z)
    pairs.emplace_back(Matrix::identity(2) * cplx(0.5 * pdot), Matrix::identity(2));
    pairs.emplace_back(pauli_z2() * cplx(-0.5 * pdot), pauli_z2());
  } else {
    Matrix e0(2), e0dot(2);
    e0(0, 0) = 1.0;
    e0(1, 1) = p;
    e0dot(1, 1) = pdot;
    const Matrix sm = lower2();
    pairs.emplace_back(e0dot, e0);
    pairs.emplace_back(e0, e0dot);
    pairs.emplace_back(sm * cplx(-2.0 * p * pdot), sm);
  }
  return pairs;
}

void check_arity(int n, const char* op) {
  if (n > 4)
    throw Error(Errc::too_many_qubits,
                std::string(op) + ": register of " + std::to_string(n) + " qubits (max 4)");
}

}  // namespace

EvolvedState evolve_qubit(const BlochVector& eta, const ChannelConfig& cfg, double t) {
  const double n2 = eta.x * eta.x + eta.y * eta.y + eta.z * eta.z;
  if (n2 > 1.0 + 1e-12)
    throw Error(Errc::bloch_out_of_ball, "evolve_qubit: |eta| = " + std::to_string(std::sqrt(n2)));
  const double p = decoherence_function(cfg, t);
  double x = p * eta.x;
  double y = p * eta.y;
  double z = cfg.dephasing() ? eta.z : 1.0 - p * p * (1.0 - eta.z);
  Matrix m(2);
  m(0, 0) = 0.5 * (1.0 + z);
  m(1, 1) = 0.5 * (1.0 - z);
  m(0, 1) = 0.5 * cplx(x, -y);
  m(1, 0) = 0.5 * cplx(x, y);
  return EvolvedState{DensityMatrix(m), p, t};
}

EvolvedState evolve_nqubit(const DensityMatrix& rho0, const ChannelConfig& cfg, double t) {
  check_arity(rho0.n_qubits(), "evolve_nqubit");
  const MapPairs pairs = channel_map(cfg, t);
  Matrix cur = rho0.matrix();
  for (int q = 0; q < rho0.n_qubits(); ++q) cur = apply_map(cur, pairs, q, rho0.n_qubits());
  return EvolvedState{DensityMatrix(cur.hermitized()), decoherence_function(cfg, t), t};
}

std::vector<Matrix> kraus_operators(const ChannelConfig& cfg, double t) {
  std::vector<Matrix> ops;
  for (const auto& [a, b] : channel_map(cfg, t)) ops.push_back(a);
  return ops;
}

DensityMatrix bell_diag_evolved(const BellDiagonalState& k, const ChannelConfig& cfg, double t) {
  if (std::abs(k.k1) > 1.0 || std::abs(k.k2) > 1.0 || std::abs(k.k3) > 1.0)
    throw Error(Errc::bad_argument, "bell_diag_evolved: correlations outside [-1,1]");
  const double p = decoherence_function(cfg, t);
  const double p2 = p * p;
  Matrix m(4);
  if (cfg.dephasing()) {
    m(0, 0) = m(3, 3) = 0.25 * (1.0 + k.k3);
    m(1, 1) = m(2, 2) = 0.25 * (1.0 - k.k3);
    m(0, 3) = m(3, 0) = 0.25 * p2 * (k.k1 - k.k2);
    m(1, 2) = m(2, 1) = 0.25 * p2 * (k.k1 + k.k2);
  } else {
    const double a = 1.0 + k.k3;
    const double p4 = p2 * p2;
    m(0, 0) = 1.0 - p2 + 0.25 * a * p4;
    m(1, 1) = m(2, 2) = 0.25 * (2.0 * p2 - a * p4);
    m(3, 3) = 0.25 * a * p4;
    m(0, 3) = m(3, 0) = 0.25 * (k.k1 - k.k2) * p2;
    m(1, 2) = m(2, 1) = 0.25 * (k.k1 + k.k2) * p2;
  }
  return DensityMatrix(m);
}

Matrix generator(const DensityMatrix& rho, const ChannelConfig& cfg, double t) {
  check_arity(rho.n_qubits(), "generator");
  const double g = decoherence_rate(cfg, t);
  const int n = rho.n_qubits();
  const int d = rho.dim();
  Matrix acc(d);
  if (cfg.dephasing()) {
    for (int q = 0; q < n; ++q) {
      const Matrix z = embed(pauli_z2(), q, n);
      acc += z * rho.matrix() * z;
      acc -= rho.matrix();
    }
  } else {
    const Matrix p1 = [&] {
      Matrix m(2);
      m(1, 1) = 1.0;
      return m;
    }();
    for (int q = 0; q < n; ++q) {
      const Matrix sm = embed(lower2(), q, n);
      const Matrix pq = embed(p1, q, n);
      acc += sm * rho.matrix() * sm.dagger();
      acc -= (pq * rho.matrix() + rho.matrix() * pq) * cplx(0.5);
    }
  }
  return (acc * cplx(g)).hermitized();
}

Matrix evolution_derivative(const DensityMatrix& rho0, const ChannelConfig& cfg, double t) {
  check_arity(rho0.n_qubits(), "evolution_derivative");
  const int n = rho0.n_qubits();
  const MapPairs phi = channel_map(cfg, t);
  const MapPairs dphi = channel_map_derivative(cfg, t);
  Matrix acc(rho0.dim());
  for (int q = 0; q < n; ++q) {
    Matrix cur = rho0.matrix();
    for (int r = 0; r < n; ++r) cur = apply_map(cur, r == q ? dphi : phi, r, n);
    acc += cur;
  }
  return acc.hermitized();
}

}  // namespace qslkit
