#include "qsl.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <numbers>

#include "quadrature.hpp"

namespace qslkit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

// Half-width of the window cut out around each zero of p(t). Rate-type
// integrands diverge logarithmically there; the truncated integral is the
// quantity both the closed forms and the pipeline compute.
constexpr double kPoleHalfWidth = 1e-6;

std::vector<std::pair<double, double>> pole_windows(const ChannelConfig& cfg, double tau) {
  std::vector<std::pair<double, double>> w;
  for (double z : p_zero_times(cfg, tau + kPoleHalfWidth))
    w.emplace_back(z - kPoleHalfWidth, z + kPoleHalfWidth);
  return w;
}

void validate_request(const QslRequest& req) {
  if (!(req.tau > 0)) throw Error(Errc::bad_argument, "qsl: tau must be positive");
  if (req.grid_points < 16) throw Error(Errc::bad_argument, "qsl: grid_points must be >= 16");
}

double averaged_integral(const std::function<double(double)>& f, const ChannelConfig& cfg,
                         double tau, int seeds, bool excl) {
  const double i = excl ? integrate_excluding(f, 0.0, tau, pole_windows(cfg, tau), 1e-12, 1e-10,
                                              seeds)
                        : integrate_adaptive(f, 0.0, tau, 1e-12, 1e-10, seeds);
  return i / tau;
}

QslResult finish(double num, double avg, double angle, const char* op) {
  QslResult r;
  r.angle = angle;
  r.numerator = num;
  r.denominator = avg;
  r.averaged_norm = avg;
  if (avg < 1e-14) {
    if (std::abs(num) < 1e-12) {
      r.degenerate = true;
      r.tau_qsl = 0.0;
      return r;
    }
    throw Error(Errc::degenerate_denominator,
                std::string(op) + ": averaged generator norm vanished with nonzero angle");
  }
  r.tau_qsl = num / avg;
  return r;
}

double pick(const Norms& n, NormKind k) {
  switch (k) {
    case NormKind::op: return n.op;
    case NormKind::hs: return n.hs;
    case NormKind::tr: return n.tr;
  }
  return n.op;
}

void require_dephasing(const ChannelConfig& cfg, const char* op) {
  if (!cfg.dephasing())
    throw Error(Errc::bad_argument, std::string(op) + ": needs a dephasing (oun|rtn) channel");
}

void require_nmad(const ChannelConfig& cfg, const char* op) {
  if (cfg.kind != ChannelKind::nmad)
    throw Error(Errc::bad_argument, std::string(op) + ": needs an nmad channel");
}

void check_qubit_params(double cl1, double ez, double tau, const char* op) {
  if (cl1 < 0) throw Error(Errc::bad_argument, std::string(op) + ": cl1_0 must be >= 0");
  if (cl1 * cl1 + ez * ez > 1.0 + 1e-9)
    throw Error(Errc::bloch_out_of_ball, std::string(op) + ": cl1^2 + eta_z^2 > 1");
  if (!(tau > 0)) throw Error(Errc::bad_argument, std::string(op) + ": tau must be positive");
}

void check_triple(const BellDiagonalState& k, double tau, const char* op) {
  const double e1 = 1.0 - k.k1 - k.k2 - k.k3;
  const double e2 = 1.0 - k.k1 + k.k2 + k.k3;
  const double e3 = 1.0 + k.k1 - k.k2 + k.k3;
  const double e4 = 1.0 + k.k1 + k.k2 - k.k3;
  if (std::min({e1, e2, e3, e4}) < -4e-10)
    throw Error(Errc::not_psd, std::string(op) + ": correlation triple outside the tetrahedron");
  if (!(tau > 0)) throw Error(Errc::bad_argument, std::string(op) + ": tau must be positive");
}

double guarded_rate_slope(const ChannelConfig& cfg, double t, const char* op) {
  // |pdot/p|, the dephasing-rate magnitude up to a factor
  const double p = decoherence_function(cfg, t);
  if (std::abs(p) < 1e-12)
    throw Error(Errc::rate_pole, std::string(op) + ": p(t) vanishes at t = " + std::to_string(t));
  return std::abs(decoherence_function_derivative(cfg, t) / p);
}

constexpr int kClosedFormSeeds = 64;

}  // namespace

NormKind parse_norm_kind(std::string_view s) {
  std::string v(s);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "op") return NormKind::op;
  if (v == "hs") return NormKind::hs;
  if (v == "tr") return NormKind::tr;
  throw Error(Errc::parse_error, "unknown norm '" + std::string(s) + "' (op|hs|tr)");
}

Method parse_method(std::string_view s) {
  std::string v(s);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "rp" || v == "relative-purity") return Method::relative_purity;
  if (v == "bures") return Method::bures;
  throw Error(Errc::parse_error, "unknown method '" + std::string(s) + "' (rp|bures)");
}

QslResult qsl_relative_purity(const DensityMatrix& rho0, const ChannelConfig& cfg,
                              const QslRequest& req) {
  validate_request(req);
  const EvolvedState ev = evolve_nqubit(rho0, cfg, req.tau);
  const double P = std::clamp(relative_purity(rho0, ev.rho_t), -1.0, 1.0);
  const double theta = std::acos(P);
  const double tr0 = purity(rho0);
  const auto f = [&](double t) { return generator(rho0, cfg, t).hs_norm(); };
  const double num = 4.0 * theta * theta * tr0 / (kPi * kPi);
  const double avg = averaged_integral(f, cfg, req.tau, req.grid_points, true);
  return finish(num, avg, theta, "qsl_relative_purity");
}

QslResult qsl_bures(const DensityMatrix& rho0, const ChannelConfig& cfg, const QslRequest& req) {
  validate_request(req);
  const EvolvedState ev = evolve_nqubit(rho0, cfg, req.tau);
  const double F = req.use_exact_fidelity ? bures_fidelity(rho0, ev.rho_t)
                                          : superfidelity(rho0, ev.rho_t);
  const double num = std::max(0.0, 1.0 - F);  // sin^2 of the Bures angle
  const double angle = std::acos(std::sqrt(std::clamp(F, 0.0, 1.0)));
  const double tr0 = purity(rho0);
  const bool factor = req.use_mixed_factor && tr0 < 1.0 - 1e-12;
  const double v0 = std::max(0.0, 1.0 - tr0);
  const auto f = [&](double t) {
    double nv = pick(matrix_norms(evolution_derivative(rho0, cfg, t)), req.norm);
    if (factor) {
      const double vt = std::max(0.0, 1.0 - purity(evolve_nqubit(rho0, cfg, t).rho_t));
      if (vt < 1e-24)
        throw Error(Errc::mixed_factor_singular,
                    "qsl_bures: evolved state became pure at t = " + std::to_string(t));
      nv *= 1.0 + std::sqrt(v0 / vt);
    }
    return nv;
  };
  const double avg = averaged_integral(f, cfg, req.tau, req.grid_points, factor);
  return finish(num, avg, angle, "qsl_bures");
}

QslResult qsl_compute(const DensityMatrix& rho0, const ChannelConfig& cfg, const QslRequest& req) {
  return req.method == Method::relative_purity ? qsl_relative_purity(rho0, cfg, req)
                                               : qsl_bures(rho0, cfg, req);
}

QslResult qsl_dephasing_qubit_rp(double cl1_0, double eta_z, const ChannelConfig& cfg,
                                 double tau) {
  require_dephasing(cfg, "qsl_dephasing_qubit_rp");
  check_qubit_params(cl1_0, eta_z, tau, "qsl_dephasing_qubit_rp");
  const double c2 = cl1_0 * cl1_0;
  const double z2 = eta_z * eta_z;
  const double p_tau = decoherence_function(cfg, tau);
  const double tr0 = 0.5 * (1.0 + c2 + z2);
  const double P = std::clamp((1.0 + p_tau * c2 + z2) / (2.0 * tr0), -1.0, 1.0);
  const double theta = std::acos(P);
  const double num = 4.0 * kSqrt2 * theta * theta * tr0 / (kPi * kPi);
  const auto f = [&](double t) {
    return guarded_rate_slope(cfg, t, "qsl_dephasing_qubit_rp") * cl1_0;
  };
  const double avg = averaged_integral(f, cfg, tau, kClosedFormSeeds, true);
  return finish(num, avg, theta, "qsl_dephasing_qubit_rp");
}

QslResult qsl_nmad_qubit_rp(double cl1_0, double eta_z, const ChannelConfig& cfg, double tau) {
  require_nmad(cfg, "qsl_nmad_qubit_rp");
  check_qubit_params(cl1_0, eta_z, tau, "qsl_nmad_qubit_rp");
  const double c2 = cl1_0 * cl1_0;
  const double oz = 1.0 - eta_z;
  const double p_tau = decoherence_function(cfg, tau);
  const double tr0 = 0.5 * (1.0 + c2 + eta_z * eta_z);
  const double P =
      std::clamp((1.0 + eta_z - p_tau * p_tau * eta_z * oz + p_tau * c2) / (2.0 * tr0), -1.0, 1.0);
  const double theta = std::acos(P);
  const double num = 4.0 * kSqrt2 * theta * theta * tr0 / (kPi * kPi);
  const double amp = std::sqrt(c2 + 4.0 * oz * oz);
  const auto f = [&](double t) {
    return guarded_rate_slope(cfg, t, "qsl_nmad_qubit_rp") * amp;
  };
  const double avg = averaged_integral(f, cfg, tau, kClosedFormSeeds, true);
  return finish(num, avg, theta, "qsl_nmad_qubit_rp");
}

QslResult qsl_dephasing_qubit_bures(double cl1_0, double eta_z, const ChannelConfig& cfg,
                                    double tau) {
  require_dephasing(cfg, "qsl_dephasing_qubit_bures");
  check_qubit_params(cl1_0, eta_z, tau, "qsl_dephasing_qubit_bures");
  const double c2 = cl1_0 * cl1_0;
  const double z2 = eta_z * eta_z;
  const double l1 = std::sqrt(std::max(0.0, 1.0 - c2 - z2));
  const bool mixed = 0.5 * l1 * l1 > 1e-12;
  const double p_tau = decoherence_function(cfg, tau);
  const double l2tau = std::sqrt(std::max(0.0, 1.0 - p_tau * p_tau * c2 - z2));
  const double num = std::max(0.0, 1.0 - p_tau * c2 - z2 - l1 * l2tau);  // = 2 sin^2 B
  const double angle = std::acos(std::sqrt(std::clamp(1.0 - 0.5 * num, 0.0, 1.0)));
  const auto f = [&](double t) {
    const double pdot = decoherence_function_derivative(cfg, t);
    double fac = 1.0;
    if (mixed) {
      const double p = decoherence_function(cfg, t);
      const double l2t = std::sqrt(std::max(0.0, 1.0 - p * p * c2 - z2));
      if (l2t < 1e-12)
        throw Error(Errc::mixed_factor_singular,
                    "qsl_dephasing_qubit_bures: l2(t) vanished at t = " + std::to_string(t));
      fac += l1 / l2t;
    }
    return std::abs(pdot) * cl1_0 * fac;
  };
  const double avg = averaged_integral(f, cfg, tau, kClosedFormSeeds, mixed);
  return finish(num, avg, angle, "qsl_dephasing_qubit_bures");
}

QslResult qsl_nmad_qubit_bures(double cl1_0, double eta_z, const ChannelConfig& cfg, double tau) {
  require_nmad(cfg, "qsl_nmad_qubit_bures");
  check_qubit_params(cl1_0, eta_z, tau, "qsl_nmad_qubit_bures");
  const double c2 = cl1_0 * cl1_0;
  const double oz = 1.0 - eta_z;
  const double h1 = std::sqrt(std::max(0.0, 1.0 - c2 - eta_z * eta_z));
  const bool mixed = 0.5 * h1 * h1 > 1e-12;
  const auto h2_at = [&](double p) {
    const double rad = p * p * (2.0 * oz - p * p * oz * oz - c2);
    if (rad < -1e-12)
      throw Error(Errc::complex_radicand, "qsl_nmad_qubit_bures: negative radicand in h2");
    return std::sqrt(std::max(0.0, rad));
  };
  const double p_tau = decoherence_function(cfg, tau);
  const double num = std::max(
      0.0, 1.0 - eta_z + p_tau * p_tau * eta_z * oz - p_tau * c2 - h1 * h2_at(p_tau));
  const double angle = std::acos(std::sqrt(std::clamp(1.0 - 0.5 * num, 0.0, 1.0)));
  const auto f = [&](double t) {
    const double p = decoherence_function(cfg, t);
    const double pdot = decoherence_function_derivative(cfg, t);
    double fac = 1.0;
    if (mixed) {
      const double h2t = h2_at(p);
      if (h2t < 1e-12)
        throw Error(Errc::mixed_factor_singular,
                    "qsl_nmad_qubit_bures: h2(t) vanished at t = " + std::to_string(t));
      fac += h1 / h2t;
    }
    return std::abs(pdot) * std::sqrt(c2 + 4.0 * p * p * oz * oz) * fac;
  };
  const double avg = averaged_integral(f, cfg, tau, kClosedFormSeeds, mixed);
  return finish(num, avg, angle, "qsl_nmad_qubit_bures");
}

QslResult qsl_belldiag_rp(const BellDiagonalState& k, const ChannelConfig& cfg, double tau) {
  check_triple(k, tau, "qsl_belldiag_rp");
  const double s12 = k.k1 * k.k1 + k.k2 * k.k2;
  const double sk = s12 + k.k3 * k.k3;
  const double tr0 = 0.25 * (1.0 + sk);
  const double p_tau = decoherence_function(cfg, tau);
  double P;
  double amp;
  if (cfg.dephasing()) {
    P = (1.0 + k.k3 * k.k3 + s12 * p_tau * p_tau) / (1.0 + sk);
    amp = std::sqrt(s12);
  } else {
    const double a = 1.0 + k.k3;
    P = (1.0 + k.k3 + p_tau * p_tau * (s12 + k.k3 * (-2.0 + a * p_tau * p_tau))) / (1.0 + sk);
    amp = std::sqrt(2.0 + s12 + 4.0 * k.k3 * k.k3);
  }
  const double theta = std::acos(std::clamp(P, -1.0, 1.0));
  const double num = 4.0 * theta * theta * tr0 / (kPi * kPi);
  const auto f = [&](double t) { return guarded_rate_slope(cfg, t, "qsl_belldiag_rp") * amp; };
  const double avg = averaged_integral(f, cfg, tau, kClosedFormSeeds, true);
  return finish(num, avg, theta, "qsl_belldiag_rp");
}

QslResult qsl_belldiag_bures(const BellDiagonalState& k, const ChannelConfig& cfg, double tau) {
  check_triple(k, tau, "qsl_belldiag_bures");
  const double s12 = k.k1 * k.k1 + k.k2 * k.k2;
  const double sk = s12 + k.k3 * k.k3;
  const double v0 = std::max(0.0, 3.0 - sk);  // 4 (1 - tr rho_0^2)
  const bool mixed = 0.25 * v0 > 1e-12;
  const double p_tau = decoherence_function(cfg, tau);
  double num;
  std::function<double(double)> f;
  if (cfg.dephasing()) {
    const auto vt_at = [=](double p) { return 3.0 - k.k3 * k.k3 - s12 * p * p * p * p; };
    num = 0.25 * (3.0 - k.k3 * k.k3 - s12 * p_tau * p_tau -
                  std::sqrt(std::max(0.0, v0 * vt_at(p_tau))));
    const double amp = std::max(std::abs(k.k1 - k.k2), std::abs(k.k1 + k.k2));
    f = [=, &cfg](double t) {
      const double p = decoherence_function(cfg, t);
      const double pdot = decoherence_function_derivative(cfg, t);
      double fac = 1.0;
      if (mixed) {
        const double vt = vt_at(p);
        if (vt < 1e-24)
          throw Error(Errc::mixed_factor_singular,
                      "qsl_belldiag_bures: evolved state became pure at t = " + std::to_string(t));
        fac += std::sqrt(v0 / vt);
      }
      return 0.5 * std::abs(p * pdot) * amp * fac;
    };
  } else {
    const double a = 1.0 + k.k3;
    const auto x_at = [=](double p) {
      const double p2 = p * p;
      return p2 * (8.0 - (8.0 + 2.0 * k.k3 + s12) * p2 + 4.0 * a * p2 * p2 -
                   a * a * p2 * p2 * p2);
    };
    num = 0.25 * ((3.0 - k.k3) + (2.0 * k.k3 - s12) * p_tau * p_tau -
                  k.k3 * a * p_tau * p_tau * p_tau * p_tau -
                  std::sqrt(std::max(0.0, v0 * x_at(p_tau))));
    const double w = std::sqrt(4.0 + (k.k1 - k.k2) * (k.k1 - k.k2));
    const double ksum = k.k1 + k.k2;
    f = [=, &cfg](double t) {
      const double p = decoherence_function(cfg, t);
      const double pdot = decoherence_function_derivative(cfg, t);
      const double om = std::abs(p * pdot);
      const double b = a * p * p - 1.0;
      const double nv = std::max({0.5 * om * std::abs(-2.0 * b + ksum),
                                  0.5 * om * std::abs(-2.0 * b - ksum),
                                  om * std::abs(b + 0.5 * w), om * std::abs(b - 0.5 * w)});
      double fac = 1.0;
      if (mixed) {
        const double xt = x_at(p);
        if (xt < 1e-24)
          throw Error(Errc::mixed_factor_singular,
                      "qsl_belldiag_bures: evolved state became pure at t = " + std::to_string(t));
        fac += std::sqrt(v0 / xt);
      }
      return nv * fac;
    };
  }
  num = std::max(0.0, num);  // = sin^2 B directly in the two-qubit forms
  const double angle = std::acos(std::sqrt(std::clamp(1.0 - num, 0.0, 1.0)));
  const double avg = averaged_integral(f, cfg, tau, kClosedFormSeeds, mixed);
  return finish(num, avg, angle, "qsl_belldiag_bures");
}

double mcl_qubit_closed_form(const ChannelConfig& cfg, double eta_z, double t) {
  if (std::abs(eta_z) > 1.0 + 1e-12)
    throw Error(Errc::bloch_out_of_ball, "mcl_qubit_closed_form: |eta_z| > 1");
  if (cfg.dephasing()) return 1.0 - eta_z * eta_z;
  const double p = decoherence_function(cfg, t);
  const double q = p * p * (1.0 - eta_z);
  return q * (2.0 - q);
}

double mcl_belldiag_closed_form(const ChannelConfig& cfg, const BellDiagonalState& k, double t) {
  check_triple(k, 1.0, "mcl_belldiag_closed_form");
  const double s12 = k.k1 * k.k1 + k.k2 * k.k2;
  const double adiff = std::abs(k.k1 * k.k1 - k.k2 * k.k2);
  const double p = decoherence_function(cfg, t);
  const double p2 = p * p;
  const double p4 = p2 * p2;
  if (cfg.dephasing())
    return (18.0 - 6.0 * k.k3 * k.k3 - 5.0 * s12 * p4 + adiff * p4) / 18.0;
  const double a = 1.0 + k.k3;
  return (-6.0 * a * a * p4 * p4 + 24.0 * a * p4 * p2 +
          (adiff - 5.0 * s12 - 48.0 - 12.0 * k.k3) * p4 + 48.0 * p2) /
         18.0;
}

std::vector<TrajectoryPoint> trajectory(const DensityMatrix& rho0, const ChannelConfig& cfg,
                                        const QslRequest& req, const std::vector<double>& grid) {
  if (grid.empty()) return {};
  if (!(grid.front() > 0))
    throw Error(Errc::bad_argument, "trajectory: grid must start above t = 0");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw Error(Errc::bad_argument, "trajectory: grid must be strictly ascending");
  if (req.grid_points < 16)
    throw Error(Errc::bad_argument, "trajectory: grid_points must be >= 16");

  const double tmax = grid.back();
  const double tr0 = purity(rho0);
  const double v0 = std::max(0.0, 1.0 - tr0);
  const bool factor = req.use_mixed_factor && tr0 < 1.0 - 1e-12;
  const bool rp = req.method == Method::relative_purity;
  const bool excl = rp || factor;

  std::function<double(double)> f;
  if (rp) {
    f = [&](double t) { return generator(rho0, cfg, t).hs_norm(); };
  } else {
    f = [&](double t) {
      double nv = pick(matrix_norms(evolution_derivative(rho0, cfg, t)), req.norm);
      if (factor) {
        const double vt = std::max(0.0, 1.0 - purity(evolve_nqubit(rho0, cfg, t).rho_t));
        if (vt < 1e-24)
          throw Error(Errc::mixed_factor_singular,
                      "trajectory: evolved state became pure at t = " + std::to_string(t));
        nv *= 1.0 + std::sqrt(v0 / vt);
      }
      return nv;
    };
  }
  const auto windows = excl ? pole_windows(cfg, tmax) : std::vector<std::pair<double, double>>{};

  std::vector<TrajectoryPoint> out;
  out.reserve(grid.size());
  double acc = 0.0;
  double prev = 0.0;
  for (double t : grid) {
    const double frac = (t - prev) / tmax;
    const int seeds = std::max(2, static_cast<int>(std::lround(req.grid_points * frac)));
    acc += integrate_excluding(f, prev, t, windows, std::max(1e-12 * frac, 1e-15), 1e-10, seeds);
    prev = t;

    const EvolvedState ev = evolve_nqubit(rho0, cfg, t);
    double num, angle;
    if (rp) {
      const double P = std::clamp(relative_purity(rho0, ev.rho_t), -1.0, 1.0);
      angle = std::acos(P);
      num = 4.0 * angle * angle * tr0 / (kPi * kPi);
    } else {
      const double F = req.use_exact_fidelity ? bures_fidelity(rho0, ev.rho_t)
                                              : superfidelity(rho0, ev.rho_t);
      num = std::max(0.0, 1.0 - F);
      angle = std::acos(std::sqrt(std::clamp(F, 0.0, 1.0)));
    }

    TrajectoryPoint tp;
    tp.t = t;
    const double avg = acc / t;
    if (avg < 1e-14) {
      if (std::abs(num) >= 1e-12)
        throw Error(Errc::degenerate_denominator,
                    "trajectory: averaged norm vanished with nonzero angle at t = " +
                        std::to_string(t));
      tp.tau_qsl = 0.0;
    } else {
      tp.tau_qsl = num / avg;
    }
    tp.cl1 = l1_coherence(ev.rho_t);
    tp.s_l = linear_entropy(ev.rho_t);
    tp.m_cl = mcl(ev.rho_t);
    out.push_back(tp);
  }
  return out;
}

}  // namespace qslkit
