#include "validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <utility>

#include "channels.hpp"
#include "matrix.hpp"
#include "nonmarkov.hpp"
#include "qsl.hpp"
#include "quadrature.hpp"
#include "states.hpp"

namespace qslkit {
namespace {

using Check = std::pair<bool, std::string>;

struct Ctx {
  std::string inject;
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

Check pass_with(double worst, const char* what) {
  return {true, std::string("max ") + what + " " + fmt(worst)};
}

Matrix random_complex(std::mt19937_64& eng, int d) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = cplx(g(eng), g(eng));
  return m;
}

Matrix random_hermitian(std::mt19937_64& eng, int d) {
  return random_complex(eng, d).hermitized();
}

DensityMatrix random_density(std::mt19937_64& eng, int d) {
  Matrix g = random_complex(eng, d);
  Matrix rho = g * g.dagger();
  rho *= cplx(1.0 / rho.trace().real(), 0.0);
  return DensityMatrix(rho);
}

BlochVector random_bloch(std::mt19937_64& eng, bool allow_pure) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double x = g(eng), y = g(eng), z = g(eng);
  double n = std::sqrt(x * x + y * y + z * z);
  if (n < 1e-12) return BlochVector{0.3, 0.0, 0.4};
  double r = allow_pure && u(eng) < 0.25 ? 1.0 : std::cbrt(u(eng)) * 0.98;
  return BlochVector{r * x / n, r * y / n, r * z / n};
}

BellDiagonalState random_triple(std::mt19937_64& eng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    BellDiagonalState k{u(eng), u(eng), u(eng)};
    double e1 = 1.0 + k.k1 - k.k2 + k.k3;
    double e2 = 1.0 - k.k1 + k.k2 + k.k3;
    double e3 = 1.0 + k.k1 + k.k2 - k.k3;
    double e4 = 1.0 - k.k1 - k.k2 - k.k3;
    if (e1 >= 1e-4 && e2 >= 1e-4 && e3 >= 1e-4 && e4 >= 1e-4) return k;
  }
}

ChannelConfig random_channel(std::mt19937_64& eng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int which = static_cast<int>(u(eng) * 3.0);
  if (which == 0) return ChannelConfig::oun_config(1.0, 0.05 + 3.0 * u(eng));
  if (which == 1) return ChannelConfig::rtn_config(1.0, 0.1 + 1.4 * u(eng));
  return ChannelConfig::nmad_config(1.0, 0.05 + 3.0 * u(eng));
}

// Time in [lo, hi] staying clear of zeros of the decoherence function.
double safe_time(std::mt19937_64& eng, const ChannelConfig& cfg, double lo, double hi,
                 double clearance = 2e-3) {
  std::uniform_real_distribution<double> u(lo, hi);
  auto zeros = p_zero_times(cfg, hi + clearance);
  for (int tries = 0; tries < 200; ++tries) {
    double t = u(eng);
    bool ok = true;
    for (double z : zeros)
      if (std::abs(t - z) < clearance) ok = false;
    if (ok) return t;
  }
  return lo;
}

// ---- matrix layer ----

Check check_norm_chain(const Ctx&) {
  std::mt19937_64 eng(101);
  double worst = -1.0;
  for (int it = 0; it < 200; ++it) {
    int d = 2 + it % 7;
    Matrix m = (it % 2 == 0) ? random_hermitian(eng, d) : random_complex(eng, d);
    Norms n = matrix_norms(m);
    double slack = 1e-11 * std::max(1.0, n.tr);
    if (n.op > n.hs + slack || n.hs > n.tr + slack)
      return {false, "norm ordering violated: op " + fmt(n.op) + " hs " + fmt(n.hs) + " tr " +
                         fmt(n.tr)};
    worst = std::max(worst, std::max(n.op - n.hs, n.hs - n.tr));
  }
  return pass_with(worst, "ordering slack used");
}

Check check_eig_reconstruction(const Ctx&) {
  std::mt19937_64 eng(102);
  double worst = 0.0;
  for (int it = 0; it < 100; ++it) {
    int d = 2 + it % 7;
    Matrix m = random_hermitian(eng, d);
    Eigensystem es = eig_hermitian(m);
    Matrix rec(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        cplx s = 0.0;
        for (int k = 0; k < d; ++k)
          s += es.vectors(i, k) * es.values[static_cast<std::size_t>(k)] *
               std::conj(es.vectors(j, k));
        rec(i, j) = s;
      }
    rec -= m;
    double dev = rec.max_abs() / std::max(1.0, m.max_abs());
    Matrix vtv = es.vectors.dagger() * es.vectors;
    for (int i = 0; i < d; ++i) vtv(i, i) -= 1.0;
    dev = std::max(dev, vtv.max_abs());
    if (dev > 1e-10) return {false, "reconstruction deviation " + fmt(dev)};
    worst = std::max(worst, dev);
  }
  return pass_with(worst, "reconstruction deviation");
}

Check check_fidelity_bounds(const Ctx&) {
  std::mt19937_64 eng(103);
  double worst = 0.0;
  for (int it = 0; it < 300; ++it) {
    int d = (it % 2 == 0) ? 2 : 4;
    DensityMatrix a = random_density(eng, d);
    DensityMatrix b = random_density(eng, d);
    double f = bures_fidelity(a, b);
    double g = superfidelity(a, b);
    if (f < -1e-12 || f > 1.0 + 1e-10) return {false, "fidelity out of range: " + fmt(f)};
    if (g < f - 1e-9) return {false, "superfidelity below fidelity by " + fmt(f - g)};
    if (d == 2) {
      if (std::abs(g - f) > 1e-9)
        return {false, "qubit fidelity mismatch " + fmt(std::abs(g - f))};
      worst = std::max(worst, std::abs(g - f));
    }
  }
  return pass_with(worst, "qubit fidelity gap");
}

Check check_sqrt_psd(const Ctx&) {
  std::mt19937_64 eng(104);
  double worst = 0.0;
  for (int it = 0; it < 100; ++it) {
    int d = 2 + it % 5;
    Matrix g = random_complex(eng, d);
    Matrix m = g * g.dagger();
    Matrix s = sqrt_psd(m);
    Matrix ss = s * s;
    ss -= m;
    double dev = ss.max_abs() / std::max(1.0, m.max_abs());
    if (dev > 1e-8) return {false, "sqrt square deviation " + fmt(dev)};
    worst = std::max(worst, dev);
  }
  return pass_with(worst, "sqrt square deviation");
}

Check check_psd_coefficients(const Ctx&) {
  std::mt19937_64 eng(105);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int it = 0; it < 300; ++it) {
    int d = 2 + it % 5;
    // Hermitian matrix with a known spectrum, half the cases with one
    // clearly negative eigenvalue; the verdicts must match.
    std::vector<double> vals(static_cast<std::size_t>(d));
    bool want_psd = (it % 2 == 0);
    for (auto& v : vals) v = 0.05 + u(eng);
    if (!want_psd) vals[0] = -0.05 - u(eng);
    Eigensystem es = eig_hermitian(random_hermitian(eng, d));
    Matrix m(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        cplx s = 0.0;
        for (int k = 0; k < d; ++k)
          s += es.vectors(i, k) * vals[static_cast<std::size_t>(k)] *
               std::conj(es.vectors(j, k));
        m(i, j) = s;
      }
    if (psd_by_coefficients(m) != want_psd)
      return {false, std::string("coefficient test verdict wrong for a ") +
                         (want_psd ? "psd" : "non-psd") + " matrix, case " + fmt(it)};
  }
  return {true, "verdicts agree with constructed spectra"};
}

// ---- state layer ----

Check check_mcl_bound(const Ctx&) {
  std::mt19937_64 eng(201);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int it = 0; it < 10000; ++it) {
    DensityMatrix rho = [&]() {
      int kind = it % 5;
      if (kind == 0) return bloch_state(random_bloch(eng, true));
      if (kind == 1) return bell_diagonal_state(random_triple(eng));
      if (kind == 2) return werner_state(u(eng), bell_state(BellLabel::phi_plus));
      if (kind == 3) return ghz_state(GhzIndex{3, 1 + static_cast<int>(u(eng) * 4.0), +1});
      return random_density(eng, 4);
    }();
    if (it % 3 == 0) {
      ChannelConfig cfg = random_channel(eng);
      rho = evolve_nqubit(rho, cfg, 0.2 + 4.0 * u(eng)).rho_t;
    }
    double m = mcl(rho);
    if (m > 1.0 + 1e-9) return {false, "measure exceeded 1 by " + fmt(m - 1.0)};
    worst = std::max(worst, m);
  }
  return pass_with(worst, "measure value");
}

Check check_l1_phase_invariance(const Ctx&) {
  std::mt19937_64 eng(202);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int it = 0; it < 200; ++it) {
    int d = (it % 2 == 0) ? 2 : 4;
    DensityMatrix rho = random_density(eng, d);
    double before = l1_coherence(rho);
    const Matrix& m = rho.matrix();
    std::vector<cplx> phase(static_cast<std::size_t>(d));
    for (auto& ph : phase) {
      double a = 6.283185307179586 * u(eng);
      ph = cplx(std::cos(a), std::sin(a));
    }
    Matrix rotated(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        rotated(i, j) = phase[static_cast<std::size_t>(i)] * m(i, j) *
                        std::conj(phase[static_cast<std::size_t>(j)]);
    double after = l1_coherence(DensityMatrix(rotated));
    double dev = std::abs(after - before);
    if (dev > 1e-10) return {false, "diagonal phase rotation changed the measure by " + fmt(dev)};
    worst = std::max(worst, dev);
  }
  return pass_with(worst, "deviation");
}

Check check_belldiag_initial(const Ctx&) {
  std::mt19937_64 eng(203);
  double worst = 0.0;
  for (int it = 0; it < 200; ++it) {
    BellDiagonalState k = random_triple(eng);
    DensityMatrix rho = bell_diagonal_state(k);
    double cl1 = l1_coherence(rho);
    double expect_cl1 = 0.5 * (std::abs(k.k1 - k.k2) + std::abs(k.k1 + k.k2));
    double pur = purity(rho);
    double expect_pur = 0.25 * (1.0 + k.k1 * k.k1 + k.k2 * k.k2 + k.k3 * k.k3);
    BellDiagonalState back = triple_of(rho);
    double dev = std::max(std::abs(cl1 - expect_cl1), std::abs(pur - expect_pur));
    dev = std::max({dev, std::abs(back.k1 - k.k1), std::abs(back.k2 - k.k2),
                    std::abs(back.k3 - k.k3)});
    if (dev > 1e-12) return {false, "initial-state identities off by " + fmt(dev)};
    worst = std::max(worst, dev);
  }
  return pass_with(worst, "deviation");
}

// ---- channel layer ----

Check check_pt_consistency(const Ctx& ctx) {
  const bool flip = ctx.inject == "pt-sign";
  const ChannelConfig cfgs[] = {
      ChannelConfig::oun_config(1.0, 0.1), ChannelConfig::rtn_config(1.0, 0.3),
      ChannelConfig::rtn_config(1.0, 0.6), ChannelConfig::nmad_config(1.0, 0.25),
      ChannelConfig::nmad_config(1.0, 3.0)};
  double worst = 0.0;
  for (const auto& cfg : cfgs) {
    double horizon = 20.0;
    auto zeros = p_zero_times(cfg, horizon);
    if (!zeros.empty()) horizon = 0.95 * zeros.front();
    double factor = cfg.kind == ChannelKind::nmad ? 0.5 : 2.0;
    for (int i = 1; i <= 50; ++i) {
      double t = horizon * i / 50.0;
      double integral =
          integrate_adaptive([&](double s) { return decoherence_rate(cfg, s); }, 0.0, t);
      double from_rate = std::exp(-factor * integral);
      double direct = decoherence_function(cfg, t);
      if (flip) direct = -direct;
      double dev = std::abs(from_rate - direct);
      if (dev > 1e-8)
        return {false, std::string(channel_kind_name(cfg.kind)) + " t=" + fmt(t) +
                           ": exp of the rate integral gives " + fmt(from_rate) + " but p is " +
                           fmt(direct)};
      worst = std::max(worst, dev);
    }
  }
  return pass_with(worst, "deviation");
}

Check check_pdot_analytic(const Ctx&) {
  const ChannelConfig cfgs[] = {
      ChannelConfig::oun_config(1.0, 0.1),        ChannelConfig::oun_config(1.0, 2.0),
      ChannelConfig::rtn_config(1.0, 0.3),        ChannelConfig::rtn_config(1.0, 0.5 - 1e-7),
      ChannelConfig::rtn_config(1.0, 0.5 + 1e-7), ChannelConfig::rtn_config(1.0, 1.2),
      ChannelConfig::nmad_config(1.0, 0.2),       ChannelConfig::nmad_config(1.0, 2.0 - 1e-7),
      ChannelConfig::nmad_config(1.0, 2.0 + 1e-7), ChannelConfig::nmad_config(1.0, 5.0)};
  const double h = 1e-6;
  double worst = 0.0;
  for (const auto& cfg : cfgs) {
    for (int i = 1; i <= 60; ++i) {
      double t = 8.0 * i / 60.0;
      double fd =
          (decoherence_function(cfg, t + h) - decoherence_function(cfg, t - h)) / (2.0 * h);
      double an = decoherence_function_derivative(cfg, t);
      double dev = std::abs(fd - an) / std::max(1.0, std::abs(an));
      if (dev > 1e-6)
        return {false, std::string(channel_kind_name(cfg.kind)) + " t=" + fmt(t) +
                           " derivative off by " + fmt(dev)};
      worst = std::max(worst, dev);
    }
  }
  for (double t : {0.5, 2.0, 6.0}) {
    double below = decoherence_function(ChannelConfig::rtn_config(1.0, 0.5 - 1e-8), t);
    double above = decoherence_function(ChannelConfig::rtn_config(1.0, 0.5 + 1e-8), t);
    if (std::abs(below - above) > 1e-6)
      return {false, "telegraph regime boundary jump " + fmt(std::abs(below - above))};
    below = decoherence_function(ChannelConfig::nmad_config(1.0, 2.0 - 1e-8), t);
    above = decoherence_function(ChannelConfig::nmad_config(1.0, 2.0 + 1e-8), t);
    if (std::abs(below - above) > 1e-6)
      return {false, "damping regime boundary jump " + fmt(std::abs(below - above))};
  }
  return pass_with(worst, "relative deviation");
}

Check check_kraus_completeness(const Ctx&) {
  const ChannelConfig cfgs[] = {ChannelConfig::oun_config(1.0, 0.5),
                                ChannelConfig::rtn_config(1.0, 0.8),
                                ChannelConfig::nmad_config(1.0, 0.3)};
  double worst = 0.0;
  for (const auto& cfg : cfgs)
    for (int i = 1; i <= 50; ++i) {
      double t = 10.0 * i / 50.0;
      Matrix sum(2);
      for (const Matrix& e : kraus_operators(cfg, t)) sum += e.dagger() * e;
      sum(0, 0) -= 1.0;
      sum(1, 1) -= 1.0;
      double dev = sum.max_abs();
      if (dev > 1e-12)
        return {false,
                std::string(channel_kind_name(cfg.kind)) + " completeness off by " + fmt(dev)};
      worst = std::max(worst, dev);
    }
  return pass_with(worst, "deviation");
}

Check check_generator_vs_difference(const Ctx&) {
  std::mt19937_64 eng(301);
  const double h = 1e-5;
  double worst = 0.0;
  for (int it = 0; it < 50; ++it) {
    ChannelConfig cfg = random_channel(eng);
    DensityMatrix rho0 = (it % 2 == 0) ? bloch_state(random_bloch(eng, false))
                                       : bell_diagonal_state(random_triple(eng));
    double t = safe_time(eng, cfg, 0.05, 5.0);
    Matrix fd = evolve_nqubit(rho0, cfg, t + h).rho_t.matrix();
    fd -= evolve_nqubit(rho0, cfg, t - h).rho_t.matrix();
    fd *= cplx(1.0 / (2.0 * h), 0.0);
    DensityMatrix rho_t = evolve_nqubit(rho0, cfg, t).rho_t;
    Matrix d1 = generator(rho_t, cfg, t);
    d1 -= fd;
    Matrix d2 = evolution_derivative(rho0, cfg, t);
    d2 -= fd;
    double dev = std::max(d1.max_abs(), d2.max_abs());
    if (dev > 1e-5)
      return {false, std::string(channel_kind_name(cfg.kind)) + " t=" + fmt(t) +
                         " generator vs finite difference off by " + fmt(dev)};
    worst = std::max(worst, dev);
  }
  return pass_with(worst, "deviation");
}

Check check_fixed_points(const Ctx&) {
  const ChannelConfig deph[] = {ChannelConfig::oun_config(1.0, 0.4),
                                ChannelConfig::rtn_config(1.0, 0.9)};
  double worst = 0.0;
  for (const auto& cfg : deph)
    for (double t : {0.5, 2.0, 7.0}) {
      BlochVector axial{0.0, 0.0, 0.6};
      Matrix diff = evolve_qubit(axial, cfg, t).rho_t.matrix();
      diff -= bloch_state(axial).matrix();
      double dev = diff.max_abs();
      if (dev > 1e-12) return {false, "dephasing moved a diagonal state by " + fmt(dev)};
      worst = std::max(worst, dev);
    }
  ChannelConfig ad = ChannelConfig::nmad_config(1.0, 0.6);
  for (double t : {0.5, 2.0, 7.0}) {
    BlochVector ground{0.0, 0.0, 1.0};
    Matrix diff = evolve_qubit(ground, ad, t).rho_t.matrix();
    diff -= bloch_state(ground).matrix();
    double dev = diff.max_abs();
    if (dev > 1e-12) return {false, "damping moved its fixed point by " + fmt(dev)};
    worst = std::max(worst, dev);
  }
  double pur0 = purity(evolve_qubit(BlochVector{0, 0, 0}, ad, 0.0).rho_t);
  double pur2 = purity(evolve_qubit(BlochVector{0, 0, 0}, ad, 2.0).rho_t);
  if (pur2 <= pur0 + 1e-6) return {false, "damping failed to purify the maximally mixed state"};
  return pass_with(worst, "fixed-point drift");
}

Check check_trace_hermiticity(const Ctx&) {
  std::mt19937_64 eng(302);
  double worst = 0.0;
  for (int it = 0; it < 60; ++it) {
    ChannelConfig cfg = random_channel(eng);
    int n = 1 + it % 3;
    DensityMatrix rho0 = random_density(eng, 1 << n);
    double t = 0.1 + 0.15 * it;
    Matrix m = evolve_nqubit(rho0, cfg, t).rho_t.matrix();
    double dev = std::abs(m.trace().real() - 1.0);
    dev = std::max(dev, std::abs(m.trace().imag()));
    dev = std::max(dev, m.hermiticity_defect());
    Eigensystem es = eig_hermitian(m);
    if (es.values.back() < -1e-10)
      return {false, "evolution produced eigenvalue " + fmt(es.values.back())};
    if (dev > 1e-12) return {false, "trace or hermiticity drift " + fmt(dev)};
    worst = std::max(worst, dev);
  }
  return pass_with(worst, "drift");
}

Check check_belldiag_closed_evolution(const Ctx&) {
  std::mt19937_64 eng(303);
  double worst = 0.0;
  for (int it = 0; it < 50; ++it) {
    ChannelConfig cfg = random_channel(eng);
    BellDiagonalState k = random_triple(eng);
    double t = 0.1 + 0.12 * it;
    Matrix closed = bell_diag_evolved(k, cfg, t).matrix();
    closed -= evolve_nqubit(bell_diagonal_state(k), cfg, t).rho_t.matrix();
    double dev = closed.max_abs();
    if (dev > 1e-12)
      return {false, std::string(channel_kind_name(cfg.kind)) + " closed evolution off by " +
                         fmt(dev)};
    worst = std::max(worst, dev);
  }
  return pass_with(worst, "deviation");
}

// ---- speed-limit layer ----

struct FormCase {
  std::string label;
  Method method;
  std::function<double(double)> closed;
  DensityMatrix rho0;
  ChannelConfig cfg;
};

std::vector<FormCase> closed_form_cases() {
  std::vector<FormCase> cases;
  auto add_qubit = [&](const std::string& label, const ChannelConfig& cfg, double cl1, double ez,
                       Method method) {
    auto closed = [cfg, cl1, ez, method](double tau) {
      if (cfg.kind == ChannelKind::nmad)
        return (method == Method::relative_purity ? qsl_nmad_qubit_rp(cl1, ez, cfg, tau)
                                                  : qsl_nmad_qubit_bures(cl1, ez, cfg, tau))
            .tau_qsl;
      return (method == Method::relative_purity ? qsl_dephasing_qubit_rp(cl1, ez, cfg, tau)
                                                : qsl_dephasing_qubit_bures(cl1, ez, cfg, tau))
          .tau_qsl;
    };
    cases.push_back(FormCase{label, method, closed, bloch_state(BlochVector{cl1, 0.0, ez}), cfg});
  };
  auto add_pair = [&](const std::string& label, const ChannelConfig& cfg,
                      const BellDiagonalState& k, Method method) {
    auto closed = [k, cfg, method](double tau) {
      return (method == Method::relative_purity ? qsl_belldiag_rp(k, cfg, tau)
                                                : qsl_belldiag_bures(k, cfg, tau))
          .tau_qsl;
    };
    cases.push_back(FormCase{label, method, closed, bell_diagonal_state(k), cfg});
  };
  const double s2 = 1.0 / std::sqrt(2.0);
  add_qubit("dephasing qubit purity pure", ChannelConfig::oun_config(1.0, 0.1), 1.0, 0.0,
            Method::relative_purity);
  add_qubit("dephasing qubit purity mixed", ChannelConfig::rtn_config(1.0, 0.8), 0.5, 0.3,
            Method::relative_purity);
  add_qubit("dephasing qubit angle pure", ChannelConfig::rtn_config(1.0, 0.8), 1.0, 0.0,
            Method::bures);
  add_qubit("dephasing qubit angle mixed", ChannelConfig::oun_config(1.0, 0.1), 0.4, 0.2,
            Method::bures);
  add_qubit("damping qubit purity", ChannelConfig::nmad_config(1.0, 0.25), s2, 0.0,
            Method::relative_purity);
  add_qubit("damping qubit angle", ChannelConfig::nmad_config(1.0, 0.25), s2, 0.0, Method::bures);
  add_pair("dephasing pair purity", ChannelConfig::oun_config(1.0, 0.1),
           bell_triple(BellLabel::phi_plus), Method::relative_purity);
  add_pair("dephasing pair angle", ChannelConfig::rtn_config(1.0, 0.8),
           BellDiagonalState{0.7, -0.4, 0.2}, Method::bures);
  add_pair("damping pair purity", ChannelConfig::nmad_config(1.0, 0.25),
           bell_triple(BellLabel::psi_minus), Method::relative_purity);
  add_pair("damping pair angle", ChannelConfig::nmad_config(1.0, 0.25),
           BellDiagonalState{0.5, 0.3, -0.2}, Method::bures);
  return cases;
}

Check check_closedform_pipeline(const Ctx&) {
  double worst = 0.0;
  for (const auto& fc : closed_form_cases()) {
    for (double tau : {0.1, 0.6, 1.7, 4.0}) {
      double closed = fc.closed(tau);
      QslRequest req;
      req.method = fc.method;
      req.tau = tau;
      double pipe = qsl_compute(fc.rho0, fc.cfg, req).tau_qsl;
      double dev = std::abs(closed - pipe) / std::max(std::abs(closed), 1e-9);
      if (dev > 1e-5)
        return {false, fc.label + " tau=" + fmt(tau) + ": closed " + fmt(closed) +
                           " vs pipeline " + fmt(pipe)};
      worst = std::max(worst, dev);
    }
  }
  return pass_with(worst, "relative deviation");
}

Check check_bound_validity(const Ctx&) {
  std::mt19937_64 eng(401);
  double worst = 0.0;
  for (int it = 0; it < 60; ++it) {
    ChannelConfig cfg = random_channel(eng);
    DensityMatrix rho0 = (it % 2 == 0) ? bloch_state(random_bloch(eng, true))
                                       : bell_diagonal_state(random_triple(eng));
    QslRequest req;
    req.method = Method::bures;
    req.norm = NormKind::op;
    req.tau = 0.2 + 0.08 * it;
    req.grid_points = 128;
    QslResult res = qsl_compute(rho0, cfg, req);
    if (res.degenerate) continue;
    if (res.tau_qsl > req.tau * (1.0 + 1e-9))
      return {false, std::string(channel_kind_name(cfg.kind)) + " tau=" + fmt(req.tau) +
                         " bound " + fmt(res.tau_qsl) + " exceeds the driving time"};
    worst = std::max(worst, res.tau_qsl / req.tau);
  }
  return pass_with(worst, "bound-to-horizon ratio");
}

Check check_norm_monotonicity(const Ctx&) {
  std::mt19937_64 eng(402);
  for (int it = 0; it < 30; ++it) {
    ChannelConfig cfg = random_channel(eng);
    DensityMatrix rho0 = (it % 2 == 0) ? bloch_state(random_bloch(eng, true))
                                       : bell_diagonal_state(random_triple(eng));
    QslRequest req;
    req.method = Method::bures;
    req.tau = 0.3 + 0.1 * it;
    req.grid_points = 128;
    req.norm = NormKind::op;
    double v_op = qsl_compute(rho0, cfg, req).tau_qsl;
    req.norm = NormKind::hs;
    double v_hs = qsl_compute(rho0, cfg, req).tau_qsl;
    req.norm = NormKind::tr;
    double v_tr = qsl_compute(rho0, cfg, req).tau_qsl;
    if (v_op < v_hs - 1e-10 || v_hs < v_tr - 1e-10)
      return {false,
              "ordering broken: op " + fmt(v_op) + " hs " + fmt(v_hs) + " tr " + fmt(v_tr)};
  }
  return {true, "op >= hs >= tr on all sampled cases"};
}

Check check_quadrature_convergence(const Ctx&) {
  std::mt19937_64 eng(403);
  double worst = 0.0;
  for (int it = 0; it < 10; ++it) {
    ChannelConfig cfg = random_channel(eng);
    DensityMatrix rho0 = (it % 2 == 0) ? bloch_state(random_bloch(eng, true))
                                       : bell_diagonal_state(random_triple(eng));
    QslRequest req;
    req.method = (it % 3 == 0) ? Method::relative_purity : Method::bures;
    req.tau = 0.5 + 0.5 * it;
    req.grid_points = 256;
    double base = qsl_compute(rho0, cfg, req).tau_qsl;
    req.grid_points *= 2;
    double fine = qsl_compute(rho0, cfg, req).tau_qsl;
    double dev = std::abs(base - fine) / std::max(std::abs(base), 1e-12);
    if (dev > 1e-7) return {false, "grid doubling shifted the bound by " + fmt(dev)};
    worst = std::max(worst, dev);
  }
  return pass_with(worst, "relative shift");
}

Check check_coherence_monotonicity(const Ctx&) {
  const ChannelConfig cfgs[] = {ChannelConfig::oun_config(1.0, 0.1),
                                ChannelConfig::rtn_config(1.0, 0.8)};
  for (const auto& cfg : cfgs) {
    for (Method method : {Method::relative_purity, Method::bures}) {
      // A pure family (pole to equator) and an equatorial mixed family.
      for (bool pure : {true, false}) {
        double prev = -1.0;
        for (int i = 0; i < 20; ++i) {
          double cl1 = 0.05 + 0.95 * i / 19.0;
          double ez = pure ? std::sqrt(std::max(0.0, 1.0 - cl1 * cl1)) : 0.0;
          double v = (method == Method::relative_purity
                          ? qsl_dephasing_qubit_rp(cl1, ez, cfg, 1.0)
                          : qsl_dephasing_qubit_bures(cl1, ez, cfg, 1.0))
                         .tau_qsl;
          if (v < prev - 1e-10)
            return {false, std::string(channel_kind_name(cfg.kind)) + " cl1=" + fmt(cl1) +
                               " bound dropped from " + fmt(prev) + " to " + fmt(v)};
          prev = v;
        }
      }
    }
  }
  return {true, "bound nondecreasing in initial coherence on all grids"};
}

Check check_mcl_dephasing_invariant(const Ctx&) {
  std::mt19937_64 eng(404);
  double worst = 0.0;
  for (int it = 0; it < 20; ++it) {
    BlochVector b = random_bloch(eng, true);
    ChannelConfig cfg = (it % 2 == 0) ? ChannelConfig::oun_config(1.0, 0.1)
                                      : ChannelConfig::rtn_config(1.0, 0.8);
    double expect = 1.0 - b.z * b.z;
    for (int j = 0; j <= 10; ++j) {
      double t = 0.8 * j;
      double m = mcl(evolve_qubit(b, cfg, t).rho_t);
      double dev = std::abs(m - expect);
      if (dev > 1e-9) return {false, "invariant drifted by " + fmt(dev) + " at t=" + fmt(t)};
      worst = std::max(worst, dev);
    }
  }
  return pass_with(worst, "drift");
}

Check check_mcl_closedform(const Ctx&) {
  std::mt19937_64 eng(405);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int it = 0; it < 40; ++it) {
    ChannelConfig cfg = random_channel(eng);
    double t = 6.0 * u(eng);
    double closed, direct;
    if (it % 2 == 0) {
      BlochVector b = random_bloch(eng, true);
      closed = mcl_qubit_closed_form(cfg, b.z, t);
      direct = mcl(evolve_qubit(b, cfg, t).rho_t);
    } else {
      BellDiagonalState k = random_triple(eng);
      closed = mcl_belldiag_closed_form(cfg, k, t);
      direct = mcl(evolve_nqubit(bell_diagonal_state(k), cfg, t).rho_t);
    }
    double dev = std::abs(closed - direct);
    if (dev > 1e-9) return {false, "closed form off by " + fmt(dev)};
    worst = std::max(worst, dev);
  }
  return pass_with(worst, "deviation");
}

// ---- information-backflow layer ----

Check check_gamma_star_range(const Ctx&) {
  const ChannelConfig cfgs[] = {ChannelConfig::oun_config(1.0, 0.5),
                                ChannelConfig::rtn_config(1.0, 0.9),
                                ChannelConfig::nmad_config(1.0, 0.4)};
  for (const auto& cfg : cfgs) {
    NonMarkovReport rep = nonmarkovianity(cfg, 20.0);
    auto zeros = p_zero_times(cfg, 20.0);
    double lo = 1e300, hi = -1e300;
    for (int i = 1; i <= 2000; ++i) {
      double t = 20.0 * i / 2000.0;
      bool near_pole = false;
      for (double z : zeros)
        if (std::abs(t - z) < 1e-3) near_pole = true;
      if (near_pole) continue;
      double g = decoherence_rate(cfg, t);
      lo = std::min(lo, g);
      hi = std::max(hi, g);
    }
    lo = std::max(lo, 0.0);
    if (rep.gamma_star < lo - 1e-6 || rep.gamma_star > hi + 1e-6)
      return {false, std::string(channel_kind_name(cfg.kind)) + " reference rate " +
                         fmt(rep.gamma_star) + " outside [" + fmt(lo) + ", " + fmt(hi) + "]"};
  }
  return {true, "reference rate inside the sampled rate range"};
}

Check check_rtn_regime_boundary(const Ctx&) {
  for (double c : {0.3, 0.45, 0.5}) {
    auto iv = gamma_negative_intervals(ChannelConfig::rtn_config(1.0, c), 20.0);
    if (!iv.empty())
      return {false, "negative-rate interval found at c=" + fmt(c) + " where none should exist"};
  }
  for (double c : {0.55, 0.6, 1.0}) {
    auto iv = gamma_negative_intervals(ChannelConfig::rtn_config(1.0, c), 20.0);
    if (iv.empty()) return {false, "no negative-rate interval found at c=" + fmt(c)};
  }
  return {true, "negative-rate intervals appear exactly above c = 0.5"};
}

Check check_resolution_invariance(const Ctx&) {
  const ChannelConfig cfgs[] = {ChannelConfig::rtn_config(1.0, 0.8),
                                ChannelConfig::nmad_config(1.0, 0.3)};
  double worst = 0.0;
  for (const auto& cfg : cfgs) {
    std::vector<std::pair<double, double>> windows;
    for (double z : p_zero_times(cfg, 20.0)) windows.emplace_back(z - 1e-6, z + 1e-6);
    auto rate = [&](double t) { return decoherence_rate(cfg, t); };
    double w = comparison_weight(cfg);
    double coarse = nl_of_rate(rate, w, 20.0, windows, nullptr, 256);
    double fine = nl_of_rate(rate, w, 20.0, windows, nullptr, 512);
    double dev = std::abs(coarse - fine);
    if (dev > 1e-9) return {false, "resolution doubling shifted the measure by " + fmt(dev)};
    worst = std::max(worst, dev);
  }
  return pass_with(worst, "shift");
}

Check check_constant_rate_zero(const Ctx&) {
  double gs = 0.0;
  double val = nl_of_rate([](double) { return 0.17; }, 2.0, 10.0, {}, &gs);
  if (val > 1e-12) return {false, "constant rate gave nonzero measure " + fmt(val)};
  if (std::abs(gs - 0.17) > 1e-6)
    return {false, "constant rate gave reference " + fmt(gs) + " instead of 0.17"};
  double gs2 = 0.0;
  double val2 =
      nl_of_rate([](double t) { return std::cos(t); }, 2.0, 12.566370614359172, {}, &gs2);
  if (val2 < 1e-3) return {false, "oscillating rate gave a vanishing measure"};
  return {true, "zero for a constant rate, positive for an oscillating one"};
}

}  // namespace

std::vector<PropertyResult> run_validation(const std::string& filter, const std::string& inject) {
  if (!inject.empty() && inject != "none" && inject != "pt-sign")
    throw Error(Errc::bad_argument, "unknown inject tag '" + inject + "' (try pt-sign)");
  struct Entry {
    const char* name;
    Check (*fn)(const Ctx&);
  };
  static const Entry entries[] = {
      {"matrix/norms-chain", check_norm_chain},
      {"matrix/eig-reconstruction", check_eig_reconstruction},
      {"matrix/fidelity-bounds", check_fidelity_bounds},
      {"matrix/sqrt-psd", check_sqrt_psd},
      {"matrix/psd-coefficients", check_psd_coefficients},
      {"states/mcl-bound", check_mcl_bound},
      {"states/l1-phase-invariance", check_l1_phase_invariance},
      {"states/belldiag-initial", check_belldiag_initial},
      {"channels/pt-consistency", check_pt_consistency},
      {"channels/pdot-analytic", check_pdot_analytic},
      {"channels/kraus-completeness", check_kraus_completeness},
      {"channels/generator-vs-difference", check_generator_vs_difference},
      {"channels/fixed-points", check_fixed_points},
      {"channels/trace-hermiticity", check_trace_hermiticity},
      {"channels/belldiag-closed-evolution", check_belldiag_closed_evolution},
      {"qsl/closedform-pipeline", check_closedform_pipeline},
      {"qsl/bound-validity", check_bound_validity},
      {"qsl/norms-monotonicity", check_norm_monotonicity},
      {"qsl/quadrature-convergence", check_quadrature_convergence},
      {"qsl/coherence-monotonicity", check_coherence_monotonicity},
      {"qsl/mcl-dephasing-invariant", check_mcl_dephasing_invariant},
      {"qsl/mcl-closedform", check_mcl_closedform},
      {"nonmarkov/gamma-star-range", check_gamma_star_range},
      {"nonmarkov/rtn-regime-boundary", check_rtn_regime_boundary},
      {"nonmarkov/resolution-invariance", check_resolution_invariance},
      {"nonmarkov/constant-rate-zero", check_constant_rate_zero},
  };
  Ctx ctx{inject == "none" ? std::string() : inject};
  std::vector<PropertyResult> out;
  for (const Entry& e : entries) {
    if (!filter.empty() && std::string(e.name).find(filter) == std::string::npos) continue;
    PropertyResult r;
    r.name = e.name;
    try {
      Check c = e.fn(ctx);
      r.passed = c.first;
      r.detail = c.second;
    } catch (const std::exception& ex) {
      r.passed = false;
      r.detail = std::string("exception: ") + ex.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace qslkit
