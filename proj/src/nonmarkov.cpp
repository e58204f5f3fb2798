#include "nonmarkov.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "quadrature.hpp"
#include "states.hpp"

namespace qslkit {

namespace {

constexpr double kPoleHalfWidth = 1e-6;

std::vector<std::pair<double, double>> pole_windows(const ChannelConfig& cfg, double horizon) {
  std::vector<std::pair<double, double>> w;
  for (double z : p_zero_times(cfg, horizon + kPoleHalfWidth))
    w.emplace_back(z - kPoleHalfWidth, z + kPoleHalfWidth);
  return w;
}

bool inside(double t, const std::vector<std::pair<double, double>>& windows) {
  for (const auto& [lo, hi] : windows)
    if (t > lo && t < hi) return true;
  return false;
}

double bisect_crossing(const ChannelConfig& cfg, double a, double b) {
  // sign change of gamma in (a, b); returns the crossing to ~1e-9
  auto sgn = [&](double t) {
    try {
      return decoherence_rate(cfg, t) < 0 ? -1 : 1;
    } catch (const Error&) {
      return 0;  // landed on a p-zero; either side works at this resolution
    }
  };
  const int sa = sgn(a);
  for (int it = 0; it < 80 && b - a > 1e-9; ++it) {
    const double m = 0.5 * (a + b);
    const int sm = sgn(m);
    if (sm == 0) return m;
    (sm == sa ? a : b) = m;
  }
  return 0.5 * (a + b);
}

}  // namespace

// Trace distance of the two states that separate fastest under the channel
// generator: the antipodal transverse Bloch pair for dephasing (computed),
// the known optimum 1 + sqrt(2) for amplitude damping.
double comparison_weight(const ChannelConfig& cfg) {
  if (!cfg.dephasing()) return 1.0 + std::numbers::sqrt2;
  const Matrix d = bloch_state({1, 0, 0}).matrix() - bloch_state({-1, 0, 0}).matrix();
  return matrix_norms(d).tr;
}

std::vector<Interval> gamma_negative_intervals(const ChannelConfig& cfg, double horizon) {
  if (!(horizon > 0))
    throw Error(Errc::bad_argument, "gamma_negative_intervals: horizon must be positive");
  const auto windows = pole_windows(cfg, horizon);
  const int n = 8192;
  std::vector<Interval> out;
  bool have_prev = false;
  double prev_t = 0;
  bool in_neg = false;
  double start = 0;
  for (int i = 1; i <= n; ++i) {
    const double t = horizon * i / n;
    if (inside(t, windows)) continue;
    double g;
    try {
      g = decoherence_rate(cfg, t);
    } catch (const Error&) {
      continue;
    }
    const bool neg = g < 0;
    if (!have_prev) {
      have_prev = true;
      if (neg) {
        in_neg = true;
        start = bisect_crossing(cfg, std::min(1e-12, t), t);
      }
    } else if (neg && !in_neg) {
      in_neg = true;
      start = bisect_crossing(cfg, prev_t, t);
    } else if (!neg && in_neg) {
      out.push_back({start, bisect_crossing(cfg, prev_t, t)});
      in_neg = false;
    }
    prev_t = t;
  }
  if (in_neg) out.push_back({start, horizon});
  return out;
}

double nl_of_rate(const std::function<double(double)>& rate, double weight, double horizon,
                  const std::vector<std::pair<double, double>>& windows, double* gamma_star,
                  int seed_panels) {
  double gmin = std::numeric_limits<double>::infinity();
  double gmax = -gmin;
  const int n = 4096;
  for (int i = 1; i <= n; ++i) {
    const double t = horizon * i / n;
    if (inside(t, windows)) continue;
    const double g = rate(t);
    gmin = std::min(gmin, g);
    gmax = std::max(gmax, g);
  }
  double a = std::max(0.0, gmin);
  double b = std::max(0.0, gmax);

  const auto objective = [&](double c) {
    const auto f = [&](double t) { return std::abs(rate(t) - c); };
    return integrate_excluding(f, 0.0, horizon, windows, 1e-12, 1e-10, seed_panels) * weight /
           horizon;
  };

  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  while (b - a > 1e-10) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = objective(d);
    }
  }
  const double star = 0.5 * (a + b);
  if (gamma_star) *gamma_star = star;
  return objective(star);
}

NonMarkovReport nonmarkovianity(const ChannelConfig& cfg, double horizon) {
  if (!(horizon > 0))
    throw Error(Errc::bad_argument, "nonmarkovianity: horizon must be positive");
  NonMarkovReport rep;
  rep.weight = comparison_weight(cfg);
  const auto windows = pole_windows(cfg, horizon);
  const auto rate = [&](double t) { return decoherence_rate(cfg, t); };
  rep.n_l = nl_of_rate(rate, rep.weight, horizon, windows, &rep.gamma_star);
  rep.negative_intervals = gamma_negative_intervals(cfg, horizon);
  for (const auto& [lo, hi] : windows)
    if (lo < horizon && hi > 0) rep.excluded.push_back({std::max(0.0, lo), std::min(horizon, hi)});
  return rep;
}

}  // namespace qslkit
