#include "quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "matrix.hpp"

namespace qslkit {

namespace {

struct Adapt {
  const std::function<double(double)>& f;
  double rel_tol;

  double refine(double a, double b, double fa, double fm, double fb, double whole,
                double tol, int depth) const {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double err = left + right - whole;
    if (depth <= 0 || std::abs(err) <= 15.0 * (tol + rel_tol * std::abs(left + right)))
      return left + right + err / 15.0;
    return refine(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           refine(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
  }

  double panel(double a, double b, double tol, int depth) const {
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return refine(a, b, fa, fm, fb, whole, tol, depth);
  }
};

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, double rel_tol, int seed_panels) {
  if (b < a) throw Error(Errc::bad_argument, "integrate: b < a");
  if (b == a) return 0.0;
  seed_panels = std::max(1, seed_panels);
  // Deep enough to resolve integrands truncated at 1e-6 pole windows; the
  // error test keeps smooth regions shallow.
  int depth = 26;
  for (int s = seed_panels; s > 1; s /= 2) --depth;
  depth = std::max(depth, 14);

  const Adapt ad{f, rel_tol};
  const double h = (b - a) / seed_panels;
  const double tol = abs_tol / seed_panels;
  double total = 0.0;
  for (int i = 0; i < seed_panels; ++i) {
    const double lo = a + i * h;
    const double hi = (i + 1 == seed_panels) ? b : a + (i + 1) * h;
    total += ad.panel(lo, hi, tol, depth);
  }
  return total;
}

double integrate_excluding(const std::function<double(double)>& f, double a, double b,
                           const std::vector<std::pair<double, double>>& windows,
                           double abs_tol, double rel_tol, int seed_panels) {
  if (b < a) throw Error(Errc::bad_argument, "integrate: b < a");
  if (b == a) return 0.0;

  std::vector<std::pair<double, double>> w = windows;
  std::sort(w.begin(), w.end());
  std::vector<std::pair<double, double>> segs;
  double cursor = a;
  for (const auto& [lo, hi] : w) {
    if (hi <= cursor || lo >= b) continue;
    if (lo > cursor) segs.emplace_back(cursor, std::min(lo, b));
    cursor = std::max(cursor, hi);
    if (cursor >= b) break;
  }
  if (cursor < b) segs.emplace_back(cursor, b);

  double total = 0.0;
  const double span = b - a;
  for (const auto& [lo, hi] : segs) {
    const double frac = (hi - lo) / span;
    const int seeds = std::max(2, static_cast<int>(std::lround(seed_panels * frac)));
    total += integrate_adaptive(f, lo, hi, std::max(abs_tol * frac, 1e-16), rel_tol, seeds);
  }
  return total;
}

}  // namespace qslkit
