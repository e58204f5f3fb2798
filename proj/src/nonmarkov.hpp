#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "channels.hpp"

namespace qslkit {

struct Interval {
  double lo = 0;
  double hi = 0;
};

// Maximal intervals inside (0, horizon] where gamma(t) < 0. Boundaries found
// by bisection to 1e-9 in t; an interval may be cut short where p(t) has a
// zero (the rate jumps through +-infinity there).
std::vector<Interval> gamma_negative_intervals(const ChannelConfig& cfg, double horizon);

struct NonMarkovReport {
  double n_l = 0;        // min over constant rates of the averaged weighted distance
  double gamma_star = 0; // minimizing constant rate (>= 0)
  double weight = 0;     // trace-norm separation of the comparison pair
  std::vector<Interval> negative_intervals;
  std::vector<Interval> excluded;  // pole windows dropped from the integrals
};

// L-generator drift measure: min_{g >= 0} (1/T) int_0^T |gamma(t) - g| w dt,
// where w is the trace distance of the generator difference evaluated on the
// optimal state pair (the antipodal transverse Bloch pair for dephasing,
// 1 + sqrt(2) for amplitude damping). Zero iff gamma is constant on [0, T].
NonMarkovReport nonmarkovianity(const ChannelConfig& cfg, double horizon);

// The same minimization for an arbitrary rate profile (used by the
// self-checks with synthetic rates). windows are skipped in all integrals;
// seed_panels controls the quadrature seeding inside the objective.
double nl_of_rate(const std::function<double(double)>& rate, double weight, double horizon,
                  const std::vector<std::pair<double, double>>& windows,
                  double* gamma_star = nullptr, int seed_panels = 256);

// Trace-norm separation rate of the comparison pair entering the measure.
double comparison_weight(const ChannelConfig& cfg);

}  // namespace qslkit
