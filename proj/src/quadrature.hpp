#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace qslkit {

// Adaptive Simpson with Richardson extrapolation. The interval is first cut
// into seed_panels uniform panels (so short-wavelength structure is seen
// before adaptivity kicks in), then each panel is refined until the local
// error estimate drops under abs_tol/seed_panels + rel_tol*|local|.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-12, double rel_tol = 1e-10,
                          int seed_panels = 16);

// Same integral over [a,b] minus a union of open windows (used to give
// integrals with known log-type poles a finite, reproducible meaning).
// Windows may overlap each other or the interval ends.
double integrate_excluding(const std::function<double(double)>& f, double a, double b,
                           const std::vector<std::pair<double, double>>& windows,
                           double abs_tol = 1e-12, double rel_tol = 1e-10,
                           int seed_panels = 16);

}  // namespace qslkit
