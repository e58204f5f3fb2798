#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "channels.hpp"
#include "states.hpp"

using namespace qslkit;

namespace {

double fd1(const ChannelConfig& cfg, double t, double h) {
  // 5-point first derivative of p
  auto p = [&](double x) { return decoherence_function(cfg, x); };
  return (-p(t + 2 * h) + 8 * p(t + h) - 8 * p(t - h) + p(t - 2 * h)) / (12 * h);
}

double fd2(const ChannelConfig& cfg, double t, double h) {
  auto p = [&](double x) { return decoherence_function(cfg, x); };
  return (-p(t + 2 * h) + 16 * p(t + h) - 30 * p(t) + 16 * p(t - h) - p(t - 2 * h)) /
         (12 * h * h);
}

bool near_any(double t, const std::vector<double>& zs, double clearance) {
  for (double z : zs)
    if (std::abs(t - z) < clearance) return true;
  return false;
}

}  // namespace

TEST_CASE("decoherence functions solve their defining ODEs") {
  std::mt19937_64 rng(7201);
  std::uniform_real_distribution<double> ut(0.2, 6.0);
  std::uniform_real_distribution<double> ul(0.05, 3.0);
  std::uniform_real_distribution<double> uc(0.1, 1.4);
  const double h = 1e-3;
  for (int rep = 0; rep < 40; ++rep) {
    double t = ut(rng);
    {
      ChannelConfig cfg = ChannelConfig::oun_config(1.0, ul(rng));
      double p = decoherence_function(cfg, t);
      double res = fd1(cfg, t, h) + 0.5 * cfg.kappa * (-std::expm1(-cfg.lambda * t)) * p;
      CHECK(std::abs(res) < 5e-9);
    }
    {
      ChannelConfig cfg = ChannelConfig::rtn_config(1.0, uc(rng));
      double p = decoherence_function(cfg, t);
      double res = fd2(cfg, t, h) + 2.0 * cfg.kappa * fd1(cfg, t, h) + 4.0 * cfg.c * cfg.c * p;
      CHECK(std::abs(res) < 5e-7);
    }
    {
      ChannelConfig cfg = ChannelConfig::nmad_config(1.0, ul(rng));
      double p = decoherence_function(cfg, t);
      double res = fd2(cfg, t, h) + cfg.lambda * fd1(cfg, t, h) +
                   0.5 * cfg.kappa * cfg.lambda * p;
      CHECK(std::abs(res) < 5e-7);
    }
  }
}

TEST_CASE("initial conditions p(0) = 1, p'(0) = 0") {
  for (const ChannelConfig& cfg :
       {ChannelConfig::oun_config(1.0, 0.1), ChannelConfig::rtn_config(1.0, 0.6),
        ChannelConfig::rtn_config(1.0, 0.3), ChannelConfig::nmad_config(1.0, 0.1),
        ChannelConfig::nmad_config(1.0, 3.0)}) {
    CHECK(decoherence_function(cfg, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(decoherence_function_derivative(cfg, 0.0)) < 1e-14);
  }
}

TEST_CASE("analytic derivative matches finite differences") {
  std::mt19937_64 rng(7202);
  std::uniform_real_distribution<double> ut(0.1, 8.0);
  for (const ChannelConfig& cfg :
       {ChannelConfig::oun_config(1.0, 0.1), ChannelConfig::oun_config(1.0, 2.5),
        ChannelConfig::rtn_config(1.0, 0.6), ChannelConfig::rtn_config(1.0, 0.25),
        ChannelConfig::nmad_config(1.0, 0.1), ChannelConfig::nmad_config(1.0, 3.0)}) {
    for (int rep = 0; rep < 10; ++rep) {
      double t = ut(rng);
      double want = fd1(cfg, t, 1e-4);
      double got = decoherence_function_derivative(cfg, t);
      CHECK(std::abs(got - want) < 1e-9 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST_CASE("regime boundaries are continuous") {
  const double eps = 1e-8;
  for (double t : {0.3, 1.0, 2.7, 5.0}) {
    double below = decoherence_function(ChannelConfig::rtn_config(1.0, 0.5 - eps), t);
    double mid = decoherence_function(ChannelConfig::rtn_config(1.0, 0.5), t);
    double above = decoherence_function(ChannelConfig::rtn_config(1.0, 0.5 + eps), t);
    CHECK(std::abs(below - mid) < 1e-6);
    CHECK(std::abs(above - mid) < 1e-6);
    double nb = decoherence_function(ChannelConfig::nmad_config(1.0, 2.0 - eps), t);
    double nm = decoherence_function(ChannelConfig::nmad_config(1.0, 2.0), t);
    double na = decoherence_function(ChannelConfig::nmad_config(1.0, 2.0 + eps), t);
    CHECK(std::abs(nb - nm) < 1e-6);
    CHECK(std::abs(na - nm) < 1e-6);
  }
}

TEST_CASE("p zeros match a sign-change bisection") {
  for (const ChannelConfig& cfg :
       {ChannelConfig::rtn_config(1.0, 0.6), ChannelConfig::rtn_config(1.0, 1.2),
        ChannelConfig::nmad_config(1.0, 0.1), ChannelConfig::nmad_config(1.0, 1.0)}) {
    const double horizon = 20.0;
    std::vector<double> want;
    const int n = 40000;
    double prev = decoherence_function(cfg, horizon / n);
    for (int i = 2; i <= n; ++i) {
      double t = horizon * i / n;
      double cur = decoherence_function(cfg, t);
      if (prev * cur < 0) {
        double lo = horizon * (i - 1) / n, hi = t;
        for (int it = 0; it < 60; ++it) {
          double mid = 0.5 * (lo + hi);
          (decoherence_function(cfg, lo) * decoherence_function(cfg, mid) <= 0 ? hi : lo) = mid;
        }
        want.push_back(0.5 * (lo + hi));
      }
      prev = cur;
    }
    std::vector<double> got = p_zero_times(cfg, horizon);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i)
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-9));
  }
  CHECK(p_zero_times(ChannelConfig::oun_config(1.0, 0.1), 50.0).empty());
  CHECK(p_zero_times(ChannelConfig::rtn_config(1.0, 0.3), 50.0).empty());
  CHECK(p_zero_times(ChannelConfig::nmad_config(1.0, 3.0), 50.0).empty());
}

TEST_CASE("rate ties to the logarithmic derivative of p") {
  std::mt19937_64 rng(7203);
  std::uniform_real_distribution<double> ut(0.1, 10.0);
  for (const ChannelConfig& cfg :
       {ChannelConfig::oun_config(1.0, 0.4), ChannelConfig::rtn_config(1.0, 0.6),
        ChannelConfig::nmad_config(1.0, 0.1)}) {
    std::vector<double> zeros = p_zero_times(cfg, 11.0);
    for (int rep = 0; rep < 30; ++rep) {
      double t = ut(rng);
      if (near_any(t, zeros, 1e-2)) continue;
      double p = decoherence_function(cfg, t);
      double pdot = decoherence_function_derivative(cfg, t);
      double g = decoherence_rate(cfg, t);
      double res = cfg.dephasing() ? 2.0 * g * p + pdot : 0.5 * g * p + pdot;
      CHECK(std::abs(res) < 1e-10 * std::max(1.0, std::abs(pdot)));
    }
  }
}

TEST_CASE("rate throws at a p zero and is finite close by") {
  ChannelConfig cfg = ChannelConfig::rtn_config(1.0, 0.6);
  std::vector<double> zeros = p_zero_times(cfg, 10.0);
  REQUIRE(!zeros.empty());
  CHECK_THROWS_AS(decoherence_rate(cfg, zeros[0]), Error);
  CHECK(std::isfinite(decoherence_rate(cfg, zeros[0] + 1e-5)));
  CHECK(std::isfinite(decoherence_rate(cfg, zeros[0] - 1e-5)));
}

TEST_CASE("single-qubit evolution agrees with the register path") {
  std::mt19937_64 rng(7204);
  std::uniform_real_distribution<double> u(-0.57, 0.57);
  for (const ChannelConfig& cfg :
       {ChannelConfig::oun_config(1.0, 0.1), ChannelConfig::rtn_config(1.0, 0.6),
        ChannelConfig::nmad_config(1.0, 0.1)}) {
    for (double t : {0.0, 0.3, 1.7, 4.2}) {
      BlochVector eta{u(rng), u(rng), u(rng)};
      EvolvedState a = evolve_qubit(eta, cfg, t);
      EvolvedState b = evolve_nqubit(bloch_state(eta), cfg, t);
      CHECK((a.rho_t.matrix() - b.rho_t.matrix()).max_abs() < 1e-12);
      CHECK(a.p_t == doctest::Approx(b.p_t).epsilon(1e-14));
    }
  }
}

TEST_CASE("bell-diagonal closed evolution equals the kraus path") {
  for (const ChannelConfig& cfg :
       {ChannelConfig::oun_config(1.0, 0.1), ChannelConfig::rtn_config(1.0, 0.6),
        ChannelConfig::nmad_config(1.0, 0.1)}) {
    for (const BellDiagonalState& k :
         {BellDiagonalState{1, -1, 1}, BellDiagonalState{-1, -1, -1},
          BellDiagonalState{0.5, -0.25, 0.125}}) {
      for (double t : {0.2, 1.1, 3.6}) {
        DensityMatrix closed = bell_diag_evolved(k, cfg, t);
        DensityMatrix kraus = evolve_nqubit(bell_diagonal_state(k), cfg, t).rho_t;
        CHECK((closed.matrix() - kraus.matrix()).max_abs() < 1e-12);
      }
    }
  }
}

TEST_CASE("kraus operators are complete and the channel is CPTP on samples") {
  std::mt19937_64 rng(7205);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (const ChannelConfig& cfg :
       {ChannelConfig::oun_config(1.0, 0.1), ChannelConfig::rtn_config(1.0, 0.6),
        ChannelConfig::nmad_config(1.0, 0.1), ChannelConfig::nmad_config(1.0, 3.0)}) {
    for (double t : {0.1, 0.9, 2.8, 7.0}) {
      std::vector<Matrix> ops = kraus_operators(cfg, t);
      Matrix sum(2);
      for (const Matrix& e : ops) sum += e.dagger() * e;
      CHECK((sum - Matrix::identity(2)).max_abs() < 1e-12);

      DensityMatrix rho = bloch_state({u(rng), u(rng), u(rng)});
      DensityMatrix out = evolve_nqubit(rho, cfg, t).rho_t;
      CHECK(std::abs(out.matrix().trace() - cplx(1.0)) < 1e-12);
      CHECK(out.matrix().hermiticity_defect() < 1e-12);
      CHECK(psd_by_coefficients(out.matrix()));
    }
  }
}

TEST_CASE("nmad pins the excited-population fixed point, dephasing pins populations") {
  ChannelConfig ad = ChannelConfig::nmad_config(1.0, 0.7);
  BlochVector up{0, 0, 1};
  for (double t : {0.5, 2.0, 9.0}) {
    EvolvedState ev = evolve_qubit(up, ad, t);
    BlochVector b = bloch_of(ev.rho_t);
    CHECK(std::abs(b.z - 1.0) < 1e-12);
    CHECK(std::abs(b.x) < 1e-12);
  }
  ChannelConfig deph = ChannelConfig::rtn_config(1.0, 0.6);
  DensityMatrix two = parse_state("werner:0.7,bell:psi+");
  for (double t : {0.5, 2.0}) {
    DensityMatrix out = evolve_nqubit(two, deph, t).rho_t;
    for (int i = 0; i < 4; ++i)
      CHECK(std::abs(out.matrix()(i, i) - two.matrix()(i, i)) < 1e-12);
  }
}

TEST_CASE("evolution derivative matches finite differences of the channel") {
  std::mt19937_64 rng(7206);
  std::uniform_real_distribution<double> ut(0.2, 4.0);
  DensityMatrix rho = parse_state("werner:0.6,mcb:phi+");
  const double h = 1e-5;
  for (const ChannelConfig& cfg :
       {ChannelConfig::oun_config(1.0, 0.1), ChannelConfig::rtn_config(1.0, 0.6),
        ChannelConfig::nmad_config(1.0, 0.1)}) {
    for (int rep = 0; rep < 8; ++rep) {
      double t = ut(rng);
      Matrix got = evolution_derivative(rho, cfg, t);
      Matrix fd = (evolve_nqubit(rho, cfg, t + h).rho_t.matrix() -
                   evolve_nqubit(rho, cfg, t - h).rho_t.matrix()) *
                  cplx(1.0 / (2.0 * h));
      CHECK((got - fd).max_abs() < 1e-8);
    }
  }
}

TEST_CASE("the generator reproduces the flow at the evolved state") {
  std::mt19937_64 rng(7207);
  std::uniform_real_distribution<double> ut(0.2, 3.5);
  DensityMatrix rho = parse_state("bloch:0.6,0.2,0.3");
  const double h = 1e-5;
  for (const ChannelConfig& cfg :
       {ChannelConfig::oun_config(1.0, 0.1), ChannelConfig::rtn_config(1.0, 0.6),
        ChannelConfig::nmad_config(1.0, 0.1)}) {
    std::vector<double> zeros = p_zero_times(cfg, 4.0);
    for (int rep = 0; rep < 8; ++rep) {
      double t = ut(rng);
      if (near_any(t, zeros, 5e-3)) continue;
      Matrix lt = generator(evolve_nqubit(rho, cfg, t).rho_t, cfg, t);
      Matrix fd = (evolve_nqubit(rho, cfg, t + h).rho_t.matrix() -
                   evolve_nqubit(rho, cfg, t - h).rho_t.matrix()) *
                  cplx(1.0 / (2.0 * h));
      CHECK((lt - fd).max_abs() < 1e-8);
    }
  }
}

TEST_CASE("channel construction and misuse are rejected") {
  CHECK_THROWS_AS(ChannelConfig::oun_config(0.0, 0.1), Error);
  CHECK_THROWS_AS(ChannelConfig::rtn_config(1.0, -0.2), Error);
  CHECK_THROWS_AS(ChannelConfig::nmad_config(-1.0, 0.1), Error);
  CHECK_THROWS_AS(decoherence_function(ChannelConfig::oun_config(1.0, 0.1), -0.5), Error);
  CHECK_THROWS_AS(evolve_qubit({1.1, 0.4, 0.0}, ChannelConfig::oun_config(1.0, 0.1), 1.0),
                  Error);
  CHECK(parse_channel_kind("RTN") == ChannelKind::rtn);
  CHECK_THROWS_AS(parse_channel_kind("telegraph"), Error);
  CHECK(channel_kind_name(ChannelKind::nmad) == "nmad");
}
