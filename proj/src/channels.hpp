#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "matrix.hpp"
#include "states.hpp"

namespace qslkit {

// Three exactly solvable single-qubit noise families, applied independently
// to each qubit of a register. OUN and RTN are pure dephasing driven by
// Ornstein-Uhlenbeck / random-telegraph classical noise; NMAD is amplitude
// damping with a Lorentzian reservoir. All dynamics reduce to one real
// decoherence function p(t) with p(0) = 1.
enum class ChannelKind { oun, rtn, nmad };

struct ChannelConfig {
  ChannelKind kind = ChannelKind::oun;
  double kappa = 1.0;   // system-reservoir coupling; sets the time unit
  double lambda = 0.1;  // noise bandwidth (OUN) or spectral width (NMAD)
  double c = 0.6;       // RTN switching strength, in units of kappa when kappa = 1

  static ChannelConfig oun_config(double kappa, double lambda);
  static ChannelConfig rtn_config(double kappa, double c);
  static ChannelConfig nmad_config(double kappa, double lambda);

  bool dephasing() const noexcept { return kind != ChannelKind::nmad; }
};

std::string_view channel_kind_name(ChannelKind k);
ChannelKind parse_channel_kind(std::string_view s);

// p(t). Continuous through the oscillatory/overdamped regime boundaries.
double decoherence_function(const ChannelConfig& cfg, double t);

// dp/dt, analytic (not a finite difference).
double decoherence_function_derivative(const ChannelConfig& cfg, double t);

// gamma(t) of the canonical master equation: for dephasing
// d rho/dt = gamma (Z rho Z - rho), so gamma = -pdot/(2p); for NMAD
// d rho/dt = gamma (S- rho S+ - {S+S-, rho}/2), so gamma = -2 pdot/p.
// Throws RatePole when |p(t)| < 1e-12.
double decoherence_rate(const ChannelConfig& cfg, double t);

// Zeros of p(t) in (0, horizon], exact (analytic) per regime; empty for OUN,
// overdamped RTN and overdamped NMAD.
std::vector<double> p_zero_times(const ChannelConfig& cfg, double horizon);

struct EvolvedState {
  DensityMatrix rho_t;
  double p_t;
  double t;
};

// Single qubit in closed form: dephasing scales the transverse Bloch
// components by p; NMAD scales coherences by p and the S+S- population by
// p^2 (fixed point bloch(0,0,1)).
EvolvedState evolve_qubit(const BlochVector& eta, const ChannelConfig& cfg, double t);

// n-qubit product channel via per-qubit Kraus application, n <= 4.
EvolvedState evolve_nqubit(const DensityMatrix& rho0, const ChannelConfig& cfg, double t);

// Single-qubit Kraus pair at time t (complete: sum E^dag E = I).
std::vector<Matrix> kraus_operators(const ChannelConfig& cfg, double t);

// Bell-diagonal initial data (correlations k1,k2,k3) evolved in closed form;
// must agree with evolve_nqubit entrywise.
DensityMatrix bell_diag_evolved(const BellDiagonalState& k, const ChannelConfig& cfg, double t);

// Master-equation right-hand side L(rho) at time t, i.e. gamma(t) times the
// per-qubit dissipator sum applied to rho. Hermitian and traceless. Throws
// RatePole with gamma.
Matrix generator(const DensityMatrix& rho, const ChannelConfig& cfg, double t);

// d rho_t / dt for the evolution started at rho0, assembled from analytic
// Kraus derivatives (product rule across qubits). Finite for all t, in
// particular at zeros of p where gamma itself diverges. Equals
// generator(rho_t) wherever the latter is defined.
Matrix evolution_derivative(const DensityMatrix& rho0, const ChannelConfig& cfg, double t);

}  // namespace qslkit
