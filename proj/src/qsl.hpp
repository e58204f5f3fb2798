#pragma once

#include <vector>

#include "channels.hpp"
#include "states.hpp"

namespace qslkit {

enum class Method { relative_purity, bures };
enum class NormKind { op, hs, tr };

NormKind parse_norm_kind(std::string_view s);
Method parse_method(std::string_view s);

struct QslRequest {
  Method method = Method::bures;
  NormKind norm = NormKind::op;  // Bures only; the MT route fixes the HS form
  double tau = 1.0;
  int grid_points = 512;          // quadrature seeding resolution
  bool use_mixed_factor = true;   // Bures only
  bool use_exact_fidelity = false;  // Bures: Uhlmann instead of superfidelity
};

struct QslResult {
  double tau_qsl = 0;
  double angle = 0;          // theta (MT) or Bures angle B
  double averaged_norm = 0;  // denominator: time-averaged generator norm
  double numerator = 0;
  double denominator = 0;
  bool degenerate = false;   // numerator and denominator both vanished
};

// Generic pipeline, any state up to 4 qubits, any channel. Works entirely
// through evolve_nqubit / evolution_derivative / matrix_norms; shares no
// algebra with the closed forms below, which is what makes the cross-checks
// meaningful.
QslResult qsl_relative_purity(const DensityMatrix& rho0, const ChannelConfig& cfg,
                              const QslRequest& req);
QslResult qsl_bures(const DensityMatrix& rho0, const ChannelConfig& cfg, const QslRequest& req);
QslResult qsl_compute(const DensityMatrix& rho0, const ChannelConfig& cfg, const QslRequest& req);

// Closed forms. Single-qubit ones are parametrized by the initial coherence
// Cl1(rho_0) and Bloch z-component; the dephasing family requires an
// OUN/RTN config, the NMAD family an NMAD config. Integrals are adaptive.
QslResult qsl_dephasing_qubit_rp(double cl1_0, double eta_z, const ChannelConfig& cfg,
                                 double tau);
QslResult qsl_nmad_qubit_rp(double cl1_0, double eta_z, const ChannelConfig& cfg, double tau);
QslResult qsl_dephasing_qubit_bures(double cl1_0, double eta_z, const ChannelConfig& cfg,
                                    double tau);
QslResult qsl_nmad_qubit_bures(double cl1_0, double eta_z, const ChannelConfig& cfg, double tau);
QslResult qsl_belldiag_rp(const BellDiagonalState& k, const ChannelConfig& cfg, double tau);
QslResult qsl_belldiag_bures(const BellDiagonalState& k, const ChannelConfig& cfg, double tau);

// M_Cl of the evolved state in closed form (coherence + mixedness combined).
double mcl_qubit_closed_form(const ChannelConfig& cfg, double eta_z, double t);
double mcl_belldiag_closed_form(const ChannelConfig& cfg, const BellDiagonalState& k, double t);

struct TrajectoryPoint {
  double t = 0;
  double tau_qsl = 0;
  double cl1 = 0;
  double s_l = 0;
  double m_cl = 0;
};

// tau_qsl(t_i) for an ascending grid of driving times (first entry > 0),
// with the coherence/mixedness of the evolved state at each point. The
// denominator integral is accumulated once across the grid, so a full curve
// costs about as much as the last point alone.
std::vector<TrajectoryPoint> trajectory(const DensityMatrix& rho0, const ChannelConfig& cfg,
                                        const QslRequest& req, const std::vector<double>& grid);

}  // namespace qslkit
