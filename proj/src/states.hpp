#pragma once

#include <string>
#include <string_view>

#include "matrix.hpp"

namespace qslkit {

struct BlochVector {
  double x = 0, y = 0, z = 0;
};

// Correlation triple of a two-qubit Bell-diagonal state
// rho = (I + k1 XX + k2 YY + k3 ZZ)/4.
struct BellDiagonalState {
  double k1 = 0, k2 = 0, k3 = 0;
};

enum class BellLabel { phi_plus, phi_minus, psi_plus, psi_minus };

// GHZ-class basis state on n qubits: (|s> + sign |s~>)/sqrt(2) where s is
// index-1 written in n bits and s~ its bitwise complement. index runs over
// 1..2^(n-1), sign is +1 or -1.
struct GhzIndex {
  int n_qubits = 3;
  int index = 1;
  int sign = +1;
};

DensityMatrix bloch_state(const BlochVector& eta);
BlochVector bloch_of(const DensityMatrix& rho);

BellDiagonalState bell_triple(BellLabel which);
DensityMatrix bell_state(BellLabel which);
DensityMatrix bell_diagonal_state(const BellDiagonalState& k);
BellDiagonalState triple_of(const DensityMatrix& rho);  // projects onto XX/YY/ZZ

DensityMatrix ghz_state(const GhzIndex& g);

// q rho + (1-q) I/d, q in [0,1].
DensityMatrix werner_state(double q, const DensityMatrix& rho);

// The 4x4 unitary that maps every Bell state onto a maximally coherent
// entangled state (all sixteen entries of the image have modulus 1/4).
Matrix coherence_mixing_unitary();
DensityMatrix max_coherent_entangled(BellLabel which);

// Coherence / mixedness measures, computational basis, natural log.
double l1_coherence(const DensityMatrix& rho);
double relative_entropy_coherence(const DensityMatrix& rho);
double linear_entropy(const DensityMatrix& rho);  // d/(d-1) (1 - tr rho^2)

// Cl1^2/(d-1)^2 + S_l; bounded by 1 for every state.
double mcl(const DensityMatrix& rho);

// tr(rho_t rho_0)/tr(rho_0^2).
double relative_purity(const DensityMatrix& rho0, const DensityMatrix& rho_t);

BellLabel parse_bell_label(std::string_view s);
std::string_view bell_label_name(BellLabel which);

// State mini-grammar, case-insensitive:
//   bloch:ex,ey,ez
//   bell:phi+|phi-|psi+|psi-
//   ghz:N,k,+|-
//   werner:q,<state>
//   mcb:<bell>
//   mcbw:q,<bell>
DensityMatrix parse_state(std::string_view spec);

}  // namespace qslkit
