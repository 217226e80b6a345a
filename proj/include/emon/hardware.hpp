#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "emon/coo_matrix.hpp"

namespace emon {

// ----- Pauli words on qubit chains -----

// Tensor product of single-qubit letters from {I, X, Y, Z}; letters[s] acts
// on slot s and the word carries one overall coefficient.
struct PauliWord {
  std::vector<char> letters;
  cplx coeff{1.0, 0.0};
};

// Slot layout for the rhombus ladder: rung i owns slots 2i (left island)
// and 2i + 1 (right island), i = 0..N-1.
int ladder_slot(int rung, bool right);

// Word helpers over n_slots qubits (identity elsewhere).
PauliWord pauli_letter(int n_slots, int slot, char letter, cplx coeff = cplx(1.0, 0.0));

// Dense-in-columns sparse matrix of the word over dimension 2^letters.size().
CooMatrix pauli_word_matrix(const PauliWord& w);

// sigma^z_L sigma^z_R on rung i.
CooMatrix tau_operator(int n_rungs, int rung);

// ----- rhombus ladder -----

struct LadderParams {
  int n = 2;             // rung count, 2..7
  double e_flip = 1.0;   // intra-rung sigma^x sigma^x coupling
  double e_phase = 1.0;  // inter-rung tau tau coupling
};

// H = -e_flip sum_i sigma^x_Li sigma^x_Ri - e_phase sum_{i != j} tau_i tau_j
// with the inter-rung sum over ordered pairs, so each unordered pair counts
// twice.  Commutes with every tau_i; the ground doublet consists of the two
// tau-uniform sector ground states.
CooMatrix build_ladder_heff(const LadderParams& p);

// Sector ground states: tensor products of the symmetric rung combination
// within tau_i = +1 (|00> + |11>) resp. tau_i = -1 (|01> + |10>).
Eigen::VectorXcd ladder_tplus(int n_rungs);
Eigen::VectorXcd ladder_tminus(int n_rungs);

// Basis-state indices whose tau pattern is uniformly +1 resp. -1; restricting
// a tau-commuting Hamiltonian to these slices isolates the qubit sectors.
std::vector<std::size_t> tau_uniform_sector(int n_rungs, int sign);

// ----- trapped-ion generalized ferromagnet -----

struct IonModelParams {
  int n = 2;          // site count, 2..6
  double gamma = 1.0; // overall coupling
  double nu = 1.0;    // antisymmetric-state penalty weight in (0, 1]
};

// E = -gamma sum_{i != j} U_ij over ordered site pairs.  Each site has four
// levels; U_ij acts on the first two levels of sites i and j as
//   |11> <-> |22>,  |12> -> rho|12> + nu|21>,  |21> -> nu|12> + rho|21>
// with rho = 1 - nu, and annihilates components outside that block.  The
// penalty nu > 0 pushes up the antisymmetric combination |12> - |21>, so the
// ground doublet is spanned by |11>+|22> and |12>+|21> patterns.
CooMatrix build_ion_interaction(const IonModelParams& p);

// Index of the product state with the given per-site levels (0-based, 0..3).
std::int64_t ion_index(const std::vector<int>& levels);

// Product state (|1> + e^{i beta} |2>)^(x)N / 2^{N/2} on the active levels.
Eigen::VectorXcd ion_beta_product(int n_sites, double beta);

// ----- perturbative probes -----

// Smallest k <= k_max with |<minus| V^k |plus>| > 1e-10, or nullopt if no
// power connects the pair.  The pair must be orthonormal.
std::optional<int> noise_order_probe(const CooMatrix& v, const Eigen::VectorXcd& plus,
                                     const Eigen::VectorXcd& minus, int k_max);

struct DephasingFit {
  double exponent = 0.0;               // log-log slope of splitting vs epsilon
  std::vector<double> epsilons;        // retained grid points
  std::vector<double> splittings;      // matching splittings
  int excluded = 0;                    // points dropped below 1e-13
};

// Qubit splitting |E_+(eps) - E_-(eps)| between the lowest states of the two
// tau-uniform sectors of H + eps * probe, fitted as a power law over the
// grid.  The probe must commute with every tau_i so the sectors stay intact.
DephasingFit dephasing_scaling_probe(const LadderParams& p, const std::vector<double>& eps_grid,
                                     const CooMatrix& probe);

}  // namespace emon
