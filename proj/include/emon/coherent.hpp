#pragma once

#include <cstdint>
#include <vector>

#include "emon/fockspace.hpp"
#include "emon/models.hpp"

namespace emon {

using Spinor = Eigen::Vector4cd;

// Product-of-Bloch-spheres chart for a normalized four-component spinor:
// psi = cos(alpha/2) |phi_S> x |phi_P> + e^{i beta} sin(alpha/2) |chi_S> x |chi_P>
// with |phi> = (cos(t/2), e^{i p} sin(t/2)) and |chi> = (-e^{-i p} sin(t/2), cos(t/2)).
// Component order: (up,up), (up,down), (down,up), (down,down), first slot spin,
// second slot pseudospin.
struct BlochCoordinates {
  double theta_s = 0.0;
  double phi_s = 0.0;
  double theta_p = 0.0;
  double phi_p = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

// Evaluates the chart formula literally (no re-phasing), so the result is a
// smooth function of the six angles.
Spinor compose(const BlochCoordinates& c);

struct SchmidtResult {
  BlochCoordinates angles;   // alpha in [0, pi/2] by singular value ordering
  bool product_state = false;  // sin(alpha/2) below threshold; beta set to 0
};

// Inverse chart via the 2x2 singular value decomposition.  compose(angles)
// reproduces the input up to a global phase.  For equal singular values the
// term ordering with the smaller beta is chosen.
SchmidtResult schmidt_decompose(const Spinor& psi);

// Smallest ||e^{i t} a - b|| over the global phase t.
double phase_distance(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

// Normalized projectively-symmetric condensate of d bosons in the single
// particle state psi (any mode count m = psi.size()).  Amplitude on
// (n_1..n_m) is sqrt(d!/prod n_j!) prod psi_j^{n_j}; exact integer
// multinomials up to d = 30, log-space evaluation beyond.
Eigen::VectorXcd coherent_state(const Eigen::VectorXcd& psi, const FockBasis& basis);

enum class ClassicalFunctional { base, z2 };

// <SxPx> = 2 Re(conj(psi1) psi4 + conj(psi2) psi3).
double sxpx_expectation(const Spinor& psi);

// u_p(<Px>^2 + <Py>^2) + u_z <Pz>^2 - delta <Sz>, plus v <SxPx>^2 for z2.
// Spin acts on the first tensor slot, pseudospin on the second.
double classical_energy(const Spinor& psi, const ModelParams& p, ClassicalFunctional f);

// Bloch vectors (<Sx>,<Sy>,<Sz>) and (<Px>,<Py>,<Pz>) in the chart convention.
void bloch_vectors(const Spinor& psi, Eigen::Vector3d& spin, Eigen::Vector3d& pseudo);

struct SymbolCheckRow {
  std::int64_t d = 0;
  double quantum = 0.0;    // <CS_d| H |CS_d>
  double classical = 0.0;  // chart energy functional at psi
  double deviation = 0.0;
};

// Coherent-state expectation of the four-mode Hamiltonian against the
// classical functional, per d.
std::vector<SymbolCheckRow> covariant_symbol_check(const ModelParams& p, const Spinor& psi,
                                                   const std::vector<std::int64_t>& d_list);

struct BerryResult {
  double phase = 0.0;      // accumulated arg of the overlap chain
  double expected = 0.0;   // 2 pi d sin^2(alpha/2)
  double deviation = 0.0;  // |phase - expected| wrapped to (-pi, pi]
};

// Discrete overlap-chain phase around the beta loop of the two-term family
// (cos(a/2), 0, 0, e^{i b} sin(a/2)).
BerryResult berry_phase_loop(double alpha, std::int64_t d, int steps);

}  // namespace emon
