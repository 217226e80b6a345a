#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "emon/coherent.hpp"

namespace emon {

// ----- projective energy minimization -----

inline constexpr double kGradientTol = 1e-8;
inline constexpr double kZeroModeTol = 1e-6;

struct RestartOutcome {
  std::vector<Spinor> spinors;  // one per site, global phase canonicalized
  double energy = 0.0;
  double gradient_norm = 0.0;
  bool converged = false;  // gradient norm reached kGradientTol
};

struct MinimizationResult {
  std::vector<Spinor> spinors;  // best candidate
  double energy = 0.0;
  double gradient_norm = 0.0;
  Eigen::VectorXd hessian_eigenvalues;  // tangent space, ascending
  int zero_modes = 0;                   // |eigenvalue| < kZeroModeTol
  bool converged = true;  // false: best candidate returned as a warning
  std::vector<RestartOutcome> restarts;
};

// Zeroes components below tol * max|psi_i| and renormalizes.  Converged
// minimizers carry solver noise on exact zeros, and chart extraction reads a
// gauge phase off small components, so callers snap before decomposing.
Spinor snap_spinor(const Spinor& psi, double tol = 1e-7);

// Multi-restart projected gradient descent with a tangent-space Newton polish
// over normalized spinors modulo global phase.  Restart starting points are
// drawn from the seed; restarts run concurrently.
MinimizationResult minimize_cp3(const ModelParams& p, ClassicalFunctional f,
                                int restarts = 20, std::uint64_t seed = 0);

// Single descent from a given start; exposes the local basin for orbit tests.
RestartOutcome local_minimize_cp3(const Spinor& start, const ModelParams& p,
                                  ClassicalFunctional f);

struct TwoSiteParams {
  double u_p = 2.0;
  double u_z = 0.7;
  double delta_a = 0.5;  // site b carries -delta_a
  double lambda = 1.0;   // coupling on |<psi_a|psi_b>|^2
};

double two_site_energy(const Spinor& a, const Spinor& b, const TwoSiteParams& p);

// Minimizes E(a; +delta_a) + E(b; -delta_a) + lambda |<a|b>|^2 with the base
// functional per site.  One restart warm-starts from the anti-aligned product
// ansatz; energy ties within 1e-9 resolve toward pairs whose spin and
// pseudospin expectations are anti-aligned between the sites.
MinimizationResult two_site_minimize(const TwoSiteParams& p, int restarts = 20,
                                     std::uint64_t seed = 0);

RestartOutcome local_two_site_minimize(const Spinor& a, const Spinor& b,
                                       const TwoSiteParams& p);

// Tangent-space Hessian eigenvalues (ascending) at an arbitrary point; used
// to probe flat directions away from the selected minimizer.
Eigen::VectorXd cp3_tangent_spectrum(const Spinor& psi, const ModelParams& p,
                                     ClassicalFunctional f);
Eigen::VectorXd two_site_tangent_spectrum(const Spinor& a, const Spinor& b,
                                          const TwoSiteParams& p);

// ----- symplectic generator identity -----

struct SymplecticCheck {
  // Coordinate order everywhere: theta_s, phi_s, theta_p, phi_p, alpha, beta.
  Eigen::Matrix<double, 6, 6> omega;        // curvature of the chart connection
  Eigen::Matrix<double, 6, 1> contraction;  // omega applied to the beta direction
  Eigen::Matrix<double, 6, 1> d_generator;  // gradient of G = -cos(alpha)/2
  double residual = 0.0;                    // ||contraction - d_generator||
};

// Builds A_j = Im <psi|d_j psi> from the chart spinor with analytic
// derivatives, takes its curl by central differences of step h, and checks
// that contracting with the unit beta-translation reproduces dG.  Throws
// std::invalid_argument within 1e-3 of a chart singularity (sin alpha,
// sin theta_s or sin theta_p near 0).
SymplecticCheck symplectic_generator_check(const BlochCoordinates& point,
                                           double h = 1e-5);

// ----- disc textures and the entanglement-phase integral -----

inline constexpr double kRefinedTol = 1e-4;
inline constexpr double kBoundaryTol = 0.5;

// Six angle fields sampled on a uniform polar grid over a disc: radial
// midpoints r_k = (k + 1/2) radius / n_r, azimuths phi_l = 2 pi l / n_phi.
// Fields are stored row-major over (k, l).
struct TextureGrid {
  double radius = 1.0;
  int n_r = 0;
  int n_phi = 0;
  std::vector<double> theta_s, phi_s, theta_p, phi_p, alpha, beta;

  std::size_t index(int k, int l) const {
    return static_cast<std::size_t>(k) * static_cast<std::size_t>(n_phi) + l;
  }
  double r_node(int k) const;
  double phi_node(int l) const;
  // Largest of |theta_s|, |theta_p|, |alpha| on the outermost ring; small
  // values mean the texture points along the z-axis at the rim.
  double boundary_max() const;
};

// Field generator (r, phi) -> (theta_s, phi_s, theta_p, phi_p, alpha, beta).
using TextureField = std::function<std::array<double, 6>(double, double)>;

TextureGrid make_texture(int n_r, int n_phi, double radius,
                         const TextureField& field);

// One row per node: r, phi, theta_S, phi_S, theta_P, phi_P, alpha, beta.
// The reader infers the grid from the node coordinates and throws ConfigError
// unless the rows form a complete uniform polar grid.
TextureGrid read_texture_csv(const std::string& path);
void write_texture_csv(const TextureGrid& grid, const std::string& path);

struct ZIntegralResult {
  double re_z = 0.0;
  double im_z = 0.0;
  double error_estimate = 0.0;  // |full - half resolution|, inf if too coarse
  bool refined = true;          // error_estimate < kRefinedTol
  bool boundary_ok = true;      // boundary_max() < kBoundaryTol
};

// Disc quadrature of the texture's phase-obstruction integrals: midpoint in r
// with Jacobian r, trapezoid in phi, centered differences with angle-wrapped
// increments (one-sided second order at the radial edges).  The error
// estimate re-evaluates on every other node in each direction.
ZIntegralResult skyrmion_z_integral(const TextureGrid& texture);

}  // namespace emon
