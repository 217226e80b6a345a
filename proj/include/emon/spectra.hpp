#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "emon/errors.hpp"
#include "emon/models.hpp"

namespace emon {

struct EigOptions {
  int k = 6;                        // number of lowest eigenpairs wanted
  std::size_t dense_threshold = 4000;  // dense solver up to this dimension
  bool force_dense = false;
  bool force_iterative = false;
  std::uint64_t seed = 0;           // start vector seed for the iterative path
  int max_cycles = 400;
  double tol = 1e-12;               // iterative convergence, relative to ||A||
};

struct EigResult {
  Eigen::VectorXd values;    // ascending
  Eigen::MatrixXcd vectors;  // columns match values
  std::string method;        // "dense" or "lanczos"
};

// Lowest-k eigenpairs of a Hermitian matrix.  Every returned pair is checked
// against ||A v - lambda v|| <= 1e-10 ||A||; failure raises NonConvergenceError.
EigResult eig_hermitian(const CooMatrix& a, const EigOptions& opts = {});

// Thick-restart Lanczos with full reorthogonalization; deterministic per seed.
EigResult eig_lanczos(const CooMatrix& a, int k, std::uint64_t seed,
                      double tol, int max_cycles);

// Small-oscillation data per charge sector around the top of the local wells:
// two mode frequencies and the well-bottom energy.
struct SemiclassicalRow {
  std::int64_t q1 = 0;
  double omega_x = 0.0;
  double omega_y = 0.0;
  double e_top = 0.0;
};

SemiclassicalRow semiclassical_row(const ModelParams& p, std::int64_t d, std::int64_t q1);
std::vector<SemiclassicalRow> semiclassical_spectrum(const ModelParams& p, std::int64_t d,
                                                     const std::vector<std::int64_t>& q1_list);

// Continuum location of the well-bottom minimum over q1: delta * d / (2 u_z).
double semiclassical_minimum_q1(const ModelParams& p, std::int64_t d);

// Lowest exact energy in each (q1, q2 = 0) sector, paired with the
// semiclassical well bottom.  q1 runs over -d..d with parity matching d.
struct BranchRow {
  std::int64_t q1 = 0;
  double e_exact = 0.0;
  double e_top = 0.0;
  std::size_t sector_dim = 0;
};

std::vector<BranchRow> charge_branch(const FockBasis& basis, const ModelParams& p);

// Expectation values identifying a doublet state.
struct DoubletLabels {
  double q1 = 0.0;      // <n1 - n4>
  double q2 = 0.0;      // <n2 - n3>
  double parity = 0.0;  // <(-1)^(n3+n4)>
  double g = 0.0;       // <-(n1 - n4) / (2d)>
};

struct Doublet {
  double e0 = 0.0, e1 = 0.0, e2 = 0.0;
  double gap01 = 0.0, gap12 = 0.0;
  Eigen::VectorXcd state0, state1;  // full-space vectors even when restricted
  DoubletLabels labels0, labels1;
};

// Restricts an eigensolve to a joint eigenspace of diagonal integer charges,
// e.g. the n2 - n3 = 0 slice where the four-mode qubit lives.
struct ChargeRestriction {
  std::string name;
  CooMatrix op;
  std::int64_t value = 0;
};

// Lowest-k eigenpairs of h within the requested charge slice.  Eigenvectors
// come back embedded in the full space (zero outside the slice).
EigResult eig_restricted(const CooMatrix& h,
                         const std::vector<ChargeRestriction>& restrictions,
                         const EigOptions& opts = {});

// Two lowest eigenstates with charge/parity labels.  Throws
// DoubletAmbiguityError if gap12 <= gap01 + 1e-9.
Doublet qubit_doublet(const CooMatrix& h, const FockBasis& basis,
                      const EigOptions& opts = {},
                      const std::vector<ChargeRestriction>& restrictions = {});

}  // namespace emon
