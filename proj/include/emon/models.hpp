#pragma once

#include <string>
#include <utility>
#include <vector>

#include "emon/fockspace.hpp"

namespace emon {

// Couplings for the four-mode constrained-boson Hamiltonians.  delta is the
// coefficient of the linear pseudospin term, v the coefficient of the
// exchange-squared term in the second model.
struct ModelParams {
  double u_p = 2.0;
  double u_z = 0.7;
  double delta = 1.0;
  double v = 1.0;
};

// Spin (modes 1<->2, 3<->4 pairing) and pseudospin (1<->3, 2<->4 pairing)
// operators, each carrying a 1/d prefactor.
struct SpinOps {
  CooMatrix sx, sy, sz, px, py, pz;
};

SpinOps build_spin_ops(const FockBasis& basis);

// H = (4 u_p / d^2)(n1 n2 + n3 n4 + a1+ a2 a3 a4+ + h.c.)
//   + (u_z / d^2)(n1 - n2 + n3 - n4)^2 - (delta / d)(n1 + n2 - n3 - n4),
// additive constant dropped.  Conserves n1 - n4 and n2 - n3.
CooMatrix build_hq0(const FockBasis& basis, const ModelParams& p);

// X = a1 a4+ + a2 a3+ + h.c.; hops a boson between the 1<->4 and 2<->3 pairs.
CooMatrix build_exchange_x(const FockBasis& basis);

// H' = H + (v / d^2) X^2.  Breaks n1 - n4 conservation down to its parity;
// keeps the (-1)^(n3+n4) parity.
CooMatrix build_hq1(const FockBasis& basis, const ModelParams& p);

CooMatrix charge_q1(const FockBasis& basis);   // n1 - n4
CooMatrix charge_q2(const FockBasis& basis);   // n2 - n3
CooMatrix parity_pi(const FockBasis& basis);   // (-1)^(n3 + n4)
CooMatrix qubit_charge(const FockBasis& basis);  // -(n1 - n4) / (2d)

// ||[A, B]||_F / (||A||_F ||B||_F); 0/0 counts as 0.
double commutator_residual(const CooMatrix& a, const CooMatrix& b);

struct Sector {
  std::vector<std::int64_t> labels;       // one value per charge, in call order
  std::vector<std::size_t> indices;       // basis indices, ascending
};

// Splits the basis by joint eigenvalues of the given diagonal charges after
// verifying each one commutes with H (relative tolerance 1e-12).  Throws
// std::runtime_error naming the offending charge otherwise.  Sectors are
// ordered by label tuple.
std::vector<Sector> sector_decompose(
    const CooMatrix& h, const FockBasis& basis,
    const std::vector<std::pair<std::string, CooMatrix>>& charges);

// Dense block of h on the given index subset.
Eigen::MatrixXcd restrict_to(const CooMatrix& h, const std::vector<std::size_t>& indices);

}  // namespace emon
