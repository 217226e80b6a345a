#pragma once

#include <cstdint>
#include <vector>

#include "emon/coo_matrix.hpp"
#include "emon/fockspace.hpp"

namespace emon {

// ----- chart monomials -----

// Monomial in the affine chart coordinates of CP(n):
//   prod_k v_{holo[k]} * prod_k conj(v_{anti[k]}) / (1 + <v|v>)^denominator_power.
// Indices are 1-based; repetitions encode higher multidegree (v_i^2 = {i, i}).
// Supported shapes are the five rows of the quantization dictionary:
//   v_i, conj(v_i) at power 1; v_i conj(v_j) at power 1; v_i v_j and
//   conj(v_i v_j) at power 2.  The pairing row carries the first power: the
//   coherent-expectation check converges to the symbol only with that choice,
//   so the power is part of the shape and quantization rejects any other.
struct MonomialSymbol {
  std::vector<int> holo;
  std::vector<int> anti;
  int denominator_power = 1;
};

MonomialSymbol sym_v(int i);
MonomialSymbol sym_vbar(int i);
MonomialSymbol sym_v_vbar(int i, int j);
MonomialSymbol sym_vv(int i, int j);
MonomialSymbol sym_vbar_vbar(int i, int j);

// Complex conjugate symbol (swaps holomorphic and antiholomorphic factors).
MonomialSymbol conjugate(const MonomialSymbol& s);

// Finite linear combination; an empty sum is the zero symbol.
struct WeightedSymbol {
  cplx coeff{1.0, 0.0};
  MonomialSymbol sym;
};
using SymbolSum = std::vector<WeightedSymbol>;

cplx symbol_value(const MonomialSymbol& sym, const Eigen::VectorXcd& v);
cplx symbol_value(const SymbolSum& sum, const Eigen::VectorXcd& v);

// ----- quantization -----

// Operator assigned to the monomial on the d-boson realization of CP(n),
// acting on FockBasis(n + 1, d) with mode 0 the chart anchor and modes 1..n
// carrying v_1..v_n:
//   v_i            -> b_0 b_i^dag / (n+d+1)
//   conj(v_i)      -> b_i b_0^dag / (n+d+1)
//   v_i conj(v_j)  -> b_j b_i^dag / (n+d+1)
//   v_i v_j        -> b_0^2 b_i^dag b_j^dag / ((n+d+1)(n+d+2))
//   conj(v_i v_j)  -> b_i b_j (b_0^dag)^2 / ((n+d+1)(n+d+2))
// The assignment is linear and adjoint-covariant; the coherent-state
// expectation of the operator reproduces the symbol up to O(1/d).
// Throws std::invalid_argument for any shape outside the five rows.
CooMatrix quantize_monomial(const MonomialSymbol& sym, int n, std::int64_t d);
CooMatrix quantize_sum(const SymbolSum& sum, int n, std::int64_t d);

// ----- coherent-state validation -----

struct DictionaryCheck {
  std::int64_t d = 0;
  double max_deviation = 0.0;
};

// Worst |<CS|Op|CS> - symbol(v)| over a fixed set of random chart points,
// one row per requested d.  The same points are reused for every d so the
// deviations are directly comparable; they shrink as 1/d.
std::vector<DictionaryCheck> validate_dictionary(const SymbolSum& sum, int n,
                                                 const std::vector<std::int64_t>& d_values,
                                                 int samples, std::uint64_t seed);
std::vector<DictionaryCheck> validate_dictionary(const MonomialSymbol& sym, int n,
                                                 const std::vector<std::int64_t>& d_values,
                                                 int samples, std::uint64_t seed);

// ----- squared exchange symbol -----

// (a_1^dag a_4 + a_2^dag a_3 + h.c.)^2 / d^2 on the four-mode level-d space,
// built from the same exchange operator as the double-well Hamiltonian.  Its
// coherent-state expectation approaches the squared <SxPx> symbol.
CooMatrix quantize_sxpx_squared(std::int64_t d);

}  // namespace emon
