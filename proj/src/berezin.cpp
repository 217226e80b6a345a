#include "emon/berezin.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "emon/coherent.hpp"
#include "emon/models.hpp"

namespace emon {

namespace {

// ----- shape classification -----

enum class RowShape { v, vbar, v_vbar, vv, vbar_vbar };

RowShape classify(const MonomialSymbol& s, int n) {
  for (int i : s.holo)
    if (i < 1 || i > n) throw std::invalid_argument("berezin: factor index outside 1..n");
  for (int i : s.anti)
    if (i < 1 || i > n) throw std::invalid_argument("berezin: factor index outside 1..n");
  const std::size_t p = s.holo.size();
  const std::size_t q = s.anti.size();
  RowShape shape;
  int want_power = 0;
  if (p == 1 && q == 0) {
    shape = RowShape::v;
    want_power = 1;
  } else if (p == 0 && q == 1) {
    shape = RowShape::vbar;
    want_power = 1;
  } else if (p == 1 && q == 1) {
    shape = RowShape::v_vbar;
    want_power = 1;
  } else if (p == 2 && q == 0) {
    shape = RowShape::vv;
    want_power = 2;
  } else if (p == 0 && q == 2) {
    shape = RowShape::vbar_vbar;
    want_power = 2;
  } else {
    throw std::invalid_argument("berezin: unsupported symbol shape");
  }
  if (s.denominator_power != want_power)
    throw std::invalid_argument("berezin: unsupported symbol shape (denominator power)");
  return shape;
}

MonomialSymbol make_sym(std::vector<int> holo, std::vector<int> anti, int power) {
  MonomialSymbol s;
  s.holo = std::move(holo);
  s.anti = std::move(anti);
  s.denominator_power = power;
  for (int i : s.holo)
    if (i < 1) throw std::invalid_argument("berezin: factor index must be >= 1");
  for (int i : s.anti)
    if (i < 1) throw std::invalid_argument("berezin: factor index must be >= 1");
  return s;
}

}  // namespace

// ----- factories -----

MonomialSymbol sym_v(int i) { return make_sym({i}, {}, 1); }

MonomialSymbol sym_vbar(int i) { return make_sym({}, {i}, 1); }

MonomialSymbol sym_v_vbar(int i, int j) { return make_sym({i}, {j}, 1); }

MonomialSymbol sym_vv(int i, int j) { return make_sym({i, j}, {}, 2); }

MonomialSymbol sym_vbar_vbar(int i, int j) { return make_sym({}, {i, j}, 2); }

MonomialSymbol conjugate(const MonomialSymbol& s) {
  MonomialSymbol c;
  c.holo = s.anti;
  c.anti = s.holo;
  c.denominator_power = s.denominator_power;
  return c;
}

// ----- symbol evaluation -----

cplx symbol_value(const MonomialSymbol& sym, const Eigen::VectorXcd& v) {
  const int n = static_cast<int>(v.size());
  cplx num(1.0, 0.0);
  for (int i : sym.holo) {
    if (i < 1 || i > n) throw std::invalid_argument("berezin: factor index outside 1..n");
    num *= v(i - 1);
  }
  for (int i : sym.anti) {
    if (i < 1 || i > n) throw std::invalid_argument("berezin: factor index outside 1..n");
    num *= std::conj(v(i - 1));
  }
  const double den = std::pow(1.0 + v.squaredNorm(), sym.denominator_power);
  return num / den;
}

cplx symbol_value(const SymbolSum& sum, const Eigen::VectorXcd& v) {
  cplx s(0.0, 0.0);
  for (const auto& term : sum) s += term.coeff * symbol_value(term.sym, v);
  return s;
}

// ----- quantization -----

CooMatrix quantize_monomial(const MonomialSymbol& sym, int n, std::int64_t d) {
  if (n < 1) throw std::invalid_argument("berezin: need n >= 1");
  if (d < 1) throw std::invalid_argument("berezin: need d >= 1");
  const RowShape shape = classify(sym, n);
  const FockBasis basis = FockBasis::enumerate(n + 1, d);
  const double c1 = 1.0 / static_cast<double>(n + d + 1);
  const double c2 = c1 / static_cast<double>(n + d + 2);
  switch (shape) {
    case RowShape::v:
      return ladder_bilinear(basis, sym.holo[0], 0).scaled(cplx(c1, 0.0));
    case RowShape::vbar:
      return ladder_bilinear(basis, 0, sym.anti[0]).scaled(cplx(c1, 0.0));
    case RowShape::v_vbar: {
      const int i = sym.holo[0];
      const int j = sym.anti[0];
      if (i == j) {
        // b_i b_i^dag = n_i + 1 on the fixed-total space.
        return diagonal_operator(basis, [i](const std::vector<int>& a) {
                 return static_cast<double>(a[i] + 1);
               }).scaled(cplx(c1, 0.0));
      }
      return ladder_bilinear(basis, i, j).scaled(cplx(c1, 0.0));
    }
    case RowShape::vv: {
      const int i = sym.holo[0];
      const int j = sym.holo[1];
      return (ladder_bilinear(basis, i, 0) * ladder_bilinear(basis, j, 0)).scaled(cplx(c2, 0.0));
    }
    case RowShape::vbar_vbar: {
      const int i = sym.anti[0];
      const int j = sym.anti[1];
      return (ladder_bilinear(basis, 0, j) * ladder_bilinear(basis, 0, i)).scaled(cplx(c2, 0.0));
    }
  }
  throw std::logic_error("berezin: unreachable");
}

CooMatrix quantize_sum(const SymbolSum& sum, int n, std::int64_t d) {
  if (n < 1) throw std::invalid_argument("berezin: need n >= 1");
  if (d < 1) throw std::invalid_argument("berezin: need d >= 1");
  CooMatrix out =
      CooMatrix::zero(static_cast<std::int64_t>(FockBasis::dimension(n + 1, d)));
  for (const auto& term : sum)
    out = out + quantize_monomial(term.sym, n, d).scaled(term.coeff);
  return out;
}

// ----- coherent-state validation -----

std::vector<DictionaryCheck> validate_dictionary(const SymbolSum& sum, int n,
                                                 const std::vector<std::int64_t>& d_values,
                                                 int samples, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("berezin: need n >= 1");
  if (samples < 1) throw std::invalid_argument("berezin: need samples >= 1");
  for (std::int64_t d : d_values)
    if (d < 1) throw std::invalid_argument("berezin: need d >= 1");

  // Fixed chart points shared across all d so the per-d rows are comparable.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 0.8);
  std::vector<Eigen::VectorXcd> points(static_cast<std::size_t>(samples));
  for (auto& v : points) {
    v.resize(n);
    for (int k = 0; k < n; ++k) v(k) = cplx(gauss(rng), gauss(rng));
  }

  std::vector<DictionaryCheck> out;
  out.reserve(d_values.size());
  for (std::int64_t d : d_values) {
    const FockBasis basis = FockBasis::enumerate(n + 1, d);
    const CooMatrix op = quantize_sum(sum, n, d);
    double worst = 0.0;
    for (const auto& v : points) {
      // Chart point v corresponds to the condensate of (1, conj(v_1..v_n)).
      Eigen::VectorXcd psi(n + 1);
      psi(0) = cplx(1.0, 0.0);
      for (int k = 0; k < n; ++k) psi(k + 1) = std::conj(v(k));
      psi.normalize();
      const Eigen::VectorXcd cs = coherent_state(psi, basis);
      const cplx got = op.matrix_element(cs, cs);
      const cplx want = symbol_value(sum, v);
      worst = std::max(worst, std::abs(got - want));
    }
    out.push_back({d, worst});
  }
  return out;
}

std::vector<DictionaryCheck> validate_dictionary(const MonomialSymbol& sym, int n,
                                                 const std::vector<std::int64_t>& d_values,
                                                 int samples, std::uint64_t seed) {
  SymbolSum sum;
  sum.push_back({cplx(1.0, 0.0), sym});
  return validate_dictionary(sum, n, d_values, samples, seed);
}

// ----- squared exchange symbol -----

CooMatrix quantize_sxpx_squared(std::int64_t d) {
  if (d < 1) throw std::invalid_argument("berezin: need d >= 1");
  const FockBasis basis = FockBasis::enumerate(4, d);
  const CooMatrix x = build_exchange_x(basis);
  CooMatrix out = (x * x).scaled(cplx(1.0 / static_cast<double>(d * d), 0.0));
  out.set_hermitian_flag(true);
  return out;
}

}  // namespace emon
