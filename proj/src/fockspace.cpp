#include "emon/fockspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace emon {

namespace {

// Lexicographic comparison, descending enumeration order.
bool lex_greater(const std::vector<int>& a, const std::vector<int>& b) {
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

std::size_t FockBasis::dimension(int modes, std::int64_t total) {
  if (modes < 2 || modes > 8) throw std::invalid_argument("FockBasis: modes must be in [2, 8]");
  if (total < 0) throw std::invalid_argument("FockBasis: total occupation must be >= 0");
  // C(total + modes - 1, modes - 1) with overflow guard.
  unsigned long long acc = 1;
  for (int k = 1; k <= modes - 1; ++k) {
    unsigned long long num = static_cast<unsigned long long>(total) + static_cast<unsigned long long>(k);
    if (acc > std::numeric_limits<unsigned long long>::max() / num)
      throw std::overflow_error("FockBasis: dimension overflows 64-bit");
    acc = acc * num / static_cast<unsigned long long>(k);
  }
  if (acc > std::numeric_limits<std::size_t>::max())
    throw std::overflow_error("FockBasis: dimension overflows size_t");
  return static_cast<std::size_t>(acc);
}

FockBasis FockBasis::enumerate(int modes, std::int64_t total, std::size_t cap) {
  std::size_t dim = dimension(modes, total);
  if (dim > cap) {
    throw std::invalid_argument("FockBasis: dimension " + std::to_string(dim) +
                                " exceeds cap " + std::to_string(cap) + " for modes=" +
                                std::to_string(modes) + " total=" + std::to_string(total));
  }
  FockBasis b;
  b.modes_ = modes;
  b.total_ = total;
  b.states_.reserve(dim);

  std::vector<int> occ(static_cast<std::size_t>(modes), 0);
  // Depth-first with the leading mode counted down gives descending lex order.
  auto rec = [&](auto&& self, int mode, std::int64_t remaining) -> void {
    if (mode == modes - 1) {
      occ[static_cast<std::size_t>(mode)] = static_cast<int>(remaining);
      b.states_.push_back(occ);
      return;
    }
    for (std::int64_t n = remaining; n >= 0; --n) {
      occ[static_cast<std::size_t>(mode)] = static_cast<int>(n);
      self(self, mode + 1, remaining - n);
    }
  };
  rec(rec, 0, total);
  return b;
}

std::size_t FockBasis::index_of(const std::vector<int>& occ) const {
  auto it = std::lower_bound(states_.begin(), states_.end(), occ, lex_greater);
  if (it == states_.end() || *it != occ)
    throw std::out_of_range("FockBasis: occupation vector not in basis");
  return static_cast<std::size_t>(it - states_.begin());
}

CooMatrix ladder_bilinear(const FockBasis& basis, int i, int j) {
  const int m = basis.modes();
  if (i < 0 || i >= m || j < 0 || j >= m)
    throw std::invalid_argument("ladder_bilinear: mode index out of range");
  CooMatrix out(static_cast<std::int64_t>(basis.dim()), i == j);
  std::vector<int> target;
  for (std::size_t k = 0; k < basis.dim(); ++k) {
    const auto& occ = basis.state(k);
    int nj = occ[static_cast<std::size_t>(j)];
    if (nj == 0) continue;
    if (i == j) {
      out.add_entry(static_cast<std::int64_t>(k), static_cast<std::int64_t>(k),
                    cplx(static_cast<double>(nj), 0.0));
      continue;
    }
    target = occ;
    target[static_cast<std::size_t>(j)] -= 1;
    target[static_cast<std::size_t>(i)] += 1;
    std::size_t row = basis.index_of(target);
    double amp = std::sqrt(static_cast<double>(occ[static_cast<std::size_t>(i)] + 1) *
                           static_cast<double>(nj));
    out.add_entry(static_cast<std::int64_t>(row), static_cast<std::int64_t>(k), cplx(amp, 0.0));
  }
  out.canonicalize();
  return out;
}

CooMatrix number_operator(const FockBasis& basis, int i) {
  return ladder_bilinear(basis, i, i);
}

}  // namespace emon
