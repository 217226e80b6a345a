#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "emon/coo_matrix.hpp"

namespace emon {

// Basis of m bosonic modes at fixed total occupation d, enumerated in
// lexicographically descending order: (d,0,...,0) first, (0,...,0,d) last.
class FockBasis {
 public:
  static constexpr std::size_t kDefaultDimCap = 200000;

  // Closed form C(m-1+d, d); throws on overflow.
  static std::size_t dimension(int modes, std::int64_t total);

  // Throws std::invalid_argument if modes/total are out of range or the
  // dimension exceeds cap (cap check happens before any enumeration).
  static FockBasis enumerate(int modes, std::int64_t total,
                             std::size_t cap = kDefaultDimCap);

  int modes() const { return modes_; }
  std::int64_t total() const { return total_; }
  std::size_t dim() const { return states_.size(); }
  const std::vector<int>& state(std::size_t idx) const { return states_[idx]; }
  const std::vector<std::vector<int>>& states() const { return states_; }

  // Binary search over the descending enumeration; throws if absent.
  std::size_t index_of(const std::vector<int>& occ) const;

 private:
  int modes_ = 0;
  std::int64_t total_ = 0;
  std::vector<std::vector<int>> states_;
};

// a_i^dag a_j on the fixed-total space (modes are 0-based).  For i == j this
// is the number operator n_i.  Matrix entries are sqrt((n_i+1) n_j) between
// states that differ by one boson moved from mode j to mode i.
CooMatrix ladder_bilinear(const FockBasis& basis, int i, int j);

CooMatrix number_operator(const FockBasis& basis, int i);

// Diagonal matrix with value f(occupation vector) per basis state.
template <typename F>
CooMatrix diagonal_operator(const FockBasis& basis, F f) {
  CooMatrix m(static_cast<std::int64_t>(basis.dim()), true);
  for (std::size_t k = 0; k < basis.dim(); ++k) {
    double v = f(basis.state(k));
    m.add_entry(static_cast<std::int64_t>(k), static_cast<std::int64_t>(k), cplx(v, 0.0));
  }
  m.canonicalize();
  return m;
}

}  // namespace emon
