#include "emon/coo_matrix.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace emon {

CooMatrix CooMatrix::identity(std::int64_t dim) {
  CooMatrix m(dim, true);
  m.entries_.reserve(static_cast<std::size_t>(dim));
  for (std::int64_t i = 0; i < dim; ++i) m.entries_.push_back({i, i, cplx(1.0, 0.0)});
  m.canonical_ = true;
  return m;
}

void CooMatrix::add_entry(std::int64_t r, std::int64_t c, cplx v) {
  assert(r >= 0 && r < dim_ && c >= 0 && c < dim_);
  entries_.push_back({r, c, v});
  canonical_ = false;
}

void CooMatrix::canonicalize() {
  std::sort(entries_.begin(), entries_.end(), [](const CooEntry& a, const CooEntry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::size_t out = 0;
  for (std::size_t i = 0; i < entries_.size();) {
    std::int64_t r = entries_[i].row, c = entries_[i].col;
    cplx acc(0.0, 0.0);
    while (i < entries_.size() && entries_[i].row == r && entries_[i].col == c) {
      acc += entries_[i].val;
      ++i;
    }
    if (std::abs(acc) > kPrune) entries_[out++] = {r, c, acc};
  }
  entries_.resize(out);
  canonical_ = true;
}

bool CooMatrix::is_hermitian(double tol) const {
  assert(canonical_);
  // Canonical entries allow a two-pointer check against the transposed order,
  // but a simple lookup keeps this readable; matrices here are small or sparse.
  for (const auto& e : entries_) {
    CooEntry key{e.col, e.row, 0.0};
    auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                               [](const CooEntry& a, const CooEntry& b) {
                                 return a.row != b.row ? a.row < b.row : a.col < b.col;
                               });
    cplx other(0.0, 0.0);
    if (it != entries_.end() && it->row == e.col && it->col == e.row) other = it->val;
    if (std::abs(e.val - std::conj(other)) > tol) return false;
  }
  return true;
}

CooMatrix CooMatrix::adjoint() const {
  CooMatrix m(dim_, hermitian_);
  m.entries_.reserve(entries_.size());
  for (const auto& e : entries_) m.entries_.push_back({e.col, e.row, std::conj(e.val)});
  m.canonical_ = false;
  m.canonicalize();
  return m;
}

CooMatrix CooMatrix::scaled(cplx factor) const {
  CooMatrix m(dim_, hermitian_ && factor.imag() == 0.0);
  m.entries_.reserve(entries_.size());
  for (const auto& e : entries_) m.entries_.push_back({e.row, e.col, factor * e.val});
  m.canonical_ = false;
  m.canonicalize();
  return m;
}

CooMatrix operator+(const CooMatrix& a, const CooMatrix& b) {
  if (a.dim_ != b.dim_) throw std::invalid_argument("CooMatrix: dimension mismatch in +");
  CooMatrix m(a.dim_, a.hermitian_ && b.hermitian_);
  m.entries_.reserve(a.entries_.size() + b.entries_.size());
  m.entries_.insert(m.entries_.end(), a.entries_.begin(), a.entries_.end());
  m.entries_.insert(m.entries_.end(), b.entries_.begin(), b.entries_.end());
  m.canonical_ = false;
  m.canonicalize();
  return m;
}

CooMatrix operator-(const CooMatrix& a, const CooMatrix& b) {
  return a + b.scaled(cplx(-1.0, 0.0));
}

CooMatrix operator*(const CooMatrix& a, const CooMatrix& b) {
  if (a.dim_ != b.dim_) throw std::invalid_argument("CooMatrix: dimension mismatch in *");
  assert(a.canonical_ && b.canonical_);
  // Row-major gather: group b's entries by row for direct lookup.
  std::vector<std::size_t> b_row_start(static_cast<std::size_t>(b.dim_) + 1, 0);
  for (const auto& e : b.entries_) ++b_row_start[static_cast<std::size_t>(e.row) + 1];
  for (std::size_t i = 1; i < b_row_start.size(); ++i) b_row_start[i] += b_row_start[i - 1];

  CooMatrix m(a.dim_, false);
  for (const auto& ea : a.entries_) {
    std::size_t lo = b_row_start[static_cast<std::size_t>(ea.col)];
    std::size_t hi = b_row_start[static_cast<std::size_t>(ea.col) + 1];
    for (std::size_t k = lo; k < hi; ++k) {
      const auto& eb = b.entries_[k];
      m.entries_.push_back({ea.row, eb.col, ea.val * eb.val});
    }
  }
  m.canonical_ = false;
  m.canonicalize();
  return m;
}

CooMatrix CooMatrix::commutator(const CooMatrix& a, const CooMatrix& b) {
  return a * b - b * a;
}

Eigen::VectorXcd CooMatrix::apply(const Eigen::VectorXcd& x) const {
  assert(x.size() == dim_);
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(dim_);
  for (const auto& e : entries_) y[e.row] += e.val * x[e.col];
  return y;
}

Eigen::MatrixXcd CooMatrix::dense() const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim_, dim_);
  for (const auto& e : entries_) m(e.row, e.col) += e.val;
  return m;
}

double CooMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& e : entries_) s += std::norm(e.val);
  return std::sqrt(s);
}

double CooMatrix::inf_norm() const {
  std::vector<double> row_sum(static_cast<std::size_t>(dim_), 0.0);
  for (const auto& e : entries_) row_sum[static_cast<std::size_t>(e.row)] += std::abs(e.val);
  double m = 0.0;
  for (double s : row_sum) m = std::max(m, s);
  return m;
}

cplx CooMatrix::matrix_element(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) const {
  assert(x.size() == dim_ && y.size() == dim_);
  cplx s(0.0, 0.0);
  for (const auto& e : entries_) s += std::conj(x[e.row]) * e.val * y[e.col];
  return s;
}

}  // namespace emon
