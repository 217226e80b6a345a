#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace emon {

using cplx = std::complex<double>;

struct CooEntry {
  std::int64_t row = 0;
  std::int64_t col = 0;
  cplx val{0.0, 0.0};
};

// Square complex matrix in coordinate (COO) storage.  Canonical form means:
// entries sorted by (row, col), duplicates combined, and entries with
// magnitude <= kPrune dropped.  All arithmetic returns canonical results.
// The hermitian flag is advisory and can be checked against the data.
class CooMatrix {
 public:
  static constexpr double kPrune = 1e-15;

  CooMatrix() = default;
  explicit CooMatrix(std::int64_t dim, bool hermitian = false)
      : dim_(dim), hermitian_(hermitian) {}

  static CooMatrix identity(std::int64_t dim);
  static CooMatrix zero(std::int64_t dim) { return CooMatrix(dim, true); }

  std::int64_t dim() const { return dim_; }
  std::size_t nnz() const { return entries_.size(); }
  bool hermitian_flag() const { return hermitian_; }
  void set_hermitian_flag(bool h) { hermitian_ = h; }

  // Accumulate an entry; canonicalize() folds duplicates afterwards.
  void add_entry(std::int64_t r, std::int64_t c, cplx v);
  void canonicalize();
  bool is_canonical() const { return canonical_; }
  const std::vector<CooEntry>& entries() const { return entries_; }

  // Verifies entry-level hermiticity: A(r,c) == conj(A(c,r)) within tol.
  bool is_hermitian(double tol = 1e-12) const;

  CooMatrix adjoint() const;
  CooMatrix scaled(cplx factor) const;

  friend CooMatrix operator+(const CooMatrix& a, const CooMatrix& b);
  friend CooMatrix operator-(const CooMatrix& a, const CooMatrix& b);
  friend CooMatrix operator*(const CooMatrix& a, const CooMatrix& b);

  static CooMatrix commutator(const CooMatrix& a, const CooMatrix& b);

  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
  Eigen::MatrixXcd dense() const;

  double frobenius_norm() const;
  // Maximum absolute row sum; upper bound on the spectral norm.
  double inf_norm() const;

  // <x|A|y>
  cplx matrix_element(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) const;

 private:
  std::int64_t dim_ = 0;
  bool hermitian_ = false;
  bool canonical_ = true;
  std::vector<CooEntry> entries_;
};

}  // namespace emon
