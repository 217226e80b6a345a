#include "emon/models.hpp"

#include <cassert>
#include <cmath>
#include <map>
#include <stdexcept>

namespace emon {

namespace {

constexpr cplx kI{0.0, 1.0};

double require_total(const FockBasis& basis) {
  if (basis.modes() != 4)
    throw std::invalid_argument("model builders require a four-mode basis");
  if (basis.total() < 1)
    throw std::invalid_argument("model builders require total occupation >= 1");
  return static_cast<double>(basis.total());
}

// One-boson pair hop: moves a boson src1 -> dst1 and src2 -> dst2 (all modes
// distinct), with the bosonic sqrt amplitudes.
CooMatrix pair_hop(const FockBasis& basis, int dst1, int src1, int dst2, int src2) {
  CooMatrix out(static_cast<std::int64_t>(basis.dim()));
  std::vector<int> target;
  for (std::size_t k = 0; k < basis.dim(); ++k) {
    const auto& occ = basis.state(k);
    int n_s1 = occ[static_cast<std::size_t>(src1)];
    int n_s2 = occ[static_cast<std::size_t>(src2)];
    if (n_s1 == 0 || n_s2 == 0) continue;
    target = occ;
    target[static_cast<std::size_t>(src1)] -= 1;
    target[static_cast<std::size_t>(src2)] -= 1;
    target[static_cast<std::size_t>(dst1)] += 1;
    target[static_cast<std::size_t>(dst2)] += 1;
    double amp = std::sqrt(static_cast<double>(n_s1) * static_cast<double>(n_s2) *
                           static_cast<double>(target[static_cast<std::size_t>(dst1)]) *
                           static_cast<double>(target[static_cast<std::size_t>(dst2)]));
    out.add_entry(static_cast<std::int64_t>(basis.index_of(target)),
                  static_cast<std::int64_t>(k), cplx(amp, 0.0));
  }
  out.canonicalize();
  return out;
}

}  // namespace

SpinOps build_spin_ops(const FockBasis& basis) {
  double d = require_total(basis);
  cplx inv_d(1.0 / d, 0.0);
  SpinOps ops;
  ops.sx = (ladder_bilinear(basis, 0, 1) + ladder_bilinear(basis, 1, 0) +
            ladder_bilinear(basis, 2, 3) + ladder_bilinear(basis, 3, 2)).scaled(inv_d);
  ops.sy = (ladder_bilinear(basis, 1, 0) - ladder_bilinear(basis, 0, 1) +
            ladder_bilinear(basis, 3, 2) - ladder_bilinear(basis, 2, 3)).scaled(kI * inv_d);
  ops.sz = diagonal_operator(basis, [d](const std::vector<int>& n) {
    return (n[0] - n[1] + n[2] - n[3]) / d;
  });
  ops.px = (ladder_bilinear(basis, 0, 2) + ladder_bilinear(basis, 2, 0) +
            ladder_bilinear(basis, 1, 3) + ladder_bilinear(basis, 3, 1)).scaled(inv_d);
  ops.py = (ladder_bilinear(basis, 2, 0) - ladder_bilinear(basis, 0, 2) +
            ladder_bilinear(basis, 3, 1) - ladder_bilinear(basis, 1, 3)).scaled(kI * inv_d);
  ops.pz = diagonal_operator(basis, [d](const std::vector<int>& n) {
    return (n[0] + n[1] - n[2] - n[3]) / d;
  });
  for (CooMatrix* m : {&ops.sx, &ops.sy, &ops.sz, &ops.px, &ops.py, &ops.pz})
    m->set_hermitian_flag(true);
  return ops;
}

CooMatrix build_hq0(const FockBasis& basis, const ModelParams& p) {
  double d = require_total(basis);
  double d2 = d * d;

  CooMatrix diag = diagonal_operator(basis, [&](const std::vector<int>& n) {
    double sz = static_cast<double>(n[0] - n[1] + n[2] - n[3]);
    double pz = static_cast<double>(n[0] + n[1] - n[2] - n[3]);
    double pair = static_cast<double>(n[0]) * n[1] + static_cast<double>(n[2]) * n[3];
    return (4.0 * p.u_p / d2) * pair + (p.u_z / d2) * sz * sz - (p.delta / d) * pz;
  });

  // a1+ a2 a3 a4+ moves one boson 2 -> 1 and one 3 -> 4; plus the adjoint.
  CooMatrix hop = pair_hop(basis, 0, 1, 3, 2);
  CooMatrix quartic = (hop + hop.adjoint()).scaled(cplx(4.0 * p.u_p / d2, 0.0));

  CooMatrix h = diag + quartic;
  h.set_hermitian_flag(true);
  return h;
}

CooMatrix build_exchange_x(const FockBasis& basis) {
  require_total(basis);
  CooMatrix x = ladder_bilinear(basis, 3, 0) + ladder_bilinear(basis, 2, 1) +
                ladder_bilinear(basis, 0, 3) + ladder_bilinear(basis, 1, 2);
  x.set_hermitian_flag(true);
  return x;
}

CooMatrix build_hq1(const FockBasis& basis, const ModelParams& p) {
  double d = require_total(basis);
  CooMatrix x = build_exchange_x(basis);
  CooMatrix h = build_hq0(basis, p) + (x * x).scaled(cplx(p.v / (d * d), 0.0));
  h.set_hermitian_flag(true);
  return h;
}

CooMatrix charge_q1(const FockBasis& basis) {
  return diagonal_operator(basis, [](const std::vector<int>& n) {
    return static_cast<double>(n[0] - n[3]);
  });
}

CooMatrix charge_q2(const FockBasis& basis) {
  return diagonal_operator(basis, [](const std::vector<int>& n) {
    return static_cast<double>(n[1] - n[2]);
  });
}

CooMatrix parity_pi(const FockBasis& basis) {
  return diagonal_operator(basis, [](const std::vector<int>& n) {
    return ((n[2] + n[3]) % 2 == 0) ? 1.0 : -1.0;
  });
}

CooMatrix qubit_charge(const FockBasis& basis) {
  double d = require_total(basis);
  return diagonal_operator(basis, [d](const std::vector<int>& n) {
    return -static_cast<double>(n[0] - n[3]) / (2.0 * d);
  });
}

double commutator_residual(const CooMatrix& a, const CooMatrix& b) {
  double denom = a.frobenius_norm() * b.frobenius_norm();
  if (denom == 0.0) return 0.0;
  return CooMatrix::commutator(a, b).frobenius_norm() / denom;
}

std::vector<Sector> sector_decompose(
    const CooMatrix& h, const FockBasis& basis,
    const std::vector<std::pair<std::string, CooMatrix>>& charges) {
  constexpr double kCommTol = 1e-12;
  std::vector<std::vector<std::int64_t>> diag_values;
  for (const auto& [name, q] : charges) {
    for (const auto& e : q.entries()) {
      if (e.row != e.col)
        throw std::runtime_error("sector_decompose: charge '" + name + "' is not diagonal");
    }
    double resid = commutator_residual(h, q);
    if (resid > kCommTol) {
      throw std::runtime_error("sector_decompose: charge '" + name +
                               "' does not commute with H (relative residual " +
                               std::to_string(resid) + ")");
    }
    std::vector<std::int64_t> vals(basis.dim(), 0);
    for (const auto& e : q.entries()) {
      double v = e.val.real();
      std::int64_t r = static_cast<std::int64_t>(std::llround(v));
      if (std::abs(v - static_cast<double>(r)) > 1e-9)
        throw std::runtime_error("sector_decompose: charge '" + name +
                                 "' has non-integer eigenvalue " + std::to_string(v));
      vals[static_cast<std::size_t>(e.row)] = r;
    }
    diag_values.push_back(std::move(vals));
  }

  std::map<std::vector<std::int64_t>, std::vector<std::size_t>> groups;
  for (std::size_t k = 0; k < basis.dim(); ++k) {
    std::vector<std::int64_t> key;
    key.reserve(charges.size());
    for (const auto& vals : diag_values) key.push_back(vals[k]);
    groups[key].push_back(k);
  }

  std::vector<Sector> sectors;
  sectors.reserve(groups.size());
  for (auto& [key, idx] : groups) sectors.push_back({key, std::move(idx)});
  return sectors;
}

Eigen::MatrixXcd restrict_to(const CooMatrix& h, const std::vector<std::size_t>& indices) {
  std::vector<std::int64_t> pos(static_cast<std::size_t>(h.dim()), -1);
  for (std::size_t a = 0; a < indices.size(); ++a)
    pos[indices[a]] = static_cast<std::int64_t>(a);
  Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(indices.size(), indices.size());
  for (const auto& e : h.entries()) {
    std::int64_t r = pos[static_cast<std::size_t>(e.row)];
    std::int64_t c = pos[static_cast<std::size_t>(e.col)];
    if (r >= 0 && c >= 0) block(r, c) += e.val;
  }
  return block;
}

}  // namespace emon
