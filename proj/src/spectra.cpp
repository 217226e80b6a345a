#include "emon/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

namespace emon {

namespace {

void check_residuals(const CooMatrix& a, const EigResult& r) {
  double scale = std::max(a.inf_norm(), 1e-300);
  for (int i = 0; i < r.values.size(); ++i) {
    Eigen::VectorXcd v = r.vectors.col(i);
    double resid = (a.apply(v) - r.values[i] * v).norm();
    if (resid > 1e-10 * scale) {
      throw NonConvergenceError("eig_hermitian: eigenpair " + std::to_string(i) +
                                " residual " + std::to_string(resid) +
                                " exceeds 1e-10 * ||A|| (method " + r.method + ")");
    }
  }
}

EigResult eig_dense_lowest(const CooMatrix& a, int k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a.dense());
  if (es.info() != Eigen::Success)
    throw NonConvergenceError("eig_hermitian: dense solver failed");
  int kk = std::min<int>(k, static_cast<int>(a.dim()));
  EigResult r;
  r.values = es.eigenvalues().head(kk);
  r.vectors = es.eigenvectors().leftCols(kk);
  r.method = "dense";
  return r;
}

}  // namespace

EigResult eig_lanczos(const CooMatrix& a, int k, std::uint64_t seed,
                      double tol, int max_cycles) {
  const std::int64_t n = a.dim();
  if (k < 1) throw std::invalid_argument("eig_lanczos: k must be >= 1");
  if (n <= std::max<std::int64_t>(3 * k, 32)) return eig_dense_lowest(a, k);

  const int m = std::min<std::int64_t>(std::max(2 * k + 16, 40), n);
  const double scale = std::max(a.inf_norm(), 1e-300);

  Eigen::MatrixXcd V(n, m + 1);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_vector = [&]() {
    Eigen::VectorXcd v(n);
    for (std::int64_t i = 0; i < n; ++i) v[i] = cplx(gauss(rng), gauss(rng));
    return v;
  };

  // Twice-applied classical Gram-Schmidt against the first `cols` columns.
  auto reorthogonalize = [&](Eigen::VectorXcd& w, int cols) {
    for (int pass = 0; pass < 2; ++pass) {
      Eigen::VectorXcd coef = V.leftCols(cols).adjoint() * w;
      w -= V.leftCols(cols) * coef;
    }
  };

  V.col(0) = random_vector();
  V.col(0).normalize();
  int l = 0;  // retained Ritz vectors after the last restart

  for (int cycle = 0; cycle < max_cycles; ++cycle) {
    double beta_last = 0.0;
    for (int j = l; j < m; ++j) {
      Eigen::VectorXcd w = a.apply(V.col(j));
      double alpha = std::real(V.col(j).dot(w));
      T(j, j) = alpha;
      reorthogonalize(w, j + 1);
      double beta = w.norm();
      if (beta <= 1e-13 * scale) {
        // Invariant subspace; continue with a fresh random direction.
        w = random_vector();
        reorthogonalize(w, j + 1);
        beta = w.norm();
        if (j + 1 < m) T(j, j + 1) = T(j + 1, j) = 0.0;
        V.col(j + 1) = w / beta;
        beta_last = 0.0;
        continue;
      }
      if (j + 1 < m) T(j, j + 1) = T(j + 1, j) = beta;
      V.col(j + 1) = w / beta;
      beta_last = beta;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(T);
    if (small.info() != Eigen::Success)
      throw NonConvergenceError("eig_lanczos: projected eigensolve failed");
    Eigen::VectorXd theta = small.eigenvalues();
    Eigen::MatrixXd y = small.eigenvectors();

    bool converged = true;
    for (int i = 0; i < k; ++i) {
      double est = std::abs(beta_last * y(m - 1, i));
      if (est > tol * scale) converged = false;
    }
    if (converged || cycle == max_cycles - 1) {
      if (!converged)
        throw NonConvergenceError("eig_lanczos: no convergence after " +
                                  std::to_string(max_cycles) + " cycles");
      EigResult r;
      r.values = theta.head(k);
      r.vectors.resize(n, k);
      for (int i = 0; i < k; ++i) {
        Eigen::VectorXcd v = V.leftCols(m) * y.col(i).cast<cplx>();
        v.normalize();
        r.vectors.col(i) = v;
      }
      r.method = "lanczos";
      return r;
    }

    // Thick restart: keep the lowest few Ritz vectors plus the last residual.
    int keep = std::min(k + 8, m - 4);
    Eigen::MatrixXcd kept(n, keep);
    for (int i = 0; i < keep; ++i)
      kept.col(i) = V.leftCols(m) * y.col(i).cast<cplx>();
    Eigen::VectorXcd resid = V.col(m);
    V.leftCols(keep) = kept;
    V.col(keep) = resid;
    T.setZero();
    for (int i = 0; i < keep; ++i) {
      T(i, i) = theta[i];
      double s = beta_last * y(m - 1, i);
      T(i, keep) = T(keep, i) = s;
    }
    l = keep;
  }
  throw NonConvergenceError("eig_lanczos: unreachable");
}

EigResult eig_hermitian(const CooMatrix& a, const EigOptions& opts) {
  if (opts.force_dense && opts.force_iterative)
    throw std::invalid_argument("eig_hermitian: cannot force both solver paths");
  bool dense = !opts.force_iterative &&
               (opts.force_dense ||
                static_cast<std::size_t>(a.dim()) <= opts.dense_threshold);
  EigResult r = dense ? eig_dense_lowest(a, opts.k)
                      : eig_lanczos(a, opts.k, opts.seed, opts.tol, opts.max_cycles);
  check_residuals(a, r);
  return r;
}

SemiclassicalRow semiclassical_row(const ModelParams& p, std::int64_t d, std::int64_t q1) {
  double dd = static_cast<double>(d);
  double q = static_cast<double>(q1);
  SemiclassicalRow row;
  row.q1 = q1;
  row.omega_x = (4.0 * p.u_p - 2.0 * p.u_z) * q / (dd * dd) - p.delta / dd;
  row.omega_y = 2.0 * p.u_z * q / (dd * dd) + p.delta / dd;
  row.e_top = p.u_z * q * q / (dd * dd) - p.delta * q / dd;
  return row;
}

std::vector<SemiclassicalRow> semiclassical_spectrum(const ModelParams& p, std::int64_t d,
                                                     const std::vector<std::int64_t>& q1_list) {
  std::vector<SemiclassicalRow> rows;
  rows.reserve(q1_list.size());
  for (std::int64_t q1 : q1_list) rows.push_back(semiclassical_row(p, d, q1));
  return rows;
}

double semiclassical_minimum_q1(const ModelParams& p, std::int64_t d) {
  return p.delta * static_cast<double>(d) / (2.0 * p.u_z);
}

std::vector<BranchRow> charge_branch(const FockBasis& basis, const ModelParams& p) {
  CooMatrix h = build_hq0(basis, p);
  auto sectors = sector_decompose(h, basis,
                                  {{"n1-n4", charge_q1(basis)}, {"n2-n3", charge_q2(basis)}});
  std::vector<BranchRow> rows;
  for (const auto& sec : sectors) {
    if (sec.labels[1] != 0) continue;  // q2 = 0 slice only
    Eigen::MatrixXcd block = restrict_to(h, sec.indices);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(block);
    if (es.info() != Eigen::Success)
      throw NonConvergenceError("charge_branch: sector eigensolve failed");
    BranchRow row;
    row.q1 = sec.labels[0];
    row.e_exact = es.eigenvalues()[0];
    row.e_top = semiclassical_row(p, basis.total(), row.q1).e_top;
    row.sector_dim = sec.indices.size();
    rows.push_back(row);
  }
  std::sort(rows.begin(), rows.end(),
            [](const BranchRow& a, const BranchRow& b) { return a.q1 < b.q1; });
  return rows;
}

namespace {

DoubletLabels labels_for(const Eigen::VectorXcd& v, const CooMatrix& q1,
                         const CooMatrix& q2, const CooMatrix& pi, const CooMatrix& g) {
  DoubletLabels lab;
  lab.q1 = q1.matrix_element(v, v).real();
  lab.q2 = q2.matrix_element(v, v).real();
  lab.parity = pi.matrix_element(v, v).real();
  lab.g = g.matrix_element(v, v).real();
  return lab;
}

// Indices on which every restriction charge takes its target integer value.
std::vector<std::int64_t> charge_slice(const std::vector<ChargeRestriction>& restrictions,
                                       std::int64_t dim) {
  std::vector<char> keep(static_cast<std::size_t>(dim), 1);
  for (const auto& r : restrictions) {
    if (r.op.dim() != dim)
      throw std::invalid_argument("eig_restricted: charge '" + r.name +
                                  "' has mismatched dimension");
    std::vector<double> diag(static_cast<std::size_t>(dim), 0.0);
    for (const auto& e : r.op.entries()) {
      if (e.row != e.col) {
        if (std::abs(e.val) > 1e-12)
          throw std::invalid_argument("eig_restricted: charge '" + r.name +
                                      "' is not diagonal");
        continue;
      }
      diag[static_cast<std::size_t>(e.row)] = e.val.real();
    }
    for (std::int64_t i = 0; i < dim; ++i) {
      double v = diag[static_cast<std::size_t>(i)];
      auto rounded = static_cast<std::int64_t>(std::llround(v));
      if (std::abs(v - static_cast<double>(rounded)) > 1e-9)
        throw std::invalid_argument("eig_restricted: charge '" + r.name +
                                    "' is not integer valued");
      if (rounded != r.value) keep[static_cast<std::size_t>(i)] = 0;
    }
  }
  std::vector<std::int64_t> idx;
  for (std::int64_t i = 0; i < dim; ++i)
    if (keep[static_cast<std::size_t>(i)]) idx.push_back(i);
  return idx;
}

}  // namespace

EigResult eig_restricted(const CooMatrix& h,
                         const std::vector<ChargeRestriction>& restrictions,
                         const EigOptions& opts) {
  if (restrictions.empty()) return eig_hermitian(h, opts);
  std::vector<std::int64_t> idx = charge_slice(restrictions, h.dim());
  if (idx.empty())
    throw std::invalid_argument("eig_restricted: charge slice is empty");
  std::vector<std::int64_t> pos(static_cast<std::size_t>(h.dim()), -1);
  for (std::size_t k = 0; k < idx.size(); ++k)
    pos[static_cast<std::size_t>(idx[k])] = static_cast<std::int64_t>(k);
  CooMatrix block(static_cast<std::int64_t>(idx.size()), true);
  for (const auto& e : h.entries()) {
    std::int64_t rr = pos[static_cast<std::size_t>(e.row)];
    std::int64_t cc = pos[static_cast<std::size_t>(e.col)];
    if (rr >= 0 && cc >= 0) block.add_entry(rr, cc, e.val);
  }
  block.canonicalize();
  EigResult r = eig_hermitian(block, opts);
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(h.dim(), r.vectors.cols());
  for (std::size_t k = 0; k < idx.size(); ++k)
    full.row(idx[k]) = r.vectors.row(static_cast<std::int64_t>(k));
  r.vectors = full;
  return r;
}

Doublet qubit_doublet(const CooMatrix& h, const FockBasis& basis, const EigOptions& opts,
                      const std::vector<ChargeRestriction>& restrictions) {
  EigOptions o = opts;
  o.k = std::max(opts.k, 3);
  EigResult r;
  if (restrictions.empty()) {
    r = eig_hermitian(h, o);
  } else {
    if (charge_slice(restrictions, h.dim()).size() < 3)
      throw std::invalid_argument(
          "qubit_doublet: restricted slice has fewer than three states");
    r = eig_restricted(h, restrictions, o);
  }
  if (r.values.size() < 3)
    throw std::invalid_argument("qubit_doublet: need at least three states");

  Doublet d;
  d.e0 = r.values[0];
  d.e1 = r.values[1];
  d.e2 = r.values[2];
  d.gap01 = d.e1 - d.e0;
  d.gap12 = d.e2 - d.e1;
  if (d.gap12 <= d.gap01 + 1e-9) {
    throw DoubletAmbiguityError(
        "qubit_doublet: gap12 = " + std::to_string(d.gap12) +
        " does not exceed gap01 = " + std::to_string(d.gap01) +
        "; the two lowest states do not form an isolated doublet");
  }
  d.state0 = r.vectors.col(0);
  d.state1 = r.vectors.col(1);
  CooMatrix q1 = charge_q1(basis), q2 = charge_q2(basis);
  CooMatrix pi = parity_pi(basis), g = qubit_charge(basis);
  d.labels0 = labels_for(d.state0, q1, q2, pi, g);
  d.labels1 = labels_for(d.state1, q1, q2, pi, g);
  return d;
}

}  // namespace emon
