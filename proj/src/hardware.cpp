#include "emon/hardware.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "emon/models.hpp"

namespace emon {

namespace {

constexpr double kConnectTol = 1e-10;

std::int64_t pow_int(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int k = 0; k < exp; ++k) r *= base;
  return r;
}

void check_ladder(const LadderParams& p) {
  if (p.n < 2 || p.n > 7)
    throw std::invalid_argument("ladder: rung count must be in 2..7, got " +
                                std::to_string(p.n));
  if (p.e_flip <= 0.0 || p.e_phase <= 0.0)
    throw std::invalid_argument("ladder: couplings must be positive");
}

void check_ion(const IonModelParams& p) {
  if (p.n < 2 || p.n > 6)
    throw std::invalid_argument("ion: site count must be in 2..6, got " +
                                std::to_string(p.n));
  if (p.gamma <= 0.0) throw std::invalid_argument("ion: gamma must be positive");
  if (p.nu < 0.0 || p.nu > 1.0)
    throw std::invalid_argument("ion: nu must lie in [0, 1]");
}

}  // namespace

// ----- Pauli words -----

int ladder_slot(int rung, bool right) { return 2 * rung + (right ? 1 : 0); }

PauliWord pauli_letter(int n_slots, int slot, char letter, cplx coeff) {
  if (slot < 0 || slot >= n_slots) throw std::invalid_argument("pauli: slot out of range");
  PauliWord w;
  w.letters.assign(static_cast<std::size_t>(n_slots), 'I');
  w.letters[static_cast<std::size_t>(slot)] = letter;
  w.coeff = coeff;
  return w;
}

CooMatrix pauli_word_matrix(const PauliWord& w) {
  const int n = static_cast<int>(w.letters.size());
  if (n < 1 || n > 20) throw std::invalid_argument("pauli: slot count must be in 1..20");
  for (char c : w.letters)
    if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z')
      throw std::invalid_argument("pauli: letters must be I, X, Y or Z");
  const std::int64_t dim = pow_int(2, n);
  CooMatrix m(dim, false);
  for (std::int64_t col = 0; col < dim; ++col) {
    std::int64_t row = col;
    cplx coeff = w.coeff;
    for (int s = 0; s < n; ++s) {
      const int shift = n - 1 - s;  // slot 0 is the most significant bit
      const std::int64_t bit = (col >> shift) & 1;
      switch (w.letters[static_cast<std::size_t>(s)]) {
        case 'I':
          break;
        case 'X':
          row ^= (std::int64_t{1} << shift);
          break;
        case 'Y':
          row ^= (std::int64_t{1} << shift);
          coeff *= bit ? cplx(0.0, -1.0) : cplx(0.0, 1.0);
          break;
        case 'Z':
          if (bit) coeff = -coeff;
          break;
      }
    }
    m.add_entry(row, col, coeff);
  }
  m.canonicalize();
  return m;
}

CooMatrix tau_operator(int n_rungs, int rung) {
  if (rung < 0 || rung >= n_rungs) throw std::invalid_argument("ladder: rung out of range");
  PauliWord w;
  w.letters.assign(static_cast<std::size_t>(2 * n_rungs), 'I');
  w.letters[static_cast<std::size_t>(ladder_slot(rung, false))] = 'Z';
  w.letters[static_cast<std::size_t>(ladder_slot(rung, true))] = 'Z';
  CooMatrix m = pauli_word_matrix(w);
  m.set_hermitian_flag(true);
  return m;
}

// ----- rhombus ladder -----

CooMatrix build_ladder_heff(const LadderParams& p) {
  check_ladder(p);
  const int slots = 2 * p.n;
  CooMatrix h = CooMatrix::zero(pow_int(2, slots));
  for (int i = 0; i < p.n; ++i) {
    PauliWord w;
    w.letters.assign(static_cast<std::size_t>(slots), 'I');
    w.letters[static_cast<std::size_t>(ladder_slot(i, false))] = 'X';
    w.letters[static_cast<std::size_t>(ladder_slot(i, true))] = 'X';
    w.coeff = cplx(-p.e_flip, 0.0);
    h = h + pauli_word_matrix(w);
  }
  // Ordered pairs: the displayed i != j double sum counts each pair twice.
  for (int i = 0; i < p.n; ++i) {
    for (int j = 0; j < p.n; ++j) {
      if (i == j) continue;
      PauliWord w;
      w.letters.assign(static_cast<std::size_t>(slots), 'I');
      w.letters[static_cast<std::size_t>(ladder_slot(i, false))] = 'Z';
      w.letters[static_cast<std::size_t>(ladder_slot(i, true))] = 'Z';
      w.letters[static_cast<std::size_t>(ladder_slot(j, false))] = 'Z';
      w.letters[static_cast<std::size_t>(ladder_slot(j, true))] = 'Z';
      w.coeff = cplx(-p.e_phase, 0.0);
      h = h + pauli_word_matrix(w);
    }
  }
  h.set_hermitian_flag(true);
  return h;
}

Eigen::VectorXcd ladder_tplus(int n_rungs) {
  if (n_rungs < 2 || n_rungs > 7) throw std::invalid_argument("ladder: rung count must be in 2..7");
  const int slots = 2 * n_rungs;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(pow_int(2, slots));
  const double amp = std::pow(2.0, -0.5 * n_rungs);
  for (std::int64_t pat = 0; pat < pow_int(2, n_rungs); ++pat) {
    std::int64_t idx = 0;
    for (int i = 0; i < n_rungs; ++i) {
      const std::int64_t a = (pat >> (n_rungs - 1 - i)) & 1;
      idx |= a << (slots - 1 - ladder_slot(i, false));
      idx |= a << (slots - 1 - ladder_slot(i, true));
    }
    v(idx) = cplx(amp, 0.0);
  }
  return v;
}

Eigen::VectorXcd ladder_tminus(int n_rungs) {
  if (n_rungs < 2 || n_rungs > 7) throw std::invalid_argument("ladder: rung count must be in 2..7");
  const int slots = 2 * n_rungs;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(pow_int(2, slots));
  const double amp = std::pow(2.0, -0.5 * n_rungs);
  for (std::int64_t pat = 0; pat < pow_int(2, n_rungs); ++pat) {
    std::int64_t idx = 0;
    for (int i = 0; i < n_rungs; ++i) {
      const std::int64_t a = (pat >> (n_rungs - 1 - i)) & 1;
      idx |= a << (slots - 1 - ladder_slot(i, false));
      idx |= (1 - a) << (slots - 1 - ladder_slot(i, true));
    }
    v(idx) = cplx(amp, 0.0);
  }
  return v;
}

std::vector<std::size_t> tau_uniform_sector(int n_rungs, int sign) {
  if (n_rungs < 2 || n_rungs > 7) throw std::invalid_argument("ladder: rung count must be in 2..7");
  if (sign != 1 && sign != -1) throw std::invalid_argument("ladder: sector sign must be +1 or -1");
  const int slots = 2 * n_rungs;
  std::vector<std::size_t> idx;
  idx.reserve(static_cast<std::size_t>(pow_int(2, n_rungs)));
  for (std::int64_t b = 0; b < pow_int(2, slots); ++b) {
    bool match = true;
    for (int i = 0; i < n_rungs && match; ++i) {
      const std::int64_t l = (b >> (slots - 1 - ladder_slot(i, false))) & 1;
      const std::int64_t r = (b >> (slots - 1 - ladder_slot(i, true))) & 1;
      const int tau = (l == r) ? 1 : -1;
      match = (tau == sign);
    }
    if (match) idx.push_back(static_cast<std::size_t>(b));
  }
  return idx;
}

// ----- trapped-ion generalized ferromagnet -----

CooMatrix build_ion_interaction(const IonModelParams& p) {
  check_ion(p);
  const double rho = 1.0 - p.nu;
  const std::int64_t dim = pow_int(4, p.n);
  CooMatrix e = CooMatrix::zero(dim);
  auto digit = [&](std::int64_t idx, int site) {
    return (idx >> (2 * (p.n - 1 - site))) & 3;
  };
  auto replace = [&](std::int64_t idx, int site, std::int64_t level) {
    const int shift = 2 * (p.n - 1 - site);
    return (idx & ~(std::int64_t{3} << shift)) | (level << shift);
  };
  for (int i = 0; i < p.n; ++i) {
    for (int j = 0; j < p.n; ++j) {
      if (i == j) continue;
      for (std::int64_t col = 0; col < dim; ++col) {
        const std::int64_t si = digit(col, i);
        const std::int64_t sj = digit(col, j);
        if (si > 1 || sj > 1) continue;  // U annihilates outside the active block
        if (si == sj) {
          // |11> <-> |22>
          const std::int64_t row = replace(replace(col, i, 1 - si), j, 1 - sj);
          e.add_entry(row, col, cplx(-p.gamma, 0.0));
        } else {
          // |12> -> rho |12> + nu |21>
          e.add_entry(col, col, cplx(-p.gamma * rho, 0.0));
          const std::int64_t row = replace(replace(col, i, sj), j, si);
          e.add_entry(row, col, cplx(-p.gamma * p.nu, 0.0));
        }
      }
    }
  }
  e.canonicalize();
  e.set_hermitian_flag(true);
  return e;
}

std::int64_t ion_index(const std::vector<int>& levels) {
  std::int64_t idx = 0;
  for (int l : levels) {
    if (l < 0 || l > 3) throw std::invalid_argument("ion: levels must be in 0..3");
    idx = 4 * idx + l;
  }
  return idx;
}

Eigen::VectorXcd ion_beta_product(int n_sites, double beta) {
  if (n_sites < 1 || n_sites > 6) throw std::invalid_argument("ion: site count must be in 1..6");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(pow_int(4, n_sites));
  const double amp = std::pow(2.0, -0.5 * n_sites);
  for (std::int64_t pat = 0; pat < pow_int(2, n_sites); ++pat) {
    std::int64_t idx = 0;
    int ones = 0;
    for (int s = 0; s < n_sites; ++s) {
      const std::int64_t a = (pat >> (n_sites - 1 - s)) & 1;
      ones += static_cast<int>(a);
      idx = 4 * idx + a;
    }
    v(idx) = std::polar(amp, beta * ones);
  }
  return v;
}

// ----- perturbative probes -----

std::optional<int> noise_order_probe(const CooMatrix& v, const Eigen::VectorXcd& plus,
                                     const Eigen::VectorXcd& minus, int k_max) {
  if (plus.size() != v.dim() || minus.size() != v.dim())
    throw std::invalid_argument("noise order probe: state dimension mismatch");
  if (k_max < 1) throw std::invalid_argument("noise order probe: k_max must be >= 1");
  if (std::abs(plus.norm() - 1.0) > 1e-8 || std::abs(minus.norm() - 1.0) > 1e-8 ||
      std::abs(minus.dot(plus)) > 1e-8)
    throw std::invalid_argument("noise order probe: qubit pair must be orthonormal");
  Eigen::VectorXcd w = plus;
  for (int k = 1; k <= k_max; ++k) {
    w = v.apply(w);
    if (std::abs(minus.dot(w)) > kConnectTol) return k;
  }
  return std::nullopt;
}

DephasingFit dephasing_scaling_probe(const LadderParams& p, const std::vector<double>& eps_grid,
                                     const CooMatrix& probe) {
  check_ladder(p);
  const CooMatrix h = build_ladder_heff(p);
  if (probe.dim() != h.dim())
    throw std::invalid_argument("dephasing probe: operator dimension mismatch");
  for (double eps : eps_grid) {
    if (eps < 0.0) throw std::invalid_argument("dephasing probe: epsilon must be >= 0");
    if (eps > 0.1 * p.e_flip)
      throw std::invalid_argument("dephasing probe: epsilon must stay below 0.1 e_flip");
  }
  for (int i = 0; i < p.n; ++i) {
    const CooMatrix tau = tau_operator(p.n, i);
    const double scale = std::max(1.0, probe.inf_norm());
    if (commutator_residual(probe, tau) > 1e-10 * scale)
      throw std::invalid_argument("dephasing probe: operator must commute with every tau");
  }

  const std::vector<std::size_t> plus = tau_uniform_sector(p.n, 1);
  const std::vector<std::size_t> minus = tau_uniform_sector(p.n, -1);
  DephasingFit fit;
  for (double eps : eps_grid) {
    const CooMatrix hp = h + probe.scaled(cplx(eps, 0.0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ep(restrict_to(hp, plus));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> em(restrict_to(hp, minus));
    const double split = std::abs(ep.eigenvalues()(0) - em.eigenvalues()(0));
    if (split < 1e-13) {
      ++fit.excluded;
      continue;
    }
    fit.epsilons.push_back(eps);
    fit.splittings.push_back(split);
  }
  if (fit.epsilons.size() < 2)
    throw std::runtime_error("dephasing probe: fewer than two resolvable splittings");

  // Least-squares slope in log-log coordinates.
  const int m = static_cast<int>(fit.epsilons.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int k = 0; k < m; ++k) {
    const double x = std::log(fit.epsilons[static_cast<std::size_t>(k)]);
    const double y = std::log(fit.splittings[static_cast<std::size_t>(k)]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  fit.exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return fit;
}

}  // namespace emon
