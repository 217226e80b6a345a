#include "emon/coherent.hpp"

#include <cassert>
#include <cmath>

#include <Eigen/SVD>

namespace emon {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kProductTol = 1e-12;

Eigen::Vector2cd bloch_up(double theta, double phi) {
  return {cplx(std::cos(theta / 2.0), 0.0),
          std::polar(std::sin(theta / 2.0), phi)};
}

Eigen::Vector2cd bloch_down(double theta, double phi) {
  return {std::polar(-std::sin(theta / 2.0), -phi),
          cplx(std::cos(theta / 2.0), 0.0)};
}

Spinor tensor(const Eigen::Vector2cd& s, const Eigen::Vector2cd& p) {
  Spinor out;
  out << s[0] * p[0], s[0] * p[1], s[1] * p[0], s[1] * p[1];
  return out;
}

// Angles (theta, phi) and the fixing phase lambda such that
// e^{i lambda} v = (cos(theta/2), e^{i phi} sin(theta/2)).
void to_bloch_angles(const Eigen::Vector2cd& v, double& theta, double& phi, double& lambda) {
  double a = std::abs(v[0]);
  theta = 2.0 * std::atan2(std::abs(v[1]), a);
  if (a > 1e-15) {
    lambda = -std::arg(v[0]);
    cplx second = v[1] * std::polar(1.0, lambda);
    phi = (std::abs(second) > 1e-15) ? std::arg(second) : 0.0;
  } else {
    lambda = 0.0;
    phi = std::arg(v[1]);
  }
}

double wrap_2pi(double x) {
  double y = std::fmod(x, 2.0 * kPi);
  if (y < 0.0) y += 2.0 * kPi;
  return y;
}

// Bloch angles and beta for one ordering of the Schmidt pairs.
BlochCoordinates angles_from_pairs(double alpha, const Eigen::Vector2cd& spin0,
                                   const Eigen::Vector2cd& pseudo0,
                                   const Eigen::Vector2cd& spin1,
                                   const Eigen::Vector2cd& pseudo1) {
  BlochCoordinates c;
  c.alpha = alpha;
  double lam_s = 0.0, lam_p = 0.0;
  to_bloch_angles(spin0, c.theta_s, c.phi_s, lam_s);
  to_bloch_angles(pseudo0, c.theta_p, c.phi_p, lam_p);
  Eigen::Vector2cd chi_s = bloch_down(c.theta_s, c.phi_s);
  Eigen::Vector2cd chi_p = bloch_down(c.theta_p, c.phi_p);
  double delta_s = std::arg(chi_s.dot(spin1));   // dot conjugates its receiver
  double delta_p = std::arg(chi_p.dot(pseudo1));
  c.beta = wrap_2pi(delta_s + delta_p + lam_s + lam_p);
  return c;
}

}  // namespace

Spinor compose(const BlochCoordinates& c) {
  Spinor first = tensor(bloch_up(c.theta_s, c.phi_s), bloch_up(c.theta_p, c.phi_p));
  Spinor second = tensor(bloch_down(c.theta_s, c.phi_s), bloch_down(c.theta_p, c.phi_p));
  return std::cos(c.alpha / 2.0) * first +
         std::polar(std::sin(c.alpha / 2.0), c.beta) * second;
}

SchmidtResult schmidt_decompose(const Spinor& psi_in) {
  Spinor psi = psi_in.normalized();
  Eigen::Matrix2cd m;
  m << psi[0], psi[1], psi[2], psi[3];  // rows: spin, cols: pseudospin
  Eigen::JacobiSVD<Eigen::Matrix2cd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  double s0 = svd.singularValues()[0];
  double s1 = svd.singularValues()[1];

  SchmidtResult res;
  double alpha = 2.0 * std::atan2(s1, s0);

  Eigen::Vector2cd spin0 = svd.matrixU().col(0);
  Eigen::Vector2cd spin1 = svd.matrixU().col(1);
  Eigen::Vector2cd pseudo0 = svd.matrixV().col(0).conjugate();
  Eigen::Vector2cd pseudo1 = svd.matrixV().col(1).conjugate();

  if (s1 < kProductTol) {
    res.product_state = true;
    res.angles = angles_from_pairs(0.0, spin0, pseudo0, spin1, pseudo1);
    res.angles.beta = 0.0;
    return res;
  }

  res.angles = angles_from_pairs(alpha, spin0, pseudo0, spin1, pseudo1);
  if (s0 - s1 < 1e-12) {
    // Equal singular values: the two term orderings are both admissible;
    // keep the one with the smaller beta.
    BlochCoordinates swapped = angles_from_pairs(alpha, spin1, pseudo1, spin0, pseudo0);
    if (swapped.beta < res.angles.beta) res.angles = swapped;
  }
  return res;
}

double phase_distance(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  cplx ov = a.dot(b);
  cplx phase = (std::abs(ov) > 1e-15) ? ov / std::abs(ov) : cplx(1.0, 0.0);
  return (a * phase - b).norm();
}

Eigen::VectorXcd coherent_state(const Eigen::VectorXcd& psi_in, const FockBasis& basis) {
  assert(psi_in.size() == basis.modes());
  Eigen::VectorXcd psi = psi_in.normalized();
  const std::int64_t d = basis.total();
  Eigen::VectorXcd amp(basis.dim());

  if (d <= 30) {
    for (std::size_t k = 0; k < basis.dim(); ++k) {
      const auto& occ = basis.state(k);
      // d! / prod(n_j!) is exact in 64 bits for d <= 30, m <= 8.
      unsigned long long multinomial = 1;
      std::int64_t placed = 0;
      for (int j = 0; j < basis.modes(); ++j) {
        for (int t = 1; t <= occ[static_cast<std::size_t>(j)]; ++t) {
          ++placed;
          multinomial = multinomial * static_cast<unsigned long long>(placed) /
                        static_cast<unsigned long long>(t);
        }
      }
      cplx prod(1.0, 0.0);
      for (int j = 0; j < basis.modes(); ++j)
        for (int t = 0; t < occ[static_cast<std::size_t>(j)]; ++t) prod *= psi[j];
      amp[static_cast<std::int64_t>(k)] = std::sqrt(static_cast<double>(multinomial)) * prod;
    }
    return amp;
  }

  // Log-space magnitudes to dodge factorial overflow at large d.
  for (std::size_t k = 0; k < basis.dim(); ++k) {
    const auto& occ = basis.state(k);
    double log_mag = 0.5 * std::lgamma(static_cast<double>(d) + 1.0);
    double phase = 0.0;
    bool zero = false;
    for (int j = 0; j < basis.modes(); ++j) {
      int n = occ[static_cast<std::size_t>(j)];
      log_mag -= 0.5 * std::lgamma(static_cast<double>(n) + 1.0);
      if (n == 0) continue;
      double r = std::abs(psi[j]);
      if (r < 1e-300) {
        zero = true;
        break;
      }
      log_mag += n * std::log(r);
      phase += n * std::arg(psi[j]);
    }
    amp[static_cast<std::int64_t>(k)] =
        zero ? cplx(0.0, 0.0) : std::polar(std::exp(log_mag), phase);
  }
  return amp;
}

double sxpx_expectation(const Spinor& psi) {
  return 2.0 * (std::conj(psi[0]) * psi[3] + std::conj(psi[1]) * psi[2]).real();
}

namespace {

// Pauli on the spin (first) slot: indices 0,1 carry spin up; 2,3 spin down.
// Pauli on the pseudospin (second) slot: indices 0,2 up; 1,3 down.
double expect_zz(const Spinor& p, int slot) {
  double sgn[4];
  for (int i = 0; i < 4; ++i) {
    int bit = (slot == 0) ? (i >> 1) : (i & 1);
    sgn[i] = bit == 0 ? 1.0 : -1.0;
  }
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += sgn[i] * std::norm(p[i]);
  return s;
}

cplx expect_pm(const Spinor& p, int slot) {
  // sum of conj(up) * down per slot; then <sx> = 2 Re, <sy> = 2 Im.
  if (slot == 0) return std::conj(p[0]) * p[2] + std::conj(p[1]) * p[3];
  return std::conj(p[0]) * p[1] + std::conj(p[2]) * p[3];
}

}  // namespace

void bloch_vectors(const Spinor& psi_in, Eigen::Vector3d& spin, Eigen::Vector3d& pseudo) {
  Spinor p = psi_in.normalized();
  cplx sm = expect_pm(p, 0);
  cplx pm = expect_pm(p, 1);
  spin = {2.0 * sm.real(), 2.0 * sm.imag(), expect_zz(p, 0)};
  pseudo = {2.0 * pm.real(), 2.0 * pm.imag(), expect_zz(p, 1)};
}

double classical_energy(const Spinor& psi, const ModelParams& p, ClassicalFunctional f) {
  Eigen::Vector3d spin, pseudo;
  bloch_vectors(psi, spin, pseudo);
  double e = p.u_p * (pseudo[0] * pseudo[0] + pseudo[1] * pseudo[1]) +
             p.u_z * pseudo[2] * pseudo[2] - p.delta * spin[2];
  if (f == ClassicalFunctional::z2) {
    double x = sxpx_expectation(psi.normalized());
    e += p.v * x * x;
  }
  return e;
}

std::vector<SymbolCheckRow> covariant_symbol_check(const ModelParams& p, const Spinor& psi,
                                                   const std::vector<std::int64_t>& d_list) {
  std::vector<SymbolCheckRow> rows;
  rows.reserve(d_list.size());
  double classical = classical_energy(psi, p, ClassicalFunctional::base);
  for (std::int64_t d : d_list) {
    FockBasis basis = FockBasis::enumerate(4, d);
    CooMatrix h = build_hq0(basis, p);
    Eigen::VectorXcd cs = coherent_state(psi, basis);
    SymbolCheckRow row;
    row.d = d;
    row.quantum = h.matrix_element(cs, cs).real();
    row.classical = classical;
    row.deviation = std::abs(row.quantum - row.classical);
    rows.push_back(row);
  }
  return rows;
}

BerryResult berry_phase_loop(double alpha, std::int64_t d, int steps) {
  if (steps < 8) throw std::invalid_argument("berry_phase_loop: need at least 8 steps");
  FockBasis basis = FockBasis::enumerate(4, d);
  auto family = [&](double beta) {
    Spinor psi;
    psi << cplx(std::cos(alpha / 2.0), 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0),
        std::polar(std::sin(alpha / 2.0), beta);
    return coherent_state(psi, basis);
  };

  Eigen::VectorXcd first = family(0.0);
  Eigen::VectorXcd prev = first;
  double accumulated = 0.0;
  for (int k = 1; k <= steps; ++k) {
    // Close the loop on the exact starting vector.
    Eigen::VectorXcd cur = (k == steps) ? first : family(2.0 * kPi * k / steps);
    accumulated += std::arg(prev.dot(cur));
    prev = cur;
  }

  BerryResult res;
  res.phase = accumulated;
  double s = std::sin(alpha / 2.0);
  res.expected = 2.0 * kPi * static_cast<double>(d) * s * s;
  double dev = std::remainder(res.phase - res.expected, 2.0 * kPi);
  res.deviation = std::abs(dev);
  return res;
}

}  // namespace emon
