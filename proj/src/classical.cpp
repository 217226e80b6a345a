#include "emon/classical.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <future>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "emon/errors.hpp"

namespace emon {
namespace {

using cplx = std::complex<double>;
constexpr double kPi = 3.14159265358979323846;

// ----- observables and gradients -----

struct SiteObservables {
  double px = 0.0, py = 0.0, pz = 0.0, sz = 0.0, sxpx = 0.0;
};

SiteObservables observe(const Spinor& q) {
  const cplx c12 = std::conj(q(0)) * q(1) + std::conj(q(2)) * q(3);
  const cplx x14 = std::conj(q(0)) * q(3) + std::conj(q(1)) * q(2);
  SiteObservables o;
  o.px = 2.0 * c12.real();
  o.py = 2.0 * c12.imag();
  o.pz = std::norm(q(0)) - std::norm(q(1)) + std::norm(q(2)) - std::norm(q(3));
  o.sz = std::norm(q(0)) + std::norm(q(1)) - std::norm(q(2)) - std::norm(q(3));
  o.sxpx = 2.0 * x14.real();
  return o;
}

Spinor apply_px(const Spinor& q) { return Spinor(q(1), q(0), q(3), q(2)); }

Spinor apply_py(const Spinor& q) {
  const cplx i(0.0, 1.0);
  return Spinor(-i * q(1), i * q(0), -i * q(3), i * q(2));
}

Spinor apply_pz(const Spinor& q) { return Spinor(q(0), -q(1), q(2), -q(3)); }

Spinor apply_sz(const Spinor& q) { return Spinor(q(0), q(1), -q(2), -q(3)); }

Spinor apply_sxpx(const Spinor& q) { return Spinor(q(3), q(2), q(1), q(0)); }

// d/d conj(psi) of the quadratic-in-expectation functional at a normalized
// point; components parallel to psi drop out under tangent projection.
Spinor raw_gradient(const Spinor& q, double u_p, double u_z, double delta,
                    double v) {
  const SiteObservables o = observe(q);
  Spinor g = 2.0 * u_p * o.px * apply_px(q);
  g += 2.0 * u_p * o.py * apply_py(q);
  g += 2.0 * u_z * o.pz * apply_pz(q);
  g -= delta * apply_sz(q);
  if (v != 0.0) g += 2.0 * v * o.sxpx * apply_sxpx(q);
  return g;
}

Spinor project_tangent(const Spinor& q, const Spinor& g) {
  return g - q.dot(g) * q;
}

// ----- minimization problem: one site or a coupled pair -----

struct Problem {
  bool two_site = false;
  ModelParams params;  // single site
  ClassicalFunctional functional = ClassicalFunctional::base;
  TwoSiteParams pair;  // coupled pair

  int sites() const { return two_site ? 2 : 1; }

  double energy(const std::vector<Spinor>& s) const {
    if (!two_site) return classical_energy(s[0], params, functional);
    return two_site_energy(s[0], s[1], pair);
  }

  // Projected gradient per site; returns the total euclidean norm.
  double gradient(const std::vector<Spinor>& s, std::vector<Spinor>& g) const {
    g.resize(s.size());
    if (!two_site) {
      const double v = functional == ClassicalFunctional::z2 ? params.v : 0.0;
      g[0] = project_tangent(
          s[0], raw_gradient(s[0], params.u_p, params.u_z, params.delta, v));
      return g[0].norm();
    }
    const cplx overlap = s[0].dot(s[1]);
    Spinor ga = raw_gradient(s[0], pair.u_p, pair.u_z, pair.delta_a, 0.0);
    Spinor gb = raw_gradient(s[1], pair.u_p, pair.u_z, -pair.delta_a, 0.0);
    ga += pair.lambda * std::conj(overlap) * s[1];
    gb += pair.lambda * overlap * s[0];
    g[0] = project_tangent(s[0], ga);
    g[1] = project_tangent(s[1], gb);
    return std::sqrt(g[0].squaredNorm() + g[1].squaredNorm());
  }
};

void canonicalize_phase(Spinor& q) {
  int jmax = 0;
  q.cwiseAbs().maxCoeff(&jmax);
  q *= std::polar(1.0, -std::arg(q(jmax)));
}

// ----- tangent basis and Hessian -----

// Orthonormal complex tangent directions per site, realified as {v, i v}.
// Identity columns away from the dominant component stay independent after
// projection, so Gram-Schmidt never degenerates.
std::vector<std::vector<Spinor>> tangent_basis(const std::vector<Spinor>& s) {
  std::vector<std::vector<Spinor>> basis(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    int jmax = 0;
    s[k].cwiseAbs().maxCoeff(&jmax);
    std::vector<Spinor> dirs;
    for (int j = 0; j < 4; ++j) {
      if (j == jmax) continue;
      Spinor v = Spinor::Zero();
      v(j) = 1.0;
      v = project_tangent(s[k], v);
      for (const Spinor& w : dirs) v -= w.dot(v) * w;
      v.normalize();
      dirs.push_back(v);
    }
    for (const Spinor& v : dirs) {
      basis[k].push_back(v);
      basis[k].push_back(cplx(0.0, 1.0) * v);
    }
  }
  return basis;
}

// Gradient in the real tangent coordinates anchored at the basis.
Eigen::VectorXd tangent_gradient(const std::vector<Spinor>& g,
                                 const std::vector<std::vector<Spinor>>& basis) {
  const int dim = 6 * static_cast<int>(basis.size());
  Eigen::VectorXd gt(dim);
  int a = 0;
  for (std::size_t k = 0; k < basis.size(); ++k)
    for (const Spinor& w : basis[k]) gt(a++) = 2.0 * w.dot(g[k]).real();
  return gt;
}

std::vector<Spinor> displace(const std::vector<Spinor>& s,
                             const std::vector<std::vector<Spinor>>& basis,
                             const Eigen::VectorXd& t) {
  std::vector<Spinor> out = s;
  int a = 0;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    for (const Spinor& w : basis[k]) out[k] += t(a++) * w;
    out[k].normalize();
  }
  return out;
}

// Centered differences of the analytic tangent gradient; exact up to O(h^2)
// at critical points, where the basis-transport correction vanishes.
Eigen::MatrixXd tangent_hessian(const std::vector<Spinor>& s,
                                const Problem& prob,
                                const std::vector<std::vector<Spinor>>& basis,
                                double h = 1e-5) {
  const int dim = 6 * static_cast<int>(basis.size());
  Eigen::MatrixXd hess(dim, dim);
  std::vector<Spinor> g;
  for (int a = 0; a < dim; ++a) {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(dim);
    t(a) = h;
    prob.gradient(displace(s, basis, t), g);
    const Eigen::VectorXd gp = tangent_gradient(g, basis);
    t(a) = -h;
    prob.gradient(displace(s, basis, t), g);
    const Eigen::VectorXd gm = tangent_gradient(g, basis);
    hess.col(a) = (gp - gm) / (2.0 * h);
  }
  return 0.5 * (hess + hess.transpose());
}

// ----- descent: projected gradient plus Newton polish -----

constexpr int kMaxPgdIter = 20000;
constexpr double kPgdHandoff = 1e-7;
constexpr int kMaxNewtonIter = 50;
constexpr double kNewtonTarget = 1e-12;

RestartOutcome descend(std::vector<Spinor> s, const Problem& prob) {
  for (Spinor& q : s) q.normalize();
  std::vector<Spinor> g;
  double e = prob.energy(s);
  double gnorm = prob.gradient(s, g);
  double step = 1.0;
  for (int it = 0; it < kMaxPgdIter && gnorm > kPgdHandoff; ++it) {
    double t = step;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      std::vector<Spinor> cand = s;
      for (std::size_t k = 0; k < s.size(); ++k)
        cand[k] = (s[k] - t * g[k]).normalized();
      const double ec = prob.energy(cand);
      if (ec <= e - 1e-4 * t * gnorm * gnorm) {
        s = std::move(cand);
        e = ec;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    gnorm = prob.gradient(s, g);
    step = std::min(2.0 * t, 4.0);
  }

  for (int it = 0; it < kMaxNewtonIter && gnorm > kNewtonTarget; ++it) {
    const auto basis = tangent_basis(s);
    const Eigen::VectorXd gt = tangent_gradient(g, basis);
    const Eigen::MatrixXd hess = tangent_hessian(s, prob, basis);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hess);
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(gt.size());
    for (int m = 0; m < gt.size(); ++m) {
      const double lam = es.eigenvalues()(m);
      if (std::abs(lam) < kZeroModeTol) continue;  // flat orbit directions
      const Eigen::VectorXd u = es.eigenvectors().col(m);
      dir -= (u.dot(gt) / lam) * u;
    }
    if (dir.norm() > 0.3) dir *= 0.3 / dir.norm();
    bool improved = false;
    for (int bt = 0; bt < 10; ++bt) {
      std::vector<Spinor> cand = displace(s, basis, dir);
      std::vector<Spinor> gc;
      const double gn = prob.gradient(cand, gc);
      if (gn < gnorm) {
        s = std::move(cand);
        g = std::move(gc);
        gnorm = gn;
        improved = true;
        break;
      }
      dir *= 0.5;
    }
    if (!improved) break;
  }

  RestartOutcome out;
  for (Spinor& q : s) canonicalize_phase(q);
  out.spinors = std::move(s);
  out.energy = prob.energy(out.spinors);
  out.gradient_norm = gnorm;
  out.converged = gnorm < kGradientTol;
  return out;
}

std::vector<RestartOutcome> run_restarts(
    const std::vector<std::vector<Spinor>>& starts, const Problem& prob) {
  std::vector<RestartOutcome> out(starts.size());
  const std::size_t workers =
      std::max<std::size_t>(1, std::thread::hardware_concurrency());
  for (std::size_t base = 0; base < starts.size(); base += workers) {
    const std::size_t stop = std::min(starts.size(), base + workers);
    std::vector<std::future<RestartOutcome>> futures;
    for (std::size_t i = base; i < stop; ++i)
      futures.push_back(std::async(
          std::launch::async, [&starts, &prob, i] { return descend(starts[i], prob); }));
    for (std::size_t i = base; i < stop; ++i)
      out[i] = futures[i - base].get();
  }
  return out;
}

std::vector<Spinor> random_state(int sites, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Spinor> s(sites);
  for (Spinor& q : s) {
    for (int j = 0; j < 4; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      q(j) = cplx(re, im);
    }
    q.normalize();
  }
  return s;
}

MinimizationResult assemble(std::vector<RestartOutcome> outcomes, int best,
                            const Problem& prob) {
  MinimizationResult result;
  result.spinors = outcomes[best].spinors;
  result.energy = outcomes[best].energy;
  result.gradient_norm = outcomes[best].gradient_norm;
  result.converged = outcomes[best].converged;
  const auto basis = tangent_basis(result.spinors);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      tangent_hessian(result.spinors, prob, basis));
  result.hessian_eigenvalues = es.eigenvalues();
  result.zero_modes = 0;
  for (int m = 0; m < result.hessian_eigenvalues.size(); ++m)
    if (std::abs(result.hessian_eigenvalues(m)) < kZeroModeTol)
      ++result.zero_modes;
  result.restarts = std::move(outcomes);
  return result;
}

bool anti_aligned(const std::vector<Spinor>& s) {
  Eigen::Vector3d spin_a, pseudo_a, spin_b, pseudo_b;
  bloch_vectors(s[0], spin_a, pseudo_a);
  bloch_vectors(s[1], spin_b, pseudo_b);
  return spin_a.z() * spin_b.z() < 0.0 && pseudo_a.z() * pseudo_b.z() < 0.0;
}

}  // namespace

// ----- public minimization API -----

Spinor snap_spinor(const Spinor& psi, double tol) {
  const double top = psi.cwiseAbs().maxCoeff();
  Spinor out = psi;
  for (int j = 0; j < 4; ++j)
    if (std::abs(out(j)) < tol * top) out(j) = 0.0;
  out.normalize();
  return out;
}

RestartOutcome local_minimize_cp3(const Spinor& start, const ModelParams& p,
                                  ClassicalFunctional f) {
  Problem prob;
  prob.params = p;
  prob.functional = f;
  return descend({start}, prob);
}

MinimizationResult minimize_cp3(const ModelParams& p, ClassicalFunctional f,
                                int restarts, std::uint64_t seed) {
  if (restarts < 1) throw ConfigError("minimize_cp3: restarts must be >= 1");
  Problem prob;
  prob.params = p;
  prob.functional = f;
  std::mt19937_64 rng(seed);
  std::vector<std::vector<Spinor>> starts(restarts);
  for (auto& s : starts) s = random_state(1, rng);
  auto outcomes = run_restarts(starts, prob);
  int best = 0;
  for (int i = 1; i < restarts; ++i)
    if (outcomes[i].energy < outcomes[best].energy) best = i;
  return assemble(std::move(outcomes), best, prob);
}

Eigen::VectorXd cp3_tangent_spectrum(const Spinor& psi, const ModelParams& p,
                                     ClassicalFunctional f) {
  Problem prob;
  prob.params = p;
  prob.functional = f;
  const std::vector<Spinor> s = {psi.normalized()};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      tangent_hessian(s, prob, tangent_basis(s)));
  return es.eigenvalues();
}

Eigen::VectorXd two_site_tangent_spectrum(const Spinor& a, const Spinor& b,
                                          const TwoSiteParams& p) {
  Problem prob;
  prob.two_site = true;
  prob.pair = p;
  const std::vector<Spinor> s = {a.normalized(), b.normalized()};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      tangent_hessian(s, prob, tangent_basis(s)));
  return es.eigenvalues();
}

double two_site_energy(const Spinor& a, const Spinor& b,
                       const TwoSiteParams& p) {
  ModelParams site_a{p.u_p, p.u_z, p.delta_a, 0.0};
  ModelParams site_b{p.u_p, p.u_z, -p.delta_a, 0.0};
  return classical_energy(a, site_a, ClassicalFunctional::base) +
         classical_energy(b, site_b, ClassicalFunctional::base) +
         p.lambda * std::norm(a.dot(b));
}

RestartOutcome local_two_site_minimize(const Spinor& a, const Spinor& b,
                                       const TwoSiteParams& p) {
  Problem prob;
  prob.two_site = true;
  prob.pair = p;
  return descend({a, b}, prob);
}

MinimizationResult two_site_minimize(const TwoSiteParams& p, int restarts,
                                     std::uint64_t seed) {
  if (restarts < 1) throw ConfigError("two_site_minimize: restarts must be >= 1");
  Problem prob;
  prob.two_site = true;
  prob.pair = p;

  std::vector<std::vector<Spinor>> starts;
  starts.reserve(restarts);
  // Warm start at the anti-aligned product ansatz; dominant-weight poles on
  // opposite hemispheres for both spin and pseudospin, phase sum pi.
  const double ratio =
      std::clamp(p.delta_a / (2.0 * p.u_z), -1.0, 1.0);
  const double alpha0 = std::acos(ratio);
  starts.push_back({compose({0.0, 0.0, 0.0, 0.0, alpha0, kPi / 2.0}),
                    compose({kPi, 0.0, kPi, 0.0, alpha0, kPi / 2.0})});
  std::mt19937_64 rng(seed);
  for (int i = 1; i < restarts; ++i) starts.push_back(random_state(2, rng));

  auto outcomes = run_restarts(starts, prob);
  double emin = outcomes[0].energy;
  for (const auto& o : outcomes) emin = std::min(emin, o.energy);
  // Degenerate branches tie at emin; prefer the anti-aligned structure.
  int best = -1;
  for (int i = 0; i < restarts; ++i)
    if (outcomes[i].energy <= emin + 1e-9 && anti_aligned(outcomes[i].spinors)) {
      best = i;
      break;
    }
  if (best < 0) {
    best = 0;
    for (int i = 1; i < restarts; ++i)
      if (outcomes[i].energy < outcomes[best].energy) best = i;
  }
  return assemble(std::move(outcomes), best, prob);
}

// ----- symplectic generator identity -----

namespace {

using Vec2c = Eigen::Vector2cd;

Spinor kron2(const Vec2c& s, const Vec2c& p) {
  return Spinor(s(0) * p(0), s(0) * p(1), s(1) * p(0), s(1) * p(1));
}

// Berry connection A_j = Im <psi|d_j psi> of the chart spinor, with analytic
// derivatives in the order theta_s, phi_s, theta_p, phi_p, alpha, beta.
Eigen::Matrix<double, 6, 1> chart_connection(const BlochCoordinates& c) {
  const cplx i(0.0, 1.0);
  const cplx eps = std::polar(1.0, c.phi_s);
  const cplx epp = std::polar(1.0, c.phi_p);
  const double hs = 0.5 * c.theta_s, hp = 0.5 * c.theta_p;
  const Vec2c up_s(std::cos(hs), eps * std::sin(hs));
  const Vec2c dn_s(-std::conj(eps) * std::sin(hs), std::cos(hs));
  const Vec2c up_p(std::cos(hp), epp * std::sin(hp));
  const Vec2c dn_p(-std::conj(epp) * std::sin(hp), std::cos(hp));
  const Vec2c dup_s_dt(-0.5 * std::sin(hs), 0.5 * eps * std::cos(hs));
  const Vec2c ddn_s_dt(-0.5 * std::conj(eps) * std::cos(hs),
                       -0.5 * std::sin(hs));
  const Vec2c dup_s_dp(0.0, i * eps * std::sin(hs));
  const Vec2c ddn_s_dp(i * std::conj(eps) * std::sin(hs), 0.0);
  const Vec2c dup_p_dt(-0.5 * std::sin(hp), 0.5 * epp * std::cos(hp));
  const Vec2c ddn_p_dt(-0.5 * std::conj(epp) * std::cos(hp),
                       -0.5 * std::sin(hp));
  const Vec2c dup_p_dp(0.0, i * epp * std::sin(hp));
  const Vec2c ddn_p_dp(i * std::conj(epp) * std::sin(hp), 0.0);

  const double ca = std::cos(0.5 * c.alpha), sa = std::sin(0.5 * c.alpha);
  const cplx eb = std::polar(1.0, c.beta);
  const Spinor psi = ca * kron2(up_s, up_p) + eb * sa * kron2(dn_s, dn_p);
  std::array<Spinor, 6> dpsi = {
      ca * kron2(dup_s_dt, up_p) + eb * sa * kron2(ddn_s_dt, dn_p),
      ca * kron2(dup_s_dp, up_p) + eb * sa * kron2(ddn_s_dp, dn_p),
      ca * kron2(up_s, dup_p_dt) + eb * sa * kron2(dn_s, ddn_p_dt),
      ca * kron2(up_s, dup_p_dp) + eb * sa * kron2(dn_s, ddn_p_dp),
      -0.5 * sa * kron2(up_s, up_p) + 0.5 * ca * eb * kron2(dn_s, dn_p),
      i * eb * sa * kron2(dn_s, dn_p)};
  Eigen::Matrix<double, 6, 1> a;
  for (int j = 0; j < 6; ++j) a(j) = psi.dot(dpsi[j]).imag();
  return a;
}

BlochCoordinates shifted(const BlochCoordinates& c, int j, double h) {
  BlochCoordinates out = c;
  double* fields[6] = {&out.theta_s, &out.phi_s, &out.theta_p,
                       &out.phi_p,   &out.alpha, &out.beta};
  *fields[j] += h;
  return out;
}

}  // namespace

SymplecticCheck symplectic_generator_check(const BlochCoordinates& point,
                                           double h) {
  if (std::abs(std::sin(point.alpha)) < 1e-3 ||
      std::abs(std::sin(point.theta_s)) < 1e-3 ||
      std::abs(std::sin(point.theta_p)) < 1e-3)
    throw std::invalid_argument(
        "symplectic_generator_check: point too close to a chart singularity");
  Eigen::Matrix<double, 6, 6> grad_a;
  for (int j = 0; j < 6; ++j) {
    const auto ap = chart_connection(shifted(point, j, h));
    const auto am = chart_connection(shifted(point, j, -h));
    grad_a.row(j) = ((ap - am) / (2.0 * h)).transpose();
  }
  SymplecticCheck check;
  check.omega = grad_a - grad_a.transpose();
  check.contraction = check.omega.col(5);
  check.d_generator.setZero();
  check.d_generator(4) = 0.5 * std::sin(point.alpha);
  check.residual = (check.contraction - check.d_generator).norm();
  return check;
}

// ----- disc textures -----

double TextureGrid::r_node(int k) const { return (k + 0.5) * radius / n_r; }

double TextureGrid::phi_node(int l) const { return 2.0 * kPi * l / n_phi; }

double TextureGrid::boundary_max() const {
  double top = 0.0;
  for (int l = 0; l < n_phi; ++l) {
    const std::size_t id = index(n_r - 1, l);
    top = std::max({top, std::abs(theta_s[id]), std::abs(theta_p[id]),
                    std::abs(alpha[id])});
  }
  return top;
}

TextureGrid make_texture(int n_r, int n_phi, double radius,
                         const TextureField& field) {
  if (n_r < 3 || n_phi < 3 || radius <= 0.0)
    throw ConfigError("make_texture: need n_r >= 3, n_phi >= 3, radius > 0");
  TextureGrid grid;
  grid.radius = radius;
  grid.n_r = n_r;
  grid.n_phi = n_phi;
  const std::size_t total = static_cast<std::size_t>(n_r) * n_phi;
  grid.theta_s.resize(total);
  grid.phi_s.resize(total);
  grid.theta_p.resize(total);
  grid.phi_p.resize(total);
  grid.alpha.resize(total);
  grid.beta.resize(total);
  for (int k = 0; k < n_r; ++k)
    for (int l = 0; l < n_phi; ++l) {
      const auto f = field(grid.r_node(k), grid.phi_node(l));
      const std::size_t id = grid.index(k, l);
      grid.theta_s[id] = f[0];
      grid.phi_s[id] = f[1];
      grid.theta_p[id] = f[2];
      grid.phi_p[id] = f[3];
      grid.alpha[id] = f[4];
      grid.beta[id] = f[5];
    }
  return grid;
}

void write_texture_csv(const TextureGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("write_texture_csv: cannot open " + path);
  out << "r,phi,theta_S,phi_S,theta_P,phi_P,alpha,beta\n";
  char row[256];
  for (int k = 0; k < grid.n_r; ++k)
    for (int l = 0; l < grid.n_phi; ++l) {
      const std::size_t id = grid.index(k, l);
      std::snprintf(row, sizeof(row),
                    "%.11e,%.11e,%.11e,%.11e,%.11e,%.11e,%.11e,%.11e\n",
                    grid.r_node(k), grid.phi_node(l), grid.theta_s[id],
                    grid.phi_s[id], grid.theta_p[id], grid.phi_p[id],
                    grid.alpha[id], grid.beta[id]);
      out << row;
    }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

TextureGrid read_texture_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("read_texture_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw ConfigError("read_texture_csv: empty file " + path);
  const std::vector<std::string> expect = {"r",       "phi",   "theta_S",
                                           "phi_S",   "theta_P", "phi_P",
                                           "alpha",   "beta"};
  if (split_csv(line) != expect)
    throw ConfigError(
        "read_texture_csv: header must be r,phi,theta_S,phi_S,theta_P,phi_P,"
        "alpha,beta");
  std::vector<std::array<double, 8>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv(line);
    if (cells.size() != 8)
      throw ConfigError("read_texture_csv: row with " +
                        std::to_string(cells.size()) + " columns");
    std::array<double, 8> row;
    for (int j = 0; j < 8; ++j) {
      std::size_t used = 0;
      try {
        row[j] = std::stod(cells[j], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cells[j].size() || cells[j].empty())
        throw ConfigError("read_texture_csv: bad number '" + cells[j] + "'");
    }
    rows.push_back(row);
  }
  if (rows.empty()) throw ConfigError("read_texture_csv: no data rows");

  auto collect_axis = [](std::vector<double> vals, double merge_tol) {
    std::sort(vals.begin(), vals.end());
    std::vector<double> axis;
    for (double v : vals)
      if (axis.empty() || v - axis.back() > merge_tol) axis.push_back(v);
    return axis;
  };
  std::vector<double> rs, ps;
  rs.reserve(rows.size());
  ps.reserve(rows.size());
  for (const auto& row : rows) {
    rs.push_back(row[0]);
    ps.push_back(row[1]);
  }
  const double r_scale = *std::max_element(rs.begin(), rs.end());
  const auto r_axis = collect_axis(rs, 1e-9 * std::max(1.0, r_scale));
  const auto p_axis = collect_axis(ps, 1e-9);
  const int n_r = static_cast<int>(r_axis.size());
  const int n_phi = static_cast<int>(p_axis.size());
  if (n_r < 3 || n_phi < 3)
    throw ConfigError("read_texture_csv: grid too coarse (need 3x3 nodes)");
  if (rows.size() != static_cast<std::size_t>(n_r) * n_phi)
    throw ConfigError("read_texture_csv: incomplete polar grid");

  const double dr = n_r > 1 ? r_axis[1] - r_axis[0] : 2.0 * r_axis[0];
  const double dp = 2.0 * kPi / n_phi;
  for (int k = 0; k < n_r; ++k)
    if (std::abs(r_axis[k] - (k + 0.5) * dr) > 1e-6 * dr)
      throw ConfigError("read_texture_csv: radial nodes not at midpoints");
  for (int l = 0; l < n_phi; ++l)
    if (std::abs(p_axis[l] - l * dp) > 1e-6 * dp)
      throw ConfigError("read_texture_csv: azimuthal nodes not uniform");

  TextureGrid grid;
  grid.radius = n_r * dr;
  grid.n_r = n_r;
  grid.n_phi = n_phi;
  const std::size_t total = rows.size();
  grid.theta_s.resize(total);
  grid.phi_s.resize(total);
  grid.theta_p.resize(total);
  grid.phi_p.resize(total);
  grid.alpha.resize(total);
  grid.beta.resize(total);
  std::vector<int> seen(total, 0);
  for (const auto& row : rows) {
    const int k =
        static_cast<int>(std::llround(row[0] / dr - 0.5));
    const int l = static_cast<int>(std::llround(row[1] / dp));
    if (k < 0 || k >= n_r || l < 0 || l >= n_phi ||
        std::abs(row[0] - (k + 0.5) * dr) > 1e-6 * dr ||
        std::abs(row[1] - l * dp) > 1e-6 * dp)
      throw ConfigError("read_texture_csv: node off the uniform grid");
    const std::size_t id = grid.index(k, l);
    if (seen[id]++)
      throw ConfigError("read_texture_csv: duplicate grid node");
    grid.theta_s[id] = row[2];
    grid.phi_s[id] = row[3];
    grid.theta_p[id] = row[4];
    grid.phi_p[id] = row[5];
    grid.alpha[id] = row[6];
    grid.beta[id] = row[7];
  }
  return grid;
}

// ----- phase-obstruction quadrature -----

namespace {

// Angle fields are stored on the circle; increments are wrapped to (-pi, pi]
// so azimuth-winding textures difference correctly across the 0/2pi seam.
double wrap_angle(double d) {
  d = std::remainder(d, 2.0 * kPi);
  return d <= -kPi ? d + 2.0 * kPi : d;
}

struct SubLattice {
  int nk = 0, nl = 0;
  double hr = 0.0, hp = 0.0;
  std::vector<double> r;                     // per radial row
  std::vector<const std::vector<double>*> f;  // six fields
  std::vector<std::size_t> ids;              // source index per (kk, ll)

  double at(int field, int kk, int ll) const {
    return (*f[field])[ids[static_cast<std::size_t>(kk) * nl + ll]];
  }
};

SubLattice make_sublattice(const TextureGrid& g, int stride, int k0) {
  SubLattice s;
  s.nk = (g.n_r - k0 + stride - 1) / stride;
  s.nl = g.n_phi / stride;
  s.hr = stride * g.radius / g.n_r;
  s.hp = stride * 2.0 * kPi / g.n_phi;
  for (int kk = 0; kk < s.nk; ++kk) s.r.push_back(g.r_node(k0 + kk * stride));
  s.f = {&g.theta_s, &g.phi_s, &g.theta_p, &g.phi_p, &g.alpha, &g.beta};
  s.ids.reserve(static_cast<std::size_t>(s.nk) * s.nl);
  for (int kk = 0; kk < s.nk; ++kk)
    for (int ll = 0; ll < s.nl; ++ll)
      s.ids.push_back(g.index(k0 + kk * stride, ll * stride));
  return s;
}

// Radial derivative of one field over the sub-lattice: wrapped central
// differences inside, one-sided second order at the edges.
std::vector<double> d_dr(const SubLattice& s, int field) {
  std::vector<double> out(static_cast<std::size_t>(s.nk) * s.nl);
  for (int ll = 0; ll < s.nl; ++ll) {
    for (int kk = 0; kk < s.nk; ++kk) {
      double v;
      if (kk == 0) {
        const double d0 = wrap_angle(s.at(field, 1, ll) - s.at(field, 0, ll));
        const double d1 = wrap_angle(s.at(field, 2, ll) - s.at(field, 1, ll));
        v = (3.0 * d0 - d1) / (2.0 * s.hr);
      } else if (kk == s.nk - 1) {
        const double d0 =
            wrap_angle(s.at(field, kk, ll) - s.at(field, kk - 1, ll));
        const double d1 =
            wrap_angle(s.at(field, kk - 1, ll) - s.at(field, kk - 2, ll));
        v = (3.0 * d0 - d1) / (2.0 * s.hr);
      } else {
        const double fw =
            wrap_angle(s.at(field, kk + 1, ll) - s.at(field, kk, ll));
        const double bw =
            wrap_angle(s.at(field, kk, ll) - s.at(field, kk - 1, ll));
        v = (fw + bw) / (2.0 * s.hr);
      }
      out[static_cast<std::size_t>(kk) * s.nl + ll] = v;
    }
  }
  return out;
}

std::vector<double> d_dphi(const SubLattice& s, int field) {
  std::vector<double> out(static_cast<std::size_t>(s.nk) * s.nl);
  for (int kk = 0; kk < s.nk; ++kk)
    for (int ll = 0; ll < s.nl; ++ll) {
      const int lp = (ll + 1) % s.nl;
      const int lm = (ll + s.nl - 1) % s.nl;
      const double fw = wrap_angle(s.at(field, kk, lp) - s.at(field, kk, ll));
      const double bw = wrap_angle(s.at(field, kk, ll) - s.at(field, kk, lm));
      out[static_cast<std::size_t>(kk) * s.nl + ll] = (fw + bw) / (2.0 * s.hp);
    }
  return out;
}

void accumulate_z(const SubLattice& s, double& re, double& im) {
  enum { kThS = 0, kPhS = 1, kThP = 2, kPhP = 3, kAl = 4, kBe = 5 };
  const auto dts_r = d_dr(s, kThS), dts_p = d_dphi(s, kThS);
  const auto dps_r = d_dr(s, kPhS), dps_p = d_dphi(s, kPhS);
  const auto dtp_r = d_dr(s, kThP), dtp_p = d_dphi(s, kThP);
  const auto dpp_r = d_dr(s, kPhP), dpp_p = d_dphi(s, kPhP);
  re = 0.0;
  im = 0.0;
  for (int kk = 0; kk < s.nk; ++kk) {
    const double r = s.r[kk];
    const double w = r * s.hr * s.hp;
    const double inv_r2 = 1.0 / (r * r);
    for (int ll = 0; ll < s.nl; ++ll) {
      const std::size_t id = static_cast<std::size_t>(kk) * s.nl + ll;
      const auto dot = [&](const std::vector<double>& ar,
                           const std::vector<double>& ap,
                           const std::vector<double>& br,
                           const std::vector<double>& bp) {
        return ar[id] * br[id] + inv_r2 * ap[id] * bp[id];
      };
      const double ts = s.at(kThS, kk, ll);
      const double tp = s.at(kThP, kk, ll);
      const double b1 = std::sin(ts) * std::sin(tp) *
                            dot(dpp_r, dpp_p, dps_r, dps_p) -
                        dot(dtp_r, dtp_p, dts_r, dts_p);
      const double b2 =
          std::sin(ts) * dot(dps_r, dps_p, dtp_r, dtp_p) +
          std::sin(tp) * dot(dpp_r, dpp_p, dts_r, dts_p);
      const double bp = s.at(kBe, kk, ll) - s.at(kPhP, kk, ll) -
                        s.at(kPhS, kk, ll);
      const double sa = std::sin(s.at(kAl, kk, ll));
      re += (b1 * std::cos(bp) + b2 * std::sin(bp)) * sa * w;
      im += (b1 * std::sin(bp) - b2 * std::cos(bp)) * sa * w;
    }
  }
}

}  // namespace

ZIntegralResult skyrmion_z_integral(const TextureGrid& texture) {
  if (texture.n_r < 3 || texture.n_phi < 3)
    throw ConfigError("skyrmion_z_integral: texture grid too coarse");
  ZIntegralResult result;
  const SubLattice full = make_sublattice(texture, 1, 0);
  accumulate_z(full, result.re_z, result.im_z);
  if (texture.n_r >= 6 && texture.n_phi >= 6 && texture.n_r % 2 == 0 &&
      texture.n_phi % 2 == 0) {
    const SubLattice half = make_sublattice(texture, 2, 1);
    double re_h = 0.0, im_h = 0.0;
    accumulate_z(half, re_h, im_h);
    result.error_estimate = std::max(std::abs(result.re_z - re_h),
                                     std::abs(result.im_z - im_h));
  } else {
    result.error_estimate = std::numeric_limits<double>::infinity();
  }
  result.refined = result.error_estimate < kRefinedTol;
  result.boundary_ok = texture.boundary_max() < kBoundaryTol;
  return result;
}

}  // namespace emon
