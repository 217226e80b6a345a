// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure.  Tolerances are pinned here, next to the checks they guard.

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "emon/berezin.hpp"
#include "emon/classical.hpp"
#include "emon/coherent.hpp"
#include "emon/fockspace.hpp"
#include "emon/hardware.hpp"
#include "emon/models.hpp"
#include "emon/noise.hpp"
#include "emon/spectra.hpp"

namespace fs = std::filesystem;
using namespace emon;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Gate {
  int failures = 0;

  void check(int num, const std::string& label, bool ok,
             const std::string& detail) {
    std::printf("%s criterion-%02d %s: %s\n", ok ? "PASS" : "FAIL", num,
                label.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

Spinor random_spinor(std::mt19937& rng) {
  std::normal_distribution<double> gauss;
  Spinor psi;
  for (int i = 0; i < 4; ++i) psi(i) = cplx(gauss(rng), gauss(rng));
  return psi / psi.norm();
}

// ----- criterion 1: basis dimensions -----

void criterion_dimensions(Gate& gate) {
  bool ok = true;
  for (std::int64_t d = 1; d <= 12; ++d) {
    const std::size_t want =
        static_cast<std::size_t>((d + 3) * (d + 2) * (d + 1) / 6);
    if (FockBasis::enumerate(4, d).dim() != want) ok = false;
    if (FockBasis::dimension(4, d) != want) ok = false;
  }
  for (int n = 1; n <= 4; ++n) {
    for (std::int64_t d = 1; d <= 6; ++d) {
      std::size_t want = 1;  // C(n + d, d) via the multiplicative formula
      for (std::int64_t k = 1; k <= n; ++k)
        want = want * static_cast<std::size_t>(d + k) / static_cast<std::size_t>(k);
      if (FockBasis::enumerate(n + 1, d).dim() != want) ok = false;
    }
  }
  gate.check(1, "basis dimension counting", ok,
             "closed forms match enumeration for m=4, d=1..12 and "
             "(n,d) in {1..4}x{1..6}");
}

// ----- criterion 2: charge selection rule -----

void criterion_selection_rule(Gate& gate) {
  const ModelParams p{2.0, 0.7, 1.0, 0.0};
  const FockBasis basis = FockBasis::enumerate(4, 4);
  const NoiseReport r = noise_report(build_hq0(basis, p), basis, p,
                                     DoubletPolicy::charge_restricted);
  const double depol = max_depolarization(r);
  const double deph = max_dephasing(r);
  const double dq1 = std::abs(r.labels0.q1 - r.labels1.q1);
  const bool ok = depol < 1e-12 && deph > 1e-3 && std::abs(dq1 - 2.0) < 1e-6 &&
                  std::abs(r.labels0.q2) < 1e-9 && std::abs(r.labels1.q2) < 1e-9;
  gate.check(2, "charge selection rule", ok,
             "depol_max=" + fmt(depol) + " deph_max=" + fmt(deph) +
                 " |dq1|=" + fmt(dq1));
}

// ----- criterion 3: semiclassical branch agreement -----

void criterion_semiclassical(Gate& gate) {
  const ModelParams p{2.0, 0.7, 1.0, 0.0};
  std::vector<double> rel_devs;
  for (std::int64_t d : {6, 12, 24}) {
    std::vector<std::int64_t> q1_list;
    for (std::int64_t q1 = -d; q1 <= d; ++q1)
      if ((d - q1) % 2 == 0) q1_list.push_back(q1);
    const auto rows = semiclassical_spectrum(p, d, q1_list);
    const auto best = std::min_element(
        rows.begin(), rows.end(),
        [](const auto& a, const auto& b) { return a.e_top < b.e_top; });
    std::map<std::int64_t, BranchRow> branch;
    for (const auto& row : charge_branch(FockBasis::enumerate(4, d), p))
      branch[row.q1] = row;
    const BranchRow& b = branch.at(best->q1);
    rel_devs.push_back(std::abs(b.e_exact - best->e_top) /
                       std::abs(b.e_exact));
  }
  const bool decreasing = rel_devs[0] > rel_devs[1] && rel_devs[1] > rel_devs[2];
  const double q1_min = semiclassical_minimum_q1(p, 4);
  const bool formula = q1_min == p.delta * 4.0 / (2.0 * p.u_z) &&
                       q1_min > 2.0 && q1_min < 3.0;
  gate.check(3, "semiclassical branch agreement", decreasing && formula,
             "rel_dev(d=6,12,24)=" + fmt(rel_devs[0]) + "," + fmt(rel_devs[1]) +
                 "," + fmt(rel_devs[2]) + " q1_min=" + fmt(q1_min));
}

// ----- criterion 4: conserved structure -----

void criterion_conservation(Gate& gate) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coupling(0.2, 3.0);
  std::uniform_real_distribution<double> field(0.0, 2.0);
  std::uniform_int_distribution<std::int64_t> d_draw(2, 8);
  double worst = 0.0;
  bool parity_ok = true;
  for (int trial = 0; trial < 20; ++trial) {
    const ModelParams p{coupling(rng), coupling(rng), field(rng), field(rng)};
    const std::int64_t d = d_draw(rng);
    const FockBasis basis = FockBasis::enumerate(4, d);
    const CooMatrix h0 = build_hq0(basis, p);
    const CooMatrix h1 = build_hq1(basis, p);
    const CooMatrix q1 = charge_q1(basis);
    const CooMatrix q2 = charge_q2(basis);
    worst = std::max(worst, commutator_residual(h0, q1));
    worst = std::max(worst, commutator_residual(h0, q2));
    worst = std::max(worst, commutator_residual(h1, parity_pi(basis)));
    for (const auto& sector :
         sector_decompose(h0, basis, {{"q1", q1}, {"q2", q2}}))
      if (((d + sector.labels[1]) - sector.labels[0]) % 2 != 0)
        parity_ok = false;
  }
  gate.check(4, "conserved charges and parity rule", worst < 1e-12 && parity_ok,
             "worst commutator residual=" + fmt(worst) + " over 20 draws");
}

// ----- criterion 5: calibrated double-well protection -----

void criterion_z2_protection(Gate& gate) {
  const ModelParams fx = z2_fixture();
  const std::vector<std::int64_t> ds = {4, 6, 8, 10};
  bool opposite = true, depol_ok = true, gaps_dec = true, deph_dec = true;
  double prev_gap = 0.0, prev_deph = 0.0;
  for (std::size_t k = 0; k < ds.size(); ++k) {
    const FockBasis basis = FockBasis::enumerate(4, ds[k]);
    const NoiseReport r = noise_report(build_hq1(basis, fx), basis, fx,
                                       DoubletPolicy::parity_resolved);
    if (r.labels0.parity * r.labels1.parity > -0.5) opposite = false;
    if (max_depolarization(r) >= 1e-12) depol_ok = false;
    if (k > 0 && r.gap01 >= prev_gap) gaps_dec = false;
    if (k > 0 && max_dephasing(r) >= prev_deph) deph_dec = false;
    prev_gap = r.gap01;
    prev_deph = max_dephasing(r);
  }
  const GapFit fit = fit_log_gap(sweep_d(ModelKind::hq1, fx, ds, 1));
  const bool ok = opposite && depol_ok && gaps_dec && deph_dec && fit.r2 >= 0.9;
  gate.check(5, "calibrated double-well protection", ok,
             "v=" + fmt(fx.v) + " fit r2=" + fmt(fit.r2) +
                 (opposite ? "" : " [same-parity doublet]") +
                 (depol_ok ? "" : " [depolarization leak]") +
                 (gaps_dec ? "" : " [gap not decreasing]") +
                 (deph_dec ? "" : " [dephasing not decreasing]"));
}

// ----- criterion 6: coherent-state exactness -----

void criterion_coherent(Gate& gate) {
  std::mt19937 rng(17);
  double worst = 0.0;
  for (int trial = 0; trial < 2; ++trial) {
    const Spinor psi = random_spinor(rng);
    for (std::int64_t d : {2, 5, 8}) {
      const FockBasis basis = FockBasis::enumerate(4, d);
      const Eigen::VectorXcd cs = coherent_state(psi, basis);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          const cplx got = ladder_bilinear(basis, i, j).matrix_element(cs, cs);
          const cplx want =
              static_cast<double>(d) * std::conj(psi[i]) * psi[j];
          worst = std::max(worst, std::abs(got - want));
        }
    }
  }
  const Spinor probe = compose({0.9, 0.4, 1.3, 2.1, 0.8, 0.6});
  const auto rows =
      covariant_symbol_check(ModelParams{2.0, 0.7, 1.0, 0.0}, probe, {4, 8, 16});
  const double r48 = rows[0].deviation / rows[1].deviation;
  const double r816 = rows[1].deviation / rows[2].deviation;
  const bool halving = r48 > 2.0 / 1.5 && r48 < 2.0 * 1.5 &&
                       r816 > 2.0 / 1.5 && r816 < 2.0 * 1.5;
  gate.check(6, "coherent-state exactness", worst < 1e-10 && halving,
             "bilinear worst=" + fmt(worst) + " halving ratios=" + fmt(r48) +
                 "," + fmt(r816));
}

// ----- criterion 7: geometric phase -----

void criterion_berry(Gate& gate) {
  double worst = 0.0;
  for (const auto& [d, alpha] : std::vector<std::pair<std::int64_t, double>>{
           {3, kPi / 2.0}, {4, kPi / 3.0}, {5, 1.0}})
    worst = std::max(worst, berry_phase_loop(alpha, d, 2000).deviation);
  gate.check(7, "geometric phase around the relative-phase loop", worst < 1e-3,
             "worst wrapped deviation=" + fmt(worst) + " at 2000 steps");
}

// ----- criterion 8: quantization dictionary -----

void criterion_dictionary(Gate& gate) {
  const int n = 3;
  const std::vector<std::int64_t> ds = {2, 4, 8, 16};
  bool shrinking = true;
  const std::vector<MonomialSymbol> table = {
      sym_v(1), sym_vbar(2), sym_v_vbar(1, 2), sym_vv(1, 2),
      sym_vbar_vbar(2, 3)};
  for (const auto& sym : table) {
    const auto checks = validate_dictionary(sym, n, ds, 5, 29);
    for (std::size_t k = 1; k < checks.size(); ++k)
      if (checks[k].max_deviation >= checks[k - 1].max_deviation)
        shrinking = false;
  }
  double adjoint_err = 0.0;
  for (const auto& sym : table) {
    const Eigen::MatrixXcd a = quantize_monomial(sym, n, 3).dense();
    const Eigen::MatrixXcd b = quantize_monomial(conjugate(sym), n, 3).dense();
    adjoint_err = std::max(adjoint_err, max_abs(b - a.adjoint()));
  }
  SymbolSum sum;
  sum.push_back({cplx(0.75, -0.25), sym_v(1)});
  sum.push_back({cplx(2.0, 0.0), sym_vbar_vbar(1, 2)});
  const double linear_err =
      max_abs(quantize_sum(sum, 2, 2).dense() -
              (cplx(0.75, -0.25) * quantize_monomial(sym_v(1), 2, 2).dense() +
               cplx(2.0, 0.0) *
                   quantize_monomial(sym_vbar_vbar(1, 2), 2, 2).dense()));
  const bool ok = shrinking && adjoint_err < 1e-14 && linear_err < 1e-14;
  gate.check(8, "quantization dictionary", ok,
             "deviations shrink over d=2,4,8,16; adjoint err=" +
                 fmt(adjoint_err) + " linearity err=" + fmt(linear_err));
}

// ----- criterion 9: classical minimization -----

void criterion_classical(Gate& gate) {
  const double u_z = 0.7, delta = 0.5;
  const ModelParams base{2.0, u_z, delta, 0.0};
  const auto res = minimize_cp3(base, ClassicalFunctional::base, 16, 2);
  const double e_err = std::abs(res.energy + delta * delta / (4.0 * u_z));
  const double cos_alpha =
      std::cos(schmidt_decompose(snap_spinor(res.spinors[0])).angles.alpha);
  const double a_err = std::abs(cos_alpha - delta / (2.0 * u_z));

  // doubly degenerate well pair separated by a half turn of the phase
  const ModelParams z2{2.0, u_z, delta, 0.5};
  const auto zres = minimize_cp3(z2, ClassicalFunctional::z2, 40, 3);
  std::vector<double> betas;
  double e_lo = zres.energy, e_hi = zres.energy;
  for (const auto& r : zres.restarts) {
    if (!r.converged || r.energy > zres.energy + 1e-8) continue;
    e_lo = std::min(e_lo, r.energy);
    e_hi = std::max(e_hi, r.energy);
    const double beta =
        schmidt_decompose(snap_spinor(r.spinors[0])).angles.beta;
    bool seen = false;
    for (double b : betas)
      if (std::abs(b - beta) < 1e-3) seen = true;
    if (!seen) betas.push_back(beta);
  }
  bool pair = betas.size() == 2;
  double dbeta = 0.0;
  if (pair) {
    dbeta = std::abs(betas[0] - betas[1]);
    dbeta = std::min(dbeta, 2.0 * kPi - dbeta);
    pair = std::abs(dbeta - kPi) < 1e-4;
  }
  const double split = e_hi - e_lo;

  const TwoSiteParams tp{2.0, u_z, delta, 1.0};
  const auto tres = two_site_minimize(tp, 16, 4);
  const double beta_a =
      schmidt_decompose(snap_spinor(tres.spinors[0])).angles.beta;
  const double beta_b =
      schmidt_decompose(snap_spinor(tres.spinors[1])).angles.beta;
  double beta_sum = std::fmod(beta_a + beta_b, 2.0 * kPi);
  if (beta_sum < 0.0) beta_sum += 2.0 * kPi;

  const bool ok = res.converged && e_err < 1e-6 && a_err < 1e-6 && pair &&
                  split < 1e-9 && tres.converged &&
                  std::abs(beta_sum - kPi) < 1e-5 && tres.zero_modes == 1;
  gate.check(9, "classical minimization", ok,
             "e_err=" + fmt(e_err) + " cos_err=" + fmt(a_err) + " wells=" +
                 std::to_string(betas.size()) + " dbeta=" + fmt(dbeta) +
                 " split=" + fmt(split) + " beta_sum=" + fmt(beta_sum) +
                 " zero_modes=" + std::to_string(tres.zero_modes));
}

// ----- criterion 10: hardware probes -----

void criterion_hardware(Gate& gate) {
  bool order_ok = true;
  for (int n : {2, 3, 4}) {
    const int slots = 2 * n;
    CooMatrix v = CooMatrix::zero(std::int64_t{1} << slots);
    for (int i = 0; i < n; ++i)
      v = v + pauli_word_matrix(
                  pauli_letter(slots, ladder_slot(i, false), 'X'));
    const auto k = noise_order_probe(v, ladder_tplus(n), ladder_tminus(n), 2 * n);
    if (!k || *k != n) order_ok = false;
  }

  const LadderParams lp{2, 1.0, 1.0};
  const std::vector<double> eps = {0.01, 0.02, 0.04};
  const CooMatrix paired =
      pauli_word_matrix(pauli_letter(4, ladder_slot(0, false), 'Z')) +
      pauli_word_matrix(pauli_letter(4, ladder_slot(0, true), 'Z'));
  const double exp_z = dephasing_scaling_probe(lp, eps, paired).exponent;
  const double exp_tau =
      dephasing_scaling_probe(lp, eps, tau_operator(2, 0)).exponent;
  const bool deph_ok =
      std::abs(exp_z - 2.0) < 0.1 && std::abs(exp_tau - 1.0) < 0.05;

  IonModelParams ip;
  ip.n = 2;
  ip.nu = 0.3;
  const CooMatrix ion = build_ion_interaction(ip);
  EigOptions opts;
  opts.k = 6;
  const EigResult eig = eig_hermitian(ion, opts);
  double overlap0 = 0.0, overlap_pi = 0.0;
  for (int m = 0; m < eig.values.size(); ++m) {
    if (eig.values(m) > eig.values(0) + 1e-9) break;
    const Eigen::VectorXcd g = eig.vectors.col(m);
    overlap0 += std::norm(g.dot(ion_beta_product(2, 0.0)));
    overlap_pi += std::norm(g.dot(ion_beta_product(2, kPi)));
  }
  const bool ion_ok =
      std::sqrt(overlap0) > 0.999 && std::sqrt(overlap_pi) > 0.999;

  gate.check(10, "hardware probes", order_ok && deph_ok && ion_ok,
             "noise order k=N for N=2,3,4: " +
                 std::string(order_ok ? "yes" : "no") + "; exponents=" +
                 fmt(exp_z) + "," + fmt(exp_tau) + "; ion overlaps=" +
                 fmt(std::sqrt(overlap0)) + "," + fmt(std::sqrt(overlap_pi)));
}

// ----- criterion 11: texture obstruction integrals -----

void criterion_skyrmion(Gate& gate) {
  const auto hedgehog = [](double r, double phi) {
    const double f = 2.0 * std::atan((1.0 / 6.0) / r);
    return std::array<double, 6>{f, phi, f, phi, f, 2.0 * phi + 0.8};
  };
  const auto asym = [](double r, double phi) {
    const double w = (1.0 - r * r) * (1.0 - r * r);
    return std::array<double, 6>{kPi * w * r, 0.0, 2.0 * w * r, 0.0,
                                 1.5 * w * r, 0.6 + 0.4 * std::sin(phi)};
  };
  const ZIntegralResult sym =
      skyrmion_z_integral(make_texture(128, 128, 1.0, hedgehog));
  const bool sym_ok = std::abs(sym.re_z) < sym.error_estimate &&
                      std::abs(sym.im_z) < sym.error_estimate;
  const ZIntegralResult a160 =
      skyrmion_z_integral(make_texture(160, 160, 1.0, asym));
  const bool asym_ok =
      std::max(std::abs(a160.re_z), std::abs(a160.im_z)) > 1e-3;
  const ZIntegralResult a80 =
      skyrmion_z_integral(make_texture(80, 80, 1.0, asym));
  const double ratio = a80.error_estimate / a160.error_estimate;
  const bool order2 = ratio > 3.3 && ratio < 4.7;
  gate.check(11, "texture obstruction integrals", sym_ok && asym_ok && order2,
             "symmetric |z|<" + fmt(sym.error_estimate) + "; asymmetric |z|=" +
                 fmt(std::max(std::abs(a160.re_z), std::abs(a160.im_z))) +
                 "; halving ratio=" + fmt(ratio));
}

// ----- criterion 12: CLI determinism -----

int run_cli(const std::string& emon, const std::string& args) {
  const std::string cmd = emon + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> stable_lines(const fs::path& file) {
  std::ifstream in(file);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line))
    if (line.find("generated_at") == std::string::npos &&
        line.find("\"output\"") == std::string::npos)
      out.push_back(line);
  return out;
}

void criterion_determinism(Gate& gate, const std::string& emon) {
  const std::vector<std::string> commands = {
      "basis --d 6",
      "spectrum --model hq1 --d 6 --delta 0.5 --v 0.5",
      "semiclassical --d 8 --compare",
      "noise-report --model hq1 --delta 0.5 --v 0.5 --d 6",
      "sweep-d --model hq1 --d 4,6",
      "coherent-check --d-list 2,4",
      "berry --steps 64",
      "quantize --d-list 2,4 --samples 3",
      "classical-min --functional z2 --delta 0.5 --v 0.5 --restarts 6",
      "two-site --restarts 6",
      "symplectic-check",
      "skyrmion-check --demo asymmetric --n 24",
      "hardware-heff --n 2",
      "hardware-ion --n 2 --nu 0.3",
      "hardware-noise-order --n 2",
      "hardware-dephasing --n 2 --probe tau",
  };
  const fs::path root =
      fs::temp_directory_path() / ("emon_acceptance_" + std::to_string(getpid()));
  fs::remove_all(root);
  bool ok = true;
  std::string first_diff;
  for (std::size_t k = 0; k < commands.size(); ++k) {
    const fs::path a = root / ("a" + std::to_string(k));
    const fs::path b = root / ("b" + std::to_string(k));
    const std::string common = " --seed 9 --jobs 1 " + commands[k];
    if (run_cli(emon, "--output " + a.string() + common) != 0 ||
        run_cli(emon, "--output " + b.string() + common) != 0) {
      ok = false;
      if (first_diff.empty()) first_diff = commands[k] + " [nonzero exit]";
      continue;
    }
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(a))
      names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end());
    if (names.empty()) {
      ok = false;
      if (first_diff.empty()) first_diff = commands[k] + " [no artifacts]";
    }
    for (const auto& name : names)
      if (stable_lines(a / name) != stable_lines(b / name)) {
        ok = false;
        if (first_diff.empty()) first_diff = commands[k] + " [" + name + "]";
      }
  }
  fs::remove_all(root);
  gate.check(12, "command-line determinism", ok,
             ok ? "all " + std::to_string(commands.size()) +
                      " commands reproduce byte-identical data sections"
                : "first mismatch: " + first_diff);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance_primary <emon binary>\n");
    return 2;
  }
  const std::string emon = argv[1];
  Gate gate;
  const auto guard = [&gate](int num, const std::string& label, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      gate.check(num, label, false, std::string("exception: ") + e.what());
    }
  };
  guard(1, "basis dimension counting", [&] { criterion_dimensions(gate); });
  guard(2, "charge selection rule", [&] { criterion_selection_rule(gate); });
  guard(3, "semiclassical branch agreement",
        [&] { criterion_semiclassical(gate); });
  guard(4, "conserved charges and parity rule",
        [&] { criterion_conservation(gate); });
  guard(5, "calibrated double-well protection",
        [&] { criterion_z2_protection(gate); });
  guard(6, "coherent-state exactness", [&] { criterion_coherent(gate); });
  guard(7, "geometric phase around the relative-phase loop",
        [&] { criterion_berry(gate); });
  guard(8, "quantization dictionary", [&] { criterion_dictionary(gate); });
  guard(9, "classical minimization", [&] { criterion_classical(gate); });
  guard(10, "hardware probes", [&] { criterion_hardware(gate); });
  guard(11, "texture obstruction integrals", [&] { criterion_skyrmion(gate); });
  guard(12, "command-line determinism",
        [&] { criterion_determinism(gate, emon); });
  if (gate.failures == 0) {
    std::printf("acceptance: all 12 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria failed\n", gate.failures);
  return 1;
}
