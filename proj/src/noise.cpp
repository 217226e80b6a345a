#include "emon/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace emon {

const std::array<const char*, 6> kNoiseOperatorNames = {"sx", "sy", "sz",
                                                        "px", "py", "pz"};

namespace {

DoubletLabels state_labels(const Eigen::VectorXcd& v, const FockBasis& basis) {
  DoubletLabels lab;
  lab.q1 = charge_q1(basis).matrix_element(v, v).real();
  lab.q2 = charge_q2(basis).matrix_element(v, v).real();
  lab.parity = parity_pi(basis).matrix_element(v, v).real();
  lab.g = qubit_charge(basis).matrix_element(v, v).real();
  return lab;
}

// Lowest level of each parity sector plus the first level above the pair.
Doublet parity_doublet(const CooMatrix& h, const FockBasis& basis,
                       const EigOptions& opts) {
  EigOptions o = opts;
  o.k = std::max(opts.k, 2);
  CooMatrix pi = parity_pi(basis);
  EigResult even = eig_restricted(h, {{"pi", pi, 1}}, o);
  EigResult odd = eig_restricted(h, {{"pi", pi, -1}}, o);
  const EigResult* lower = even.values[0] <= odd.values[0] ? &even : &odd;
  const EigResult* upper = lower == &even ? &odd : &even;

  Doublet d;
  d.e0 = lower->values[0];
  d.e1 = upper->values[0];
  d.e2 = std::min(even.values[1], odd.values[1]);
  d.gap01 = d.e1 - d.e0;
  d.gap12 = d.e2 - d.e1;
  d.state0 = lower->vectors.col(0);
  d.state1 = upper->vectors.col(0);
  d.labels0 = state_labels(d.state0, basis);
  d.labels1 = state_labels(d.state1, basis);
  return d;
}

}  // namespace

double max_depolarization(const NoiseReport& r) {
  return *std::max_element(r.depolarization.begin(), r.depolarization.end());
}

double max_dephasing(const NoiseReport& r) {
  return *std::max_element(r.dephasing.begin(), r.dephasing.end());
}

NoiseReport noise_report(const CooMatrix& h, const FockBasis& basis,
                         const ModelParams& p, DoubletPolicy policy,
                         const EigOptions& opts) {
  Doublet d;
  switch (policy) {
    case DoubletPolicy::plain:
      d = qubit_doublet(h, basis, opts);
      break;
    case DoubletPolicy::charge_restricted:
      d = qubit_doublet(h, basis, opts, {{"n2-n3", charge_q2(basis), 0}});
      break;
    case DoubletPolicy::parity_resolved:
      d = parity_doublet(h, basis, opts);
      break;
  }

  NoiseReport rep;
  rep.d = basis.total();
  rep.params = p;
  rep.e0 = d.e0;
  rep.e1 = d.e1;
  rep.gap01 = d.gap01;
  rep.gap12 = d.gap12;
  rep.labels0 = d.labels0;
  rep.labels1 = d.labels1;

  SpinOps ops = build_spin_ops(basis);
  const CooMatrix* all[6] = {&ops.sx, &ops.sy, &ops.sz, &ops.px, &ops.py, &ops.pz};
  for (int i = 0; i < 6; ++i) {
    rep.depolarization[static_cast<std::size_t>(i)] =
        std::abs(all[i]->matrix_element(d.state0, d.state1));
    rep.dephasing[static_cast<std::size_t>(i)] =
        std::abs(all[i]->matrix_element(d.state0, d.state0) -
                 all[i]->matrix_element(d.state1, d.state1));
  }
  return rep;
}

SweepTable sweep_d(ModelKind model, const ModelParams& p,
                   const std::vector<std::int64_t>& d_values, int jobs) {
  for (std::size_t i = 1; i < d_values.size(); ++i)
    if (d_values[i] <= d_values[i - 1])
      throw std::invalid_argument("sweep_d: d values must be strictly increasing");

  SweepTable table;
  table.model = model;
  table.params = p;
  table.rows.resize(d_values.size());

  auto compute = [&](std::size_t i) {
    std::int64_t d = d_values[i];
    FockBasis basis = FockBasis::enumerate(4, d);
    CooMatrix h = model == ModelKind::hq0 ? build_hq0(basis, p) : build_hq1(basis, p);
    DoubletPolicy policy = model == ModelKind::hq0 ? DoubletPolicy::charge_restricted
                                                   : DoubletPolicy::parity_resolved;
    NoiseReport rep = noise_report(h, basis, p, policy);
    table.rows[i] = {d, rep.gap01, rep.gap12, max_depolarization(rep), max_dephasing(rep)};
  };

  int workers = std::max(1, jobs);
  if (workers == 1 || d_values.size() <= 1) {
    for (std::size_t i = 0; i < d_values.size(); ++i) compute(i);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&, t]() {
        for (std::size_t i = static_cast<std::size_t>(t); i < d_values.size();
             i += static_cast<std::size_t>(workers))
          compute(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  return table;
}

GapFit fit_log_gap(const SweepTable& table) {
  std::vector<double> x, y;
  GapFit fit;
  for (const auto& row : table.rows) {
    if (row.gap01 > 0.0) {
      x.push_back(static_cast<double>(row.d));
      y.push_back(std::log(row.gap01));
    } else {
      ++fit.skipped;
    }
  }
  fit.used = static_cast<int>(x.size());
  if (fit.used < 3)
    throw std::invalid_argument("fit_log_gap: need at least 3 positive-gap rows");

  double n = static_cast<double>(fit.used);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < fit.used; ++i) {
    sx += x[static_cast<std::size_t>(i)];
    sy += y[static_cast<std::size_t>(i)];
    sxx += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
    sxy += x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
  }
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0, ss_tot = 0, mean = sy / n;
  for (int i = 0; i < fit.used; ++i) {
    double yi = y[static_cast<std::size_t>(i)];
    double fi = fit.intercept + fit.slope * x[static_cast<std::size_t>(i)];
    ss_res += (yi - fi) * (yi - fi);
    ss_tot += (yi - mean) * (yi - mean);
  }
  fit.r2 = ss_tot < 1e-30 ? (ss_res < 1e-30 ? 1.0 : 0.0) : 1.0 - ss_res / ss_tot;
  return fit;
}

CalibrationResult calibrate_v(const ModelParams& base,
                              const std::vector<double>& grid,
                              const std::vector<std::int64_t>& d_values) {
  if (grid.empty() || d_values.size() < 3)
    throw std::invalid_argument("calibrate_v: need a grid and at least 3 d values");

  CalibrationResult result;
  for (double v : grid) {
    ModelParams p = base;
    p.v = v;
    CalibrationCandidate cand;
    cand.v = v;
    cand.opposite_parity = true;
    cand.depol_ok = true;
    cand.gap_decreasing = true;
    cand.deph_decreasing = true;

    SweepTable table;
    table.model = ModelKind::hq1;
    table.params = p;
    double prev_gap = 1e300, prev_deph = 1e300;
    for (std::int64_t d : d_values) {
      FockBasis basis = FockBasis::enumerate(4, d);
      CooMatrix h = build_hq1(basis, p);
      NoiseReport rep = noise_report(h, basis, p, DoubletPolicy::parity_resolved);
      if (rep.labels0.parity * rep.labels1.parity > -0.99) cand.opposite_parity = false;
      if (max_depolarization(rep) > 1e-12) cand.depol_ok = false;
      if (rep.gap01 >= prev_gap) cand.gap_decreasing = false;
      if (max_dephasing(rep) >= prev_deph) cand.deph_decreasing = false;
      prev_gap = rep.gap01;
      prev_deph = max_dephasing(rep);
      table.rows.push_back({d, rep.gap01, rep.gap12, max_depolarization(rep),
                            max_dephasing(rep)});
    }
    bool gaps_positive = std::all_of(table.rows.begin(), table.rows.end(),
                                     [](const SweepRow& r) { return r.gap01 > 0; });
    cand.r2 = gaps_positive ? fit_log_gap(table).r2 : 0.0;
    cand.accepted = cand.opposite_parity && cand.depol_ok && cand.gap_decreasing &&
                    cand.deph_decreasing && cand.r2 >= 0.9;

    result.candidates.push_back(cand);
    if (cand.accepted && result.table.rows.empty()) {
      result.v = v;
      result.params = p;
      result.table = std::move(table);
    }
  }
  if (result.table.rows.empty())
    throw std::runtime_error("calibrate_v: no grid value passes the doublet checks");
  return result;
}

ModelParams z2_fixture() {
  ModelParams p;
  p.u_p = 2.0;
  p.u_z = 0.7;
  p.delta = 0.5;
  p.v = 0.5;
  return p;
}

}  // namespace emon
