#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "emon/noise.hpp"

using namespace emon;

TEST_CASE("base-model report at the reference point") {
  ModelParams p;  // u_p=2, u_z=0.7, delta=1
  FockBasis b = FockBasis::enumerate(4, 4);
  CooMatrix h = build_hq0(b, p);
  NoiseReport r = noise_report(h, b, p, DoubletPolicy::charge_restricted);

  CHECK(r.d == 4);
  CHECK(r.gap01 == doctest::Approx(0.175).epsilon(1e-9));
  CHECK(r.gap12 == doctest::Approx(0.525).epsilon(1e-9));

  // The doublet states carry exact charge labels, so every off-diagonal
  // element vanishes identically and only the diagonal charges dephase.
  for (double x : r.depolarization) CHECK(x < 1e-12);
  CHECK(r.dephasing[0] < 1e-12);  // sx
  CHECK(r.dephasing[1] < 1e-12);  // sy
  CHECK(r.dephasing[2] == doctest::Approx(0.5).epsilon(1e-9));  // sz
  CHECK(r.dephasing[3] < 1e-12);  // px
  CHECK(r.dephasing[4] < 1e-12);  // py
  CHECK(r.dephasing[5] == doctest::Approx(0.5).epsilon(1e-9));  // pz
  CHECK(max_dephasing(r) > 1e-3);
  CHECK(max_depolarization(r) < 1e-12);

  CHECK(r.labels1.q1 - r.labels0.q1 == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(std::abs(r.labels0.q2) < 1e-9);
  CHECK(std::abs(r.labels1.q2) < 1e-9);
}

TEST_CASE("base-model sweep keeps the selection rule at every d") {
  ModelParams p;
  SweepTable t = sweep_d(ModelKind::hq0, p, {4, 6, 8});
  REQUIRE(t.rows.size() == 3);

  const double gap01[3] = {0.175, 1.0 / 30.0, 0.00625};
  const double gap12[3] = {0.525, 4.0 / 45.0, 0.075};
  for (int i = 0; i < 3; ++i) {
    CHECK(t.rows[i].depol_max < 1e-12);
    CHECK(t.rows[i].gap01 == doctest::Approx(gap01[i]).epsilon(1e-8));
    CHECK(t.rows[i].gap12 == doctest::Approx(gap12[i]).epsilon(1e-8));
    // Both doublet states sit in exact charge sectors whose n1 - n4 labels
    // differ by 2, so the largest asymmetry comes from sz and equals 2/d.
    CHECK(t.rows[i].deph_max == doctest::Approx(2.0 / t.rows[i].d).epsilon(1e-8));
  }
}

TEST_CASE("double-well report at the calibrated point") {
  ModelParams p = z2_fixture();
  FockBasis b = FockBasis::enumerate(4, 4);
  CooMatrix h = build_hq1(b, p);
  NoiseReport r = noise_report(h, b, p, DoubletPolicy::parity_resolved);

  CHECK(r.labels0.parity == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.labels1.parity == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(max_depolarization(r) < 1e-12);
  CHECK(r.e0 == doctest::Approx(-0.700753116).epsilon(1e-6));
  CHECK(r.gap01 == doctest::Approx(0.3399912).epsilon(1e-5));
  CHECK(max_dephasing(r) == doctest::Approx(0.4429690).epsilon(1e-5));
}

TEST_CASE("double-well sweep shrinks gap and asymmetry together") {
  ModelParams p = z2_fixture();
  SweepTable t = sweep_d(ModelKind::hq1, p, {4, 6, 8, 10});
  REQUIRE(t.rows.size() == 4);

  const double gap01[4] = {3.399912e-1, 9.871768e-2, 3.169382e-2, 8.658008e-3};
  for (int i = 0; i < 4; ++i) {
    CHECK(t.rows[i].depol_max < 1e-12);
    CHECK(t.rows[i].gap01 == doctest::Approx(gap01[i]).epsilon(1e-5));
    if (i > 0) {
      CHECK(t.rows[i].gap01 < t.rows[i - 1].gap01);
      CHECK(t.rows[i].deph_max < t.rows[i - 1].deph_max);
    }
  }

  // Each row's doublet pairs one state from each parity sector.
  for (std::int64_t d : {4, 6, 8, 10}) {
    FockBasis b = FockBasis::enumerate(4, d);
    CooMatrix h = build_hq1(b, p);
    NoiseReport r = noise_report(h, b, p, DoubletPolicy::parity_resolved);
    CHECK(r.labels0.parity * r.labels1.parity == doctest::Approx(-1.0).epsilon(1e-9));
  }

  GapFit fit = fit_log_gap(t);
  CHECK(fit.slope == doctest::Approx(-0.6074).epsilon(2e-3));
  CHECK(fit.r2 > 0.99);
}

TEST_CASE("parity-resolved pair equals the two lowest levels at the fixture") {
  ModelParams p = z2_fixture();
  FockBasis b = FockBasis::enumerate(4, 6);
  CooMatrix h = build_hq1(b, p);
  NoiseReport r = noise_report(h, b, p, DoubletPolicy::parity_resolved);
  EigResult full = eig_hermitian(h, {.k = 3});
  CHECK(r.e0 == doctest::Approx(full.values[0]).epsilon(1e-10));
  CHECK(r.e1 == doctest::Approx(full.values[1]).epsilon(1e-10));
}

TEST_CASE("log-gap fit on synthetic tables") {
  SweepTable t;
  for (std::int64_t d : {2, 4, 6, 8, 10}) {
    SweepRow row;
    row.d = d;
    row.gap01 = std::exp(-static_cast<double>(d));
    t.rows.push_back(row);
  }
  GapFit fit = fit_log_gap(t);
  CHECK(std::abs(fit.slope + 1.0) < 1e-9);
  CHECK(std::abs(fit.intercept) < 1e-9);
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.used == 5);
  CHECK(fit.skipped == 0);

  SweepTable flat;
  for (std::int64_t d : {2, 4, 6}) {
    SweepRow row;
    row.d = d;
    row.gap01 = 0.125;
    flat.rows.push_back(row);
  }
  GapFit f2 = fit_log_gap(flat);
  CHECK(std::abs(f2.slope) < 1e-12);

  SweepTable holed = t;
  holed.rows[2].gap01 = 0.0;  // dropped with a skip count, not an error
  GapFit f3 = fit_log_gap(holed);
  CHECK(f3.used == 4);
  CHECK(f3.skipped == 1);
  CHECK(std::abs(f3.slope + 1.0) < 1e-9);

  SweepTable tiny;
  tiny.rows = {t.rows[0], t.rows[1]};
  CHECK_THROWS_AS(fit_log_gap(tiny), std::invalid_argument);
}

TEST_CASE("calibration accepts the smallest workable weight") {
  ModelParams base = z2_fixture();
  CalibrationResult cal = calibrate_v(base);
  CHECK(cal.v == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cal.params.delta == doctest::Approx(base.delta).epsilon(1e-12));
  REQUIRE(cal.candidates.size() == 4);
  CHECK(cal.candidates[0].accepted);
  CHECK(cal.candidates[0].r2 > 0.99);
  REQUIRE(cal.table.rows.size() == 4);
  CHECK(cal.table.rows[0].gap01 == doctest::Approx(3.399912e-1).epsilon(1e-5));

  // At the steeper reference tilt (delta = 1) no grid value passes: the
  // smallest weight fails the fit-quality gate and larger ones break the
  // monotone trends.
  ModelParams steep = base;
  steep.delta = 1.0;
  CHECK_THROWS_AS(calibrate_v(steep), std::runtime_error);
}

TEST_CASE("sweeps are deterministic and thread-count independent") {
  ModelParams p = z2_fixture();
  SweepTable a = sweep_d(ModelKind::hq1, p, {4, 6, 8}, 1);
  SweepTable c = sweep_d(ModelKind::hq1, p, {4, 6, 8}, 3);
  REQUIRE(a.rows.size() == c.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].gap01 == c.rows[i].gap01);
    CHECK(a.rows[i].gap12 == c.rows[i].gap12);
    CHECK(a.rows[i].depol_max == c.rows[i].depol_max);
    CHECK(a.rows[i].deph_max == c.rows[i].deph_max);
  }

  FockBasis b = FockBasis::enumerate(4, 4);
  CooMatrix h = build_hq1(b, p);
  NoiseReport r1 = noise_report(h, b, p, DoubletPolicy::parity_resolved);
  NoiseReport r2 = noise_report(h, b, p, DoubletPolicy::parity_resolved);
  CHECK(r1.gap01 == r2.gap01);
  CHECK(max_dephasing(r1) == max_dephasing(r2));

  CHECK_THROWS_AS(sweep_d(ModelKind::hq0, p, {4, 4}), std::invalid_argument);
}

TEST_CASE("plain policy propagates doublet ambiguity") {
  ModelParams p;
  FockBasis b = FockBasis::enumerate(4, 4);
  CooMatrix h = build_hq0(b, p);
  CHECK_THROWS_AS(noise_report(h, b, p, DoubletPolicy::plain), DoubletAmbiguityError);
}
