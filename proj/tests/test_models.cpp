#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <stdexcept>

#include "emon/models.hpp"

using namespace emon;

namespace {

Eigen::MatrixXcd diag4(double a, double b, double c, double d) {
  Eigen::Vector4cd v(a, b, c, d);
  return v.asDiagonal();
}

constexpr double kTol = 1e-12;

}  // namespace

TEST_CASE("single-boson operator matrices") {
  FockBasis b = FockBasis::enumerate(4, 1);
  SpinOps ops = build_spin_ops(b);

  CHECK((ops.sz.dense() - diag4(1, -1, 1, -1)).norm() == doctest::Approx(0.0).epsilon(kTol));
  CHECK((ops.pz.dense() - diag4(1, 1, -1, -1)).norm() == doctest::Approx(0.0).epsilon(kTol));

  Eigen::MatrixXcd sx = Eigen::MatrixXcd::Zero(4, 4);
  sx(0, 1) = sx(1, 0) = sx(2, 3) = sx(3, 2) = 1.0;
  CHECK((ops.sx.dense() - sx).norm() == doctest::Approx(0.0).epsilon(kTol));

  Eigen::MatrixXcd px = Eigen::MatrixXcd::Zero(4, 4);
  px(0, 2) = px(2, 0) = px(1, 3) = px(3, 1) = 1.0;
  CHECK((ops.px.dense() - px).norm() == doctest::Approx(0.0).epsilon(kTol));

  for (const CooMatrix* m : {&ops.sx, &ops.sy, &ops.sz, &ops.px, &ops.py, &ops.pz})
    CHECK(m->is_hermitian());
}

TEST_CASE("operator algebra closes with the 1/d scaling") {
  for (int d : {1, 2, 3}) {
    FockBasis b = FockBasis::enumerate(4, d);
    SpinOps ops = build_spin_ops(b);
    double dd = static_cast<double>(d);
    Eigen::MatrixXcd sx = ops.sx.dense(), sy = ops.sy.dense(), sz = ops.sz.dense();
    Eigen::MatrixXcd px = ops.px.dense(), py = ops.py.dense(), pz = ops.pz.dense();
    cplx two_i(0.0, 2.0);

    CHECK((sx * sy - sy * sx - two_i / dd * sz).norm() == doctest::Approx(0.0).epsilon(1e-10));
    CHECK((px * py - py * px - two_i / dd * pz).norm() == doctest::Approx(0.0).epsilon(1e-10));

    // The two families act on independent index pairs and commute.
    for (const auto& s : {sx, sy, sz})
      for (const auto& p : {px, py, pz})
        CHECK((s * p - p * s).norm() == doctest::Approx(0.0).epsilon(1e-10));
  }
}

TEST_CASE("single-boson Hamiltonian is the frozen diagonal") {
  FockBasis b = FockBasis::enumerate(4, 1);
  ModelParams p;  // u_p = 2, u_z = 0.7, delta = 1
  CooMatrix h = build_hq0(b, p);
  // Quartic and density-density terms need two bosons; only the diagonal
  // u_z (n1-n2+n3-n4)^2 - delta (n1+n2-n3-n4) survives.
  CHECK((h.dense() - diag4(p.u_z - 1.0, p.u_z - 1.0, p.u_z + 1.0, p.u_z + 1.0)).norm() ==
        doctest::Approx(0.0).epsilon(kTol));
}

TEST_CASE("H conserves both charges; H' keeps parity only") {
  ModelParams p;
  p.u_p = 1.3;
  p.u_z = 0.9;
  p.delta = 0.4;
  p.v = 1.7;
  for (int d : {2, 3, 4}) {
    FockBasis b = FockBasis::enumerate(4, d);
    CooMatrix h0 = build_hq0(b, p);
    CooMatrix h1 = build_hq1(b, p);
    CHECK(h0.is_hermitian());
    CHECK(h1.is_hermitian());
    CHECK(build_exchange_x(b).is_hermitian());

    CHECK(commutator_residual(h0, charge_q1(b)) < 1e-12);
    CHECK(commutator_residual(h0, charge_q2(b)) < 1e-12);

    CHECK(commutator_residual(h1, parity_pi(b)) < 1e-12);
    CHECK(commutator_residual(h1, charge_q1(b)) > 1e-2);

    // X^2 moves charge in steps of two, so both charge parities survive.
    CooMatrix par_q1 = diagonal_operator(b, [](const std::vector<int>& n) {
      return ((n[0] + n[3]) % 2 == 0) ? 1.0 : -1.0;
    });
    CooMatrix par_q2 = diagonal_operator(b, [](const std::vector<int>& n) {
      return ((n[1] + n[2]) % 2 == 0) ? 1.0 : -1.0;
    });
    CHECK(commutator_residual(h1, par_q1) < 1e-12);
    CHECK(commutator_residual(h1, par_q2) < 1e-12);
  }
}

TEST_CASE("charge parity rule per basis state") {
  for (int d = 1; d <= 6; ++d) {
    FockBasis b = FockBasis::enumerate(4, d);
    for (const auto& n : b.states()) {
      int q1 = n[0] - n[3];
      int q2 = n[1] - n[2];
      CHECK(((q1 % 2 + 2) % 2) == (((d + q2) % 2 + 2) % 2));
    }
  }
}

TEST_CASE("qubit charge is -q1/(2d) on the diagonal") {
  FockBasis b = FockBasis::enumerate(4, 4);
  CooMatrix g = qubit_charge(b);
  Eigen::MatrixXcd gd = g.dense();
  for (std::size_t k = 0; k < b.dim(); ++k) {
    const auto& n = b.state(k);
    CHECK(gd(k, k).real() == doctest::Approx(-(n[0] - n[3]) / 8.0).epsilon(kTol));
  }
}

TEST_CASE("sector decomposition splits the d=4 space") {
  FockBasis b = FockBasis::enumerate(4, 4);
  ModelParams p;
  CooMatrix h = build_hq0(b, p);
  auto sectors = sector_decompose(h, b, {{"n1-n4", charge_q1(b)}, {"n2-n3", charge_q2(b)}});

  std::size_t total = 0;
  for (const auto& s : sectors) total += s.indices.size();
  CHECK(total == b.dim());

  // q2 = 0 slice: block sizes 1, 2, 3, 2, 1 over q1 = -4, -2, 0, 2, 4.
  std::vector<std::pair<std::int64_t, std::size_t>> q2zero;
  for (const auto& s : sectors)
    if (s.labels[1] == 0) q2zero.push_back({s.labels[0], s.indices.size()});
  REQUIRE(q2zero.size() == 5);
  CHECK(q2zero[0] == std::pair<std::int64_t, std::size_t>{-4, 1});
  CHECK(q2zero[1] == std::pair<std::int64_t, std::size_t>{-2, 2});
  CHECK(q2zero[2] == std::pair<std::int64_t, std::size_t>{0, 3});
  CHECK(q2zero[3] == std::pair<std::int64_t, std::size_t>{2, 2});
  CHECK(q2zero[4] == std::pair<std::int64_t, std::size_t>{4, 1});
}

TEST_CASE("sector decomposition rejects a non-commuting charge") {
  FockBasis b = FockBasis::enumerate(4, 3);
  ModelParams p;
  CooMatrix h1 = build_hq1(b, p);
  CHECK_THROWS_WITH_AS(sector_decompose(h1, b, {{"n1-n4", charge_q1(b)}}),
                       doctest::Contains("n1-n4"), std::runtime_error);
}
