#include "support.hpp"

#include "iqho/coherent.hpp"
#include "iqho/distrib.hpp"

#include <doctest.h>

using namespace iqho;
using test::cq;
using test::dabs;

TEST_CASE("bicoherent states are eigenstates of A and B^dagger") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> th(-1.5, 1.5), r(0, 5), ang(0, 2 * pi<double>());
  for (int i = 0; i < 40; ++i) {
    const auto params = i % 5 == 0 ? ThetaParams::critical(i % 2 ? 1 : -1, 1.3) : ThetaParams::angle(th(rng), 1.3);
    const auto z = std::polar(r(rng), ang(rng));
    const auto pair = bicoherent(params, cq(z.real(), z.imag()));
    CHECK(eigenvalue_check(pair, build_operators(params)).all_pass());
    if (!params.is_critical()) CHECK(normalization_check(pair).all_pass());
  }
  const auto crit = bicoherent(ThetaParams::critical(1, 1.0), cq(0.5, 0.5));
  CHECK_THROWS_AS(normalization_check(crit), RegimeError);
  CHECK_THROWS_AS(bicoherent(ThetaParams::angle(2.0, 1.0), cq(1)), RegimeError);
}

TEST_CASE("critical coherent states swap under the sign flip") {
  const auto z = cq(0.7, -1.1);
  const auto plus = bicoherent(ThetaParams::critical(1, 2.0), z);
  const auto minus = bicoherent(ThetaParams::critical(-1, 2.0), z);
  CHECK(static_cast<double>(coefficient_discrepancy(plus.phi, minus.psi)) < 1e-30);
  CHECK(static_cast<double>(coefficient_discrepancy(plus.psi, minus.phi)) < 1e-30);
  CHECK(plus.phi.alpha().real() == 0);
}

TEST_CASE("theta = 0 gives the standard coherent state") {
  const double omega = 0.8;
  const auto params = ThetaParams::angle(0.0, omega);
  const auto z = cq(0.9, 0.4);
  const auto T = bicoherent_state<quad>(params, z);
  const auto series_phase = cexp(cquad(0, -z.real() * z.imag()));
  for (double x : {-2.0, -0.3, 0.0, 1.1, 3.0}) {
    const auto s = series_partial_sum(params, z, 90, quad(x));
    CHECK(dabs(s - series_phase * eval(T, cq(x))) < 1e-25);
  }
  // and psi = phi there
  const auto pair = bicoherent(params, z);
  CHECK(static_cast<double>(coefficient_discrepancy(pair.phi, pair.psi)) == 0);
}

TEST_CASE("series partial sums converge") {
  const auto params = ThetaParams::angle(0.6, 1.0);
  double prev = 1e300;
  const auto sweep = series_sweep(params, cq(1, 0), {10, 20, 30, 40, 50, 60});
  for (const auto& res : sweep) {
    CHECK(res.distance < prev);
    prev = res.distance;
    CHECK(res.distance <= res.predicted * (1 + 1e-6));
  }
  CHECK(prev < 1e-6);
  // the sweep reuses the phase of its first entry; same as measuring it each time
  CHECK(sweep.back().distance == doctest::Approx(series_truncation(params, cq(1, 0), 60).distance).epsilon(1e-9));
  const auto res = series_truncation(params, cq(1, 2), 60);
  CHECK(std::abs(std::arg(to_cdouble(res.phase)) - res.reference_phase) < 1e-6);
  CHECK_THROWS_AS(series_truncation(ThetaParams::critical(1, 1.0), cq(1), 10), RegimeError);
}

TEST_CASE("critical coherent states grow exponentially") {
  // |phi^+(z;x)| = const * exp(sqrt(2 Omega) Re(e^{i pi/4} z) x)
  const double omega = 1.0;
  const auto phi = bicoherent(ThetaParams::critical(1, omega), cq(1, 0)).phi;
  const double rate = std::sqrt(2 * omega) * std::cos(pi<double>() / 4);
  double prev = 0;
  for (int i = 0; i <= 10; ++i) {
    const double x = 5.0 * i;
    const double m = dabs(eval(phi, cq(x)));
    if (i > 0) CHECK(std::log(m / prev) == doctest::Approx(rate * 5.0).epsilon(1e-10));
    prev = m;
  }
  CHECK(prev > 1e20);
}

TEST_CASE("resolution of the identity in L2") {
  const double omega = 1.0;
  const auto params = ThetaParams::angle(0.6, omega);
  const auto phi = eigenfamily(params, FamilyKind::Phi, 2);
  const auto psi = eigenfamily(params, FamilyKind::Psi, 2);
  QuadGrid2D grid;
  grid.workers = 4;
  const auto rep = identity_resolution_L2(params, psi->member(1), phi->member(1), grid);
  CHECK(rep.all_pass());
  CHECK(std::abs(rep.rows[0].oracle - cdouble(1, 0)) < 1e-6);
  const auto off = identity_resolution_L2(params, psi->member(0), phi->member(2), grid);
  CHECK(off.all_pass());
}

TEST_CASE("resolution of the identity for the inverted oscillator") {
  const double omega = 1.0;
  const quad w(2 * omega);
  const auto f = PolyGaussFn::gaussian(cq(2 * omega), cq(0), cquad(log(w / pi<quad>()) / 4, 0));
  CHECK(dabs(pairing(f, f) - cq(1)) < 1e-30);
  QuadGrid2D grid;
  grid.workers = 4;
  for (int sign : {1, -1}) {
    const auto rep = identity_resolution_IQHO(sign, omega, f, f, grid);
    for (const auto& row : rep.rows) INFO(row.quantity, " ", row.oracle, " ", row.abs_err);
    CHECK(rep.all_pass());
  }
  const auto e0 = test::hermite_function(0, omega);
  CHECK_THROWS_AS(identity_resolution_IQHO(1, omega, e0, f, grid), MembershipError);
}

TEST_CASE("plane tail estimate") {
  QuadGrid2D grid;
  const auto est = integrate_plane_with_tail([](cdouble z) { return std::exp(-std::norm(z)); }, grid);
  CHECK(est.quad.value.real() == doctest::Approx(pi<double>()).epsilon(1e-12));
  CHECK(est.decay_rate == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(est.tail < 1e-14);
}
