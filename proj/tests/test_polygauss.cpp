#include "support.hpp"

#include "iqho/numquad.hpp"

#include <doctest.h>

using namespace iqho;
using test::cq;
using test::dabs;

namespace {

// A_theta = (e^{i th/2} W x + e^{-i th/2} d) / sqrt(2W), written out locally
DiffOp lowering(double theta, double omega) {
  const quad s = sqrt(2 * quad(omega));
  const cquad h = unit_phase<quad>(quad(theta) / 2);
  return DiffOp::term(1, 0, h * quad(omega) / s) + DiffOp::term(0, 1, cconj(h) / s);
}

PolyGaussFn vacuum(double theta, double omega) {
  const cquad gamma = cq(static_cast<double>(log(quad(omega) / pi<quad>()) / 4), theta / 4);
  return PolyGaussFn::gaussian(quad(omega) * unit_phase<quad>(quad(theta)), cquad(), gamma);
}

}  // namespace

TEST_CASE("construction invariants") {
  CHECK_THROWS_AS(PolyGaussFn::gaussian(cq(-0.1, 1)), DomainError);
  PolyGaussFn f({cq(1), cq(2), cq(0), cq(0)}, cq(1));
  CHECK(f.degree() == 1);
  CHECK(PolyGaussFn({cq(0)}, cq(1)).is_zero());
  CHECK(PolyGaussFn::gaussian(cq(0, 3)).alpha().real() == 0);
}

TEST_CASE("apply_op examples") {
  const auto g = PolyGaussFn::gaussian(cq(1));
  const auto dg = apply_op(DiffOp::d(), g);
  REQUIRE(dg.degree() == 1);
  CHECK(dg.coeffs()[0] == cquad());
  CHECK(dg.coeffs()[1] == cq(-1));

  for (double theta : {0.0, 0.7, -1.3}) {
    const auto res = apply_op(lowering(theta, 1.7), vacuum(theta, 1.7));
    CHECK(res.is_zero());
  }

  // x d/dx on (1+x) e^{-x^2}: by hand, x(1 - 2x - 2x^2)
  const PolyGaussFn f({cq(1), cq(1)}, cq(2));
  const auto xd = DiffOp::x() * DiffOp::d();
  const auto r = apply_op(xd, f);
  const PolyGaussFn expect({cq(0), cq(1), cq(-2), cq(-2)}, cq(2));
  CHECK(static_cast<double>(coefficient_discrepancy(r, expect)) < 1e-30);
  // product-rule oracle at sample points: x (f'(x)) with f' from finite structure
  for (double x : {-1.3, 0.2, 2.1}) {
    const quad X(x);
    const cquad fx = (1 + X) * exp(-X * X);
    const cquad dfx = exp(-X * X) - 2 * X * fx;
    CHECK(dabs(eval(r, cquad(X, 0)) - X * dfx) < 1e-30);
  }
}

TEST_CASE("pairing examples") {
  const auto g = PolyGaussFn::gaussian(cq(1), cquad(), cquad(-log(pi<quad>()) / 4, 0));
  CHECK(dabs(pairing(g, g) - cq(1)) < 1e-30);

  const auto crit = PolyGaussFn::gaussian(cquad(0, 1));
  CHECK_THROWS_AS(pairing(crit, crit), IncompatiblePair);

  const PolyGaussFn xg({cq(0), cq(1)}, cq(2));
  const auto q = quadrature_pairing(xg, xg);
  const auto exact = pairing(xg, xg);
  CHECK(dabs(exact - q.value) <= 10 * static_cast<double>(q.err_estimate));
  // int x^2 e^{-2x^2} = sqrt(pi/2)/4
  CHECK(dabs(exact - sqrt(pi<quad>() / 2) / 4) < 1e-30);
  CHECK(pairing(PolyGaussFn(), g) == cquad());
}

TEST_CASE("weighted pairing") {
  const double omega = 1.3;
  const auto f = PolyGaussFn::gaussian(cq(2 * omega));
  // rho^2 = exp(+W x^2) is weight alpha -2W
  const auto v = weighted_pairing(f, f, cq(-2 * omega));
  CHECK(dabs(v - sqrt(pi<quad>() / quad(omega))) < 1e-30);

  std::mt19937_64 rng(7);
  for (int i = 0; i < 10; ++i) {
    const auto a = test::random_fn(rng, 4), b = test::random_fn(rng, 4);
    CHECK(weighted_pairing(a, b, cquad()) == pairing(a, b));
  }

  // critical coherent state with rho^{-2}: finite, equals |phi rho^{-1}|^2 by quadrature
  const cquad z(0.4, -0.3);
  const auto phi = PolyGaussFn::gaussian(cquad(0, omega), sqrt(2 * quad(omega)) * Rotation<quad>::critical(1).half * z,
                                         cquad(-z.real() * z.real(), 0));
  const auto w = weighted_pairing(phi, phi, cq(2 * omega));
  const auto damped = phi.with_alpha(phi.alpha() + cq(omega));
  const auto q = quadrature_pairing(damped, damped);
  CHECK(dabs(w - q.value) <= 10 * static_cast<double>(q.err_estimate));
  CHECK(w.real() > 0);
  CHECK(abs(w.imag()) < 1e-30);
}

TEST_CASE("rotate") {
  const double omega = 1.0;
  for (double theta : {0.8, -0.4}) {
    for (int n = 0; n <= 8; ++n) {
      const auto en = test::hermite_function(n, omega);
      const auto r = rotate(en, quad(theta));
      // closed Hermite form at angle theta
      const auto h = HermiteCache::instance().coefficients_as<quad>(n);
      const cquad scale = unit_phase<quad>(quad(theta) / 2) * sqrt(quad(omega));
      std::vector<cquad> c;
      cquad s = cq(1);
      for (int k = 0; k <= n; ++k) {
        c.push_back(h[k] * s);
        s *= scale;
      }
      quad norm = pow(quad(omega) / pi<quad>(), quad(0.25));
      for (int k = 1; k <= n; ++k) norm /= sqrt(quad(2 * k));
      const PolyGaussFn closed(c, quad(omega) * unit_phase<quad>(quad(theta)), cquad(),
                               cquad(log(norm), quad(theta) / 4));
      CHECK(static_cast<double>(coefficient_discrepancy(r, closed)) < 1e-28);
    }
  }
  std::mt19937_64 rng(11);
  for (int i = 0; i < 10; ++i) {
    const auto f = test::random_fn(rng, 6, 1.0, 2.0);
    CHECK(static_cast<double>(coefficient_discrepancy(rotate(f, quad(0)), f)) == 0.0);
    const auto back = rotate(rotate(f, quad(0.9)), quad(-0.9));
    CHECK(static_cast<double>(coefficient_discrepancy(back, f)) < 1e-30);
  }
}

TEST_CASE("eval") {
  CHECK(eval(PolyGaussFn::gaussian(cq(1)), cquad()) == cq(1));
  // e_3(1) = (2 pi)^{-1/4}... with Omega = 1: pi^{-1/4} H_3(1) / sqrt(48) e^{-1/2}, H_3(1) = -4
  const auto e3 = test::hermite_function(3, 1.0);
  const quad expect = pow(pi<quad>(), quad(-0.25)) * quad(-4) / sqrt(quad(48)) * exp(quad(-0.5));
  CHECK(dabs(eval(e3, cq(1)) - expect) < 1e-30);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 50; ++i) {
    const auto f = test::random_fn(rng, 8);
    const cquad x(u(rng), 0.3 * u(rng));
    const cquad a = eval(f, x), b = test::naive_eval(f, x);
    CHECK(dabs(a - b) <= 1e-28 * std::max(1.0, dabs(b)));
  }
}

TEST_CASE("pairing invariants") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 30; ++i) {
    auto f = test::random_fn(rng, 6);
    auto g1 = test::random_fn(rng, 6);
    const auto g2 = g1.with_coeffs({cq(u(rng), u(rng)), cq(u(rng)), cq(0, u(rng))});
    const cquad c1(u(rng), u(rng)), c2(u(rng), u(rng));
    const auto lhs = pairing(f, c1 * g1 + c2 * g2);
    const auto rhs = c1 * pairing(f, g1) + c2 * pairing(f, g2);
    CHECK(dabs(lhs - rhs) <= 1e-12 * std::max(1.0, dabs(rhs)));
    CHECK(dabs(pairing(f, g1) - cconj(pairing(g1, f))) <= 1e-28 * std::max(1.0, dabs(pairing(f, g1))));

    // apply_op linear in both arguments
    const DiffOp op1 = DiffOp::x() * DiffOp::d() + DiffOp::term(2, 0, cq(0.5, 1));
    const DiffOp op2 = DiffOp::d() * DiffOp::d();
    const auto a = apply_op(c1 * op1 + c2 * op2, g1);
    const auto b = c1 * apply_op(op1, g1) + c2 * apply_op(op2, g1);
    CHECK(static_cast<double>(coefficient_discrepancy(a, b)) < 1e-28);
    const auto s = apply_op(op1, g1 + c1 * g2);
    const auto t = apply_op(op1, g1) + c1 * apply_op(op1, g2);
    CHECK(static_cast<double>(coefficient_discrepancy(s, t)) < 1e-28);
  }
}

TEST_CASE("pairing agrees with quadrature") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 20; ++i) {
    const auto f = test::random_fn(rng, 6), g = test::random_fn(rng, 6);
    const auto q = quadrature_pairing(f.cast<double>(), g.cast<double>());
    const auto exact = to_cdouble(pairing(f, g));
    CHECK(std::abs(exact - q.value) <= std::max(1e-9, 1e-9 * std::abs(exact)));
  }
}

TEST_CASE("rotation symmetry on the e_n span") {
  const double theta = 0.7;
  std::vector<PolyGaussFn> e;
  for (int n = 0; n <= 10; ++n) e.push_back(test::hermite_function(n, 1.0));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 10; ++t) {
    PolyGaussFn f = e[0].scaled(cq(u(rng))), g = e[0].scaled(cq(u(rng)));
    for (int n = 1; n <= 10; ++n) {
      f = f + e[n].scaled(cq(u(rng)));
      g = g + e[n].scaled(cq(u(rng)));
    }
    const auto lhs = pairing(rotate(f, quad(theta)), g);
    const auto rhs = pairing(f, rotate(g, quad(theta)));
    CHECK(dabs(lhs - rhs) <= 1e-25 * std::max(1.0, dabs(lhs)));
  }
}

TEST_CASE("DiffOp algebra") {
  const auto comm = DiffOp::d() * DiffOp::x() - DiffOp::x() * DiffOp::d();
  REQUIRE(comm.terms().size() == 1);
  CHECK(comm.terms().begin()->first == std::pair<int, int>{0, 0});
  CHECK(comm.terms().begin()->second == cq(1));

  const auto dd = DiffOp::d().adjoint();
  CHECK(static_cast<double>(op_discrepancy(dd, DiffOp::term(0, 1, cq(-1)))) == 0.0);
  // (x d)^dagger = -d x = -x d - 1
  const auto xd = (DiffOp::x() * DiffOp::d()).adjoint();
  const auto expect = DiffOp::term(1, 1, cq(-1)) + DiffOp::term(0, 0, cq(-1));
  CHECK(static_cast<double>(op_discrepancy(xd, expect)) == 0.0);
  // p is formally self-adjoint
  CHECK(static_cast<double>(op_discrepancy(DiffOp::p().adjoint(), DiffOp::p())) == 0.0);
  // adjoint is an involution and reverses products
  const auto a = DiffOp::term(2, 1, cq(0.3, 0.2)) + DiffOp::term(0, 2, cq(1, -1));
  const auto b = DiffOp::term(1, 0, cq(0, 1)) + DiffOp::d();
  CHECK(static_cast<double>(op_discrepancy(a.adjoint().adjoint(), a)) < 1e-30);
  CHECK(static_cast<double>(op_discrepancy((a * b).adjoint(), b.adjoint() * a.adjoint())) < 1e-30);
}
