#include "support.hpp"

#include "iqho/numquad.hpp"
#include "iqho/specfun.hpp"

#include <doctest.h>

using namespace iqho;

namespace {

double hermite_scale(int n) {
  double s = std::sqrt(pi<double>());
  for (int k = 1; k <= n; ++k) s *= 2.0 * k;
  return s;
}

}  // namespace

TEST_CASE("Gauss rules integrate polynomials") {
  for (int order : {2, 8, 16, 31}) {
    const auto& r = gauss_legendre<quad>(order);
    REQUIRE(static_cast<int>(r.nodes.size()) == order);
    for (int p = 0; p < 2 * order; ++p) {
      quad s = 0;
      for (int i = 0; i < order; ++i) s += r.weights[i] * pow(r.nodes[i], p);
      const quad expect = p % 2 ? quad(0) : quad(2) / quad(p + 1);
      CHECK(static_cast<double>(abs(s - expect)) < 1e-30);
    }
  }
}

TEST_CASE("integrate_line examples") {
  auto gauss = [](const cdouble& x) { return std::exp(-x * x); };
  const auto q = integrate_line<double>(gauss, ContourPath::real_line(8.0));
  CHECK(std::abs(q.value - std::sqrt(pi<double>())) < 1e-10);
  CHECK(q.err_estimate >= 0);
  CHECK(q.n_evals > 0);

  // H_2 H_2 e^{-z^2} along the rotated line
  auto h22 = [](const cquad& z) {
    const cquad h = hermite_eval<quad>(2, z);
    return h * h * cexp(-z * z);
  };
  const auto r = integrate_line<quad>(h22, ContourPath::rotated_line(0.9, 20.0));
  CHECK(test::dabs(r.value - 8 * sqrt(pi<quad>())) < 1e-8);
  CHECK(std::abs(to_cdouble(rotated_hermite_integral(1, 3, 1.2))) < 1e-8);
  CHECK(std::abs(to_cdouble(rotated_hermite_integral(2, 2, 0.9)).real() - 8 * std::sqrt(pi<double>())) < 1e-8);
}

TEST_CASE("non-decaying integrands are refused") {
  auto fresnel = [](const cdouble& x) { return std::exp(cdouble(0, 1) * x * x); };
  CHECK_THROWS_AS(integrate_line<double>(fresnel, ContourPath::real_line(8.0)), NoConvergence);
  QuadOptions opt;
  opt.max_panels = 64;
  opt.check_decay = false;
  auto wild = [](const cdouble& x) { return cdouble(std::sin(1e4 * x.real()), 0); };
  CHECK_THROWS_AS(integrate_line<double>(wild, ContourPath::real_line(8.0), opt), NoConvergence);
}

TEST_CASE("tolerance halving and truncation") {
  auto f = [](const cdouble& x) { return std::cos(3.0 * x) * std::exp(-0.5 * x * x) * (1.0 + x * x); };
  QuadOptions opt;
  opt.abs_tol = 1e-6;
  auto prev = integrate_line<double>(f, ContourPath::real_line(10.0), opt);
  for (int k = 0; k < 6; ++k) {
    opt.abs_tol /= 2;
    const auto cur = integrate_line<double>(f, ContourPath::real_line(10.0), opt);
    CHECK(std::abs(cur.value - prev.value) <= prev.err_estimate);
    prev = cur;
  }
  auto g = [](const cdouble& x) { return std::exp(-x * x) * (1.0 + x); };
  const auto a = integrate_line<double>(g, ContourPath::real_line(8.0));
  const auto b = integrate_line<double>(g, ContourPath::real_line(10.0));
  CHECK(std::abs(a.value - b.value) < 1e-12);
}

TEST_CASE("mapped and tail integration") {
  auto lorentz = [](const quad& x) { return cquad(1 / (1 + x * x), 0); };
  const auto whole = integrate_real_mapped<quad>(lorentz, quad(1));
  CHECK(test::dabs(whole.value - pi<quad>()) < 1e-25);
  const auto tail = integrate_tail<quad>(lorentz, quad(1), quad(2));
  CHECK(test::dabs(tail.value - pi<quad>() / 4) < 1e-25);
}

TEST_CASE("integrate_plane") {
  auto g = [](cdouble z) { return std::exp(-std::norm(z)) / pi<double>(); };
  const auto q = integrate_plane(g, 6.0, 48, 8, 1);
  CHECK(std::abs(q.value - 1.0) < 1e-8);
  auto odd = [](cdouble z) { return z.real() * std::exp(-std::norm(z)); };
  CHECK(std::abs(integrate_plane(odd, 6.0).value) < 1e-12);
  // worker count does not change a single bit
  auto h = [](cdouble z) { return std::exp(-std::norm(z - cdouble(0.3, 0.1))) * (1.0 + z * z); };
  const auto one = integrate_plane(h, 5.0, 20, 8, 1);
  const auto three = integrate_plane(h, 5.0, 20, 8, 3);
  CHECK(one.value == three.value);
}

TEST_CASE("contour rotation") {
  const auto rep = contour_rotation_check(3, 3, 1.0, {4, 5, 6});
  CHECK(rep.all_pass());
  // vertical edges shrink at least tenfold per unit R
  std::vector<double> right;
  for (double R : {4.0, 5.0, 6.0}) right.push_back(static_cast<double>(cabs(rectangle_edges(3, 3, 1.0, R).right)));
  CHECK(right[1] * 10 <= right[0]);
  CHECK(right[2] * 10 <= right[1]);

  const auto e = rectangle_edges(1, 2, 0.8, 5.0);
  CHECK(test::dabs(e.left + e.right) <= 1e-9 * test::dabs(e.right));

  const auto z = rectangle_edges(2, 4, 0.0, 5.0);
  CHECK(z.rotated + z.real_axis + z.left + z.right == cquad());
  CHECK(z.left == cquad());

  CHECK_THROWS_AS(contour_rotation_check(1, 1, 1.6, {4}), DomainError);
  CHECK(std::abs(to_cdouble(rotated_hermite_integral(4, 4, 1.4)).real() / hermite_scale(4) - 1) < 1e-8);
}
