#pragma once

#include "iqho/polygauss.hpp"
#include "iqho/specfun.hpp"

#include <random>

namespace test {

using iqho::cquad;
using iqho::quad;

inline cquad cq(double re, double im = 0) { return cquad(re, im); }

inline double dabs(const cquad& z) { return static_cast<double>(iqho::cabs(z)); }

/// e_n(x) for width omega, straight from the Hermite coefficient table.
inline iqho::PolyGaussFn hermite_function(int n, double omega) {
  using std::pow;
  using std::sqrt;
  const auto h = iqho::HermiteCache::instance().coefficients_as<quad>(n);
  quad norm = pow(quad(omega) / iqho::pi<quad>(), quad(0.25));
  for (int k = 1; k <= n; ++k) norm /= sqrt(quad(2 * k));
  std::vector<cquad> c;
  quad s = 1;
  for (int k = 0; k <= n; ++k) {
    c.push_back(cquad(h[k] * s * norm, 0));
    s *= sqrt(quad(omega));
  }
  return iqho::PolyGaussFn(c, cq(omega));
}

/// Random polynomial x Gaussian with Re(alpha) in [amin, amax].
inline iqho::PolyGaussFn random_fn(std::mt19937_64& rng, int max_degree, double amin = 0.5, double amax = 2.0) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_real_distribution<double> a(amin, amax);
  std::uniform_int_distribution<int> deg(0, max_degree);
  const int d = deg(rng);
  std::vector<cquad> c;
  for (int k = 0; k <= d; ++k) c.push_back(cq(u(rng), u(rng)));
  if (c.back() == cquad()) c.back() = cq(1);
  return iqho::PolyGaussFn(c, cq(a(rng), 0.5 * u(rng)), cq(0.5 * u(rng), 0.5 * u(rng)),
                           cq(0.2 * u(rng), u(rng)));
}

/// Sum of monomials, each exponentiated separately; no Horner, no shared factor.
inline cquad naive_eval(const iqho::PolyGaussFn& f, const cquad& x) {
  cquad acc;
  cquad power = cq(1);
  for (const auto& a : f.coeffs()) {
    acc += a * power * iqho::cexp(f.gamma() + f.beta() * x - f.alpha() * x * x / quad(2));
    power *= x;
  }
  return acc;
}

}  // namespace test
