#pragma once

// Hermite and Legendre polynomials.

#include "iqho/errors.hpp"
#include "iqho/numeric.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace iqho {

inline constexpr int kDefaultHermiteMax = 128;

/// Exact integer coefficients of H_0..H_max_n (physicists' convention).
class HermiteCache {
 public:
  using integer = boost::multiprecision::cpp_int;

  explicit HermiteCache(int max_n = kDefaultHermiteMax);

  int max_n() const { return max_n_; }

  /// Coefficients c_k of H_n(y) = sum c_k y^k, ascending powers.
  const std::vector<integer>& coefficients(int n) const;

  template <SupportedReal Real>
  std::vector<Real> coefficients_as(int n) const {
    std::vector<Real> out;
    for (const auto& c : coefficients(n)) out.push_back(c.template convert_to<Real>());
    return out;
  }

  /// Shared default table, built on first use.
  static const HermiteCache& instance();

 private:
  int max_n_;
  std::vector<std::vector<integer>> table_;
};

void check_hermite_degree(int n, int max_n = kDefaultHermiteMax);

/// H_n(y) by the three-term recurrence H_n = 2y H_{n-1} - 2(n-1) H_{n-2}.
template <SupportedReal Real>
complex_t<Real> hermite_eval(int n, const complex_t<Real>& y, int max_n = kDefaultHermiteMax) {
  check_hermite_degree(n, max_n);
  using C = complex_t<Real>;
  C h0(Real(1), Real(0));
  if (n == 0) return h0;
  C h1 = Real(2) * y;
  for (int k = 2; k <= n; ++k) {
    C h2 = Real(2) * y * h1 - Real(2 * (k - 1)) * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

/// H_n(y) / sqrt(2^n n!), scaled recurrence; stays O(1) growth for large n.
template <SupportedReal Real>
complex_t<Real> hermite_normalized(int n, const complex_t<Real>& y) {
  using std::sqrt;
  using C = complex_t<Real>;
  C h0(Real(1), Real(0));
  if (n == 0) return h0;
  C h1 = sqrt(Real(2)) * y;
  for (int k = 2; k <= n; ++k) {
    C h2 = sqrt(Real(2) / Real(k)) * y * h1 - sqrt(Real(k - 1) / Real(k)) * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

/// H_n(y) from the coefficient table (cross-check only).
template <SupportedReal Real>
complex_t<Real> hermite_eval_table(int n, const complex_t<Real>& y,
                                   const HermiteCache& cache = HermiteCache::instance()) {
  check_hermite_degree(n, cache.max_n());
  const auto c = cache.coefficients_as<Real>(n);
  complex_t<Real> acc;
  for (int k = n; k >= 0; --k) acc = acc * y + c[k];
  return acc;
}

/// P_n(x) by Bonnet's recurrence.
template <SupportedReal Real>
Real legendre_eval(int n, Real x) {
  if (n < 0) throw DomainError("legendre_eval: negative degree");
  Real p0(1);
  if (n == 0) return p0;
  Real p1 = x;
  for (int k = 2; k <= n; ++k) {
    Real p2 = (Real(2 * k - 1) * x * p1 - Real(k - 1) * p0) / Real(k);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

/// Large-n estimate (2 pi n)^{-1/2} (x^2-1)^{-1/4} (x + sqrt(x^2-1))^{n+1/2}, x > 1.
template <SupportedReal Real>
Real legendre_asymptotic(int n, Real x) {
  using std::pow;
  using std::sqrt;
  if (!(x > Real(1))) throw DomainError("legendre_asymptotic: requires x > 1");
  if (n < 1) throw DomainError("legendre_asymptotic: requires n >= 1");
  const Real s = sqrt(x * x - Real(1));
  return pow(x + s, Real(n) + Real(0.5)) / (sqrt(Real(2) * pi<Real>() * Real(n)) * sqrt(s));
}

}  // namespace iqho
