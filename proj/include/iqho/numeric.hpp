#pragma once

// Scalar types shared by every module.
//
// Exact algebra on the polynomial x Gaussian class runs in IEEE binary128
// (`quad`): monomial expansions of Hermite functions cancel heavily, and the
// relative error of a pairing is roughly eps * (sum of |terms|) / |result|.
// Pointwise evaluation and the 2D quadratures that only touch low-degree
// pairings use plain `double`.

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/complex128.hpp>
#include <boost/multiprecision/float128.hpp>

#include <complex>
#include <limits>
#include <type_traits>

namespace iqho {

using quad = boost::multiprecision::float128;
using cquad = boost::multiprecision::complex128;
using cdouble = std::complex<double>;

template <class Real>
struct complex_of;

template <>
struct complex_of<double> {
  using type = std::complex<double>;
};

template <>
struct complex_of<quad> {
  using type = cquad;
};

template <class Real>
using complex_t = typename complex_of<Real>::type;

template <class Real>
concept SupportedReal = std::is_same_v<Real, double> || std::is_same_v<Real, quad>;

template <class Real>
inline Real pi() {
  return boost::math::constants::pi<Real>();
}

template <class Real>
inline Real epsilon() {
  return std::numeric_limits<Real>::epsilon();
}

template <class Real>
inline complex_t<Real> imag_unit() {
  return complex_t<Real>(Real(0), Real(1));
}

/// e^{i*theta} evaluated in the target precision from a double angle.
template <class Real>
inline complex_t<Real> unit_phase(Real theta) {
  using std::cos;
  using std::sin;
  return complex_t<Real>(cos(theta), sin(theta));
}

template <class Real>
inline Real re(const complex_t<Real>& z) {
  return z.real();
}

template <class Real>
inline Real im(const complex_t<Real>& z) {
  return z.imag();
}

inline cdouble to_cdouble(const cdouble& z) { return z; }
inline cdouble to_cdouble(const cquad& z) {
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

template <class Real>
inline complex_t<Real> from_cdouble(const cdouble& z) {
  return complex_t<Real>(Real(z.real()), Real(z.imag()));
}

// Elementary complex functions with one spelling for both precisions.
inline cdouble cexp(const cdouble& z) { return std::exp(z); }
inline cquad cexp(const cquad& z) { return boost::multiprecision::exp(z); }
inline cdouble csqrt(const cdouble& z) { return std::sqrt(z); }
inline cquad csqrt(const cquad& z) { return boost::multiprecision::sqrt(z); }
inline cdouble clog(const cdouble& z) { return std::log(z); }
inline cquad clog(const cquad& z) { return boost::multiprecision::log(z); }
inline double cabs(const cdouble& z) { return std::abs(z); }
inline quad cabs(const cquad& z) { return boost::multiprecision::abs(z); }
inline cdouble cconj(const cdouble& z) { return std::conj(z); }
inline cquad cconj(const cquad& z) { return cquad(z.real(), -z.imag()); }

/// Precision conversion between the two complex types.
template <class To, class From>
inline complex_t<To> convert(const complex_t<From>& z) {
  return complex_t<To>(static_cast<To>(z.real()), static_cast<To>(z.imag()));
}

}  // namespace iqho
