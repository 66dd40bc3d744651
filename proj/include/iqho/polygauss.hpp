#pragma once

// Exact algebra on functions p(x) * exp(gamma + beta*x - alpha*x^2/2).
//
// Every eigenfunction, vacuum, coherent state and test function handled by the
// library lives in this class. Differential operators with polynomial
// coefficients map the class into itself, and the pairing
// <f, g> = int conj(f) g dx has a closed form through complex Gaussian moments.

#include "iqho/errors.hpp"
#include "iqho/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <utility>
#include <vector>

namespace iqho {

/// Cancellation threshold below which operator and arithmetic results are
/// snapped to exact zero, relative to the magnitude of the contributions.
inline constexpr double kSnapRelTol = 1e-14;

template <SupportedReal Real>
class BasicPolyGauss {
 public:
  using real_type = Real;
  using complex_type = complex_t<Real>;
  using coeff_vector = std::vector<complex_type>;

  /// The zero function.
  BasicPolyGauss() : alpha_(Real(1), Real(0)) {}

  BasicPolyGauss(coeff_vector coeffs, complex_type alpha, complex_type beta = complex_type(),
                 complex_type gamma = complex_type())
      : coeffs_(std::move(coeffs)), alpha_(alpha), beta_(beta), gamma_(gamma) {
    if (alpha_.real() < Real(0)) {
      std::ostringstream msg;
      msg << "PolyGauss: Re(alpha) = " << static_cast<double>(alpha_.real())
          << " < 0 (growing Gaussian is not representable)";
      throw DomainError(msg.str());
    }
    strip();
  }

  static BasicPolyGauss gaussian(complex_type alpha, complex_type beta = complex_type(),
                                 complex_type gamma = complex_type()) {
    return BasicPolyGauss(coeff_vector{complex_type(Real(1), Real(0))}, alpha, beta, gamma);
  }

  const coeff_vector& coeffs() const { return coeffs_; }
  const complex_type& alpha() const { return alpha_; }
  const complex_type& beta() const { return beta_; }
  const complex_type& gamma() const { return gamma_; }

  /// -1 for the zero function.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }

  /// Same function with exp(gamma) folded into the coefficients.
  BasicPolyGauss canonical() const {
    if (gamma_ == complex_type()) return *this;
    const complex_type scale = cexp(gamma_);
    coeff_vector c = coeffs_;
    for (auto& v : c) v *= scale;
    return BasicPolyGauss(std::move(c), alpha_, beta_);
  }

  BasicPolyGauss scaled(const complex_type& factor) const {
    coeff_vector c = coeffs_;
    for (auto& v : c) v *= factor;
    return BasicPolyGauss(std::move(c), alpha_, beta_, gamma_);
  }

  BasicPolyGauss with_coeffs(coeff_vector c) const {
    return BasicPolyGauss(std::move(c), alpha_, beta_, gamma_);
  }

  /// Replace alpha, keeping everything else; used for rho-weight bookkeeping.
  BasicPolyGauss with_alpha(const complex_type& alpha) const {
    return BasicPolyGauss(coeffs_, alpha, beta_, gamma_);
  }

  template <SupportedReal To>
  BasicPolyGauss<To> cast() const {
    typename BasicPolyGauss<To>::coeff_vector c;
    c.reserve(coeffs_.size());
    for (const auto& v : coeffs_) c.push_back(convert<To, Real>(v));
    return BasicPolyGauss<To>(std::move(c), convert<To, Real>(alpha_), convert<To, Real>(beta_),
                              convert<To, Real>(gamma_));
  }

 private:
  void strip() {
    while (!coeffs_.empty() && coeffs_.back() == complex_type()) coeffs_.pop_back();
  }

  coeff_vector coeffs_;
  complex_type alpha_;
  complex_type beta_;
  complex_type gamma_;
};

namespace detail {

template <SupportedReal Real>
bool same_exponent(const complex_t<Real>& a, const complex_t<Real>& b) {
  using std::max;
  const Real scale = max(max(cabs(a), cabs(b)), Real(1));
  return cabs(a - b) <= Real(64) * epsilon<Real>() * scale;
}

/// Accumulator that tracks, per coefficient, the sum of |contributions| so
/// that exact cancellations can be snapped to zero.
template <SupportedReal Real>
struct SnappingSum {
  std::vector<complex_t<Real>> value;
  std::vector<Real> budget;

  explicit SnappingSum(std::size_t n) : value(n), budget(n, Real(0)) {}

  void add(std::size_t k, const complex_t<Real>& v) {
    if (k >= value.size()) {
      value.resize(k + 1);
      budget.resize(k + 1, Real(0));
    }
    value[k] += v;
    budget[k] += cabs(v);
  }

  std::vector<complex_t<Real>> finish() {
    for (std::size_t k = 0; k < value.size(); ++k) {
      if (cabs(value[k]) <= Real(kSnapRelTol) * budget[k]) value[k] = complex_t<Real>();
    }
    return std::move(value);
  }
};

}  // namespace detail

/// f + c*g for functions sharing alpha and beta. A differing gamma is folded
/// into g's coefficients.
template <SupportedReal Real>
BasicPolyGauss<Real> axpy(const BasicPolyGauss<Real>& f, const complex_t<Real>& c,
                          const BasicPolyGauss<Real>& g) {
  using C = complex_t<Real>;
  if (g.is_zero() || c == C()) return f;
  if (f.is_zero()) return g.scaled(c);
  if (!detail::same_exponent<Real>(f.alpha(), g.alpha()) ||
      !detail::same_exponent<Real>(f.beta(), g.beta())) {
    throw DomainError("PolyGauss: sum of functions with different Gaussian exponents");
  }
  C factor = c;
  if (!(f.gamma() == g.gamma())) factor *= cexp(g.gamma() - f.gamma());
  const std::size_t n = std::max(f.coeffs().size(), g.coeffs().size());
  detail::SnappingSum<Real> acc(n);
  for (std::size_t k = 0; k < f.coeffs().size(); ++k) acc.add(k, f.coeffs()[k]);
  for (std::size_t k = 0; k < g.coeffs().size(); ++k) acc.add(k, factor * g.coeffs()[k]);
  return f.with_coeffs(acc.finish());
}

template <SupportedReal Real>
BasicPolyGauss<Real> operator+(const BasicPolyGauss<Real>& f, const BasicPolyGauss<Real>& g) {
  return axpy(f, complex_t<Real>(Real(1), Real(0)), g);
}

template <SupportedReal Real>
BasicPolyGauss<Real> operator-(const BasicPolyGauss<Real>& f, const BasicPolyGauss<Real>& g) {
  return axpy(f, complex_t<Real>(Real(-1), Real(0)), g);
}

template <SupportedReal Real>
BasicPolyGauss<Real> operator*(const complex_t<Real>& c, const BasicPolyGauss<Real>& f) {
  return f.scaled(c);
}

/// Largest coefficient difference relative to the largest coefficient of
/// either side, after folding gamma into the coefficients. Both functions must
/// share alpha and beta; two zero functions give 0.
template <SupportedReal Real>
Real coefficient_discrepancy(const BasicPolyGauss<Real>& f, const BasicPolyGauss<Real>& g) {
  using std::max;
  if (f.is_zero() && g.is_zero()) return Real(0);
  if (!f.is_zero() && !g.is_zero() &&
      (!detail::same_exponent<Real>(f.alpha(), g.alpha()) ||
       !detail::same_exponent<Real>(f.beta(), g.beta()))) {
    return std::numeric_limits<Real>::infinity();
  }
  const auto a = f.canonical().coeffs();
  const auto b = g.canonical().coeffs();
  const std::size_t n = max(a.size(), b.size());
  Real diff(0), scale(0);
  for (std::size_t k = 0; k < n; ++k) {
    const auto ak = k < a.size() ? a[k] : complex_t<Real>();
    const auto bk = k < b.size() ? b[k] : complex_t<Real>();
    diff = max(diff, cabs(ak - bk));
    scale = max(scale, max(cabs(ak), cabs(bk)));
  }
  return diff / scale;
}

/// Pointwise value; Horner for the polynomial, exponent formed before exp.
template <SupportedReal Real>
complex_t<Real> eval(const BasicPolyGauss<Real>& f, const complex_t<Real>& x) {
  using C = complex_t<Real>;
  if (f.is_zero()) return C();
  C poly = f.coeffs().back();
  for (int k = f.degree() - 1; k >= 0; --k) poly = poly * x + f.coeffs()[k];
  const C exponent = f.gamma() + f.beta() * x - f.alpha() * x * x / Real(2);
  return poly * cexp(exponent);
}

/// Whether <f, g> weighted by exp(-weight_alpha x^2 / 2) converges.
template <SupportedReal Real>
bool compatible(const BasicPolyGauss<Real>& f, const BasicPolyGauss<Real>& g,
                const complex_t<Real>& weight_alpha = complex_t<Real>()) {
  if (f.is_zero() || g.is_zero()) return true;
  return (cconj(f.alpha()) + g.alpha() + weight_alpha).real() > Real(0);
}

/// Normalised moments m_k = M_k / M_0 of exp(-A x^2/2 + B x), from the
/// integration-by-parts recurrence M_k = ((k-1) M_{k-2} + B M_{k-1}) / A.
template <SupportedReal Real>
std::vector<complex_t<Real>> gaussian_moment_ratios(const complex_t<Real>& a,
                                                    const complex_t<Real>& b, int max_k) {
  using C = complex_t<Real>;
  std::vector<C> m(static_cast<std::size_t>(std::max(max_k, 0)) + 1);
  m[0] = C(Real(1), Real(0));
  if (max_k >= 1) m[1] = b / a;
  for (int k = 2; k <= max_k; ++k) m[k] = (Real(k - 1) * m[k - 2] + b * m[k - 1]) / a;
  return m;
}

/// int conj(f) g exp(-weight_alpha x^2 / 2) dx in closed form.
template <SupportedReal Real>
complex_t<Real> weighted_pairing(const BasicPolyGauss<Real>& f, const BasicPolyGauss<Real>& g,
                                 const complex_t<Real>& weight_alpha) {
  using C = complex_t<Real>;
  if (f.is_zero() || g.is_zero()) return C();
  const C a = cconj(f.alpha()) + g.alpha() + weight_alpha;
  if (!(a.real() > Real(0))) {
    std::ostringstream msg;
    msg << "pairing diverges: Re(conj(alpha_f) + alpha_g + w) = " << static_cast<double>(a.real());
    throw IncompatiblePair(msg.str());
  }
  const C b = cconj(f.beta()) + g.beta();
  const auto& fa = f.coeffs();
  const auto& gb = g.coeffs();
  std::vector<C> conv(fa.size() + gb.size() - 1);
  for (std::size_t j = 0; j < fa.size(); ++j) {
    const C cj = cconj(fa[j]);
    for (std::size_t k = 0; k < gb.size(); ++k) conv[j + k] += cj * gb[k];
  }
  const auto m = gaussian_moment_ratios<Real>(a, b, static_cast<int>(conv.size()) - 1);
  C sum;
  for (std::size_t s = 0; s < conv.size(); ++s) sum += conv[s] * m[s];
  const C log_scale = cconj(f.gamma()) + g.gamma() + b * b / (Real(2) * a);
  return csqrt(C(Real(2) * pi<Real>(), Real(0)) / a) * cexp(log_scale) * sum;
}

template <SupportedReal Real>
complex_t<Real> pairing(const BasicPolyGauss<Real>& f, const BasicPolyGauss<Real>& g) {
  return weighted_pairing(f, g, complex_t<Real>());
}

/// Phase factors e^{i theta/4}, e^{i theta/2}, e^{i theta} of a complex rotation.
/// The critical angles are built from exact values so that alpha = +-i*Omega
/// has an exactly vanishing real part.
template <SupportedReal Real>
struct Rotation {
  complex_t<Real> quarter;
  complex_t<Real> half;
  complex_t<Real> full;

  static Rotation angle(Real theta) {
    return {unit_phase<Real>(theta / Real(4)), unit_phase<Real>(theta / Real(2)),
            unit_phase<Real>(theta)};
  }

  static Rotation critical(int sign) {
    using std::cos;
    using std::sin;
    using std::sqrt;
    const Real s = sign >= 0 ? Real(1) : Real(-1);
    const Real h = sqrt(Real(2)) / Real(2);
    const Real eighth = pi<Real>() / Real(8);
    return {complex_t<Real>(cos(eighth), s * sin(eighth)), complex_t<Real>(h, s * h),
            complex_t<Real>(Real(0), s)};
  }

  Rotation inverse() const { return {cconj(quarter), cconj(half), cconj(full)}; }
};

/// e^{i theta/4} f(e^{i theta/2} x).
template <SupportedReal Real>
BasicPolyGauss<Real> rotate(const BasicPolyGauss<Real>& f, const Rotation<Real>& rot) {
  using C = complex_t<Real>;
  typename BasicPolyGauss<Real>::coeff_vector c = f.coeffs();
  C power(Real(1), Real(0));
  for (auto& v : c) {
    v *= power;
    power *= rot.half;
  }
  using std::atan2;
  // the e^{i theta/4} prefactor is kept in gamma
  const C log_quarter(Real(0), atan2(rot.quarter.imag(), rot.quarter.real()));
  return BasicPolyGauss<Real>(std::move(c), f.alpha() * rot.full, f.beta() * rot.half,
                              f.gamma() + log_quarter);
}

template <SupportedReal Real>
BasicPolyGauss<Real> rotate(const BasicPolyGauss<Real>& f, Real theta) {
  return rotate(f, Rotation<Real>::angle(theta));
}

/// Finite sum of terms c * x^j * (d/dx)^k.
template <SupportedReal Real>
class BasicDiffOp {
 public:
  using complex_type = complex_t<Real>;
  using key_type = std::pair<int, int>;  // (power of x, order of d/dx)
  using term_map = std::map<key_type, complex_type>;

  BasicDiffOp() = default;

  static BasicDiffOp term(int x_power, int d_order, const complex_type& c) {
    BasicDiffOp op;
    op.add_term(x_power, d_order, c);
    return op;
  }
  static BasicDiffOp identity() { return term(0, 0, one()); }
  static BasicDiffOp x() { return term(1, 0, one()); }
  static BasicDiffOp d() { return term(0, 1, one()); }
  /// Momentum p = -i d/dx.
  static BasicDiffOp p() { return term(0, 1, complex_type(Real(0), Real(-1))); }

  BasicDiffOp& add_term(int x_power, int d_order, const complex_type& c) {
    if (x_power < 0 || d_order < 0) throw DomainError("DiffOp: negative power");
    if (c == complex_type()) return *this;
    auto [it, inserted] = terms_.emplace(key_type{x_power, d_order}, c);
    if (!inserted) {
      it->second += c;
      if (it->second == complex_type()) terms_.erase(it);
    }
    return *this;
  }

  const term_map& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  int max_d_order() const {
    int k = 0;
    for (const auto& [key, c] : terms_) k = std::max(k, key.second);
    return k;
  }

  friend BasicDiffOp operator+(const BasicDiffOp& a, const BasicDiffOp& b) {
    return combine(a, one(), b);
  }
  friend BasicDiffOp operator-(const BasicDiffOp& a, const BasicDiffOp& b) {
    return combine(a, complex_type(Real(-1), Real(0)), b);
  }
  friend BasicDiffOp operator*(const complex_type& c, const BasicDiffOp& a) {
    BasicDiffOp out;
    for (const auto& [key, v] : a.terms_) out.add_term(key.first, key.second, c * v);
    return out;
  }

  /// Composition (a o b): Leibniz rule moves derivatives of a through x^j of b.
  friend BasicDiffOp operator*(const BasicDiffOp& a, const BasicDiffOp& b) {
    std::map<key_type, std::pair<complex_type, Real>> acc;
    for (const auto& [ka, ca] : a.terms_) {
      for (const auto& [kb, cb] : b.terms_) {
        const int j1 = ka.first, k1 = ka.second, j2 = kb.first, k2 = kb.second;
        Real falling(1);
        for (int i = 0; i <= std::min(k1, j2); ++i) {
          if (i > 0) falling *= Real(j2 - i + 1);
          const complex_type v = ca * cb * Real(binomial(k1, i)) * falling;
          auto& slot = acc[key_type{j1 + j2 - i, k1 + k2 - i}];
          slot.first += v;
          slot.second += cabs(v);
        }
      }
    }
    return from_accumulated(acc);
  }

  /// Formal adjoint: (c x^j D^k)^dagger = conj(c) (-1)^k D^k x^j, normal ordered.
  BasicDiffOp adjoint() const {
    std::map<key_type, std::pair<complex_type, Real>> acc;
    for (const auto& [key, c] : terms_) {
      const int j = key.first, k = key.second;
      const complex_type base = cconj(c) * Real((k % 2 == 0) ? 1 : -1);
      Real falling(1);
      for (int i = 0; i <= std::min(k, j); ++i) {
        if (i > 0) falling *= Real(j - i + 1);
        const complex_type v = base * Real(binomial(k, i)) * falling;
        auto& slot = acc[key_type{j - i, k - i}];
        slot.first += v;
        slot.second += cabs(v);
      }
    }
    return from_accumulated(acc);
  }

 private:
  static complex_type one() { return complex_type(Real(1), Real(0)); }

  static double binomial(int n, int k) {
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  }

  static BasicDiffOp combine(const BasicDiffOp& a, const complex_type& s, const BasicDiffOp& b) {
    std::map<key_type, std::pair<complex_type, Real>> acc;
    for (const auto& [key, v] : a.terms_) {
      acc[key].first += v;
      acc[key].second += cabs(v);
    }
    for (const auto& [key, v] : b.terms_) {
      acc[key].first += s * v;
      acc[key].second += cabs(s * v);
    }
    return from_accumulated(acc);
  }

  static BasicDiffOp from_accumulated(
      const std::map<key_type, std::pair<complex_type, Real>>& acc) {
    BasicDiffOp out;
    for (const auto& [key, slot] : acc) {
      if (cabs(slot.first) > Real(kSnapRelTol) * slot.second) {
        out.terms_.emplace(key, slot.first);
      }
    }
    return out;
  }

  term_map terms_;
};

/// Term-for-term comparison with an absolute tolerance scaled by the largest
/// coefficient.
template <SupportedReal Real>
Real op_discrepancy(const BasicDiffOp<Real>& a, const BasicDiffOp<Real>& b) {
  using std::max;
  Real scale(0), diff(0);
  auto keys = a.terms();
  for (const auto& [k, v] : b.terms()) keys.emplace(k, v);
  for (const auto& [key, unused] : keys) {
    (void)unused;
    const auto ia = a.terms().find(key);
    const auto ib = b.terms().find(key);
    const complex_t<Real> va = ia == a.terms().end() ? complex_t<Real>() : ia->second;
    const complex_t<Real> vb = ib == b.terms().end() ? complex_t<Real>() : ib->second;
    diff = max(diff, cabs(va - vb));
    scale = max(scale, max(cabs(va), cabs(vb)));
  }
  return scale == Real(0) ? Real(0) : diff / scale;
}

/// Image of f under op; stays in the class with the same alpha, beta, gamma.
template <SupportedReal Real>
BasicPolyGauss<Real> apply_op(const BasicDiffOp<Real>& op, const BasicPolyGauss<Real>& f) {
  using C = complex_t<Real>;
  using Poly = std::vector<C>;
  if (f.is_zero() || op.empty()) return BasicPolyGauss<Real>({}, f.alpha(), f.beta(), f.gamma());

  // derivs[k] holds the polynomial q with (d/dx)^k f = q * exp(...):
  // (p e^s)' = (p' + p s') e^s, s' = beta - alpha x.
  std::vector<Poly> derivs{f.coeffs()};
  for (int k = 1; k <= op.max_d_order(); ++k) {
    const Poly& p = derivs.back();
    Poly next(p.size() + 1);
    for (std::size_t i = 1; i < p.size(); ++i) next[i - 1] += Real(i) * p[i];
    for (std::size_t i = 0; i < p.size(); ++i) {
      next[i] += f.beta() * p[i];
      next[i + 1] -= f.alpha() * p[i];
    }
    derivs.push_back(std::move(next));
  }

  detail::SnappingSum<Real> acc(0);
  for (const auto& [key, c] : op.terms()) {
    const auto& q = derivs[static_cast<std::size_t>(key.second)];
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (q[i] == C()) continue;
      acc.add(i + static_cast<std::size_t>(key.first), c * q[i]);
    }
  }
  return BasicPolyGauss<Real>(acc.finish(), f.alpha(), f.beta(), f.gamma());
}

using PolyGaussFn = BasicPolyGauss<quad>;
using PolyGaussFnD = BasicPolyGauss<double>;
using DiffOp = BasicDiffOp<quad>;

}  // namespace iqho
