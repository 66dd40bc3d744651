#pragma once

// Adaptive Gauss-Legendre quadrature on lines and segments of the complex
// plane, plus a fixed tensor rule on a square. Used as the independent oracle
// for every closed form in the library.

#include "iqho/errors.hpp"
#include "iqho/numeric.hpp"
#include "iqho/polygauss.hpp"
#include "iqho/report.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <queue>
#include <vector>

namespace iqho {

template <SupportedReal Real>
struct BasicQuadResult {
  complex_t<Real> value;
  Real err_estimate{0};
  long n_evals{0};
  int panels{0};
};

using QuadResult = BasicQuadResult<double>;

struct QuadOptions {
  double abs_tol = 1e-13;
  double rel_tol = 0.0;  // tolerance is max(abs_tol, rel_tol * |value|)
  int max_panels = 1 << 14;
  int initial_panels = 16;
  bool check_decay = true;  // refuse integrands that are not small at a line's ends
};

/// Symmetric n-point Gauss-Legendre rule on [-1, 1], nodes ascending.
template <SupportedReal Real>
struct GaussRule {
  std::vector<Real> nodes;
  std::vector<Real> weights;
};

template <SupportedReal Real>
const GaussRule<Real>& gauss_legendre(int order) {
  static std::mutex mu;
  static std::map<int, GaussRule<Real>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  if (order < 1) throw DomainError("gauss_legendre: order must be positive");
  // boost returns the non-negative zeros in ascending order
  const auto zeros = boost::math::legendre_p_zeros<Real>(order);
  GaussRule<Real> rule;
  auto weight = [&](const Real& x) {
    const Real dp = boost::math::legendre_p_prime(order, x);
    return Real(2) / ((Real(1) - x * x) * dp * dp);
  };
  for (auto z = zeros.rbegin(); z != zeros.rend(); ++z) {
    if (*z == Real(0)) continue;
    rule.nodes.push_back(-*z);
    rule.weights.push_back(weight(*z));
  }
  for (const auto& z : zeros) {
    rule.nodes.push_back(z);
    rule.weights.push_back(weight(z));
  }
  return cache.emplace(order, std::move(rule)).first->second;
}

/// Straight integration path z(t) with constant dz/dt.
class ContourPath {
 public:
  enum class Kind { RealLine, RotatedLine, Segment };

  static ContourPath real_line(double radius);
  /// z = e^{-i angle/2} t for t in [-radius, radius].
  static ContourPath rotated_line(double angle, double radius);
  static ContourPath segment(const cquad& z0, const cquad& z1);

  Kind kind() const { return kind_; }
  double angle() const { return angle_; }
  double radius() const { return radius_; }

  template <SupportedReal Real>
  complex_t<Real> start() const {
    return convert<Real, quad>(z0_);
  }
  template <SupportedReal Real>
  complex_t<Real> end() const {
    return convert<Real, quad>(z1_);
  }

 private:
  ContourPath(Kind kind, double angle, double radius, cquad z0, cquad z1)
      : kind_(kind), angle_(angle), radius_(radius), z0_(z0), z1_(z1) {}

  Kind kind_;
  double angle_;
  double radius_;
  cquad z0_;
  cquad z1_;
};

namespace detail {

template <SupportedReal Real>
struct Panel {
  Real a, b;
  complex_t<Real> fine, coarse;
  Real err;
  Real magnitude;  // sum |w f| with the fine rule, for the roundoff floor
};

template <SupportedReal Real, class F>
Panel<Real> eval_panel(const F& g, Real a, Real b, long& evals) {
  const auto& hi = gauss_legendre<Real>(32);
  const auto& lo = gauss_legendre<Real>(16);
  const Real mid = (a + b) / Real(2), half = (b - a) / Real(2);
  Panel<Real> p{a, b, {}, {}, Real(0), Real(0)};
  for (std::size_t i = 0; i < hi.nodes.size(); ++i) {
    const complex_t<Real> v = g(mid + half * hi.nodes[i]) * hi.weights[i];
    p.fine += v;
    p.magnitude += cabs(v);
  }
  for (std::size_t i = 0; i < lo.nodes.size(); ++i) p.coarse += g(mid + half * lo.nodes[i]) * lo.weights[i];
  p.fine *= half;
  p.coarse *= half;
  p.magnitude *= half;
  p.err = cabs(p.fine - p.coarse);
  evals += static_cast<long>(hi.nodes.size() + lo.nodes.size());
  return p;
}

template <SupportedReal Real>
Real roundoff_floor(Real magnitude) {
  return Real(64) * epsilon<Real>() * magnitude;
}

}  // namespace detail

/// Adaptive integral of g over the real interval [a, b]: GL16 per panel, GL8
/// as the embedded comparison, worst panel split first.
template <SupportedReal Real, class F>
BasicQuadResult<Real> integrate_interval(const F& g, Real a, Real b, const QuadOptions& opt = {}) {
  using std::max;
  using P = detail::Panel<Real>;
  auto worse = [](const P& x, const P& y) { return x.err < y.err; };
  std::priority_queue<P, std::vector<P>, decltype(worse)> heap(worse);
  long evals = 0;
  const int n0 = std::max(1, opt.initial_panels);
  for (int i = 0; i < n0; ++i) {
    const Real lo = a + (b - a) * Real(i) / Real(n0);
    const Real hi = i + 1 == n0 ? b : a + (b - a) * Real(i + 1) / Real(n0);
    heap.push(detail::eval_panel<Real>(g, lo, hi, evals));
  }
  // running totals, updated as panels are replaced
  Real err(0), mag(0);
  complex_t<Real> val;
  auto account = [&](const P& p, int sign) {
    err += Real(sign) * p.err;
    mag += Real(sign) * p.magnitude;
    if (sign > 0) val += p.fine; else val -= p.fine;
  };
  {
    auto copy = heap;
    while (!copy.empty()) {
      account(copy.top(), 1);
      copy.pop();
    }
  }
  for (;;) {
    if (err < Real(0)) err = Real(0);
    const Real target = max(Real(opt.abs_tol), Real(opt.rel_tol) * cabs(val));
    if (err <= target || err <= detail::roundoff_floor(mag)) break;
    if (static_cast<int>(heap.size()) >= opt.max_panels) {
      throw NoConvergence("adaptive quadrature: panel limit " + std::to_string(opt.max_panels) +
                          " reached with error estimate " + std::to_string(static_cast<double>(err)));
    }
    const P worst = heap.top();
    heap.pop();
    account(worst, -1);
    const Real m = (worst.a + worst.b) / Real(2);
    const P left = detail::eval_panel<Real>(g, worst.a, m, evals);
    const P right = detail::eval_panel<Real>(g, m, worst.b, evals);
    account(left, 1);
    account(right, 1);
    heap.push(left);
    heap.push(right);
  }
  // deterministic summation order: by panel position
  std::vector<P> panels;
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const P& x, const P& y) { return x.a < y.a; });
  std::vector<complex_t<Real>> parts;
  parts.reserve(panels.size());
  for (const auto& p : panels) parts.push_back(p.fine);
  while (parts.size() > 1) {
    std::vector<complex_t<Real>> next;
    for (std::size_t i = 0; i + 1 < parts.size(); i += 2) next.push_back(parts[i] + parts[i + 1]);
    if (parts.size() % 2) next.push_back(parts.back());
    parts.swap(next);
  }
  BasicQuadResult<Real> out;
  out.value = parts.empty() ? complex_t<Real>() : parts.front();
  // fresh sums: the running ones drift by rounding
  err = Real(0);
  mag = Real(0);
  for (const auto& p : panels) {
    err += p.err;
    mag += p.magnitude;
  }
  out.err_estimate = err + detail::roundoff_floor(mag);
  out.n_evals = evals;
  out.panels = static_cast<int>(panels.size());
  return out;
}

/// Integral of f(z) dz along the path.
template <SupportedReal Real, class F>
BasicQuadResult<Real> integrate_line(const F& f, const ContourPath& path, const QuadOptions& opt = {}) {
  using C = complex_t<Real>;
  C z0, dz;
  Real t0, t1;
  switch (path.kind()) {
    case ContourPath::Kind::RealLine:
      z0 = C();
      dz = C(Real(1), Real(0));
      t0 = -Real(path.radius());
      t1 = Real(path.radius());
      break;
    case ContourPath::Kind::RotatedLine:
      z0 = C();
      dz = unit_phase<Real>(-Real(path.angle()) / Real(2));
      t0 = -Real(path.radius());
      t1 = Real(path.radius());
      break;
    case ContourPath::Kind::Segment:
    default:
      z0 = path.start<Real>();
      dz = path.end<Real>() - z0;
      t0 = Real(0);
      t1 = Real(1);
      break;
  }
  auto g = [&](const Real& t) -> C { return f(z0 + dz * t) * dz; };
  auto res = integrate_interval<Real>(g, t0, t1, opt);
  if (opt.check_decay && path.kind() != ContourPath::Kind::Segment) {
    using std::max;
    const Real edge = max(cabs(g(t0)), cabs(g(t1))) * (t1 - t0);
    const Real target = max(Real(opt.abs_tol), Real(1e-12) * cabs(res.value));
    if (!(edge <= target)) {
      throw NoConvergence("integrand does not decay at the truncation radius (|f(+-R)|*2R = " +
                          std::to_string(static_cast<double>(edge)) + ")");
    }
  }
  return res;
}

/// Whole real line via x = scale * tan(t); needs f = o(1/x^2).
template <SupportedReal Real, class F>
BasicQuadResult<Real> integrate_real_mapped(const F& f, Real scale, const QuadOptions& opt = {}) {
  using std::cos;
  using std::tan;
  const Real h = pi<Real>() / Real(2);
  auto g = [&](const Real& t) -> complex_t<Real> {
    const Real c = cos(t);
    return f(scale * tan(t)) * (scale / (c * c));
  };
  return integrate_interval<Real>(g, -h, h, opt);
}

/// Tail [x0, inf) via x = x0 + scale * tan(t).
template <SupportedReal Real, class F>
BasicQuadResult<Real> integrate_tail(const F& f, Real x0, Real scale, const QuadOptions& opt = {}) {
  using std::cos;
  using std::tan;
  auto g = [&](const Real& t) -> complex_t<Real> {
    const Real c = cos(t);
    return f(x0 + scale * tan(t)) * (scale / (c * c));
  };
  return integrate_interval<Real>(g, Real(0), pi<Real>() / Real(2), opt);
}

/// Truncation radius for an integrand ~ x^degree exp(-a (x - centre)^2 / 2).
template <SupportedReal Real>
Real default_radius(Real a, Real centre, int degree) {
  using std::abs;
  using std::log;
  using std::max;
  using std::sqrt;
  // e^{-b^2/2} is below the working epsilon: 9 for binary64, 13 for binary128
  const Real b = std::is_same_v<Real, double> ? Real(9) : Real(13);
  const Real width = Real(1) / sqrt(a);
  const Real grow = Real(2 * std::max(degree, 0)) * log(Real(10) + abs(centre) + b * width);
  return abs(centre) + max(Real(8), sqrt(b * b + grow) * width);
}

/// <f, g> by real-line quadrature of conj(f) g, independent of the moment formula.
template <SupportedReal Real>
BasicQuadResult<Real> quadrature_pairing(const BasicPolyGauss<Real>& f, const BasicPolyGauss<Real>& g,
                                         QuadOptions opt = {}) {
  using C = complex_t<Real>;
  if (!compatible(f, g)) throw IncompatiblePair("quadrature_pairing: integrand does not decay");
  if (f.is_zero() || g.is_zero()) return {C(), Real(0), 1, 0};
  const Real a = (cconj(f.alpha()) + g.alpha()).real();
  const Real centre = (cconj(f.beta()) + g.beta()).real() / a;
  const Real radius = default_radius<Real>(a, centre, f.degree() + g.degree());
  // panels of about one Gaussian width
  using std::sqrt;
  opt.initial_panels = std::max(opt.initial_panels,
                                static_cast<int>(static_cast<double>(Real(2) * radius * sqrt(a) / Real(2))) + 1);
  const auto path = ContourPath::real_line(static_cast<double>(radius));
  auto integrand = [&](const C& x) { return cconj(eval(f, cconj(x))) * eval(g, x); };
  return integrate_line<Real>(integrand, path, opt);
}

/// Tensor Gauss-Legendre rule on [-R, R]^2 with panels x panels cells; F takes z = x + i y.
/// The error estimate compares against the half-order rule on the same cells.
/// Summation is row by row in a fixed order, so the result does not depend on workers.
QuadResult integrate_plane(const std::function<cdouble(cdouble)>& F, double radius, int panels = 48,
                           int rule_order = 8, int workers = 1);

/// Rectangle with corners A = (-R, R tan(theta/2)), B = -A, C = (R, 0), D = (-R, 0),
/// traversed A -> B -> C -> D -> A, for the integrand H_n(z) H_m(z) e^{-z^2}.
struct ContourEdges {
  double radius;
  cquad rotated;    // A -> B, the path Gamma_theta
  cquad right;      // B -> C
  cquad real_axis;  // C -> D
  cquad left;       // D -> A
  double vertical_bound;  // e^{-R^2} int_0^{R tan|theta/2|} |H_n H_m(R - i y)| e^{y^2} dy
};

ContourEdges rectangle_edges(int n, int m, double theta, double radius);

/// Rotated-line value and rectangle closure for each radius. Rows: rotated-line
/// integral vs 2^n n! sqrt(pi) delta, closure, parity of the vertical edges,
/// and vertical-edge decay across consecutive radii.
Report contour_rotation_check(int n, int m, double theta, const std::vector<double>& radii);

/// int H_n H_m e^{-z^2} dz along Gamma_theta (z = e^{-i theta/2} t), in binary128.
cquad rotated_hermite_integral(int n, int m, double theta, double radius = 0.0);

}  // namespace iqho
