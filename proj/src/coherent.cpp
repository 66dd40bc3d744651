#include "iqho/coherent.hpp"

#include "iqho/distrib.hpp"
#include "iqho/specfun.hpp"

#include <cmath>

namespace iqho {

namespace {

nlohmann::ordered_json with(nlohmann::ordered_json base, const nlohmann::ordered_json& extra) {
  for (auto it = extra.begin(); it != extra.end(); ++it) base[it.key()] = it.value();
  return base;
}

nlohmann::ordered_json z_json(const cquad& z) {
  return {{"z_re", static_cast<double>(z.real())}, {"z_im", static_cast<double>(z.imag())}};
}

// phi(z) at fixed params in binary64, phases computed once
class CoherentMaker {
 public:
  explicit CoherentMaker(const ThetaParams& params) {
    const auto rot = params.rotation();
    alpha_ = to_cdouble(quad(params.omega()) * rot.full);
    slope_ = to_cdouble(sqrt(2 * quad(params.omega())) * rot.half);
    gamma_ = cdouble(static_cast<double>(log(quad(params.omega()) / pi<quad>()) / 4),
                     static_cast<double>(atan2(rot.quarter.imag(), rot.quarter.real())));
  }
  PolyGaussFnD operator()(cdouble z) const {
    return PolyGaussFnD::gaussian(alpha_, slope_ * z, gamma_ - z.real() * z.real());
  }

 private:
  cdouble alpha_, slope_, gamma_;
};

}  // namespace

template <SupportedReal Real>
BasicPolyGauss<Real> bicoherent_state(const ThetaParams& params, const complex_t<Real>& z) {
  params.require_admissible();
  using C = complex_t<Real>;
  const auto rot = params.rotation();
  const Real omega(params.omega());
  const quad phase = atan2(rot.quarter.imag(), rot.quarter.real());
  const C half = convert<Real, quad>(rot.half);
  const C full = convert<Real, quad>(rot.full);
  using std::log;
  using std::sqrt;
  const C gamma(-z.real() * z.real() + log(omega / pi<Real>()) / Real(4), static_cast<Real>(phase));
  return BasicPolyGauss<Real>::gaussian(omega * full, sqrt(Real(2) * omega) * half * z, gamma);
}

template BasicPolyGauss<double> bicoherent_state<double>(const ThetaParams&, const cdouble&);
template BasicPolyGauss<quad> bicoherent_state<quad>(const ThetaParams&, const cquad&);

BiCoherentPair bicoherent(const ThetaParams& params, const cquad& z) {
  return {params, z, bicoherent_state<quad>(params, z), bicoherent_state<quad>(params.negated(), z)};
}

Report eigenvalue_check(const BiCoherentPair& pair, const OperatorSet& ops, double tol) {
  Report rep;
  rep.title = "coherent_eigen";
  const auto p = with(pair.params.to_json(), z_json(pair.z));
  auto residual = [&](const DiffOp& op, const PolyGaussFn& f) {
    const auto r = apply_op(op, f) - f.scaled(pair.z);
    if (r.is_zero()) return 0.0;
    quad worst = 0, scale = 0;
    for (const auto& c : r.coeffs()) worst = std::max(worst, cabs(c));
    for (const auto& c : f.coeffs()) scale = std::max(scale, cabs(c));
    return static_cast<double>(worst / std::max(scale * std::max(quad(1), cabs(pair.z)), quad(1e-300)));
  };
  rep.add(make_row("A_phi_eq_z_phi", p, cdouble(0, 0), cdouble(residual(ops.a, pair.phi), 0), tol));
  rep.add(make_row("Bdag_psi_eq_z_psi", p, cdouble(0, 0), cdouble(residual(ops.b_dag, pair.psi), 0), tol));
  return rep;
}

Report normalization_check(const BiCoherentPair& pair, double tol) {
  pair.params.require_square_integrable("normalization_check");
  Report rep;
  rep.title = "coherent_norm";
  rep.add(make_row("phi_psi_pairing", with(pair.params.to_json(), z_json(pair.z)), cdouble(1, 0),
                   to_cdouble(pairing(pair.phi, pair.psi)), tol));
  return rep;
}

cquad series_partial_sum(const ThetaParams& params, const cquad& z, int K, const quad& x) {
  const auto rot = params.rotation();
  const quad omega(params.omega());
  const cquad y = rot.half * sqrt(omega) * x;
  // h_k by the normalised recurrence, weights z^k / sqrt(k!) updated alongside
  cquad h0(1, 0), h1 = sqrt(quad(2)) * y;
  cquad w(1, 0);
  cquad sum = h0;
  for (int k = 1; k <= K; ++k) {
    w *= z / sqrt(quad(k));
    if (k == 1) {
      sum += w * h1;
      continue;
    }
    const cquad h2 = sqrt(quad(2) / quad(k)) * y * h1 - sqrt(quad(k - 1) / quad(k)) * h0;
    h0 = h1;
    h1 = h2;
    sum += w * h1;
  }
  const quad phase = atan2(rot.quarter.imag(), rot.quarter.real());
  const cquad log_pref(log(omega / pi<quad>()) / 4 - norm(z) / 2, phase);
  return sum * cexp(log_pref - omega * rot.full * x * x / 2);
}

namespace {

// known_phase, when given, skips the projection onto S_{phase_K}
SeriesResult series_at(const ThetaParams& params, const cquad& z, int K, int phase_K, const cquad* known_phase) {
  params.require_square_integrable("series_truncation");
  if (K < 0) throw DomainError("series_truncation: K must be non-negative");
  check_hermite_degree(std::max(K, phase_K));
  const auto T = bicoherent_state<quad>(params, z);

  // integration window from |T|^2 ~ exp(-Re(alpha) x^2 + 2 Re(beta) x)
  const quad a = 2 * T.alpha().real();
  const quad centre = 2 * T.beta().real() / a;
  const quad radius = default_radius<quad>(a, centre, std::max(K, phase_K));
  QuadOptions opt;
  opt.abs_tol = 1e-32;
  opt.rel_tol = 1e-10;
  // two Gaussian widths per 32-point panel
  opt.initial_panels = std::max(8, static_cast<int>(static_cast<double>(radius * sqrt(a))) + 1);
  opt.check_decay = false;
  const auto path = ContourPath::real_line(static_cast<double>(radius));

  SeriesResult out;
  out.K = K;
  out.reference_phase = static_cast<double>(-z.real() * z.imag());
  // phase: <T, S_ref> / <T, T>, normalised
  if (known_phase) {
    out.phase = *known_phase;
  } else {
    auto f = [&](const cquad& x) { return cconj(eval(T, x)) * series_partial_sum(params, z, phase_K, x.real()); };
    const cquad proj = integrate_line<quad>(f, path, opt).value;
    out.phase = proj / cabs(proj);
  }
  auto diff = [&](const cquad& x) {
    const cquad d = series_partial_sum(params, z, K, x.real()) - out.phase * eval(T, x);
    return cquad(norm(d), 0);
  };
  const auto q = integrate_line<quad>(diff, path, opt);
  out.distance = static_cast<double>(sqrt(q.value.real()));

  // |S_K - T| <= e^{-|z|^2/2} sum_{k>K} |z|^k / sqrt(k!) |phi_k|
  {
    double kphi = 1;
    double r = 1;
    if (params.theta() != 0.0) {
      kphi = std::sqrt(norm_sq(params, 1).bound_constant);
      r = std::sqrt(2 / std::cos(params.theta()));
    }
    const double az = std::abs(to_cdouble(z));
    double tail = 0;
    double logw = 0;  // log(|z|^k / sqrt(k!))
    for (int k = 1; k <= K + 400; ++k) {
      logw += std::log(az) - 0.5 * std::log(static_cast<double>(k));
      if (k <= K) continue;
      const double term = std::exp(logw + k * std::log(r)) * (params.theta() != 0.0 ? std::pow(k, -0.25) : 1.0);
      tail += term;
      if (term < 1e-40 * tail) break;
    }
    out.predicted = az == 0 ? 0 : kphi * std::exp(-az * az / 2) * tail;
  }

  const auto p = with(with(params.to_json(), z_json(z)), {{"K", K}});
  out.report.title = "series";
  out.report.add(make_row("series_distance", p, cdouble(0, 0), cdouble(out.distance, 0), 1e-6));
  // the measured distance carries a floor on top of the bound: sqrt(quadrature err)
  // plus pointwise rounding of S_K and T (|T| = 1)
  const double floor = std::sqrt(static_cast<double>(q.err_estimate)) + 1e3 * static_cast<double>(epsilon<quad>());
  out.report.add(make_row("series_tail_bound", with(p, {{"quadrature_floor", floor}}),
                          cdouble(out.predicted + floor, 0), cdouble(out.distance, 0), 1e-6, Check::UpperBound));
  out.report.add(predicate_row("series_phase", with(p, {{"phase_K", phase_K}}),
                               cdouble(std::cos(out.reference_phase), std::sin(out.reference_phase)),
                               to_cdouble(out.phase), true));
  return out;
}

}  // namespace

SeriesResult series_truncation(const ThetaParams& params, const cquad& z, int K, int phase_K) {
  return series_at(params, z, K, phase_K, nullptr);
}

std::vector<SeriesResult> series_sweep(const ThetaParams& params, const cquad& z, const std::vector<int>& Ks,
                                       int phase_K) {
  std::vector<SeriesResult> out;
  for (int K : Ks) {
    out.push_back(series_at(params, z, K, phase_K, out.empty() ? nullptr : &out.front().phase));
  }
  return out;
}

PlaneEstimate integrate_plane_with_tail(const std::function<cdouble(cdouble)>& F, const QuadGrid2D& grid) {
  PlaneEstimate est;
  est.quad = integrate_plane(F, grid.radius, grid.panels, grid.order, grid.workers);
  // envelope max over angles at two radii, Gaussian fit between them
  auto envelope = [&](double r) {
    double m = 0;
    for (int k = 0; k < 128; ++k) {
      const double t = 2 * pi<double>() * k / 128;
      m = std::max(m, std::abs(F(std::polar(r, t))));
    }
    return m;
  };
  const double r0 = grid.radius / 2, r1 = grid.radius;
  const double m0 = envelope(r0), m1 = envelope(r1);
  if (m1 == 0) {
    est.decay_rate = std::numeric_limits<double>::infinity();
    est.tail = 0;
    return est;
  }
  est.decay_rate = std::log(m0 / m1) / (r1 * r1 - r0 * r0);
  // int_{|z|>R} M(R) e^{-kappa (r^2 - R^2)} r dr dphi
  est.tail = est.decay_rate > 0 ? pi<double>() / est.decay_rate * m1 : std::numeric_limits<double>::infinity();
  return est;
}

namespace {

void add_resolution_rows(Report& rep, const std::string& name, const nlohmann::ordered_json& p, cdouble expected,
                         const PlaneEstimate& est, double tol) {
  auto row = make_row(name, p, expected, est.quad.value, tol);
  rep.add(row);
  rep.add(predicate_row(name + "_tail", with(p, {{"decay_rate", est.decay_rate}}), cdouble(0, 0),
                        cdouble(est.tail, 0), est.tail <= tol, tol));
}

}  // namespace

Report identity_resolution_L2(const ThetaParams& params, const PolyGaussFn& f, const PolyGaussFn& g,
                              const QuadGrid2D& grid, double tol) {
  params.require_square_integrable("identity_resolution_L2");
  const auto fd = f.cast<double>();
  const auto gd = g.cast<double>();
  const CoherentMaker phi(params), psi(params.negated());
  auto F = [&](cdouble z) { return pairing(fd, phi(z)) * pairing(psi(z), gd) / pi<double>(); };
  Report rep;
  rep.title = "resolution_L2";
  const auto p = with(params.to_json(), {{"R", grid.radius}, {"panels", grid.panels}});
  add_resolution_rows(rep, "resolution_L2", p, to_cdouble(pairing(f, g)), integrate_plane_with_tail(F, grid), tol);
  return rep;
}

Report identity_resolution_IQHO(int sign, double omega, const PolyGaussFn& f, const PolyGaussFn& g,
                                const QuadGrid2D& grid, double tol) {
  const RhoSpace space{omega};
  if (!vrho_membership(space, f) || !vrho_membership(space, g)) {
    throw MembershipError("identity_resolution_IQHO: f and g must satisfy Re(alpha) > Omega (rho f in L^2)");
  }
  const auto plus = ThetaParams::critical(sign, omega);
  const auto minus = plus.negated();
  const auto fd = f.cast<double>();
  const auto gd = g.cast<double>();
  // psi^(+-)(z) = phi^(-+)(z)
  const CoherentMaker phi(plus), psi(minus);
  auto psi_phi = [&](cdouble z) { return pairing(fd, psi(z)) * pairing(phi(z), gd) / pi<double>(); };
  auto phi_psi = [&](cdouble z) { return pairing(fd, phi(z)) * pairing(psi(z), gd) / pi<double>(); };
  Report rep;
  rep.title = "resolution_IQHO";
  const auto p = with(plus.to_json(), {{"sign", sign > 0 ? "+" : "-"}, {"R", grid.radius}, {"panels", grid.panels}});
  const cdouble expected = to_cdouble(pairing(f, g));
  const auto a = integrate_plane_with_tail(psi_phi, grid);
  const auto b = integrate_plane_with_tail(phi_psi, grid);
  add_resolution_rows(rep, "resolution_f_psi_phi_g", p, expected, a, tol);
  add_resolution_rows(rep, "resolution_f_phi_psi_g", p, expected, b, tol);
  rep.add(make_row("orderings_agree", p, a.quad.value, b.quad.value, tol));
  return rep;
}

}  // namespace iqho
