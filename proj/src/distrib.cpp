#include "iqho/distrib.hpp"

#include "iqho/specfun.hpp"

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/tools/minima.hpp>

#include <cmath>

namespace iqho {

namespace {

nlohmann::ordered_json with(nlohmann::ordered_json base, const nlohmann::ordered_json& extra) {
  for (auto it = extra.begin(); it != extra.end(); ++it) base[it.key()] = it.value();
  return base;
}

void require_sign(int sign, const char* what) {
  if (sign != 1 && sign != -1) throw DomainError(std::string(what) + ": sign must be +1 or -1");
}

FamilyKind kind_of(DistSide side) { return side == DistSide::Phi ? FamilyKind::Phi : FamilyKind::Psi; }

const PolyGaussFn& member_at(const ThetaParams& params, int n, DistSide side) {
  return eigenfamily(params, kind_of(side), n)->member(n);
}

double binom(int n, int k) { return boost::math::binomial_coefficient<double>(n, k); }

// x^l f
PolyGaussFn times_power(const PolyGaussFn& f, int l) {
  if (f.is_zero() || l == 0) return f;
  PolyGaussFn::coeff_vector c(static_cast<std::size_t>(l), cquad());
  c.insert(c.end(), f.coeffs().begin(), f.coeffs().end());
  return f.with_coeffs(std::move(c));
}

QuadOptions fine_options() {
  QuadOptions opt;
  opt.abs_tol = 1e-14;
  opt.rel_tol = 1e-11;
  opt.check_decay = false;
  return opt;
}

}  // namespace

SchwartzProbe::SchwartzProbe(PolyGaussFn f) : f_(std::move(f)) {
  if (!(f_.alpha().real() > 0)) throw DomainError("SchwartzProbe: needs Re(alpha) > 0");
}

void require_valid(const RhoSpace& space) {
  if (!(space.omega > 0) || !std::isfinite(space.omega)) throw DomainError("RhoSpace: omega must be positive");
}

std::string dist_side_name(DistSide s) { return s == DistSide::Phi ? "phi" : "psi"; }

cquad distribution_pairing(int sign, int n, const SchwartzProbe& probe, double omega, DistSide side) {
  require_sign(sign, "distribution_pairing");
  return pairing(member_at(ThetaParams::critical(sign, omega), n, side), probe.f());
}

BasicQuadResult<quad> distribution_pairing_quadrature(int sign, int n, const SchwartzProbe& probe, double omega,
                                                      DistSide side) {
  require_sign(sign, "distribution_pairing_quadrature");
  QuadOptions opt;
  opt.abs_tol = 1e-24;
  return quadrature_pairing<quad>(member_at(ThetaParams::critical(sign, omega), n, side), probe.f(), opt);
}

double seminorm(const PolyGaussFn& f, int k) {
  if (k < 0) throw DomainError("seminorm: k must be non-negative");
  if (!(f.alpha().real() > 0)) throw DomainError("seminorm: needs Re(alpha) > 0");
  if (f.is_zero()) return 0;
  const auto fd = f.cast<double>();
  auto g = [&](double x) {
    const double w = k == 0 ? 1.0 : std::pow(std::abs(x), k);
    return w * std::abs(eval(fd, cdouble(x, 0)));
  };
  const double a = fd.alpha().real();
  const double centre = fd.beta().real() / a;
  const double radius = default_radius<double>(a, centre, fd.degree() + k);
  // scan, then refine every local maximum inside its bracket
  constexpr int N = 4096;
  std::vector<double> xs(N + 1), gs(N + 1);
  for (int i = 0; i <= N; ++i) {
    xs[i] = -radius + 2 * radius * i / N;
    gs[i] = g(xs[i]);
  }
  double best = std::max(g(0.0), *std::max_element(gs.begin(), gs.end()));
  for (int i = 1; i < N; ++i) {
    if (!(gs[i] >= gs[i - 1] && gs[i] >= gs[i + 1])) continue;
    const auto r = boost::math::tools::brent_find_minima([&](double x) { return -g(x); }, xs[i - 1], xs[i + 1],
                                                         std::numeric_limits<double>::digits / 2);
    best = std::max(best, -r.second);
  }
  return best;
}

double seminorm_sum(const PolyGaussFn& f, int l) {
  double s = 0;
  for (int j = 0; j <= l; ++j) s += binom(l, j) * seminorm(f, j);
  return s;
}

double pairing_constant(int n, double omega) {
  if (n < 0) throw DomainError("pairing_constant: n must be non-negative");
  check_hermite_degree(n);
  const cdouble rot(std::cos(pi<double>() / 4), std::sin(pi<double>() / 4));
  const double s = std::sqrt(omega);
  auto f = [&](double x) {
    return cdouble(std::abs(hermite_eval<double>(n, rot * (s * x))) / std::pow(1 + std::abs(x), n + 2), 0);
  };
  QuadOptions opt;
  opt.abs_tol = 1e-13;
  opt.rel_tol = 1e-11;
  const double integral = integrate_real_mapped<double>(f, 1.0, opt).value.real();
  // (Omega/pi)^{1/4} / sqrt(2^n n!) in logs
  const double log_pref = 0.25 * std::log(omega / pi<double>()) - 0.5 * (n * std::log(2.0) + std::lgamma(n + 1.0));
  return std::exp(log_pref) * integral;
}

Report distribution_bound_check(int sign, int n, const SchwartzProbe& probe, double omega) {
  Report rep;
  rep.title = "distribution_bound";
  const auto p = nlohmann::ordered_json{{"sign", sign > 0 ? "+" : "-"}, {"n", n}, {"omega", omega}};
  const cquad value = distribution_pairing(sign, n, probe, omega);
  const double mn = pairing_constant(n, omega);
  const double bound = mn * seminorm_sum(probe.f(), n + 2);
  rep.add(make_row("distribution_bound", with(p, {{"M_n", mn}}), cdouble(bound, 0), to_cdouble(value), 1e-12,
                   Check::UpperBound));
  const auto q = distribution_pairing_quadrature(sign, n, probe, omega);
  const double diff = static_cast<double>(cabs(value - q.value));
  const double allowed = 10 * static_cast<double>(q.err_estimate);
  rep.add(predicate_row("distribution_vs_quadrature", with(p, {{"err_estimate", static_cast<double>(q.err_estimate)}}),
                        to_cdouble(value), to_cdouble(q.value), diff <= allowed, allowed));
  return rep;
}

void validate_schedule(int sign, const std::vector<double>& schedule) {
  require_sign(sign, "theta schedule");
  if (schedule.empty()) throw ScheduleError("theta schedule is empty");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const double t = schedule[i];
    if (!std::isfinite(t) || !(abs(quad(t)) < pi<quad>() / 2)) {
      throw ScheduleError("theta schedule: point " + std::to_string(t) + " is outside (-pi/2, pi/2)");
    }
    if (i > 0 && !(sign * t > sign * schedule[i - 1])) {
      throw ScheduleError(std::string("theta schedule must move strictly toward ") + (sign > 0 ? "+" : "-") +
                          "pi/2");
    }
  }
}

double weak_limit_distance(int sign, int n, const SchwartzProbe& probe, const ThetaParams& at, DistSide side) {
  require_sign(sign, "weak_limit_distance");
  const auto limit = ThetaParams::critical(sign, at.omega());
  const cquad a = pairing(member_at(limit, n, side), probe.f());
  const cquad b = pairing(member_at(at, n, side), probe.f());
  return static_cast<double>(cabs(a - b));
}

WeakLimitResult weak_limit_study(int sign, int n, const SchwartzProbe& probe, double omega,
                                 const std::vector<double>& schedule, double tol, DistSide side) {
  validate_schedule(sign, schedule);
  WeakLimitResult out;
  const auto limit = ThetaParams::critical(sign, omega);
  const auto lim_d = member_at(limit, n, side).cast<double>();
  const auto fd = probe.f().cast<double>();
  const cquad lim_value = pairing(member_at(limit, n, side), probe.f());

  // ||(1+|x|)^{n+1} f||, independent of theta
  const auto opt = fine_options();
  const double f_weighted = std::sqrt(
      integrate_real_mapped<double>(
          [&](double x) { return cdouble(std::norm(eval(fd, cdouble(x, 0))) * std::pow(1 + std::abs(x), 2 * n + 2), 0); },
          1 / std::sqrt(fd.alpha().real()), opt)
          .value.real());

  const auto base = nlohmann::ordered_json{{"sign", sign > 0 ? "+" : "-"},
                                           {"side", dist_side_name(side)},
                                           {"n", n},
                                           {"omega", omega}};
  for (std::size_t j = 0; j < schedule.size(); ++j) {
    const double theta = schedule[j];
    const auto params = ThetaParams::square_integrable(theta, omega);
    const auto& member = member_at(params, n, side);
    const double d = static_cast<double>(cabs(lim_value - pairing(member, probe.f())));
    const auto md = member.cast<double>();
    auto chi_sq = [&](double x) {
      const cdouble diff = eval(lim_d, cdouble(x, 0)) - eval(md, cdouble(x, 0));
      return cdouble(std::norm(diff) / std::pow(1 + std::abs(x), 2 * n + 2), 0);
    };
    const double width = 1 / std::sqrt(omega * std::max(std::cos(theta), 1e-300));
    const double chi = std::sqrt(integrate_real_mapped<double>(chi_sq, std::min(width, 1e3), opt).value.real());
    out.thetas.push_back(theta);
    out.distances.push_back(d);
    out.majorants.push_back(chi * f_weighted);
    const auto p = with(base, {{"j", static_cast<int>(j) + 1}, {"theta", theta}});
    out.report.add(predicate_row("weak_limit_distance", p, cdouble(0, 0), cdouble(d, 0), true));
    out.report.add(make_row("weak_limit_majorant", p, cdouble(chi * f_weighted, 0), cdouble(d, 0), 1e-14,
                            Check::UpperBound));
  }

  const std::size_t start = (schedule.size() - 1) / 2;
  bool monotone = true;
  for (std::size_t j = start + 1; j < out.distances.size(); ++j) {
    if (out.distances[j] > out.distances[j - 1]) monotone = false;
  }
  out.report.add(predicate_row("weak_limit_nonincreasing", with(base, {{"from_j", static_cast<int>(start) + 1}}),
                               cdouble(0, 0), cdouble(out.distances.back(), 0), monotone));
  out.report.add(make_row("weak_limit_final", with(base, {{"theta", schedule.back()}}), cdouble(0, 0),
                          cdouble(out.distances.back(), 0), tol));

  // d ~ c (pi/2 - |theta|)^p, least squares on logs over the final half
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (std::size_t j = start; j < out.distances.size(); ++j) {
    if (!(out.distances[j] > 0)) continue;
    const double lx = std::log(pi<double>() / 2 - std::abs(out.thetas[j]));
    const double ly = std::log(out.distances[j]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++cnt;
  }
  if (cnt >= 2 && cnt * sxx - sx * sx > 0) out.fit_exponent = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  out.report.add(predicate_row("weak_limit_fit_exponent", base, cdouble(0, 0), cdouble(out.fit_exponent, 0), true));
  out.report.title = "weak_limit";
  return out;
}

bool vrho_membership(const RhoSpace& space, const PolyGaussFn& f) {
  require_valid(space);
  if (f.is_zero()) return true;
  return f.alpha().real() > quad(space.omega);
}

bool thetarho_membership(const RhoSpace& space, const PolyGaussFn& Phi) {
  require_valid(space);
  if (Phi.is_zero()) return true;
  return Phi.alpha().real() + quad(space.omega) > 0;
}

FunctionalResult thetarho_functional(const RhoSpace& space, const PolyGaussFn& Phi, const PolyGaussFn& f, double tol) {
  if (!thetarho_membership(space, Phi)) {
    throw MembershipError("thetarho_functional: Phi rho^{-1} is not square integrable (needs Re(alpha) + Omega > 0)");
  }
  if (!vrho_membership(space, f)) {
    throw MembershipError("thetarho_functional: rho f is not square integrable (needs Re(alpha) > Omega)");
  }
  const quad omega(space.omega);
  FunctionalResult out;
  out.direct = pairing(Phi, f);
  if (Phi.is_zero() || f.is_zero()) {
    out.weighted = cquad();
  } else {
    const auto phi_w = Phi.with_alpha(Phi.alpha() + omega);
    const auto f_w = f.with_alpha(f.alpha() - omega);
    out.weighted = pairing(phi_w, f_w);
  }
  const quad n_phi = Phi.is_zero() ? quad(0) : weighted_pairing(Phi, Phi, cquad(2 * omega, 0)).real();
  const quad n_f = f.is_zero() ? quad(0) : weighted_pairing(f, f, cquad(-2 * omega, 0)).real();
  out.bound = static_cast<double>(sqrt(n_phi * n_f));
  const auto p = nlohmann::ordered_json{{"omega", space.omega},
                                        {"slack", out.bound - static_cast<double>(cabs(out.direct))}};
  out.report.title = "thetarho_functional";
  out.report.add(make_row("functional_two_routes", p, to_cdouble(out.direct), to_cdouble(out.weighted), tol));
  out.report.add(make_row("functional_cauchy_schwarz", p, cdouble(out.bound, 0), to_cdouble(out.direct), 1e-12,
                          Check::UpperBound));
  return out;
}

Report continuity_check(const SchwartzProbe& f, const SchwartzProbe& g, int l, const std::vector<int>& ks) {
  if (l < 0) throw DomainError("continuity_check: l must be non-negative");
  Report rep;
  rep.title = "continuity";
  double prev_d = std::numeric_limits<double>::infinity();
  bool decreasing = true;
  double last_d = 0;
  for (int k : ks) {
    if (k < 1) throw DomainError("continuity_check: k must be positive");
    const auto fk = axpy(f.f(), cquad(quad(1) / quad(k), 0), g.f());
    const auto h = fk - f.f();
    const double d = h.is_zero() ? 0.0 : seminorm_sum(h, l + 1);
    double integral = 0;
    if (!h.is_zero()) {
      const auto xh = times_power(h, l).cast<double>();
      integral = quadrature_pairing<double>(xh, xh).value.real();
    }
    const auto p = nlohmann::ordered_json{{"l", l}, {"k", k}, {"D", d}};
    rep.add(make_row("continuity_integral_bound", p, cdouble(2 * d * d, 0), cdouble(integral, 0), 1e-12,
                     Check::UpperBound));
    if (!(d < prev_d)) decreasing = false;
    prev_d = d;
    last_d = d;
  }
  rep.add(predicate_row("continuity_D_decreasing", {{"l", l}}, cdouble(0, 0), cdouble(last_d, 0), decreasing));
  return rep;
}

Report rho_inverse_bounded(const RhoSpace& space) {
  require_valid(space);
  Report rep;
  rep.title = "rho_inverse";
  const double sup = seminorm(PolyGaussFn::gaussian(cquad(quad(space.omega), 0)), 0);
  rep.add(make_row("rho_inverse_sup", {{"omega", space.omega}}, cdouble(1, 0), cdouble(sup, 0), 1e-14));
  return rep;
}

}  // namespace iqho
