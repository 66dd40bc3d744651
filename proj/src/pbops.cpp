#include "iqho/pbops.hpp"

#include "iqho/numquad.hpp"
#include "iqho/specfun.hpp"

#include <cmath>
#include <map>
#include <tuple>

namespace iqho {

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::SquareIntegrable: return "square_integrable";
    case Regime::Critical: return "critical";
    case Regime::Forbidden: return "forbidden";
  }
  return "forbidden";
}

ThetaParams ThetaParams::angle(double theta, double omega) {
  if (!(omega > 0) || !std::isfinite(omega)) throw DomainError("omega must be positive");
  if (!std::isfinite(theta)) throw DomainError("theta must be finite");
  // compared in binary128: the double nearest pi/2 lies below pi/2
  const Regime r = abs(quad(theta)) < pi<quad>() / 2 ? Regime::SquareIntegrable : Regime::Forbidden;
  return ThetaParams(theta, omega, r, 0);
}

ThetaParams ThetaParams::square_integrable(double theta, double omega) {
  auto p = angle(theta, omega);
  p.require_square_integrable("ThetaParams");
  return p;
}

ThetaParams ThetaParams::critical(int sign, double omega) {
  if (!(omega > 0) || !std::isfinite(omega)) throw DomainError("omega must be positive");
  const int s = sign >= 0 ? 1 : -1;
  return ThetaParams(s * pi<double>() / 2, omega, Regime::Critical, s);
}

Rotation<quad> ThetaParams::rotation() const {
  if (regime_ == Regime::Critical) return Rotation<quad>::critical(sign_);
  return Rotation<quad>::angle(quad(theta_));
}

ThetaParams ThetaParams::negated() const {
  if (regime_ == Regime::Critical) return critical(-sign_, omega_);
  return ThetaParams(-theta_, omega_, regime_, 0);
}

void ThetaParams::require_admissible() const {
  if (regime_ == Regime::Forbidden) {
    throw RegimeError("theta = " + std::to_string(theta_) +
                      " is outside [-pi/2, pi/2]: the eigenfunctions grow and are not defined");
  }
}

void ThetaParams::require_square_integrable(const std::string& what) const {
  if (regime_ != Regime::SquareIntegrable) {
    throw RegimeError(what + ": needs |theta| < pi/2, got the " + regime_name(regime_) + " regime");
  }
}

nlohmann::ordered_json ThetaParams::to_json() const {
  nlohmann::ordered_json j;
  j["theta"] = theta_;
  j["omega"] = omega_;
  j["regime"] = regime_name(regime_);
  return j;
}

namespace {

cquad cq(const quad& re, const quad& im = 0) { return cquad(re, im); }

nlohmann::ordered_json with(nlohmann::ordered_json base, const nlohmann::ordered_json& extra) {
  for (auto it = extra.begin(); it != extra.end(); ++it) base[it.key()] = it.value();
  return base;
}

/// Residual of lhs against the expected function, relative to the size of the
/// input; an expected zero demands that lhs snapped to exactly zero.
double residual(const PolyGaussFn& lhs, const PolyGaussFn& expected) {
  if (expected.is_zero()) {
    if (lhs.is_zero()) return 0.0;
    return std::numeric_limits<double>::infinity();
  }
  return static_cast<double>(coefficient_discrepancy(lhs, expected));
}

quad sqrt_factorial_ratio(int n) { return sqrt(quad(n)); }

}  // namespace

DiffOp annihilation(double omega) {
  const quad s = sqrt(2 * quad(omega));
  return DiffOp::term(1, 0, cq(quad(omega) / s)) + DiffOp::term(0, 1, cq(1 / s));
}

DiffOp creation(double omega) { return annihilation(omega).adjoint(); }

OperatorSet build_operators(const ThetaParams& params) {
  const auto rot = params.rotation();
  const quad omega(params.omega());
  const quad s = sqrt(2 * omega);
  const cquad xc = rot.half * omega / s;
  const cquad dc = cconj(rot.half) / s;
  OperatorSet ops;
  ops.a = DiffOp::term(1, 0, xc) + DiffOp::term(0, 1, dc);
  ops.b = DiffOp::term(1, 0, xc) + DiffOp::term(0, 1, -dc);
  ops.a_dag = ops.a.adjoint();
  ops.b_dag = ops.b.adjoint();
  ops.n_op = ops.b * ops.a;
  ops.h = (rot.full * omega) * (ops.n_op + DiffOp::term(0, 0, cq(0.5)));
  return ops;
}

DiffOp hamiltonian_direct(const ThetaParams& params) {
  const auto rot = params.rotation();
  const quad omega(params.omega());
  return DiffOp::term(0, 2, cq(-0.5)) + DiffOp::term(2, 0, rot.full * rot.full * omega * omega / 2);
}

Report operator_check(const ThetaParams& params) {
  Report rep;
  rep.title = "operators";
  const auto ops = build_operators(params);
  const auto neg = build_operators(params.negated());
  const auto p = params.to_json();
  auto row = [&](const std::string& q, const DiffOp& x, const DiffOp& y) {
    rep.add(make_row(q, p, cdouble(0, 0), cdouble(static_cast<double>(op_discrepancy(x, y)), 0), kExactTol));
  };
  row("adjoint_A_eq_B_minus", ops.a_dag, neg.b);
  row("adjoint_B_eq_A_minus", ops.b_dag, neg.a);
  row("hamiltonian_factorised", ops.h, hamiltonian_direct(params));
  if (params.is_critical()) {
    row("H_plus_eq_H_minus", ops.h, neg.h);
    row("H_formally_selfadjoint", ops.h.adjoint(), ops.h);
  }
  return rep;
}

Report commutator_check(const ThetaParams& params, const std::vector<PolyGaussFn>& probes, double tol) {
  Report rep;
  rep.title = "commutator";
  const auto ops = build_operators(params);
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto& f = probes[i];
    const auto abf = apply_op(ops.a, apply_op(ops.b, f));
    const auto baf = apply_op(ops.b, apply_op(ops.a, f));
    const double r = residual(abf - baf, f);
    rep.add(make_row("commutator_AB", with(params.to_json(), {{"probe", i}}), cdouble(0, 0), cdouble(r, 0), tol));
  }
  return rep;
}

std::string family_name(FamilyKind k) {
  switch (k) {
    case FamilyKind::Phi: return "phi";
    case FamilyKind::Psi: return "psi";
    case FamilyKind::E: return "e";
  }
  return "phi";
}

namespace {

ThetaParams member_params_for(const ThetaParams& p, FamilyKind kind) {
  switch (kind) {
    case FamilyKind::Psi: return p.negated();
    case FamilyKind::E: return ThetaParams::angle(0.0, p.omega());
    case FamilyKind::Phi:
    default: return p;
  }
}

DiffOp raising_for(const ThetaParams& p, FamilyKind kind) {
  switch (kind) {
    case FamilyKind::Psi: return build_operators(p).a_dag;
    case FamilyKind::E: return creation(p.omega());
    case FamilyKind::Phi:
    default: return build_operators(p).b;
  }
}

}  // namespace

EigenFamily::EigenFamily(const ThetaParams& params, FamilyKind kind)
    : params_((params.require_admissible(), params)),
      kind_(kind),
      member_params_(member_params_for(params, kind)),
      raising_(raising_for(params, kind)) {}

PolyGaussFn EigenFamily::closed_form(int n) const {
  check_hermite_degree(n);
  const auto rot = member_params_.rotation();
  const quad omega(member_params_.omega());
  const auto h = HermiteCache::instance().coefficients_as<quad>(n);
  quad inv_norm = 1;
  for (int k = 1; k <= n; ++k) inv_norm /= sqrt(quad(2 * k));
  const cquad scale = rot.half * sqrt(omega);
  std::vector<cquad> c(static_cast<std::size_t>(n) + 1);
  cquad power = cq(1);
  for (int k = 0; k <= n; ++k) {
    c[k] = h[k] * inv_norm * power;
    power *= scale;
  }
  const quad phase = atan2(rot.quarter.imag(), rot.quarter.real());
  return PolyGaussFn(std::move(c), omega * rot.full, cquad(), cquad(log(omega / pi<quad>()) / 4, phase));
}

const PolyGaussFn& EigenFamily::member(int n) const {
  check_hermite_degree(n);
  std::lock_guard<std::mutex> lock(mu_);
  while (static_cast<int>(closed_.size()) <= n) closed_.push_back(closed_form(static_cast<int>(closed_.size())));
  return closed_[n];
}

const PolyGaussFn& EigenFamily::raised(int n) const {
  check_hermite_degree(n);
  const PolyGaussFn& vacuum = member(0);
  std::lock_guard<std::mutex> lock(mu_);
  if (raised_.empty()) raised_.push_back(vacuum);
  while (static_cast<int>(raised_.size()) <= n) {
    const int k = static_cast<int>(raised_.size());
    raised_.push_back(apply_op(raising_, raised_.back()).scaled(cq(1 / sqrt_factorial_ratio(k))));
  }
  return raised_[n];
}

double EigenFamily::construction_discrepancy(int n) const {
  return static_cast<double>(coefficient_discrepancy(member(n), raised(n)));
}

std::shared_ptr<const EigenFamily> eigenfamily(const ThetaParams& params, FamilyKind kind, int n_max) {
  params.require_admissible();
  check_hermite_degree(n_max);
  using Key = std::tuple<int, int, int, double, double>;
  struct Entry {
    std::shared_ptr<const EigenFamily> family;
    int verified = -1;
  };
  static std::mutex mu;
  static std::map<Key, Entry> registry;
  const Key key{static_cast<int>(kind), static_cast<int>(params.regime()), params.critical_sign(), params.theta(),
                params.omega()};
  std::lock_guard<std::mutex> lock(mu);
  auto& entry = registry[key];
  if (!entry.family) entry.family = std::make_shared<const EigenFamily>(params, kind);
  for (int n = entry.verified + 1; n <= n_max; ++n) {
    const double d = entry.family->construction_discrepancy(n);
    if (!(d <= kDualConstructionTol)) {
      throw Error("eigenfamily: raising and Hermite constructions of " + family_name(kind) + "_" +
                  std::to_string(n) + " differ by " + std::to_string(d));
    }
    entry.verified = n;
  }
  return entry.family;
}

Report ladder_check(const ThetaParams& params, int n_max, double tol) {
  Report rep;
  rep.title = "ladder";
  const auto phi = eigenfamily(params, FamilyKind::Phi, n_max + 1);
  const auto psi = eigenfamily(params, FamilyKind::Psi, n_max + 1);
  const auto ops = build_operators(params);
  const DiffOp n_dag = ops.n_op.adjoint();
  const PolyGaussFn zero_phi = phi->member(0).scaled(cquad());
  const PolyGaussFn zero_psi = psi->member(0).scaled(cquad());
  for (int n = 0; n <= n_max; ++n) {
    const auto p = with(params.to_json(), {{"n", n}});
    auto add = [&](const std::string& q, const PolyGaussFn& lhs, const PolyGaussFn& rhs) {
      rep.add(make_row(q, p, cdouble(0, 0), cdouble(residual(lhs, rhs), 0), tol));
    };
    const auto& f = phi->member(n);
    const auto& g = psi->member(n);
    add("A_lowers_phi", apply_op(ops.a, f), n == 0 ? zero_phi : phi->member(n - 1).scaled(cq(sqrt(quad(n)))));
    add("B_raises_phi", apply_op(ops.b, f), phi->member(n + 1).scaled(cq(sqrt(quad(n + 1)))));
    add("N_phi", apply_op(ops.n_op, f), n == 0 ? zero_phi : f.scaled(cq(n)));
    add("Bdag_lowers_psi", apply_op(ops.b_dag, g), n == 0 ? zero_psi : psi->member(n - 1).scaled(cq(sqrt(quad(n)))));
    add("Adag_raises_psi", apply_op(ops.a_dag, g), psi->member(n + 1).scaled(cq(sqrt(quad(n + 1)))));
    add("Ndag_psi", apply_op(n_dag, g), n == 0 ? zero_psi : g.scaled(cq(n)));
  }
  return rep;
}

complex_t<quad> eigenvalue(const ThetaParams& params, int n) {
  return params.rotation().full * quad(params.omega()) * (quad(n) + quad(0.5));
}

Report spectrum_check(const ThetaParams& params, int n_max, double tol) {
  Report rep;
  rep.title = "spectrum";
  const auto phi = eigenfamily(params, FamilyKind::Phi, n_max);
  const auto psi = eigenfamily(params, FamilyKind::Psi, n_max);
  const auto ops = build_operators(params);
  const DiffOp h_dag = ops.h.adjoint();
  for (int n = 0; n <= n_max; ++n) {
    const auto p = with(params.to_json(), {{"n", n}});
    const auto& f = phi->member(n);
    const auto hf = apply_op(ops.h, f);
    const cquad expected = eigenvalue(params, n);
    // highest-degree coefficient never vanishes
    const cquad measured = hf.degree() == f.degree() ? hf.coeffs().back() / f.coeffs().back() : cquad();
    rep.add(make_row("E_n", p, to_cdouble(expected), to_cdouble(measured), tol, Check::Relative));
    rep.add(make_row("H_phi_residual", p, cdouble(0, 0), cdouble(residual(hf, f.scaled(expected)), 0), tol));
    const auto& g = psi->member(n);
    rep.add(make_row("Hdag_psi_residual", p, cdouble(0, 0),
                     cdouble(residual(apply_op(h_dag, g), g.scaled(cconj(expected))), 0), tol));
    rep.add(make_row("E_conjugation", p, to_cdouble(cconj(expected)), to_cdouble(eigenvalue(params.negated(), n)),
                     tol, Check::Relative));
  }
  return rep;
}

BiorthoResult biortho_matrix(const ThetaParams& params, int n_max, double tol) {
  params.require_square_integrable("biortho_matrix");
  const auto phi = eigenfamily(params, FamilyKind::Phi, n_max);
  const auto psi = eigenfamily(params, FamilyKind::Psi, n_max);
  BiorthoResult out;
  out.report.title = "biortho";
  out.gram.assign(n_max + 1, std::vector<cquad>(n_max + 1));
  for (int n = 0; n <= n_max; ++n) {
    double row_dev = 0;
    int worst = 0;
    for (int m = 0; m <= n_max; ++m) {
      out.gram[n][m] = pairing(phi->member(n), psi->member(m));
      const double dev = static_cast<double>(cabs(out.gram[n][m] - cq(n == m ? 1 : 0)));
      if (dev >= row_dev) {
        row_dev = dev;
        worst = m;
      }
    }
    out.max_deviation = std::max(out.max_deviation, row_dev);
    out.report.add(make_row("biortho_row", with(params.to_json(), {{"n", n}, {"worst_m", worst}}),
                            cdouble(n == worst ? 1 : 0, 0), to_cdouble(out.gram[n][worst]), tol));
  }
  if (n_max >= 4) {
    // <phi_4, psi_4> = (2^4 4! sqrt(pi))^{-1} int_{Gamma_theta} H_4^2 e^{-z^2} dz
    const quad scale = quad(16 * 24) * sqrt(pi<quad>());
    const cquad contour = rotated_hermite_integral(4, 4, params.theta()) / scale;
    out.report.add(make_row("contour_cross_check", with(params.to_json(), {{"n", 4}, {"m", 4}}),
                            to_cdouble(out.gram[4][4]), to_cdouble(contour), tol));
  }
  return out;
}

quad norm_sq_closed_form(double theta, int n) {
  const quad c = cos(quad(theta));
  return legendre_eval<quad>(n, 1 / c) / sqrt(c);
}

NormResult norm_sq(const ThetaParams& params, int n, double tol) {
  params.require_square_integrable("norm_sq");
  const auto phi = eigenfamily(params, FamilyKind::Phi, n);
  NormResult out;
  out.report.title = "norms";
  out.value = pairing(phi->member(n), phi->member(n)).real();
  out.closed_form = norm_sq_closed_form(params.theta(), n);
  const auto p = with(params.to_json(), {{"n", n}});
  out.report.add(make_row("norm_sq", p, cdouble(static_cast<double>(out.closed_form), 0),
                          cdouble(static_cast<double>(out.value), 0), tol, Check::Relative));
  out.bound_constant = 0;
  if (params.theta() != 0.0) {
    const quad growth = 2 / cos(quad(params.theta()));
    quad k = 0;
    for (int m = 1; m <= 10; ++m) k = std::max(k, norm_sq_closed_form(params.theta(), m) * sqrt(quad(m)) / pow(growth, m));
    out.bound_constant = static_cast<double>(k);
    if (n >= 1) {
      const quad bound = k * pow(growth, n) / sqrt(quad(n));
      out.report.add(make_row("norm_bound", with(p, {{"k", out.bound_constant}}), cdouble(static_cast<double>(bound), 0),
                              cdouble(static_cast<double>(out.value), 0), 0.0, Check::UpperBound));
    }
  }
  return out;
}

Report similarity_check(const ThetaParams& params, int n_max, double tol) {
  params.require_square_integrable("similarity_check");
  Report rep;
  rep.title = "similarity";
  const auto e = eigenfamily(params, FamilyKind::E, n_max + 1);
  const auto phi = eigenfamily(params, FamilyKind::Phi, n_max + 1);
  const auto psi = eigenfamily(params, FamilyKind::Psi, n_max + 1);
  const auto rot = params.rotation();
  const auto inv = params.negated().rotation();
  for (int n = 0; n <= n_max; ++n) {
    const auto p = with(params.to_json(), {{"n", n}});
    const auto& en = e->member(n);
    rep.add(make_row("rotate_e_is_phi", p, cdouble(0, 0),
                     cdouble(static_cast<double>(coefficient_discrepancy(rotate(en, rot), phi->member(n))), 0), kExactTol));
    rep.add(make_row("rotate_e_is_psi", p, cdouble(0, 0),
                     cdouble(static_cast<double>(coefficient_discrepancy(rotate(en, inv), psi->member(n))), 0), kExactTol));
    rep.add(make_row("rotate_inverse", p, cdouble(0, 0),
                     cdouble(static_cast<double>(coefficient_discrepancy(rotate(rotate(en, rot), inv), en)), 0),
                     kExactTol));
  }
  // <V e_j, e_k> = <e_j, V e_k> on the basis; both sides are sesquilinear in the same way
  double worst = 0;
  cdouble worst_l, worst_r;
  for (int j = 0; j <= n_max; ++j) {
    for (int k = 0; k <= n_max; ++k) {
      const cquad l = pairing(rotate(e->member(j), rot), e->member(k));
      const cquad r = pairing(e->member(j), rotate(e->member(k), rot));
      const double d = static_cast<double>(cabs(l - r));
      if (d >= worst) {
        worst = d;
        worst_l = to_cdouble(l);
        worst_r = to_cdouble(r);
      }
    }
  }
  rep.add(make_row("V_symmetric", with(params.to_json(), {{"n_max", n_max}}), worst_l, worst_r, tol));

  // growth of |phi_n|^2 = |V e_n|^2
  std::vector<quad> norms;
  for (int n = 0; n <= n_max + 1; ++n) norms.push_back(pairing(phi->member(n), phi->member(n)).real());
  const bool flat = params.theta() == 0.0;
  for (int n = 0; n <= n_max; ++n) {
    const bool ok = flat ? abs(norms[n + 1] - norms[n]) < quad(1e-25) : norms[n + 1] > norms[n];
    rep.add(predicate_row(flat ? "growth_flat" : "growth_increasing", with(params.to_json(), {{"n", n}}),
                          cdouble(static_cast<double>(norms[n]), 0), cdouble(static_cast<double>(norms[n + 1]), 0), ok));
  }
  if (!flat) {
    const double target = std::cos(params.theta()) / 2;
    for (int n = 30; n <= std::min(40, n_max); ++n) {
      rep.add(make_row("growth_ratio", with(params.to_json(), {{"n", n}}), cdouble(target, 0),
                       cdouble(static_cast<double>(norms[n] / norms[n + 1]), 0), 0.05, Check::Relative));
    }
  }
  return rep;
}

std::string span_side_name(SpanSide s) {
  switch (s) {
    case SpanSide::PsiPhi: return "psi_phi";
    case SpanSide::PhiPsi: return "phi_psi";
    case SpanSide::PsiE: return "psi_e";
    case SpanSide::PhiE: return "phi_e";
  }
  return "psi_phi";
}

PolyGaussFn span_element(const EigenFamily& family, const std::vector<cquad>& coeffs) {
  PolyGaussFn f = family.member(0).scaled(cquad());
  for (std::size_t n = 0; n < coeffs.size(); ++n) {
    if (coeffs[n] == cquad()) continue;
    f = f + family.member(static_cast<int>(n)).scaled(coeffs[n]);
  }
  return f;
}

Report span_resolution_check(const ThetaParams& params, int n_max, const std::vector<cquad>& f_coeffs,
                             const std::vector<cquad>& g_coeffs, SpanSide side, double tol) {
  params.require_square_integrable("span_resolution_check");
  auto last_nonzero = [](const std::vector<cquad>& c) {
    int last = -1;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i] != cquad()) last = static_cast<int>(i);
    }
    return last;
  };
  if (last_nonzero(f_coeffs) > n_max || last_nonzero(g_coeffs) > n_max) {
    throw SpanError("span coefficients reach beyond n_max = " + std::to_string(n_max));
  }
  FamilyKind f_kind, g_kind, left, right;  // sum <f, left_n><right_n, g>
  switch (side) {
    case SpanSide::PsiPhi: f_kind = FamilyKind::Psi; g_kind = FamilyKind::Phi; left = FamilyKind::Phi; right = FamilyKind::Psi; break;
    case SpanSide::PhiPsi: f_kind = FamilyKind::Phi; g_kind = FamilyKind::Psi; left = FamilyKind::Psi; right = FamilyKind::Phi; break;
    case SpanSide::PsiE: f_kind = FamilyKind::Psi; g_kind = FamilyKind::E; left = FamilyKind::Phi; right = FamilyKind::Psi; break;
    case SpanSide::PhiE:
    default: f_kind = FamilyKind::Phi; g_kind = FamilyKind::E; left = FamilyKind::Psi; right = FamilyKind::Phi; break;
  }
  const auto f = span_element(*eigenfamily(params, f_kind, n_max), f_coeffs);
  const auto g = span_element(*eigenfamily(params, g_kind, n_max), g_coeffs);
  const auto lf = eigenfamily(params, left, n_max);
  const auto rf = eigenfamily(params, right, n_max);
  cquad sum;
  for (int n = 0; n <= n_max; ++n) sum += pairing(f, lf->member(n)) * pairing(rf->member(n), g);
  Report rep;
  rep.title = "span_resolution";
  rep.add(make_row("span_resolution", with(params.to_json(), {{"n_max", n_max}, {"side", span_side_name(side)}}),
                   to_cdouble(pairing(f, g)), to_cdouble(sum), tol));
  return rep;
}

}  // namespace iqho
