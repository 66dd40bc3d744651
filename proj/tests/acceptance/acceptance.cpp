// Acceptance runner: one PASS/FAIL line per criterion, exit 1 if any fails.
// --criterion N runs a single one (ctest registers each separately).

#include "iqho/coherent.hpp"
#include "iqho/distrib.hpp"
#include "iqho/numquad.hpp"
#include "iqho/pbops.hpp"
#include "iqho/specfun.hpp"

#include "../support.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace iqho;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> body;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string sci(double x) { return fmt("%.3g", x); }

// first failing row, for the detail column
std::string first_fail(const Report& rep) {
  const auto* r = rep.first_failure();
  if (!r) return "";
  return r->quantity + " " + r->params.dump() + " err=" + sci(r->abs_err);
}

const std::vector<double> kOmegas = {0.5, 1.0, 2.0};
const std::vector<double> kThetas = {-1.4, -0.9, -0.3, 0.3, 0.9, 1.4};

Outcome biorthonormality() {
  double worst = 0;
  Outcome out;
  for (double omega : kOmegas) {
    for (double theta : kThetas) {
      const auto r = biortho_matrix(ThetaParams::angle(theta, omega), 20, 1e-9);
      worst = std::max(worst, r.max_deviation);
      if (!r.report.all_pass()) out.pass = false;
    }
  }
  out.pass = out.pass && worst <= 1e-9;
  out.detail = "max |<phi_n,psi_m> - delta| = " + sci(worst) + " over n,m <= 20, 18 (omega, theta)";
  return out;
}

Outcome norm_closed_form() {
  double worst = 0;
  for (double omega : kOmegas) {
    for (double theta : kThetas) {
      for (int n = 0; n <= 30; ++n) {
        const auto r = norm_sq(ThetaParams::angle(theta, omega), n, 1e-8);
        worst = std::max(worst, static_cast<double>(abs(r.value - r.closed_form) / r.closed_form));
      }
    }
  }
  return {worst <= 1e-8, "max relative deviation from the Legendre form = " + sci(worst) + ", n <= 30"};
}

Outcome algebra_exactness() {
  std::mt19937_64 rng(3);
  std::vector<PolyGaussFn> probes;
  for (int i = 0; i < 5; ++i) probes.push_back(test::random_fn(rng, 6));
  std::vector<ThetaParams> grid;
  for (double omega : kOmegas) {
    for (double theta : kThetas) grid.push_back(ThetaParams::angle(theta, omega));
    grid.push_back(ThetaParams::angle(0.0, omega));
    grid.push_back(ThetaParams::critical(1, omega));
    grid.push_back(ThetaParams::critical(-1, omega));
  }
  Report all;
  double eig_worst = 0;
  for (const auto& p : grid) {
    all.append(operator_check(p));
    all.append(commutator_check(p, probes, 1e-12));
    all.append(ladder_check(p, 20, 1e-12));
    all.append(spectrum_check(p, 20, 1e-12));
    if (p.is_critical()) {
      // E_n = +-i Omega (n + 1/2)
      for (int n = 0; n <= 20; ++n) {
        const cquad want(0, p.critical_sign() * p.omega() * (n + 0.5));
        eig_worst = std::max(eig_worst, test::dabs(eigenvalue(p, n) - want));
      }
    }
  }
  Outcome out{all.all_pass() && eig_worst <= 1e-12, ""};
  out.detail = std::to_string(all.rows.size()) + " residual rows, max " + sci(all.max_abs_err()) +
               "; critical eigenvalue error " + sci(eig_worst);
  if (!all.all_pass()) out.detail += "; " + first_fail(all);
  return out;
}

Outcome contour_rotation() {
  Report all;
  for (double theta : {0.5, 1.0, 1.4}) {
    for (int n = 0; n <= 10; ++n) {
      for (int m = 0; m <= 10; ++m) all.append(contour_rotation_check(n, m, theta, {4.0, 5.0, 6.0}));
    }
  }
  std::map<std::string, std::pair<int, int>> tally;  // quantity -> (failed, total)
  for (const auto& r : all.rows) {
    auto& t = tally[r.quantity];
    t.second++;
    if (!r.pass) t.first++;
  }
  std::ostringstream s;
  bool first = true;
  for (const auto& [q, t] : tally) {
    s << (first ? "" : ", ") << q << " " << t.second - t.first << "/" << t.second;
    first = false;
  }
  return {all.all_pass(), s.str()};
}

Outcome bicoherent_eigen() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  Report eig, norm;
  int critical = 0;
  for (int i = 0; i < 50; ++i) {
    // every fifth draw sits at a critical angle
    ThetaParams p = ThetaParams::angle(0.0, 1.0);
    const double omega = 0.5 + 1.5 * u(rng);
    if (i % 5 == 4) {
      p = ThetaParams::critical(i % 10 == 4 ? 1 : -1, omega);
      ++critical;
    } else {
      p = ThetaParams::angle(-1.5 + 3.0 * u(rng), omega);
    }
    const double r = 5 * std::sqrt(u(rng)), a = 2 * pi<double>() * u(rng);
    const auto pair = bicoherent(p, cquad(r * std::cos(a), r * std::sin(a)));
    eig.append(eigenvalue_check(pair, build_operators(p), 1e-12));
    if (!p.is_critical()) norm.append(normalization_check(pair, 1e-10));
  }
  Outcome out{eig.all_pass() && norm.all_pass(), ""};
  out.detail = "eigen residual max " + sci(eig.max_abs_err()) + " (" + std::to_string(critical) +
               " critical), <phi,psi> - 1 max " + sci(norm.max_abs_err());
  if (!out.pass) out.detail += "; " + first_fail(eig.all_pass() ? norm : eig);
  return out;
}

Outcome series_convergence() {
  Outcome out;
  std::ostringstream s;
  for (double theta : {0.0, 0.6, 1.0}) {
    for (cquad z : {cquad(1, 0), cquad(1, 2)}) {
      const auto p = ThetaParams::angle(theta, 1.0);
      std::vector<double> d;
      for (const auto& r : series_sweep(p, z, {10, 20, 30, 40, 50, 60})) d.push_back(r.distance);
      bool dec = true;
      for (std::size_t k = 1; k < d.size(); ++k) dec = dec && d[k] < d[k - 1];
      const bool ok = dec && d.back() <= 1e-6;
      if (!ok) {
        out.pass = false;
        s << " [theta=" << theta << " z=" << to_cdouble(z) << " d60=" << sci(d.back())
          << (dec ? "" : " not decreasing") << "]";
      }
    }
  }
  out.detail = out.pass ? "all 6 (theta, z): d60 <= 1e-6 and d_K decreasing" : "failing:" + s.str();
  return out;
}

Outcome resolution_l2() {
  const auto p = ThetaParams::angle(0.6, 1.0);
  const auto phi = eigenfamily(p, FamilyKind::Phi, 2);
  const auto psi = eigenfamily(p, FamilyKind::Psi, 2);
  QuadGrid2D grid;
  grid.radius = 6.0;
  Report all;
  double worst = 0;
  for (int i = 0; i <= 2; ++i) {
    for (int j = 0; j <= 2; ++j) {
      const auto rep = identity_resolution_L2(p, psi->member(i), phi->member(j), grid, 1e-4);
      all.append(rep);
      worst = std::max(worst, rep.max_abs_err("resolution_L2"));
    }
  }
  return {all.all_pass(), "9 pairs at theta=0.6, R=6: max |integral - delta| = " + sci(worst)};
}

Outcome resolution_iqho() {
  const double omega = 1.0;
  const PolyGaussFn f({cquad(pow(quad(2 * omega) / pi<quad>(), quad(0.25)), 0)}, cquad(2 * omega, 0));
  Report all;
  for (int sign : {1, -1}) all.append(identity_resolution_IQHO(sign, omega, f, f));
  double worst = 0;
  for (const auto& r : all.rows) {
    if (r.quantity.rfind("resolution_f_", 0) == 0 && r.quantity.find("_tail") == std::string::npos) {
      worst = std::max(worst, r.abs_err);
    }
  }
  return {all.all_pass(), "both orderings, both signs: max |integral - 1| = " + sci(worst)};
}

Outcome weak_limits() {
  const std::vector<std::pair<const char*, SchwartzProbe>> probes = {
      {"e0", SchwartzProbe(test::hermite_function(0, 1.0))},
      {"x e^-x^2", SchwartzProbe(PolyGaussFn({cquad(0, 0), cquad(1, 0)}, cquad(2, 0)))},
      {"x^2 e^-x^2/2", SchwartzProbe(PolyGaussFn({cquad(0, 0), cquad(0, 0), cquad(1, 0)}, cquad(1, 0)))},
  };
  std::vector<double> schedule;
  for (int j = 1; j <= 12; ++j) schedule.push_back(pi<double>() / 2 - std::ldexp(1.0, -j));
  Outcome out;
  std::ostringstream s;
  double worst_final = 0;
  for (const auto& [name, probe] : probes) {
    for (int n = 0; n <= 5; ++n) {
      const auto r = weak_limit_study(1, n, probe, 1.0, schedule, 1e-3);
      worst_final = std::max(worst_final, r.distances.back());
      // the fitted exponent row is informational
      for (const auto& row : r.report.rows) {
        if (row.pass || row.quantity == "weak_limit_fit_exponent") continue;
        out.pass = false;
        s << " [" << name << " n=" << n << " " << row.quantity << " " << sci(row.abs_err) << "]";
        break;
      }
    }
  }
  out.detail = "max final distance " + sci(worst_final) + (out.pass ? "" : "; failing:" + s.str());
  return out;
}

Outcome unboundedness() {
  const double theta = 1.0;
  const auto p = ThetaParams::angle(theta, 1.0);
  std::vector<quad> v;
  for (int n = 0; n <= 41; ++n) v.push_back(norm_sq(p, n).value);
  bool increasing = true;
  for (std::size_t n = 1; n < v.size(); ++n) increasing = increasing && v[n] > v[n - 1];
  const quad x = 1 / cos(quad(theta));
  const double ratio = static_cast<double>(v[41] / v[40]);
  const double target = 2 / std::cos(theta);
  const double ratio_err = std::abs(ratio - target) / target;
  // |phi_40|^2 = cos^{-1/2} P_40(x) against the large-n form of P_40
  const quad asym = sqrt(x) * legendre_asymptotic(40, x);
  const double asym_err = static_cast<double>(abs(v[40] - asym) / v[40]);
  Outcome out{increasing && ratio_err <= 0.05 && asym_err <= 0.02, ""};
  out.detail = "ratio at n=40 " + fmt("%.5f", ratio) + " vs 2/cos = " + fmt("%.5f", target) + " (" +
               fmt("%.1f", 100 * ratio_err) + "%, limit 5%); Legendre asymptotic off by " +
               fmt("%.2f", 100 * asym_err) + "% (limit 2%)" + (increasing ? "" : "; not increasing");
  return out;
}

Outcome oracle_agreement() {
  std::mt19937_64 rng(11);
  QuadOptions opt;
  opt.abs_tol = 1e-24;
  int bad = 0;
  double worst = 0;  // |diff| / err
  for (int i = 0; i < 100; ++i) {
    const auto f = test::random_fn(rng, 8, 0.3, 3.0), g = test::random_fn(rng, 8, 0.3, 3.0);
    const auto q = quadrature_pairing(f, g, opt);
    const double diff = test::dabs(pairing(f, g) - q.value);
    const double err = static_cast<double>(q.err_estimate);
    if (diff > 10 * err) ++bad;
    if (err > 0) worst = std::max(worst, diff / err);
  }
  return {bad == 0, "100 pairs, " + std::to_string(bad) + " outside 10x err; max |diff|/err = " + fmt("%.3g", worst)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run one criterion (1-11)")->check(CLI::Range(0, 11));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all = {
      {1, "biorthonormality", 10, biorthonormality},
      {2, "norm closed form", 5, norm_closed_form},
      {3, "ladder/commutator/spectrum", 5, algebra_exactness},
      {4, "contour rotation", 30, contour_rotation},
      {5, "bi-coherent eigenstates", 5, bicoherent_eigen},
      {6, "series convergence", 10, series_convergence},
      {7, "resolution, L2", 60, resolution_l2},
      {8, "resolution, IQHO", 60, resolution_iqho},
      {9, "weak limits", 20, weak_limits},
      {10, "unbounded norms", 2, unboundedness},
      {11, "oracle agreement", 30, oracle_agreement},
  };

  int failed = 0;
  for (const auto& c : all) {
    if (only != 0 && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.limit_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::cout << "criterion " << c.id << " " << c.name << ": " << (pass ? "PASS" : "FAIL") << "  " << o.detail
              << "  (" << fmt("%.2f", secs) << " s, limit " << fmt("%.0f", c.limit_s) << " s"
              << (in_time ? "" : ", too slow") << ")\n";
  }
  return failed ? 1 : 0;
}
