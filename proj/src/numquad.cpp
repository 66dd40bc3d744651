#include "iqho/numquad.hpp"

#include "iqho/specfun.hpp"

#include <cmath>
#include <thread>

namespace iqho {

ContourPath ContourPath::real_line(double radius) {
  if (!(radius > 0)) throw DomainError("ContourPath: radius must be positive");
  return ContourPath(Kind::RealLine, 0.0, radius, cquad(-radius, 0), cquad(radius, 0));
}

ContourPath ContourPath::rotated_line(double angle, double radius) {
  if (!(radius > 0)) throw DomainError("ContourPath: radius must be positive");
  const cquad dir = unit_phase<quad>(-quad(angle) / 2);
  return ContourPath(Kind::RotatedLine, angle, radius, -quad(radius) * dir, quad(radius) * dir);
}

ContourPath ContourPath::segment(const cquad& z0, const cquad& z1) {
  return ContourPath(Kind::Segment, 0.0, 0.0, z0, z1);
}

QuadResult integrate_plane(const std::function<cdouble(cdouble)>& F, double radius, int panels, int rule_order,
                           int workers) {
  if (!(radius > 0) || panels < 1 || rule_order < 2) throw DomainError("integrate_plane: bad grid");
  const auto& hi = gauss_legendre<double>(rule_order);
  const auto& lo = gauss_legendre<double>(rule_order / 2);
  const double h = 2 * radius / panels;

  // one row = all cells with the same x-panel; rows are independent
  std::vector<cdouble> row_hi(panels), row_lo(panels);
  auto do_row = [&](int i) {
    const double x0 = -radius + h * i;
    cdouble acc_hi, acc_lo;
    for (int j = 0; j < panels; ++j) {
      const double y0 = -radius + h * j;
      cdouble cell;
      for (std::size_t a = 0; a < hi.nodes.size(); ++a) {
        const double x = x0 + h * (hi.nodes[a] + 1) / 2;
        for (std::size_t b = 0; b < hi.nodes.size(); ++b) {
          const double y = y0 + h * (hi.nodes[b] + 1) / 2;
          cell += hi.weights[a] * hi.weights[b] * F(cdouble(x, y));
        }
      }
      acc_hi += cell;
      cdouble cell_lo;
      for (std::size_t a = 0; a < lo.nodes.size(); ++a) {
        const double x = x0 + h * (lo.nodes[a] + 1) / 2;
        for (std::size_t b = 0; b < lo.nodes.size(); ++b) {
          const double y = y0 + h * (lo.nodes[b] + 1) / 2;
          cell_lo += lo.weights[a] * lo.weights[b] * F(cdouble(x, y));
        }
      }
      acc_lo += cell_lo;
    }
    row_hi[i] = acc_hi * (h * h / 4);
    row_lo[i] = acc_lo * (h * h / 4);
  };

  workers = std::max(1, std::min(workers, panels));
  if (workers == 1) {
    for (int i = 0; i < panels; ++i) do_row(i);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int i = w; i < panels; i += workers) do_row(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  auto pairwise = [](std::vector<cdouble> v) {
    while (v.size() > 1) {
      std::vector<cdouble> next;
      for (std::size_t i = 0; i + 1 < v.size(); i += 2) next.push_back(v[i] + v[i + 1]);
      if (v.size() % 2) next.push_back(v.back());
      v.swap(next);
    }
    return v.front();
  };
  QuadResult out;
  out.value = pairwise(row_hi);
  out.err_estimate = std::abs(out.value - pairwise(row_lo));
  out.n_evals = static_cast<long>(panels) * panels *
                static_cast<long>(hi.nodes.size() * hi.nodes.size() + lo.nodes.size() * lo.nodes.size());
  out.panels = panels * panels;
  return out;
}

namespace {

quad hermite_norm(int n, int m) {
  // sqrt(2^n n! 2^m m!) sqrt(pi): scale of the Hermite integrals
  using std::sqrt;
  quad s = sqrt(pi<quad>());
  for (int k = 1; k <= n; ++k) s *= sqrt(quad(2 * k));
  for (int k = 1; k <= m; ++k) s *= sqrt(quad(2 * k));
  return s;
}

// H_n H_m e^{-z^2}: one recurrence pass for both factors, on real and
// imaginary parts (complex128 products go through the slow libgcc path)
auto hermite_product(int n, int m) {
  check_hermite_degree(std::max(n, m));
  return [n, m](const cquad& z) {
    const quad x = z.real(), y = z.imag();
    quad h0r = 1, h0i = 0, h1r = 2 * x, h1i = 2 * y;
    quad hnr = 1, hni = 0, hmr = 1, hmi = 0;
    if (n == 1) hnr = h1r, hni = h1i;
    if (m == 1) hmr = h1r, hmi = h1i;
    for (int k = 2; k <= std::max(n, m); ++k) {
      const quad c = 2 * (k - 1);
      const quad h2r = 2 * (x * h1r - y * h1i) - c * h0r;
      const quad h2i = 2 * (x * h1i + y * h1r) - c * h0i;
      h0r = h1r, h0i = h1i;
      h1r = h2r, h1i = h2i;
      if (k == n) hnr = h1r, hni = h1i;
      if (k == m) hmr = h1r, hmi = h1i;
    }
    // e^{-z^2} = e^{y^2 - x^2} (cos 2xy - i sin 2xy)
    const quad mag = exp(y * y - x * x), ph = 2 * x * y;
    const quad er = mag * cos(ph), ei = -mag * sin(ph);
    const quad pr = hnr * hmr - hni * hmi, pi_ = hnr * hmi + hni * hmr;
    return cquad(pr * er - pi_ * ei, pr * ei + pi_ * er);
  };
}

QuadOptions edge_options(int n, int m) {
  QuadOptions opt;
  opt.abs_tol = static_cast<double>(quad(1e-13) * hermite_norm(n, m));
  opt.initial_panels = 16;
  opt.check_decay = false;
  return opt;
}

}  // namespace

cquad rotated_hermite_integral(int n, int m, double theta, double radius) {
  if (!(abs(quad(theta)) < pi<quad>() / 2)) throw DomainError("rotated line needs |theta| < pi/2");
  const quad a = 2 * cos(quad(theta));
  // the target is 1e-13 of the scale, so the binary64 cutoff is enough; the
  // decay check below still guards it. the b = 13 radius reaches far into the
  // oscillating tail when theta is near pi/2
  if (radius <= 0) radius = default_radius<double>(static_cast<double>(a), 0.0, n + m);
  QuadOptions opt = edge_options(n, m);
  opt.check_decay = true;
  opt.initial_panels = std::max(16, static_cast<int>(radius * std::sqrt(static_cast<double>(a))) + 1);
  return integrate_line<quad>(hermite_product(n, m), ContourPath::rotated_line(theta, radius), opt).value;
}

ContourEdges rectangle_edges(int n, int m, double theta, double radius) {
  using std::abs;
  const quad R(radius);
  const quad t = tan(quad(theta) / 2);
  const cquad A(-R, R * t), B(R, -R * t), C(R, 0), D(-R, 0);
  const auto f = hermite_product(n, m);
  const auto opt = edge_options(n, m);
  auto seg = [&](const cquad& z0, const cquad& z1) {
    // about one panel per unit length; adaptivity does the rest
    auto o = opt;
    o.initial_panels = std::max(4, static_cast<int>(std::ceil(static_cast<double>(cabs(z1 - z0)))));
    return integrate_line<quad>(f, ContourPath::segment(z0, z1), o).value;
  };
  ContourEdges e;
  e.radius = radius;
  e.rotated = seg(A, B);
  e.right = seg(B, C);
  // integrated D -> C and negated, so that theta = 0 cancels A -> B bit for bit
  e.real_axis = -seg(D, C);
  e.left = seg(D, A);

  const quad height = R * abs(t);
  if (height == 0) {
    e.vertical_bound = 0;
  } else {
    auto g = [&](const quad& y) {
      const cquad z(R, -y);
      return cquad(cabs(hermite_eval<quad>(n, z) * hermite_eval<quad>(m, z)) * exp(y * y - R * R), 0);
    };
    QuadOptions bopt;
    bopt.abs_tol = 0;
    bopt.rel_tol = 1e-10;
    bopt.initial_panels = 4;
    e.vertical_bound = static_cast<double>(integrate_interval<quad>(g, quad(0), height, bopt).value.real());
  }
  return e;
}

Report contour_rotation_check(int n, int m, double theta, const std::vector<double>& radii) {
  if (!(abs(quad(theta)) < pi<quad>() / 2)) throw DomainError("contour_rotation_check: needs |theta| < pi/2");
  Report rep;
  rep.title = "contour";
  const quad scale = hermite_norm(n, m);
  const double expected = n == m ? static_cast<double>(scale) : 0.0;
  auto base = [&] { return nlohmann::ordered_json{{"n", n}, {"m", m}, {"theta", theta}}; };

  const cquad rot = rotated_hermite_integral(n, m, theta);
  {
    auto p = base();
    p["path"] = "rotated_line";
    // diagonal: relative; off-diagonal: absolute in units of sqrt(2^n n! 2^m m! pi)
    const double tol = 1e-8 * static_cast<double>(scale);
    auto row = make_row("rotated_integral", p, cdouble(expected, 0), to_cdouble(rot), tol, Check::Absolute);
    row.rel_err = row.abs_err / static_cast<double>(scale);
    row.tol = 1e-8;
    row.pass = row.rel_err <= 1e-8;
    rep.add(row);
  }

  std::vector<double> vertical;
  for (double R : radii) {
    const auto e = rectangle_edges(n, m, theta, R);
    auto p = base();
    p["R"] = R;
    const cquad total = e.rotated + e.right + e.real_axis + e.left;
    double edge_max = 0;
    for (const auto& v : {e.rotated, e.right, e.real_axis, e.left}) {
      edge_max = std::max(edge_max, static_cast<double>(cabs(v)));
    }
    const double closure = static_cast<double>(cabs(total));
    rep.add(predicate_row("closure", p, cdouble(0, 0), to_cdouble(total), closure <= 1e-9 * edge_max, 1e-9));
    rep.rows.back().abs_err = closure;
    rep.rows.back().rel_err = edge_max > 0 ? closure / edge_max : 0;

    const cquad mirrored = ((n + m) % 2 == 0 ? quad(1) : quad(-1)) * e.right;
    const double pm = static_cast<double>(std::max(cabs(e.left), cabs(mirrored)));
    auto prow = make_row("parity", p, to_cdouble(mirrored), to_cdouble(e.left), 1e-9, Check::Relative);
    if (pm == 0) prow.pass = true;
    rep.add(prow);

    const double right = static_cast<double>(cabs(e.right));
    rep.add(make_row("vertical_bound", p, cdouble(e.vertical_bound, 0), cdouble(right, 0), 1e-10,
                     Check::UpperBound));
    vertical.push_back(right);
  }
  for (std::size_t k = 1; k < vertical.size(); ++k) {
    auto p = base();
    p["R_from"] = radii[k - 1];
    p["R_to"] = radii[k];
    const bool zero = vertical[k] == 0 && vertical[k - 1] == 0;
    rep.add(predicate_row("vertical_decay", p, cdouble(vertical[k - 1], 0), cdouble(vertical[k], 0),
                          zero || vertical[k] < vertical[k - 1]));
  }
  return rep;
}

}  // namespace iqho
