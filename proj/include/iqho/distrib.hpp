#pragma once

// Pairings of the non-normalisable IQHO eigenfunctions with decaying test
// functions, the seminorms that control them, weak limits theta -> +-pi/2,
// and the weighted spaces V_rho / Theta_rho with rho(x) = exp(Omega x^2 / 2).

#include "iqho/errors.hpp"
#include "iqho/numquad.hpp"
#include "iqho/pbops.hpp"
#include "iqho/polygauss.hpp"
#include "iqho/report.hpp"

#include <vector>

namespace iqho {

/// A test function p(x) exp(gamma + beta x - alpha x^2 / 2) with Re(alpha) > 0.
class SchwartzProbe {
 public:
  explicit SchwartzProbe(PolyGaussFn f);
  const PolyGaussFn& f() const { return f_; }

 private:
  PolyGaussFn f_;
};

struct RhoSpace {
  double omega = 1.0;
};

void require_valid(const RhoSpace& space);

/// Which family is being paired: Phi_n^(+-)[f] = <phi_n^(+-), f> or
/// Psi_n^(+-)[f] = <psi_n^(+-), f> with psi_n^(+-) = phi_n^(-+).
enum class DistSide { Phi, Psi };

std::string dist_side_name(DistSide s);

cquad distribution_pairing(int sign, int n, const SchwartzProbe& probe, double omega, DistSide side = DistSide::Phi);

/// Same pairing by real-line quadrature.
BasicQuadResult<quad> distribution_pairing_quadrature(int sign, int n, const SchwartzProbe& probe, double omega,
                                                      DistSide side = DistSide::Phi);

/// p_{k,0}(f) = sup |x|^k |f(x)|. f needs Re(alpha) > 0.
double seminorm(const PolyGaussFn& f, int k);
inline double seminorm(const SchwartzProbe& probe, int k) { return seminorm(probe.f(), k); }

/// sum_{j <= l} binom(l, j) p_{j,0}(f) = sup (1+|x|)^l |f| bound.
double seminorm_sum(const PolyGaussFn& f, int l);

/// (Omega/pi)^{1/4} / sqrt(2^n n!) int |H_n(e^{i pi/4} sqrt(Omega) x)| / (1+|x|)^{n+2} dx.
double pairing_constant(int n, double omega);

/// |Phi_n[f]| <= M_n sum_k binom(n+2, k) p_{k,0}(f), and quadrature agreement.
Report distribution_bound_check(int sign, int n, const SchwartzProbe& probe, double omega);

struct WeakLimitResult {
  std::vector<double> thetas;
  std::vector<double> distances;  // |<phi^(+-) - phi^(theta), f>|
  std::vector<double> majorants;  // ||chi_n^(theta)|| ||(1+|x|)^{n+1} f||
  double fit_exponent = 0;        // d ~ (pi/2 - |theta|)^p over the final half, informational
  Report report;
};

/// Validates that the schedule lies in (-pi/2, pi/2) and moves strictly toward sign * pi/2.
void validate_schedule(int sign, const std::vector<double>& schedule);

/// |<phi_n^(+-) - phi_n^(theta), f>|; theta may be the critical angle itself (gives 0).
double weak_limit_distance(int sign, int n, const SchwartzProbe& probe, const ThetaParams& at,
                           DistSide side = DistSide::Phi);

WeakLimitResult weak_limit_study(int sign, int n, const SchwartzProbe& probe, double omega,
                                 const std::vector<double>& schedule, double tol = 1e-3,
                                 DistSide side = DistSide::Phi);

/// rho f in L^2: Re(alpha) > Omega.
bool vrho_membership(const RhoSpace& space, const PolyGaussFn& f);
/// Phi rho^{-1} in L^2: Re(alpha) + Omega > 0.
bool thetarho_membership(const RhoSpace& space, const PolyGaussFn& Phi);

struct FunctionalResult {
  cquad direct;     // <Phi, f>
  cquad weighted;   // <Phi rho^{-1}, f rho>
  double bound = 0;  // ||Phi rho^{-1}|| ||f rho||
  Report report;
};

FunctionalResult thetarho_functional(const RhoSpace& space, const PolyGaussFn& Phi, const PolyGaussFn& f,
                                     double tol = 1e-10);

/// f_k = f + g/k: I_k^{(l)} = ||x^l (f_k - f)||^2 against 2 D_{l+1}(f_k - f)^2, and D decreasing.
/// f and g must share their Gaussian exponent.
Report continuity_check(const SchwartzProbe& f, const SchwartzProbe& g, int l, const std::vector<int>& ks);

/// sup rho^{-1} = 1.
Report rho_inverse_bounded(const RhoSpace& space);

}  // namespace iqho
