#pragma once

// Bi-coherent states phi(z; x), psi(z; x) and the resolutions of the identity
// they produce.

#include "iqho/numquad.hpp"
#include "iqho/pbops.hpp"
#include "iqho/polygauss.hpp"
#include "iqho/report.hpp"

namespace iqho {

struct BiCoherentPair {
  ThetaParams params;
  cquad z;
  PolyGaussFn phi;  // eigenstate of A_theta
  PolyGaussFn psi;  // eigenstate of B_theta^dagger; phi at -theta
};

/// (Omega/pi)^{1/4} exp(i theta/4 - z_r^2 + sqrt(2 Omega) e^{i theta/2} z x - e^{i theta} Omega x^2 / 2).
template <SupportedReal Real>
BasicPolyGauss<Real> bicoherent_state(const ThetaParams& params, const complex_t<Real>& z);

BiCoherentPair bicoherent(const ThetaParams& params, const cquad& z);

/// A phi = z phi and B^dagger psi = z psi, residuals relative to the state.
Report eigenvalue_check(const BiCoherentPair& pair, const OperatorSet& ops, double tol = kExactTol);

/// <phi, psi> = 1; SquareIntegrable only.
Report normalization_check(const BiCoherentPair& pair, double tol = 1e-10);

struct SeriesResult {
  int K = 0;
  double distance = 0;   // || S_K - e^{i phase} T ||
  cquad phase;           // unit-modulus factor found by projecting T onto S_ref
  double reference_phase = 0;  // -z_r z_i, for comparison
  double predicted = 0;  // tail bound from |phi_k| <= K_phi r^k k^{-1/4}
  Report report;
};

/// Partial sum S_K = e^{-|z|^2/2} sum_{k<=K} z^k/sqrt(k!) phi_k against the
/// closed form T. The global phase is measured once from S_{phase_K}.
SeriesResult series_truncation(const ThetaParams& params, const cquad& z, int K, int phase_K = 60);

/// series_truncation for each K, with the phase measured only once.
std::vector<SeriesResult> series_sweep(const ThetaParams& params, const cquad& z, const std::vector<int>& Ks,
                                       int phase_K = 60);

/// S_K(x) evaluated pointwise with the normalised Hermite recurrence.
cquad series_partial_sum(const ThetaParams& params, const cquad& z, int K, const quad& x);

struct QuadGrid2D {
  double radius = 6.0;
  int panels = 48;
  int order = 8;
  int workers = 1;
};

struct PlaneEstimate {
  QuadResult quad;
  double decay_rate = 0;  // kappa in |F(z)| ~ exp(-kappa |z|^2) along the slowest direction
  double tail = 0;        // bound on the integral outside the square
};

/// Plane integral plus an empirical Gaussian-decay fit and tail bound.
PlaneEstimate integrate_plane_with_tail(const std::function<cdouble(cdouble)>& F, const QuadGrid2D& grid);

/// (1/pi) int <f, phi(z)> <psi(z), g> dz over the square, against <f, g>.
Report identity_resolution_L2(const ThetaParams& params, const PolyGaussFn& f, const PolyGaussFn& g,
                              const QuadGrid2D& grid = {}, double tol = 1e-4);

/// Both orderings of (1/pi) int <f, psi^(+-)><phi^(+-), g> dz for f, g in V_rho.
Report identity_resolution_IQHO(int sign, double omega, const PolyGaussFn& f, const PolyGaussFn& g,
                                const QuadGrid2D& grid = {}, double tol = 1e-3);

}  // namespace iqho
