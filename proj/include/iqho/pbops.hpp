#pragma once

// Ladder operators A_theta, B_theta of the rotated oscillator, their
// eigenfamilies, and the exact checks built on them.

#include "iqho/errors.hpp"
#include "iqho/numeric.hpp"
#include "iqho/polygauss.hpp"
#include "iqho/report.hpp"

#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace iqho {

enum class Regime { SquareIntegrable, Critical, Forbidden };

std::string regime_name(Regime r);

/// (theta, Omega). The critical angles +-pi/2 are only reachable through
/// ThetaParams::critical; a double never lands on them by accident.
class ThetaParams {
 public:
  /// Any real angle: |theta| < pi/2 is SquareIntegrable, anything else Forbidden.
  static ThetaParams angle(double theta, double omega);
  /// Strictly inside (-pi/2, pi/2), else RegimeError.
  static ThetaParams square_integrable(double theta, double omega);
  /// theta = sign * pi/2 exactly.
  static ThetaParams critical(int sign, double omega);

  double theta() const { return theta_; }
  double omega() const { return omega_; }
  Regime regime() const { return regime_; }
  bool is_critical() const { return regime_ == Regime::Critical; }
  /// +1 or -1 at the critical angles, 0 otherwise.
  int critical_sign() const { return sign_; }

  /// e^{i theta/4}, e^{i theta/2}, e^{i theta}; exact phases at the critical angles.
  Rotation<quad> rotation() const;
  /// Same Omega, angle -theta (critical sign flipped).
  ThetaParams negated() const;
  /// Throws RegimeError when Forbidden.
  void require_admissible() const;
  void require_square_integrable(const std::string& what) const;

  nlohmann::ordered_json to_json() const;

 private:
  ThetaParams(double theta, double omega, Regime regime, int sign)
      : theta_(theta), omega_(omega), regime_(regime), sign_(sign) {}

  double theta_;
  double omega_;
  Regime regime_;
  int sign_;
};

struct OperatorSet {
  DiffOp a;      // A_theta
  DiffOp b;      // B_theta
  DiffOp a_dag;  // formal adjoint of A_theta
  DiffOp b_dag;
  DiffOp n_op;   // B_theta A_theta
  DiffOp h;      // Omega e^{i theta} (B A + 1/2)
};

OperatorSet build_operators(const ThetaParams& params);

/// c = (Omega x + i p)/sqrt(2 Omega) and its adjoint.
DiffOp annihilation(double omega);
DiffOp creation(double omega);

/// 1/2 (p^2 + e^{2 i theta} Omega^2 x^2), built directly.
DiffOp hamiltonian_direct(const ThetaParams& params);

/// Adjoint relation A^dagger = B_{-theta}, factorised Hamiltonian, and at the
/// critical angles H_+ = H_- and formal self-adjointness.
Report operator_check(const ThetaParams& params);

/// [A, B] f = f for the given functions.
Report commutator_check(const ThetaParams& params, const std::vector<PolyGaussFn>& probes, double tol = 1e-12);

enum class FamilyKind { Phi, Psi, E };

std::string family_name(FamilyKind k);

/// phi_n^theta, psi_n^theta = phi_n^{-theta}, or e_n = phi_n^0, memoised.
class EigenFamily {
 public:
  EigenFamily(const ThetaParams& params, FamilyKind kind);

  const ThetaParams& params() const { return params_; }
  FamilyKind kind() const { return kind_; }
  /// Angle the members are actually built at (-theta for Psi, 0 for E).
  const ThetaParams& member_params() const { return member_params_; }

  /// Closed Hermite form, cached.
  const PolyGaussFn& member(int n) const;
  /// Repeated raising from the vacuum, cached.
  const PolyGaussFn& raised(int n) const;
  /// Relative coefficient discrepancy between the two constructions.
  double construction_discrepancy(int n) const;

  /// The raising operator of the family (B_theta, A_theta^dagger or c^dagger).
  const DiffOp& raising() const { return raising_; }

 private:
  PolyGaussFn closed_form(int n) const;

  ThetaParams params_;
  FamilyKind kind_;
  ThetaParams member_params_;
  DiffOp raising_;
  mutable std::mutex mu_;
  mutable std::deque<PolyGaussFn> closed_;
  mutable std::deque<PolyGaussFn> raised_;
};

/// Shared, memoised family; checks the two constructions agree to 1e-10 up to n_max.
std::shared_ptr<const EigenFamily> eigenfamily(const ThetaParams& params, FamilyKind kind, int n_max);

inline constexpr double kDualConstructionTol = 1e-10;
inline constexpr double kExactTol = 1e-12;

/// The six relations: A phi_n = sqrt(n) phi_{n-1}, B phi_n = sqrt(n+1) phi_{n+1},
/// N phi_n = n phi_n, and their adjoint counterparts on psi_n.
Report ladder_check(const ThetaParams& params, int n_max, double tol = kExactTol);

/// H phi_n = E_n phi_n with E_n = Omega e^{i theta}(n + 1/2), and H^dagger psi_n = conj(E_n) psi_n.
Report spectrum_check(const ThetaParams& params, int n_max, double tol = kExactTol);

complex_t<quad> eigenvalue(const ThetaParams& params, int n);

struct BiorthoResult {
  std::vector<std::vector<cquad>> gram;  // gram[n][m] = <phi_n, psi_m>
  double max_deviation = 0;
  Report report;
};

BiorthoResult biortho_matrix(const ThetaParams& params, int n_max, double tol = 1e-9);

/// cos(theta)^{-1/2} P_n(1/cos theta).
quad norm_sq_closed_form(double theta, int n);

struct NormResult {
  quad value;        // <phi_n, phi_n>
  quad closed_form;  // Legendre form
  double bound_constant;  // k in |phi_n|^2 <= k n^{-1/2} (2/cos)^n, fitted on n = 1..10
  Report report;
};

NormResult norm_sq(const ThetaParams& params, int n, double tol = 1e-8);

/// (i) rotation of e_n gives phi_n and psi_n, (ii) opposite rotations cancel,
/// (iii) <V f, g> = <f, V g> on span{e_0..e_nmax}, (iv) growth of |phi_n|.
Report similarity_check(const ThetaParams& params, int n_max, double tol = 1e-9);

enum class SpanSide { PsiPhi, PhiPsi, PsiE, PhiE };

std::string span_side_name(SpanSide s);

/// f = sum f_coeffs[n] (left family)_n, g = sum g_coeffs[n] (right family)_n;
/// compares the truncated expansion sum_{n <= n_max} with <f, g>.
Report span_resolution_check(const ThetaParams& params, int n_max, const std::vector<cquad>& f_coeffs,
                             const std::vector<cquad>& g_coeffs, SpanSide side, double tol = 1e-9);

/// Linear combination of family members.
PolyGaussFn span_element(const EigenFamily& family, const std::vector<cquad>& coeffs);

}  // namespace iqho
