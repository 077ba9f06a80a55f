#pragma once

#include <complex>
#include <span>
#include <vector>

namespace resonance_atlas {

using cplx = std::complex<double>;
using cplx_ld = std::complex<long double>;

// ---------------------------------------------------------------------------
// Bessel phase function and its zero-real-part curve
// ---------------------------------------------------------------------------

/// The square root w = sqrt(1 - z^2) taken as sqrt(1 - z) * sqrt(1 + z) with
/// principal roots.  On the positive real axis beyond 1 the value is the limit
/// from the upper half plane, w = -i sqrt(z^2 - 1).
cplx rho_branch_root(cplx z);

/// rho(z) = log((1 + w) / z) - w, continuous on {0 < arg z < pi} and on the
/// positive real axis (limit from above), principal branches on (0, 1).
/// Throws DomainError for z = 0, z on the negative real axis or Im z < 0.
cplx rho(cplx z);

/// Sample of rho along the ray t e^{i theta}.
struct RayPoint {
  double t = 0.0;
  double theta = 0.0;
  cplx rho_value;

  static RayPoint at(double t, double theta);
};

/// Positive root of coth(s) = s, accurate to 1e-15.
double s0();

enum class CurveBranch { plus, minus };

/// Point of the curve +-sqrt(s coth s - s^2) + i sqrt(s^2 - s tanh s),
/// 0 < s <= s0.  The curve separates Re rho > 0 (inside) from Re rho < 0.
cplx z0_point(double s, CurveBranch branch);

/// |z0(theta)|, the modulus of the curve point with argument theta in (0, pi).
double z0_modulus(double theta);

/// z0(theta) = |z0(theta)| e^{i theta}.
cplx z0_curve_point(double theta);

/// Tabulation of the curve built once per process.  Lookups are read-only and
/// safe to share between threads.
struct CurveConstants {
  double s0 = 0.0;
  /// Parameter samples on (0, s0], strictly increasing.
  std::vector<double> s_grid;
  /// arg z0_point(s_grid[i], plus), strictly increasing in i (asserted on build).
  std::vector<double> args;
  /// Angle grid over (0, pi) and |z0| on it (both branches).
  std::vector<double> thetas;
  std::vector<double> moduli;

  /// Linear interpolation of |z0| from the table; for bracketing and checks.
  double sample_modulus(double theta) const;
};

const CurveConstants& curve_constants();

// ---------------------------------------------------------------------------
// Spherical Bessel and Hankel functions of integer order
// ---------------------------------------------------------------------------

cplx sph_bessel_j(int ell, cplx z);
cplx sph_bessel_j_deriv(int ell, cplx z);
/// Outgoing Hankel function h_ell^(1) = j_ell + i y_ell.  Throws OverflowError
/// when the value leaves double range (deep lower half plane, tiny |z|).
cplx sph_hankel1(int ell, cplx z);
cplx sph_hankel1_deriv(int ell, cplx z);
cplx sph_hankel2(int ell, cplx z);
cplx sph_hankel2_deriv(int ell, cplx z);

/// Reduced regular functions jt_n(x) = j_n(x) / x^n, n = 0..out.size()-1.
/// They are even entire functions of x, so the argument is x^2.  Backward
/// (Miller) recurrence with normalisation against j_0 or j_1.
void reduced_bessel_j(cplx_ld x_squared, std::span<cplx_ld> out);

enum class HankelKind { first, second };

/// Reduced Hankel functions Ht_n(z) = z^{n+1} h_n(z), n = 0..out.size()-1.
/// Entire in z.  Upward recurrence Ht_{n+1} = (2n+1) Ht_n - z^2 Ht_{n-1} on the
/// half plane where it is stable, Ht1 + Ht2 = 2 z^{2n+1} jt_n on the other.
void reduced_hankel(cplx_ld z, HankelKind kind, std::span<cplx_ld> out);

/// Gamma function for x > 0; integer and half-integer arguments use the
/// recurrence from Gamma(1) = 1 and Gamma(1/2) = sqrt(pi).
double gamma_real(double x);

} // namespace resonance_atlas
