#pragma once

#include "resonance_atlas/parallel.hpp"
#include "resonance_atlas/quadrature.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace resonance_atlas {

/// Throws DomainError unless d is odd and >= 3.
void require_odd_dimension(int d);

/// Bound on the part of the h_d integral beyond radius T:
/// (8 / (d-2)!) T^{-(d-1)} / (d-1).
double tail_bound(int d, double T);

/// spec.truncation when set, else the smallest T >= 2 with
/// tail_bound(d, T) <= abs_tol / 10.
double truncation_radius(int d, const QuadratureSpec& spec);

/// h_d(theta) = (4/(d-2)!) int_{|z0(theta)|}^inf -Re rho(t e^{i theta}) t^{-(d+1)} dt,
/// and 0 at theta = 0, pi.  The error field includes the tail bound.
QuadratureResult h_d_estimate(int d, double theta, const QuadratureSpec& spec = {});
double h_d(int d, double theta, const QuadratureSpec& spec = {});

/// (4/9) (sin 3 theta + Re w^3 / |z0|^3), w = sqrt(1 - z0^2), z0 = z0(theta).
double h3_closed_form(double theta);

/// Derivative of h_d: same weight with Re(i sqrt(1 - z^2)) as integrand.
QuadratureResult h_d_prime_estimate(int d, double theta, const QuadratureSpec& spec = {});
double h_d_prime(int d, double theta, const QuadratureSpec& spec = {});

/// Limit of h_d' at 0+: sqrt(pi) Gamma((d-1)/2) / ((d-2)! Gamma(1 + d/2)).
double hd_prime_at_zero(int d);

/// The same limit as (4/(d-2)!) int_1^inf sqrt(t^2 - 1) t^{-(d+1)} dt by quadrature.
QuadratureResult hd_prime_at_zero_integral(int d, const QuadratureSpec& spec = {});

/// int_lo^hi h_d(s) ds, 0 <= lo <= hi <= pi.
QuadratureResult integral_h(int d, double lo, double hi, const QuadratureSpec& spec = {});

/// c_d = (d / 2 pi) int_0^pi h_d.
QuadratureResult c_d_estimate(int d, const QuadratureSpec& spec = {});
double c_d(int d, const QuadratureSpec& spec = {});

/// c_d from the area integral (2d / (pi (d-2)!)) int_{Im z > 0} [-Re rho]_+ |z|^{-(d+2)}.
QuadratureResult c_d_planar(int d, const QuadratureSpec& spec = {});

/// h_d'(theta) - h_d'(phi) + d^2 int_phi^theta h_d, 0 < phi < theta < pi.
double s_tilde(int d, double phi, double theta, const QuadratureSpec& spec = {});

/// (1/2 pi d) [h_d'(theta) + d^2 int_0^theta h_d], 0 < theta < pi.
double near_axis_coeff(int d, double theta, const QuadratureSpec& spec = {});

/// (1/2 pi d) [-h_d'(phi) + d^2 int_phi^pi h_d], 0 < phi < pi.
double far_axis_coeff(int d, double phi, const QuadratureSpec& spec = {});

struct DensityTable {
  int d = 3;
  std::vector<double> thetas;
  std::vector<double> h;
  std::vector<double> h_prime;
  double c_d = 0.0;
  QuadratureSpec quad;

  /// Descriptions of violated table invariants at tolerance tol; empty if none.
  std::vector<std::string> invariant_violations(double tol) const;

  std::string to_csv() const;
  nlohmann::json to_json() const;
  static DensityTable from_json(const nlohmann::json& j);
};

/// Table on the uniform grid theta_i = i pi / (grid - 1), grid >= 3.  h' is
/// stored as 0 at the endpoints.
DensityTable build_density_table(int d, int grid, const QuadratureSpec& spec = {},
                                 Execution exec = Execution::parallel);

nlohmann::json quadrature_to_json(const QuadratureSpec& spec);
QuadratureSpec quadrature_from_json(const nlohmann::json& j);

} // namespace resonance_atlas
