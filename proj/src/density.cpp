#include "resonance_atlas/density.hpp"

#include "resonance_atlas/errors.hpp"
#include "resonance_atlas/serialization.hpp"
#include "resonance_atlas/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace resonance_atlas {

namespace {

constexpr double pi = std::numbers::pi;

double radial_weight(int d) { return 4.0 / gamma_real(static_cast<double>(d - 1)); }

void require_interior(double theta, const char* what) {
  if (!(theta > 0.0 && theta < pi)) throw DomainError(std::string(what) + ": theta must lie in (0, pi)");
}

// int_{|z0|}^{T} g(t) t^{-(d+1)} dt with t = 1/u; the transformed integrand
// g(1/u) u^{d-1} is smooth on [1/T, 1/|z0|].
QuadratureResult radial_integral(int d, double theta, const QuadratureSpec& spec, bool derivative) {
  spec.validate();
  const double T = truncation_radius(d, spec);
  const double m = z0_modulus(theta);
  const cplx dir = std::polar(1.0, theta);
  const auto f = [&](double u) {
    const cplx z = dir / u;
    const double g = derivative ? (cplx(0.0, 1.0) * rho_branch_root(z)).real() : -rho(z).real();
    return g * std::pow(u, d - 1);
  };
  const double weight = radial_weight(d);
  QuadratureResult r = integrate(f, 1.0 / T, 1.0 / m, spec.abs_tol / weight, spec.rel_tol, spec.max_subdivisions);
  r.value *= weight;
  r.error = r.error * weight + tail_bound(d, T);
  return r;
}

} // namespace

void require_odd_dimension(int d) {
  if (d < 3 || d % 2 == 0) throw DomainError("dimension d must be odd and >= 3");
}

double tail_bound(int d, double T) {
  require_odd_dimension(d);
  return 2.0 * radial_weight(d) * std::pow(T, -(d - 1)) / (d - 1);
}

double truncation_radius(int d, const QuadratureSpec& spec) {
  require_odd_dimension(d);
  if (spec.truncation > 0.0) return spec.truncation;
  const double target = spec.abs_tol / 10.0;
  const double T = std::pow(2.0 * radial_weight(d) / ((d - 1) * target), 1.0 / (d - 1));
  return std::max(2.0, T * (1.0 + 1e-12));
}

QuadratureResult h_d_estimate(int d, double theta, const QuadratureSpec& spec) {
  require_odd_dimension(d);
  if (!(theta >= 0.0 && theta <= pi)) throw DomainError("h_d: theta must lie in [0, pi]");
  if (theta == 0.0 || theta == pi) return {};
  return radial_integral(d, theta, spec, false);
}

double h_d(int d, double theta, const QuadratureSpec& spec) { return h_d_estimate(d, theta, spec).value; }

double h3_closed_form(double theta) {
  require_interior(theta, "h3_closed_form");
  const cplx z0 = z0_curve_point(theta);
  const cplx w = rho_branch_root(z0);
  const double m = std::abs(z0);
  return (4.0 / 9.0) * (std::sin(3.0 * theta) + (w * w * w).real() / (m * m * m));
}

QuadratureResult h_d_prime_estimate(int d, double theta, const QuadratureSpec& spec) {
  require_odd_dimension(d);
  require_interior(theta, "h_d_prime");
  return radial_integral(d, theta, spec, true);
}

double h_d_prime(int d, double theta, const QuadratureSpec& spec) {
  return h_d_prime_estimate(d, theta, spec).value;
}

double hd_prime_at_zero(int d) {
  require_odd_dimension(d);
  return std::sqrt(pi) * gamma_real(0.5 * (d - 1)) /
         (gamma_real(static_cast<double>(d - 1)) * gamma_real(1.0 + 0.5 * d));
}

QuadratureResult hd_prime_at_zero_integral(int d, const QuadratureSpec& spec) {
  require_odd_dimension(d);
  spec.validate();
  // t = 1/sin(a): int_1^inf sqrt(t^2-1) t^{-(d+1)} dt = int_0^{pi/2} cos^2 a sin^{d-2} a da
  const auto f = [d](double a) {
    const double c = std::cos(a);
    return c * c * std::pow(std::sin(a), d - 2);
  };
  const double weight = radial_weight(d);
  QuadratureResult r = integrate(f, 0.0, 0.5 * pi, spec.abs_tol / weight, spec.rel_tol, spec.max_subdivisions);
  r.value *= weight;
  r.error *= weight;
  return r;
}

QuadratureResult integral_h(int d, double lo, double hi, const QuadratureSpec& spec) {
  require_odd_dimension(d);
  if (!(0.0 <= lo && lo <= hi && hi <= pi)) throw DomainError("integral_h: need 0 <= lo <= hi <= pi");
  double inner_error = 0.0;
  const auto f = [&](double theta) {
    const QuadratureResult r = h_d_estimate(d, theta, spec);
    inner_error = std::max(inner_error, r.error);
    return r.value;
  };
  QuadratureResult r = integrate(f, lo, hi, spec);
  r.error += inner_error * (hi - lo);
  return r;
}

QuadratureResult c_d_estimate(int d, const QuadratureSpec& spec) {
  QuadratureResult r = integral_h(d, 0.0, pi, spec);
  const double factor = d / (2.0 * pi);
  r.value *= factor;
  r.error *= factor;
  return r;
}

double c_d(int d, const QuadratureSpec& spec) { return c_d_estimate(d, spec).value; }

QuadratureResult c_d_planar(int d, const QuadratureSpec& spec) {
  require_odd_dimension(d);
  spec.validate();
  const double y_top = std::sqrt(s0() * s0() - 1.0);

  // x >= 0 where the curve meets height y; Re rho > 0 to its left.
  const auto curve_x = [&](double y) {
    if (y >= y_top) return 0.0;
    double lo = 0.0;
    double hi = 1.2;
    for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (rho(cplx(mid, y)).real() > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };

  QuadratureSpec inner = spec;
  inner.abs_tol = spec.abs_tol / 10.0;
  double inner_error = 0.0;
  const auto row = [&](double y) {
    const auto g = [&](double x) {
      const cplx z(x, y);
      const double r2 = std::norm(z);
      return std::max(0.0, -rho(z).real()) * std::pow(r2, -0.5 * (d + 2));
    };
    const QuadratureResult r = integrate_to_infinity(g, curve_x(y), inner);
    inner_error = std::max(inner_error, r.error);
    return 2.0 * r.value;
  };
  const QuadratureResult low = integrate(row, 0.0, y_top, spec);
  const QuadratureResult high = integrate_to_infinity(row, y_top, spec);
  const double factor = 2.0 * d / (pi * gamma_real(static_cast<double>(d - 1)));
  QuadratureResult out;
  out.value = factor * (low.value + high.value);
  out.error = factor * (low.error + high.error + 2.0 * inner_error);
  out.subdivisions = low.subdivisions + high.subdivisions;
  return out;
}

double s_tilde(int d, double phi, double theta, const QuadratureSpec& spec) {
  require_odd_dimension(d);
  if (!(0.0 < phi && phi < theta && theta < pi)) throw DomainError("s_tilde: need 0 < phi < theta < pi");
  return h_d_prime(d, theta, spec) - h_d_prime(d, phi, spec) +
         static_cast<double>(d * d) * integral_h(d, phi, theta, spec).value;
}

double near_axis_coeff(int d, double theta, const QuadratureSpec& spec) {
  require_odd_dimension(d);
  require_interior(theta, "near_axis_coeff");
  return (h_d_prime(d, theta, spec) + static_cast<double>(d * d) * integral_h(d, 0.0, theta, spec).value) /
         (2.0 * pi * d);
}

double far_axis_coeff(int d, double phi, const QuadratureSpec& spec) {
  require_odd_dimension(d);
  require_interior(phi, "far_axis_coeff");
  return (-h_d_prime(d, phi, spec) + static_cast<double>(d * d) * integral_h(d, phi, pi, spec).value) /
         (2.0 * pi * d);
}

// ---------------------------------------------------------------------------

std::vector<std::string> DensityTable::invariant_violations(double tol) const {
  std::vector<std::string> out;
  const auto note = [&](const std::string& s) { out.push_back(s); };
  const std::size_t n = thetas.size();
  if (n < 3 || h.size() != n || h_prime.size() != n) {
    note("table columns have inconsistent or too few rows");
    return out;
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(thetas[i] > thetas[i - 1])) note("theta grid not strictly increasing at row " + std::to_string(i));
  }
  if (thetas.front() == 0.0 && h.front() != 0.0) note("h(0) != 0");
  if (thetas.back() == pi && h.back() != 0.0) note("h(pi) != 0");
  for (std::size_t i = 0; i < n; ++i) {
    if (h[i] < 0.0) note("h < 0 at row " + std::to_string(i));
  }
  for (std::size_t i = 0; i < n / 2; ++i) {
    const std::size_t j = n - 1 - i;
    if (std::fabs(thetas[i] + thetas[j] - pi) > 1e-12) continue;
    if (std::fabs(h[i] - h[j]) > tol) {
      std::ostringstream os;
      os << "h not symmetric about pi/2 at theta = " << thetas[i] << " (difference " << std::fabs(h[i] - h[j]) << ")";
      note(os.str());
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (std::fabs(thetas[i] - 0.5 * pi) < 1e-12 && std::fabs(h_prime[i]) > tol) {
      note("h'(pi/2) = " + format_double(h_prime[i]));
    }
  }
  return out;
}

std::string DensityTable::to_csv() const {
  std::string s = "theta,h,h_prime\n";
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    s += format_double(thetas[i]) + "," + format_double(h[i]) + "," + format_double(h_prime[i]) + "\n";
  }
  return s;
}

nlohmann::json quadrature_to_json(const QuadratureSpec& spec) {
  return {{"abs_tol", spec.abs_tol},
          {"rel_tol", spec.rel_tol},
          {"truncation", spec.truncation},
          {"max_subdivisions", spec.max_subdivisions}};
}

QuadratureSpec quadrature_from_json(const nlohmann::json& j) {
  QuadratureSpec q;
  q.abs_tol = j.at("abs_tol").get<double>();
  q.rel_tol = j.at("rel_tol").get<double>();
  q.truncation = j.at("truncation").get<double>();
  q.max_subdivisions = j.at("max_subdivisions").get<int>();
  q.validate();
  return q;
}

nlohmann::json DensityTable::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    rows.push_back({{"theta", thetas[i]}, {"h", h[i]}, {"h_prime", h_prime[i]}});
  }
  return {{"d", d}, {"c_d", c_d}, {"quad", quadrature_to_json(quad)}, {"rows", rows}};
}

DensityTable DensityTable::from_json(const nlohmann::json& j) {
  DensityTable t;
  t.d = j.at("d").get<int>();
  require_odd_dimension(t.d);
  t.c_d = j.at("c_d").get<double>();
  t.quad = quadrature_from_json(j.at("quad"));
  for (const auto& row : j.at("rows")) {
    t.thetas.push_back(row.at("theta").get<double>());
    t.h.push_back(row.at("h").get<double>());
    t.h_prime.push_back(row.at("h_prime").get<double>());
  }
  return t;
}

DensityTable build_density_table(int d, int grid, const QuadratureSpec& spec, Execution exec) {
  require_odd_dimension(d);
  spec.validate();
  if (grid < 3) throw DomainError("density table needs at least 3 grid points");
  DensityTable t;
  t.d = d;
  t.quad = spec;
  const auto n = static_cast<std::size_t>(grid);
  t.thetas.resize(n);
  t.h.assign(n, 0.0);
  t.h_prime.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    t.thetas[i] = (i + 1 == n) ? pi : pi * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  for_each_index(n, exec, [&](std::size_t i) {
    const double theta = t.thetas[i];
    if (i == 0 || i + 1 == n) return;
    t.h[i] = h_d(d, theta, spec);
    t.h_prime[i] = h_d_prime(d, theta, spec);
  });
  t.c_d = c_d(d, spec);
  return t;
}

} // namespace resonance_atlas
