#pragma once

#include <functional>

namespace resonance_atlas {

struct QuadratureSpec {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  /// Upper cut for integrals over [t0, inf).  0 selects the smallest radius
  /// whose analytic tail bound is below abs_tol / 10.
  double truncation = 0.0;
  int max_subdivisions = 4000;

  /// Throws DomainError unless tolerances are positive, max_subdivisions >= 1
  /// and truncation is 0 or > 1.
  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
};

using RealFunction = std::function<double(double)>;

/// Global adaptive 21-point Gauss-Kronrod quadrature on [a, b] (a <= b).
/// The panel with the largest error is bisected until the summed error is
/// below max(abs_tol, rel_tol |I|).  Panel order is deterministic.
/// Throws NumericalError carrying the estimate when max_subdivisions runs out.
QuadratureResult integrate(const RealFunction& f, double a, double b, double abs_tol, double rel_tol,
                           int max_subdivisions);

QuadratureResult integrate(const RealFunction& f, double a, double b, const QuadratureSpec& spec);

/// Integral over [a, inf) through x = a + s / (1 - s).
QuadratureResult integrate_to_infinity(const RealFunction& f, double a, const QuadratureSpec& spec);

} // namespace resonance_atlas
