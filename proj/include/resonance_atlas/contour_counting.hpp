#pragma once

#include "resonance_atlas/quadrature.hpp"
#include "resonance_atlas/special_functions.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace resonance_atlas {

using ComplexFunction = std::function<cplx(cplx)>;

struct ContourBox {
  cplx lower_left;
  cplx upper_right;
  std::optional<int> winding;
  int depth = 0;

  ContourBox() = default;
  /// Throws DomainError unless the corners span a nonempty rectangle.
  ContourBox(cplx lower_left, cplx upper_right, int depth = 0);

  double width() const { return upper_right.real() - lower_left.real(); }
  double height() const { return upper_right.imag() - lower_left.imag(); }
  double diameter() const { return std::abs(upper_right - lower_left); }
  cplx center() const { return 0.5 * (lower_left + upper_right); }
  bool contains(cplx z) const;
};

/// Change of arg f along the segment a -> b.  The segment starts as `pieces`
/// equal parts; a part is accepted when its arg step is at most pi/2 and the
/// two halves agree with it, otherwise it is bisected.  Throws BoundaryConflict
/// when a part shorter than min_length still needs splitting, or f vanishes.
double phase_increment(const ComplexFunction& f, cplx a, cplx b, int pieces, double min_length);

/// Same, with f(a) and f(b) already known (shared grid vertices).
double phase_increment(const ComplexFunction& f, cplx a, cplx b, cplx fa, cplx fb, int pieces, double min_length);

/// Change of arg f along the arc c + r e^{i t}, t from t0 to t1.
double arc_phase(const ComplexFunction& f, cplx c, double r, double t0, double t1, int pieces, double min_length);

/// Change of arg f along the circle |z - c| = r, counterclockwise.
double circle_phase(const ComplexFunction& f, cplx c, double r, int pieces, double min_length);

/// Number of zeros of f inside the box by the argument principle, with
/// boundary guard 1e-3 * diameter.  `samples` is the initial count of points
/// on the boundary.  Throws BoundaryConflict for zeros at the boundary and
/// NumericalError when the estimate does not settle on an integer >= 0.
int winding_count(const ComplexFunction& f, const ContourBox& box, int samples = 64);

struct LocatedZero {
  cplx z;
  int multiplicity = 1;
  double residual = 0.0;
};

struct LocateOptions {
  /// Location tolerance (absolute) and radius of the multiplicity circle.
  double tol = 1e-10;
  /// Zeros must satisfy residual(z) < residual_tol.
  double residual_tol = 1e-8;
  int samples = 32;
  int max_depth = 60;
  /// Analytic derivative; finite differences when empty.
  ComplexFunction derivative;
  /// Residual of a candidate zero; default |f(z)| / max |f| on the box corners
  /// and edge midpoints (maximum modulus bound).
  std::function<double(cplx)> residual;
};

/// Zeros of f inside the box with multiplicity.  Boxes are quadrisected (at
/// slightly perturbed split points) until each holds one zero cluster that
/// Newton's method resolves, or the box is smaller than tol.  The multiplicity
/// sum equals the box winding; a mismatch throws NumericalError.
std::vector<LocatedZero> locate_zeros(const ComplexFunction& f, const ContourBox& box, double tol);
std::vector<LocatedZero> locate_zeros(const ComplexFunction& f, const ContourBox& box, const LocateOptions& options);

/// f(z) = C prod (z - zeros_j) / prod (z - poles_k), with C > 0 chosen so
/// that |f(0)| = 1.  Zeros lie in Im z > 0, poles in Im z < 0.
struct JensenTestCase {
  std::vector<cplx> zeros;
  std::vector<cplx> poles;
  double scale = 1.0;

  /// Validates the lists and sets the scale; throws DomainError.
  JensenTestCase(std::vector<cplx> zeros, std::vector<cplx> poles);

  cplx value(cplx z) const;
  /// f'/f, evaluated analytically.
  cplx log_derivative(cplx z) const;
};

struct JensenSides {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual() const { return std::fabs(lhs - rhs); }
};

/// Both sides of
///   int_0^r m(t)/t dt = (1/2 pi) int_{-r}^{r} Im(f'/f(s)) ln(r/|s|) ds
///                       + (1/2 pi) int_0^pi ln|f(r e^{i w})| dw,
/// m(t) the number of zeros with |z| <= t.
JensenSides jensen_sides(const JensenTestCase& tc, double r, const QuadratureSpec& spec = {});
double jensen_residual(const JensenTestCase& tc, double r, const QuadratureSpec& spec = {});

/// Sector version on phi <= arg z <= theta:
///   int_0^r m(t, phi, theta)/t dt = (1/2 pi) int_0^r Im(e^{i phi} f'/f(s e^{i phi})) ln(r/s) ds
///       - (1/2 pi) int_0^r Im(e^{i theta} f'/f(s e^{i theta})) ln(r/s) ds
///       + (1/2 pi) int_phi^theta ln|f(r e^{i w})| dw.
JensenSides sector_jensen_sides(const JensenTestCase& tc, double r, double phi, double theta,
                                const QuadratureSpec& spec = {});
double sector_jensen_residual(const JensenTestCase& tc, double r, double phi, double theta,
                              const QuadratureSpec& spec = {});

} // namespace resonance_atlas
