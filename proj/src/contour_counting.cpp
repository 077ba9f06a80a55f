#include "resonance_atlas/contour_counting.hpp"

#include "resonance_atlas/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace resonance_atlas {

namespace {

constexpr double pi = std::numbers::pi;

std::string show(cplx z) {
  std::ostringstream os;
  os.precision(12);
  os << "(" << z.real() << (z.imag() < 0 ? " - " : " + ") << std::fabs(z.imag()) << "i)";
  return os.str();
}

cplx checked_eval(const ComplexFunction& f, cplx z) {
  const cplx v = f(z);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    throw NumericalError("function value not finite at " + show(z));
  }
  if (v == cplx(0.0, 0.0)) throw BoundaryConflict("function vanishes on the contour at " + show(z));
  return v;
}

// Arg change of f along the path point(s), s in [s0, s1], whose length
// element is `speed` ds.
template <class Path>
double refine_phase(const ComplexFunction& f, const Path& point, double speed, double s0, double s1, cplx f0,
                    cplx f1, double min_length) {
  const double sm = 0.5 * (s0 + s1);
  const cplx fm = checked_eval(f, point(sm));
  const double whole = std::arg(f1 / f0);
  const double left = std::arg(fm / f0);
  const double right = std::arg(f1 / fm);
  const double limit = 0.5 * pi;
  if (std::fabs(whole) <= limit && std::fabs(left) <= limit && std::fabs(right) <= limit &&
      std::fabs(left + right - whole) < 1e-9) {
    return left + right;
  }
  if ((s1 - s0) * speed < min_length) {
    throw BoundaryConflict("zero suspected within guard distance of the contour near " + show(point(sm)));
  }
  return refine_phase(f, point, speed, s0, sm, f0, fm, min_length) +
         refine_phase(f, point, speed, sm, s1, fm, f1, min_length);
}

template <class Path>
double path_phase(const ComplexFunction& f, const Path& point, double length, int pieces, double min_length,
                  cplx f_start, cplx f_end) {
  pieces = std::max(pieces, 1);
  double total = 0.0;
  cplx prev = f_start;
  for (int k = 0; k < pieces; ++k) {
    const double s0 = static_cast<double>(k) / pieces;
    const double s1 = static_cast<double>(k + 1) / pieces;
    const cplx next = (k + 1 == pieces) ? f_end : checked_eval(f, point(s1));
    total += refine_phase(f, point, length, s0, s1, prev, next, min_length);
    prev = next;
  }
  return total;
}

template <class Path>
double path_phase(const ComplexFunction& f, const Path& point, double length, int pieces, double min_length) {
  return path_phase(f, point, length, pieces, min_length, checked_eval(f, point(0.0)), checked_eval(f, point(1.0)));
}

int snap_winding(double total, const char* what) {
  const double w = total / (2.0 * pi);
  const double rounded = std::round(w);
  if (std::fabs(w - rounded) > 0.25) {
    std::ostringstream os;
    os << what << ": winding estimate " << w << " is not near an integer";
    throw NumericalError(os.str(), w);
  }
  return static_cast<int>(rounded);
}

} // namespace

ContourBox::ContourBox(cplx ll, cplx ur, int d) : lower_left(ll), upper_right(ur), depth(d) {
  if (!(ur.real() > ll.real() && ur.imag() > ll.imag())) {
    throw DomainError("box corners " + show(ll) + ", " + show(ur) + " do not span a rectangle");
  }
}

bool ContourBox::contains(cplx z) const {
  return z.real() >= lower_left.real() && z.real() <= upper_right.real() && z.imag() >= lower_left.imag() &&
         z.imag() <= upper_right.imag();
}

double phase_increment(const ComplexFunction& f, cplx a, cplx b, int pieces, double min_length) {
  const cplx delta = b - a;
  return path_phase(f, [&](double s) { return a + s * delta; }, std::abs(delta), pieces, min_length);
}

double phase_increment(const ComplexFunction& f, cplx a, cplx b, cplx fa, cplx fb, int pieces, double min_length) {
  if (fa == cplx(0.0, 0.0) || fb == cplx(0.0, 0.0)) {
    throw BoundaryConflict("function vanishes at a segment end near " + show(a));
  }
  const cplx delta = b - a;
  return path_phase(f, [&](double s) { return a + s * delta; }, std::abs(delta), pieces, min_length, fa, fb);
}

double arc_phase(const ComplexFunction& f, cplx c, double r, double t0, double t1, int pieces, double min_length) {
  const auto point = [&](double s) { return c + std::polar(r, t0 + s * (t1 - t0)); };
  return path_phase(f, point, r * std::fabs(t1 - t0), pieces, min_length);
}

double circle_phase(const ComplexFunction& f, cplx c, double r, int pieces, double min_length) {
  const auto point = [&](double s) { return s == 1.0 ? c + r : c + std::polar(r, 2.0 * pi * s); };
  // Same start and end point, so f is evaluated there once.
  const cplx f0 = checked_eval(f, c + r);
  return path_phase(f, point, 2.0 * pi * r, pieces, min_length, f0, f0);
}

int winding_count(const ComplexFunction& f, const ContourBox& box, int samples) {
  if (samples < 4) throw DomainError("winding_count: need at least 4 samples");
  const double guard = 1e-3 * box.diameter();
  const cplx ll = box.lower_left;
  const cplx ur = box.upper_right;
  const cplx lr(ur.real(), ll.imag());
  const cplx ul(ll.real(), ur.imag());
  const int horizontal = std::max(1, static_cast<int>(std::lround(samples * box.width() / (2.0 * (box.width() + box.height())))));
  const int vertical = std::max(1, samples / 2 - horizontal);
  const double total = phase_increment(f, ll, lr, horizontal, guard) + phase_increment(f, lr, ur, vertical, guard) +
                       phase_increment(f, ur, ul, horizontal, guard) + phase_increment(f, ul, ll, vertical, guard);
  const int w = snap_winding(total, "winding_count");
  if (w < 0) throw NumericalError("winding_count: negative winding for a holomorphic function", w);
  return w;
}

// ---------------------------------------------------------------------------

namespace {

class Locator {
public:
  Locator(const ComplexFunction& f, const ContourBox& top, const LocateOptions& opt) : f_(f), opt_(opt) {
    if (!opt_.residual) {
      double m = 0.0;
      const cplx ll = top.lower_left;
      for (double fx : {0.0, 0.5, 1.0}) {
        for (double fy : {0.0, 0.5, 1.0}) {
          if (fx == 0.5 && fy == 0.5) continue;
          const cplx z(ll.real() + fx * top.width(), ll.imag() + fy * top.height());
          m = std::max(m, std::abs(f_(z)));
        }
      }
      boundary_scale_ = m;
    }
  }

  void process(const ContourBox& box, int w, std::vector<LocatedZero>& out) {
    if (w == 0) return;
    if (try_newton(box, w, out)) return;
    if (box.diameter() < opt_.tol) {
      const cplx z = box.center();
      const double res = residual(z);
      if (!(res < opt_.residual_tol)) {
        throw NumericalError("zero cluster at " + show(z) + " misses the residual tolerance", res);
      }
      out.push_back({z, w, res});
      return;
    }
    if (box.depth >= opt_.max_depth) {
      throw NumericalError("zero location exceeded the subdivision depth near " + show(box.center()));
    }
    std::vector<ContourBox> children;
    std::vector<int> windings;
    split(box, w, children, windings);
    for (std::size_t i = 0; i < children.size(); ++i) process(children[i], windings[i], out);
  }

private:
  double residual(cplx z) const {
    if (opt_.residual) return opt_.residual(z);
    return boundary_scale_ > 0.0 ? std::abs(f_(z)) / boundary_scale_ : std::abs(f_(z));
  }

  cplx derivative(cplx z, cplx fz) const {
    if (opt_.derivative) return opt_.derivative(z);
    const double h = 1e-6 * std::max(1.0, std::abs(z));
    (void)fz;
    return (f_(z + h) - f_(z - h)) / (2.0 * h);
  }

  bool try_newton(const ContourBox& box, int w, std::vector<LocatedZero>& out) const {
    cplx z = box.center();
    bool converged = false;
    for (int it = 0; it < 60; ++it) {
      const cplx fz = f_(z);
      if (fz == cplx(0.0, 0.0)) {
        converged = true;
        break;
      }
      const cplx dz = derivative(z, fz);
      if (dz == cplx(0.0, 0.0) || !std::isfinite(std::abs(dz))) return false;
      const cplx step = static_cast<double>(w) * fz / dz;
      z -= step;
      if (!box.contains(z)) return false;
      if (std::abs(step) <= std::max(1e-3 * opt_.tol, 8.0 * std::numeric_limits<double>::epsilon() * std::abs(z))) {
        converged = true;
        break;
      }
    }
    if (!converged) return false;
    const double res = residual(z);
    if (!(res < opt_.residual_tol)) return false;
    const double r = opt_.tol;
    int circle = 0;
    try {
      circle = snap_winding(circle_phase(f_, z, r, std::max(8, opt_.samples / 2), 2e-3 * r), "multiplicity circle");
    } catch (const NumericalError&) {
      return false;
    }
    if (circle != w) return false;
    out.push_back({z, w, res});
    return true;
  }

  void split(const ContourBox& box, int w, std::vector<ContourBox>& children, std::vector<int>& windings) const {
    static const double offsets[] = {0.0, 0.0371, -0.0529, 0.0813, -0.1067, 0.1291, -0.1553, 0.1789};
    const double shift = std::sqrt(2.0) * 0.0234;
    std::string last_error;
    for (double off : offsets) {
      const double fx = 0.5 + off + shift;
      const double fy = 0.5 - off + 0.7 * shift;
      const cplx ll = box.lower_left;
      const cplx ur = box.upper_right;
      const double xm = ll.real() + fx * box.width();
      const double ym = ll.imag() + fy * box.height();
      const int depth = box.depth + 1;
      children = {ContourBox(ll, cplx(xm, ym), depth), ContourBox(cplx(xm, ll.imag()), cplx(ur.real(), ym), depth),
                  ContourBox(cplx(ll.real(), ym), cplx(xm, ur.imag()), depth), ContourBox(cplx(xm, ym), ur, depth)};
      windings.clear();
      try {
        int sum = 0;
        for (const ContourBox& c : children) {
          windings.push_back(winding_count(f_, c, opt_.samples));
          sum += windings.back();
        }
        if (sum == w) return;
        last_error = "child windings sum to " + std::to_string(sum) + ", parent has " + std::to_string(w);
      } catch (const BoundaryConflict& e) {
        last_error = e.what();
      }
    }
    throw BoundaryConflict("cannot split box around " + show(box.center()) + ": " + last_error);
  }

  const ComplexFunction& f_;
  LocateOptions opt_;
  double boundary_scale_ = 0.0;
};

} // namespace

std::vector<LocatedZero> locate_zeros(const ComplexFunction& f, const ContourBox& box, double tol) {
  LocateOptions opt;
  opt.tol = tol;
  return locate_zeros(f, box, opt);
}

std::vector<LocatedZero> locate_zeros(const ComplexFunction& f, const ContourBox& box, const LocateOptions& options) {
  if (!(options.tol > 0.0)) throw DomainError("locate_zeros: tol must be > 0");
  const int w = box.winding ? *box.winding : winding_count(f, box, options.samples);
  std::vector<LocatedZero> out;
  Locator loc(f, box, options);
  loc.process(box, w, out);
  int total = 0;
  for (const auto& z : out) total += z.multiplicity;
  if (total != w) {
    throw NumericalError("located multiplicities sum to " + std::to_string(total) + " but the box winding is " +
                         std::to_string(w));
  }
  return out;
}

// ---------------------------------------------------------------------------

JensenTestCase::JensenTestCase(std::vector<cplx> z, std::vector<cplx> p) : zeros(std::move(z)), poles(std::move(p)) {
  double log_scale = 0.0;
  for (cplx a : zeros) {
    if (!(a.imag() > 0.0)) throw DomainError("Jensen test case: zero " + show(a) + " not in the upper half plane");
    log_scale -= std::log(std::abs(a));
  }
  for (cplx b : poles) {
    if (!(b.imag() < 0.0)) throw DomainError("Jensen test case: pole " + show(b) + " not in the lower half plane");
    log_scale += std::log(std::abs(b));
  }
  scale = std::exp(log_scale);
}

cplx JensenTestCase::value(cplx z) const {
  cplx v = scale;
  for (cplx a : zeros) v *= (z - a);
  for (cplx b : poles) v /= (z - b);
  return v;
}

cplx JensenTestCase::log_derivative(cplx z) const {
  cplx v = 0.0;
  for (cplx a : zeros) v += 1.0 / (z - a);
  for (cplx b : poles) v -= 1.0 / (z - b);
  return v;
}

namespace {

void check_radius(const JensenTestCase& tc, double r) {
  if (!(r > 0.0)) throw DomainError("Jensen verifier: r must be > 0");
  for (const auto* list : {&tc.zeros, &tc.poles}) {
    for (cplx a : *list) {
      if (std::fabs(std::abs(a) - r) <= 1e-12 * r) {
        throw DomainError("Jensen verifier: " + show(a) + " lies on |z| = r; perturb r");
      }
    }
  }
}

// int_0^r g(s) ln(r/s) ds with s = r e^{-u}.
QuadratureResult log_weighted(const RealFunction& g, double r, const QuadratureSpec& spec) {
  const auto h = [&](double u) {
    const double e = std::exp(-u);
    return e == 0.0 ? 0.0 : g(r * e) * u * r * e;
  };
  return integrate_to_infinity(h, 0.0, spec);
}

double ray_term(const JensenTestCase& tc, double r, double angle, const QuadratureSpec& spec) {
  const cplx dir = std::polar(1.0, angle);
  return log_weighted([&](double s) { return (dir * tc.log_derivative(s * dir)).imag(); }, r, spec).value;
}

double arc_term(const JensenTestCase& tc, double r, double from, double to, const QuadratureSpec& spec) {
  return integrate([&](double w) { return std::log(std::abs(tc.value(std::polar(r, w)))); }, from, to, spec).value;
}

} // namespace

JensenSides jensen_sides(const JensenTestCase& tc, double r, const QuadratureSpec& spec) {
  check_radius(tc, r);
  JensenSides out;
  for (cplx a : tc.zeros) {
    if (std::abs(a) <= r) out.lhs += std::log(r / std::abs(a));
  }
  if (tc.zeros.empty() && tc.poles.empty()) return out;
  // Im(f'/f) on both half axes: ray at angle 0 gives s > 0, ray at pi gives s < 0
  // with the sign of ds absorbed by the direction factor.
  const double positive = ray_term(tc, r, 0.0, spec);
  const double negative = -ray_term(tc, r, pi, spec);
  out.rhs = (positive + negative + arc_term(tc, r, 0.0, pi, spec)) / (2.0 * pi);
  return out;
}

double jensen_residual(const JensenTestCase& tc, double r, const QuadratureSpec& spec) {
  return jensen_sides(tc, r, spec).residual();
}

JensenSides sector_jensen_sides(const JensenTestCase& tc, double r, double phi, double theta,
                                const QuadratureSpec& spec) {
  if (!(0.0 < phi && phi < theta && theta < pi)) throw DomainError("sector Jensen: need 0 < phi < theta < pi");
  check_radius(tc, r);
  JensenSides out;
  for (cplx a : tc.zeros) {
    if (std::abs(a) > r) continue;
    const double arg = std::arg(a);
    if (std::fabs(arg - phi) < 1e-9 || std::fabs(arg - theta) < 1e-9) {
      throw BoundaryConflict("sector Jensen: zero " + show(a) + " lies on a bounding ray");
    }
    if (arg > phi && arg < theta) out.lhs += std::log(r / std::abs(a));
  }
  if (tc.zeros.empty() && tc.poles.empty()) return out;
  out.rhs = (ray_term(tc, r, phi, spec) - ray_term(tc, r, theta, spec) + arc_term(tc, r, phi, theta, spec)) /
            (2.0 * pi);
  return out;
}

double sector_jensen_residual(const JensenTestCase& tc, double r, double phi, double theta,
                              const QuadratureSpec& spec) {
  return sector_jensen_sides(tc, r, phi, theta, spec).residual();
}

} // namespace resonance_atlas
