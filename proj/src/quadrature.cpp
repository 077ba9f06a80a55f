#include "resonance_atlas/quadrature.hpp"

#include "resonance_atlas/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

namespace resonance_atlas {

namespace {

struct Panel {
  double a;
  double b;
  double value;
  double error;
};

struct ByError {
  bool operator()(const Panel& x, const Panel& y) const {
    if (x.error != y.error) return x.error < y.error;
    return x.a > y.a;
  }
};

// Kronrod odd-index nodes coincide with the 10 Gauss nodes.
Panel gauss_kronrod(const RealFunction& f, double a, double b) {
  static const auto xk = boost::math::quadrature::gauss_kronrod<double, 21>::abscissa();
  static const auto wk = boost::math::quadrature::gauss_kronrod<double, 21>::weights();
  static const auto wg = boost::math::quadrature::gauss<double, 10>::weights();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double f0 = f(c);
  double kronrod = wk[0] * f0;
  double gauss = 0.0;
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const double pair = f(c - h * xk[i]) + f(c + h * xk[i]);
    kronrod += wk[i] * pair;
    if (i % 2 == 1) gauss += wg[(i - 1) / 2] * pair;
  }
  kronrod *= h;
  gauss *= h;
  if (!std::isfinite(kronrod)) {
    std::ostringstream os;
    os << "integrand not finite on [" << a << ", " << b << "]";
    throw NumericalError(os.str());
  }
  return {a, b, kronrod, std::fabs(kronrod - gauss)};
}

} // namespace

void QuadratureSpec::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw DomainError("quadrature tolerances must be > 0");
  if (max_subdivisions < 1) throw DomainError("quadrature max_subdivisions must be >= 1");
  if (!(truncation == 0.0 || truncation > 1.0)) throw DomainError("quadrature truncation must be 0 or > 1");
}

QuadratureResult integrate(const RealFunction& f, double a, double b, double abs_tol, double rel_tol,
                           int max_subdivisions) {
  if (!(a <= b)) throw DomainError("integrate: need a <= b");
  if (a == b) return {};
  std::priority_queue<Panel, std::vector<Panel>, ByError> heap;
  std::vector<Panel> frozen; // panels too narrow to split further
  heap.push(gauss_kronrod(f, a, b));
  double total = heap.top().value;
  double error = heap.top().error;
  int splits = 0;
  while (!heap.empty() && error > std::max(abs_tol, rel_tol * std::fabs(total))) {
    if (splits >= max_subdivisions) {
      std::ostringstream os;
      os << "adaptive quadrature on [" << a << ", " << b << "] did not converge after " << splits
         << " subdivisions (estimate " << total << ", error " << error << ")";
      throw NumericalError(os.str(), total, error);
    }
    const Panel p = heap.top();
    heap.pop();
    const double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b) || (p.b - p.a) < 64.0 * std::numeric_limits<double>::epsilon() *
                                                          std::max(std::fabs(p.a), std::fabs(p.b))) {
      frozen.push_back(p);
      continue;
    }
    const Panel left = gauss_kronrod(f, p.a, mid);
    const Panel right = gauss_kronrod(f, mid, p.b);
    total += left.value + right.value - p.value;
    error += left.error + right.error - p.error;
    heap.push(left);
    heap.push(right);
    ++splits;
  }
  // Re-sum in a fixed order to remove accumulated update rounding.
  std::vector<Panel> all = std::move(frozen);
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  QuadratureResult out;
  for (const Panel& p : all) {
    out.value += p.value;
    out.error += p.error;
  }
  out.subdivisions = splits;
  if (out.error > std::max(abs_tol, rel_tol * std::fabs(out.value))) {
    std::ostringstream os;
    os << "adaptive quadrature on [" << a << ", " << b << "] stalled at error " << out.error;
    throw NumericalError(os.str(), out.value, out.error);
  }
  return out;
}

QuadratureResult integrate(const RealFunction& f, double a, double b, const QuadratureSpec& spec) {
  return integrate(f, a, b, spec.abs_tol, spec.rel_tol, spec.max_subdivisions);
}

QuadratureResult integrate_to_infinity(const RealFunction& f, double a, const QuadratureSpec& spec) {
  const auto g = [&](double s) {
    const double one_minus = 1.0 - s;
    return f(a + s / one_minus) / (one_minus * one_minus);
  };
  return integrate(g, 0.0, 1.0, spec);
}

} // namespace resonance_atlas
