#include "resonance_atlas/special_functions.hpp"

#include "resonance_atlas/errors.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace resonance_atlas {

namespace {

constexpr double pi = std::numbers::pi;

cplx to_double(cplx_ld v, const char* what) {
  const long double re = v.real();
  const long double im = v.imag();
  if (!std::isfinite(re) || !std::isfinite(im) || std::fabs(re) > DBL_MAX ||
      std::fabs(im) > DBL_MAX) {
    throw OverflowError(std::string(what) + ": value outside double range");
  }
  return {static_cast<double>(re), static_cast<double>(im)};
}

cplx_ld ipow(cplx_ld z, int n) {
  cplx_ld r = 1.0L;
  cplx_ld base = z;
  while (n > 0) {
    if (n & 1) r *= base;
    base *= base;
    n >>= 1;
  }
  return r;
}

void require_order(int ell, const char* what) {
  if (ell < 0) throw DomainError(std::string(what) + ": order must be >= 0");
}

// s - tanh(s), with the Taylor series where the difference cancels.
double s_minus_tanh(double s) {
  if (s < 1e-2) {
    const double s2 = s * s;
    return s * s2 * (1.0 / 3.0 + s2 * (-2.0 / 15.0 + s2 * (17.0 / 315.0 - s2 * 62.0 / 2835.0)));
  }
  return s - std::tanh(s);
}

double curve_arg(double s) { return std::arg(z0_point(s, CurveBranch::plus)); }

CurveConstants build_curve_constants() {
  CurveConstants c;
  c.s0 = s0();
  constexpr int n = 2048;
  c.s_grid.reserve(n);
  c.args.reserve(n);
  for (int i = 1; i <= n; ++i) {
    // Uniform in s^2: the argument grows like s^2 / sqrt(3) near s = 0.
    const double s = (i == n) ? c.s0 : c.s0 * std::sqrt(static_cast<double>(i) / n);
    c.s_grid.push_back(s);
    c.args.push_back(curve_arg(s));
  }
  for (std::size_t i = 1; i < c.args.size(); ++i) {
    if (!(c.args[i] > c.args[i - 1])) {
      std::ostringstream os;
      os << "z0 curve: arg not monotone in s near s = " << c.s_grid[i] << " (arg "
         << c.args[i - 1] << " -> " << c.args[i] << ")";
      throw NumericalError(os.str());
    }
  }
  c.thetas.reserve(2 * n);
  c.moduli.reserve(2 * n);
  for (int i = 0; i < n; ++i) {
    c.thetas.push_back(c.args[i]);
    c.moduli.push_back(std::abs(z0_point(c.s_grid[i], CurveBranch::plus)));
  }
  for (int i = n - 2; i >= 0; --i) {
    c.thetas.push_back(pi - c.args[i]);
    c.moduli.push_back(std::abs(z0_point(c.s_grid[i], CurveBranch::minus)));
  }
  return c;
}

} // namespace

// ---------------------------------------------------------------------------

cplx rho_branch_root(cplx z) {
  // Negating the imaginary part keeps the sign of zero, so 1 - x for real
  // x > 1 lands on the lower side of the cut of the principal root.
  return std::sqrt(cplx(1.0 - z.real(), -z.imag())) * std::sqrt(cplx(1.0 + z.real(), z.imag()));
}

cplx rho(cplx z) {
  const double x = z.real();
  const double y = z.imag();
  if (std::isnan(x) || std::isnan(y)) throw DomainError("rho: NaN argument");
  if (y < 0.0) throw DomainError("rho: Im z < 0");
  if (y == 0.0 && x <= 0.0) throw DomainError("rho: z = 0 or z on the negative real axis");
  const cplx w = rho_branch_root(z);
  return std::log(1.0 + w) - std::log(z) - w;
}

RayPoint RayPoint::at(double t, double theta) {
  if (!(t > 0.0)) throw DomainError("RayPoint: t must be > 0");
  if (!(theta > 0.0 && theta < pi)) throw DomainError("RayPoint: theta must lie in (0, pi)");
  return RayPoint{t, theta, rho(std::polar(t, theta))};
}

double s0() {
  static const double value = [] {
    double lo = 1.0;
    double hi = 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (1.0 / std::tanh(mid) - mid > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }();
  return value;
}

cplx z0_point(double s, CurveBranch branch) {
  const double top = s0();
  if (!(s > 0.0) || s > top * (1.0 + 1e-12)) {
    throw DomainError("z0_point: s must lie in (0, s0]");
  }
  const double re2 = std::max(0.0, s / std::tanh(s) - s * s);
  const double im2 = std::max(0.0, s * s_minus_tanh(s));
  const double re = std::sqrt(re2);
  return {branch == CurveBranch::plus ? re : -re, std::sqrt(im2)};
}

double z0_modulus(double theta) {
  if (!(theta > 0.0 && theta < pi)) throw DomainError("z0_modulus: theta must lie in (0, pi)");
  const CurveConstants& c = curve_constants();
  const double folded = theta <= 0.5 * pi ? theta : pi - theta;
  const auto branch = theta <= 0.5 * pi ? CurveBranch::plus : CurveBranch::minus;
  if (folded >= c.args.back()) return std::abs(z0_point(c.s0, branch));

  const auto it = std::upper_bound(c.args.begin(), c.args.end(), folded);
  const auto idx = static_cast<std::size_t>(it - c.args.begin());
  double lo = idx == 0 ? 0.0 : c.s_grid[idx - 1];
  double hi = c.s_grid[idx];
  for (int iter = 0; iter < 200 && hi - lo > 2.0 * DBL_EPSILON * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (curve_arg(mid) < folded) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(z0_point(0.5 * (lo + hi), branch));
}

cplx z0_curve_point(double theta) { return std::polar(z0_modulus(theta), theta); }

double CurveConstants::sample_modulus(double theta) const {
  if (!(theta > 0.0 && theta < pi)) throw DomainError("sample_modulus: theta must lie in (0, pi)");
  if (theta <= thetas.front()) {
    // Between the endpoint (theta = 0, |z0| = 1) and the first sample.
    const double f = theta / thetas.front();
    return (1.0 - f) + f * moduli.front();
  }
  if (theta >= thetas.back()) {
    const double f = (pi - theta) / (pi - thetas.back());
    return (1.0 - f) + f * moduli.back();
  }
  const auto it = std::upper_bound(thetas.begin(), thetas.end(), theta);
  const auto i = static_cast<std::size_t>(it - thetas.begin());
  const double f = (theta - thetas[i - 1]) / (thetas[i] - thetas[i - 1]);
  return (1.0 - f) * moduli[i - 1] + f * moduli[i];
}

const CurveConstants& curve_constants() {
  static const CurveConstants table = build_curve_constants();
  return table;
}

// ---------------------------------------------------------------------------

void reduced_bessel_j(cplx_ld x2, std::span<cplx_ld> out) {
  if (out.empty()) return;
  const int lmax = static_cast<int>(out.size()) - 1;
  const long double ax = std::sqrt(std::abs(x2));

  if (ax == 0.0L) {
    out[0] = 1.0L;
    for (int n = 1; n <= lmax; ++n) out[n] = out[n - 1] / static_cast<long double>(2 * n + 1);
    return;
  }

  if (ax < 0.5L) {
    // jt_n(x) = sum_m (-x^2/2)^m / (m! (2n+2m+1)!!)
    long double inv_dfact = 1.0L;
    for (int n = 0; n <= lmax; ++n) {
      inv_dfact /= static_cast<long double>(2 * n + 1);
      cplx_ld term = inv_dfact;
      cplx_ld sum = term;
      for (int m = 0; m < 60; ++m) {
        term *= -0.5L * x2 / (static_cast<long double>(m + 1) * static_cast<long double>(2 * n + 2 * m + 3));
        sum += term;
        if (std::abs(term) < 1e-22L * std::abs(sum)) break;
      }
      out[n] = sum;
    }
    return;
  }

  const int top = std::max(lmax, 1);
  const int start = std::max(top, static_cast<int>(std::ceil(ax))) + 30 +
                    static_cast<int>(std::ceil(6.0L * std::cbrt(ax)));
  std::vector<cplx_ld> seq(static_cast<std::size_t>(top) + 1);
  cplx_ld next = 0.0L;
  cplx_ld cur = 1e-300L;
  constexpr long double big = 1e1000L;
  for (int n = start; n >= 1; --n) {
    if (n <= top) seq[n] = cur;
    const cplx_ld prev = static_cast<long double>(2 * n + 1) * cur - x2 * next;
    next = cur;
    cur = prev;
    if (std::abs(cur) > big) {
      cur /= big;
      next /= big;
      for (int k = n; k <= top; ++k) seq[k] /= big;
    }
  }
  seq[0] = cur;

  const cplx_ld x = std::sqrt(x2);
  const cplx_ld sinx = std::sin(x);
  const cplx_ld cosx = std::cos(x);
  const cplx_ld j0 = sinx / x;
  const cplx_ld j1_reduced = (j0 - cosx) / x2;
  const cplx_ld scale = std::abs(j0) >= std::abs(j1_reduced * x) ? j0 / seq[0] : j1_reduced / seq[1];
  for (int n = 0; n <= lmax; ++n) out[n] = seq[n] * scale;
}

namespace {

void hankel_upward(cplx_ld z, HankelKind kind, std::span<cplx_ld> out) {
  const cplx_ld i(0.0L, 1.0L);
  const cplx_ld z2 = z * z;
  if (kind == HankelKind::first) {
    const cplx_ld e = std::exp(i * z);
    out[0] = -i * e;
    if (out.size() > 1) out[1] = -e * (z + i);
  } else {
    const cplx_ld e = std::exp(-i * z);
    out[0] = i * e;
    if (out.size() > 1) out[1] = -e * (z - i);
  }
  for (std::size_t n = 1; n + 1 < out.size(); ++n) {
    out[n + 1] = static_cast<long double>(2 * n + 1) * out[n] - z2 * out[n - 1];
  }
}

} // namespace

void reduced_hankel(cplx_ld z, HankelKind kind, std::span<cplx_ld> out) {
  if (out.empty()) return;
  // Upward recurrence is stable for h1 when Im z >= 0 and for h2 when Im z <= 0.
  // Past the turning index the other kind picks up a relative error of order
  // eps * exp(2 |Im z|), so it is recovered from h1 + h2 = 2 j instead.
  const bool direct = (kind == HankelKind::first) ? z.imag() >= 0.0L : z.imag() <= 0.0L;
  if (direct) {
    hankel_upward(z, kind, out);
    return;
  }
  const auto other = kind == HankelKind::first ? HankelKind::second : HankelKind::first;
  hankel_upward(z, other, out);
  std::vector<cplx_ld> jt(out.size());
  reduced_bessel_j(z * z, jt);
  cplx_ld zpow = z; // z^{2n+1}
  const cplx_ld z2 = z * z;
  for (std::size_t n = 0; n < out.size(); ++n) {
    out[n] = 2.0L * zpow * jt[n] - out[n];
    zpow *= z2;
  }
}

cplx sph_bessel_j(int ell, cplx z) {
  require_order(ell, "sph_bessel_j");
  std::vector<cplx_ld> jt(static_cast<std::size_t>(ell) + 1);
  const cplx_ld zl(z.real(), z.imag());
  reduced_bessel_j(zl * zl, jt);
  return to_double(jt[ell] * ipow(zl, ell), "sph_bessel_j");
}

cplx sph_bessel_j_deriv(int ell, cplx z) {
  require_order(ell, "sph_bessel_j_deriv");
  std::vector<cplx_ld> jt(static_cast<std::size_t>(ell) + 2);
  const cplx_ld zl(z.real(), z.imag());
  reduced_bessel_j(zl * zl, jt);
  // j'_l = l z^{l-1} jt_l - z^{l+1} jt_{l+1}
  cplx_ld v = -ipow(zl, ell + 1) * jt[ell + 1];
  if (ell > 0) v += static_cast<long double>(ell) * ipow(zl, ell - 1) * jt[ell];
  return to_double(v, "sph_bessel_j_deriv");
}

namespace {

struct HankelPair {
  cplx_ld value;
  cplx_ld deriv;
};

HankelPair hankel_with_deriv(int ell, cplx z, HankelKind kind, const char* what) {
  require_order(ell, what);
  if (z == cplx(0.0, 0.0)) throw DomainError(std::string(what) + ": pole at z = 0");
  std::vector<cplx_ld> ht(static_cast<std::size_t>(ell) + 2);
  const cplx_ld zl(z.real(), z.imag());
  reduced_hankel(zl, kind, ht);
  const cplx_ld zp = ipow(zl, ell + 1);
  const cplx_ld h = ht[ell] / zp;
  const cplx_ld h_next = ht[ell + 1] / (zp * zl);
  return {h, static_cast<long double>(ell) / zl * h - h_next};
}

} // namespace

cplx sph_hankel1(int ell, cplx z) {
  return to_double(hankel_with_deriv(ell, z, HankelKind::first, "sph_hankel1").value, "sph_hankel1");
}

cplx sph_hankel1_deriv(int ell, cplx z) {
  return to_double(hankel_with_deriv(ell, z, HankelKind::first, "sph_hankel1_deriv").deriv,
                   "sph_hankel1_deriv");
}

cplx sph_hankel2(int ell, cplx z) {
  return to_double(hankel_with_deriv(ell, z, HankelKind::second, "sph_hankel2").value, "sph_hankel2");
}

cplx sph_hankel2_deriv(int ell, cplx z) {
  return to_double(hankel_with_deriv(ell, z, HankelKind::second, "sph_hankel2_deriv").deriv,
                   "sph_hankel2_deriv");
}

double gamma_real(double x) {
  if (!(x > 0.0)) throw DomainError("gamma_real: x must be > 0");
  const double twice = 2.0 * x;
  if (twice == std::floor(twice) && x < 171.0) {
    if (x == std::floor(x)) {
      double g = 1.0;
      for (int k = 2; k < static_cast<int>(x); ++k) g *= k;
      return g;
    }
    // x = n + 1/2
    double g = std::sqrt(pi);
    for (double k = 0.5; k < x; k += 1.0) g *= k;
    return g;
  }
  return std::tgamma(x);
}

} // namespace resonance_atlas
