#include "resonance_atlas/radial_resonances.hpp"

#include "resonance_atlas/errors.hpp"
#include "resonance_atlas/serialization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

namespace resonance_atlas {

namespace {

constexpr double pi = std::numbers::pi;

std::string show(cplx z) {
  std::ostringstream os;
  os.precision(10);
  os << "(" << z.real() << (z.imag() < 0 ? " - " : " + ") << std::fabs(z.imag()) << "i)";
  return os.str();
}

std::string channel_tag(int ell, const RadialStepPotential& pot) {
  std::ostringstream os;
  os << "channel l=" << ell << " (a=" << pot.a << ", v0=" << show(pot.v0) << ")";
  return os.str();
}

struct Workspace {
  std::vector<cplx_ld> jt;
  std::vector<cplx_ld> ht;
  std::vector<cplx_ld> jm;
  std::vector<cplx_ld> hs;
};

// F and dF/dmu at mu = lambda a, with va2 = v0 a^2.  On the half plane where
// the requested Hankel kind is dominant, F = 2 mu^{2l+1} D - F_other with
// D = mu^2 jt_l(x) jt_{l+1}(mu) - x^2 jt_{l+1}(x) jt_l(mu), which is exactly 0
// for v0 = 0.
ChannelValue evaluate(int ell, cplx_ld va2, cplx_ld mu, bool with_derivative, HankelKind kind) {
  thread_local Workspace ws;
  const auto n = static_cast<std::size_t>(ell);
  const cplx_ld x2 = mu * mu - va2;
  ws.jt.resize(n + 3);
  ws.ht.resize(n + 2);
  reduced_bessel_j(x2, std::span<cplx_ld>(ws.jt.data(), with_derivative ? n + 3 : n + 2));
  const auto& jt = ws.jt;
  auto& ht = ws.ht;
  ChannelValue out;
  const bool direct = kind == HankelKind::first ? mu.imag() >= 0.0L : mu.imag() <= 0.0L;
  if (direct) {
    reduced_hankel(mu, kind, std::span<cplx_ld>(ht.data(), n + 2));
    out.value = jt[n] * ht[n + 1] - x2 * jt[n + 1] * ht[n];
  } else {
    const HankelKind other = kind == HankelKind::first ? HankelKind::second : HankelKind::first;
    const cplx_ld mu2 = mu * mu;
    ws.jm.resize(n + 2);
    ws.hs.resize(n + 2);
    reduced_bessel_j(mu2, std::span<cplx_ld>(ws.jm.data(), n + 2));
    reduced_hankel(mu, other, std::span<cplx_ld>(ws.hs.data(), n + 2));
    const auto& jm = ws.jm;
    const auto& hs = ws.hs;
    cplx_ld p = mu;
    for (std::size_t k = 0; k < n + 2; ++k) {
      ht[k] = 2.0L * p * jm[k] - hs[k];
      if (k == n) {
        const cplx_ld d = mu2 * (jt[n] * jm[n + 1]) - x2 * (jt[n + 1] * jm[n]);
        const cplx_ld f_other = jt[n] * hs[n + 1] - x2 * jt[n + 1] * hs[n];
        out.value = 2.0L * p * d - f_other;
      }
      p *= mu2;
    }
  }
  out.scale = std::abs(jt[n] * ht[n + 1]) + std::abs(x2 * jt[n + 1] * ht[n]);
  if (with_derivative) {
    // dHt_n/dmu = mu Ht_{n-1} (mu Ht_{-1} = e^{+-i mu}); djt_n/dmu = -mu jt_{n+1}.
    const cplx_ld i(0.0L, 1.0L);
    const cplx_ld mu_h_prev =
        ell >= 1 ? mu * ht[n - 1] : (kind == HankelKind::first ? std::exp(i * mu) : std::exp(-i * mu));
    out.derivative = -mu * jt[n + 1] * ht[n + 1] + jt[n] * mu * ht[n] - 2.0L * mu * jt[n + 1] * ht[n] +
                     x2 * mu * jt[n + 2] * ht[n] - x2 * jt[n + 1] * mu_h_prev;
  }
  return out;
}

cplx_ld widen(cplx z) { return {z.real(), z.imag()}; }

cplx narrow(cplx_ld z, const std::string& what) {
  const long double re = z.real();
  const long double im = z.imag();
  if (!std::isfinite(re) || !std::isfinite(im) || std::fabs(re) > 1e300L || std::fabs(im) > 1e300L) {
    throw OverflowError(what + ": value outside double range");
  }
  return {static_cast<double>(re), static_cast<double>(im)};
}

cplx_ld scaled_v0(const RadialStepPotential& pot) { return widen(pot.v0) * static_cast<long double>(pot.a * pot.a); }

void check_radius(double R) {
  if (!(R > 0.0) || !std::isfinite(R)) throw DomainError("search radius must be a positive number");
}

double frac(double x) { return x - std::floor(x); }

// Tiling of {|mu| <= Ra, Im mu < top} by squares, shifted by the golden and
// silver fractions of the side for shift index k.
std::vector<Resonance> solve_channel_once(int ell, const RadialStepPotential& pot, double R,
                                          const SolverTolerances& tol, int k) {
  const double Ra = R * pot.a;
  const double side = std::min(1.0, Ra / 16.0);
  const double top = -tol.axis_offset;
  const double xi = frac((k + 1) * 0.6180339887498949);
  const double eta = frac((k + 1) * 0.4142135623730951);
  const cplx_ld va2 = scaled_v0(pot);
  const std::string tag = channel_tag(ell, pot);

  std::vector<double> xs;
  for (double x = -Ra - xi * side;; x += side) {
    xs.push_back(x);
    if (x >= Ra) break;
  }
  std::vector<double> ys{top};
  for (int j = 1;; ++j) {
    ys.push_back(top - (eta + j) * side);
    if (ys.back() <= -Ra) break;
  }
  const std::size_t nx = xs.size();
  const std::size_t ny = ys.size();

  const ComplexFunction f = [&](cplx mu) { return narrow(evaluate(ell, va2, widen(mu), false, HankelKind::first).value, tag); };

  std::vector<std::optional<cplx>> vertex(nx * ny);
  const auto vertex_value = [&](std::size_t i, std::size_t j) {
    auto& v = vertex[j * nx + i];
    if (!v) v = f(cplx(xs[i], ys[j]));
    return *v;
  };
  std::vector<std::optional<double>> horizontal(nx * ny);
  std::vector<std::optional<double>> vertical(nx * ny);
  const double guard = 1e-3 * side * std::sqrt(2.0);
  const auto h_edge = [&](std::size_t i, std::size_t j) {
    auto& e = horizontal[j * nx + i];
    if (!e) {
      e = phase_increment(f, cplx(xs[i], ys[j]), cplx(xs[i + 1], ys[j]), vertex_value(i, j), vertex_value(i + 1, j), 2,
                          guard);
    }
    return *e;
  };
  const auto v_edge = [&](std::size_t i, std::size_t j) {
    auto& e = vertical[j * nx + i];
    if (!e) {
      e = phase_increment(f, cplx(xs[i], ys[j + 1]), cplx(xs[i], ys[j]), vertex_value(i, j + 1), vertex_value(i, j), 2,
                          guard);
    }
    return *e;
  };

  LocateOptions opt;
  opt.tol = tol.location_tol;
  opt.residual_tol = tol.residual_tol;
  opt.derivative = [&](cplx mu) {
    return narrow(evaluate(ell, va2, widen(mu), true, HankelKind::first).derivative, tag);
  };
  opt.residual = [&](cplx mu) {
    const ChannelValue v = evaluate(ell, va2, widen(mu), false, HankelKind::first);
    return v.scale > 0.0L ? static_cast<double>(std::abs(v.value) / v.scale) : 0.0;
  };

  std::vector<Resonance> out;
  const int degeneracy = 2 * ell + 1;
  for (std::size_t j = 0; j + 1 < ny; ++j) {
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      const double near_x = std::clamp(0.0, xs[i], xs[i + 1]);
      if (std::hypot(near_x, ys[j]) > Ra) continue;
      const double total = h_edge(i, j + 1) + v_edge(i + 1, j) - h_edge(i, j) - v_edge(i, j);
      const double w = total / (2.0 * pi);
      const long wi = std::lround(w);
      if (std::fabs(w - wi) > 0.25 || wi < 0) {
        throw NumericalError(tag + ": tile winding " + std::to_string(w) + " is not a nonnegative integer");
      }
      if (wi == 0) continue;
      ContourBox box(cplx(xs[i], ys[j + 1]), cplx(xs[i + 1], ys[j]));
      box.winding = static_cast<int>(wi);
      for (const LocatedZero& z : locate_zeros(f, box, opt)) {
        if (std::abs(z.z) > Ra || !(z.z.imag() < top)) continue;
        out.push_back({z.z / pot.a, ell, degeneracy * z.multiplicity, z.residual});
      }
    }
  }
  return out;
}

bool resonance_less(const Resonance& x, const Resonance& y) {
  const double ax = std::abs(x.lambda);
  const double ay = std::abs(y.lambda);
  if (ax != ay) return ax < ay;
  const double gx = arg_2pi(x.lambda);
  const double gy = arg_2pi(y.lambda);
  if (gx != gy) return gx < gy;
  return x.ell < y.ell;
}

} // namespace

double arg_2pi(cplx z) {
  double t = std::arg(z);
  if (t < 0.0) t += 2.0 * pi;
  return t;
}

void RadialStepPotential::validate() const {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("potential radius a must be > 0");
  if (!std::isfinite(v0.real()) || !std::isfinite(v0.imag())) throw DomainError("potential depth v0 must be finite");
}

ChannelValue channel_function(int ell, const RadialStepPotential& pot, cplx lambda, bool with_derivative,
                              HankelKind kind) {
  if (ell < 0) throw DomainError("channel index must be >= 0");
  pot.validate();
  ChannelValue v = evaluate(ell, scaled_v0(pot), widen(lambda) * static_cast<long double>(pot.a), with_derivative, kind);
  return v;
}

cplx channel_condition(int ell, const RadialStepPotential& pot, cplx lambda, KBranch branch) {
  if (lambda == cplx(0.0, 0.0)) throw DomainError("channel_condition: lambda must be nonzero");
  const ChannelValue v = channel_function(ell, pot, lambda);
  const cplx_ld lam = widen(lambda);
  const cplx_ld a = pot.a;
  cplx_ld k = std::sqrt(lam * lam - widen(pot.v0));
  if (branch == KBranch::negated) k = -k;
  const cplx_ld ka = k * a;
  const cplx_ld mu = lam * a;
  cplx_ld ratio = 1.0L / (a * mu);
  for (int n = 0; n < ell; ++n) ratio *= ka / mu;
  return narrow(v.value * ratio, "channel_condition");
}

namespace {

long double log_abs_s(int ell, const RadialStepPotential& pot, cplx lambda) {
  const ChannelValue out = channel_function(ell, pot, lambda, false, HankelKind::first);
  const ChannelValue in = channel_function(ell, pot, lambda, false, HankelKind::second);
  if (!(std::abs(out.value) > 1e-14L * out.scale)) {
    throw NumericalError(channel_tag(ell, pot) + ": lambda = " + show(lambda) + " is at a pole of S_l");
  }
  return std::log(std::abs(in.value)) - std::log(std::abs(out.value));
}

} // namespace

cplx scattering_matrix_element(int ell, const RadialStepPotential& pot, cplx lambda) {
  if (lambda == cplx(0.0, 0.0)) throw DomainError("scattering matrix: lambda must be nonzero");
  const ChannelValue out = channel_function(ell, pot, lambda, false, HankelKind::first);
  const ChannelValue in = channel_function(ell, pot, lambda, false, HankelKind::second);
  if (!(std::abs(out.value) > 1e-14L * out.scale)) {
    throw NumericalError(channel_tag(ell, pot) + ": lambda = " + show(lambda) + " is at a pole of S_l");
  }
  return narrow(-in.value / out.value, "scattering_matrix_element");
}

double scattering_log_det(const RadialStepPotential& pot, cplx lambda, int ell_limit, double rel_tol) {
  pot.validate();
  if (lambda == cplx(0.0, 0.0)) throw DomainError("scattering_log_det: lambda must be nonzero");
  if (lambda.imag() < 0.0) throw DomainError("scattering_log_det: need Im lambda >= 0");
  if (ell_limit < 0) throw DomainError("scattering_log_det: ell_limit must be >= 0");
  if (pot.is_free()) return 0.0;
  const double k = std::abs(std::sqrt(lambda * lambda - pot.v0));
  const int monitor_from = static_cast<int>(std::ceil(std::max(std::abs(lambda), k) * pot.a)) + 1;
  long double sum = 0.0L;
  int quiet = 0;
  for (int ell = 0; ell <= ell_limit; ++ell) {
    const long double term = (2 * ell + 1) * log_abs_s(ell, pot, lambda);
    sum += term;
    if (ell < monitor_from) continue;
    if (std::fabs(term) <= rel_tol * std::fabs(sum)) {
      if (++quiet >= 10) break;
    } else {
      quiet = 0;
    }
  }
  return static_cast<double>(sum);
}

int half_disk_winding(int ell, const RadialStepPotential& pot, double R, const SolverTolerances& tol) {
  check_radius(R);
  pot.validate();
  const double Ra = R * pot.a;
  const double top = -tol.axis_offset;
  if (!(Ra > tol.axis_offset)) throw DomainError("search radius below the axis offset");
  const cplx_ld va2 = scaled_v0(pot);
  const std::string tag = channel_tag(ell, pot);
  const ComplexFunction f = [&](cplx mu) { return narrow(evaluate(ell, va2, widen(mu), false, HankelKind::first).value, tag); };
  const double eps = std::asin(tol.axis_offset / Ra);
  const double guard = 2e-3 * Ra;
  const int arc_pieces = std::max(16, static_cast<int>(std::ceil(2.0 * pi * Ra)));
  const int line_pieces = std::max(8, static_cast<int>(std::ceil(2.0 * Ra)));
  const double half = Ra * std::cos(eps);
  const double total = arc_phase(f, 0.0, Ra, pi + eps, 2.0 * pi - eps, arc_pieces, guard) +
                       phase_increment(f, cplx(half, top), cplx(-half, top), line_pieces, guard);
  const double w = total / (2.0 * pi);
  const long wi = std::lround(w);
  if (std::fabs(w - wi) > 0.25 || wi < 0) throw NumericalError(tag + ": half-disk winding " + std::to_string(w));
  return static_cast<int>(wi);
}

bool channel_empty(int ell, const RadialStepPotential& pot, double R, const SolverTolerances& tol) {
  try {
    return half_disk_winding(ell, pot, R, tol) == 0;
  } catch (const BoundaryConflict&) {
    return false;
  }
}

std::vector<Resonance> channel_resonances(int ell, const RadialStepPotential& pot, double R,
                                          const SolverTolerances& tol) {
  if (ell < 0) throw DomainError("channel index must be >= 0");
  check_radius(R);
  pot.validate();
  if (pot.is_free()) return {};
  std::string last;
  for (int k = 0; k <= tol.max_grid_shifts; ++k) {
    try {
      return solve_channel_once(ell, pot, R, tol, k);
    } catch (const BoundaryConflict& e) {
      last = e.what();
    }
  }
  throw BoundaryConflict(channel_tag(ell, pot) + ": boundary conflicts persist after " +
                         std::to_string(tol.max_grid_shifts) + " grid shifts; last: " + last);
}

int ell_cutoff(const RadialStepPotential& pot, double R, const SolverTolerances& tol, Execution exec) {
  check_radius(R);
  pot.validate();
  if (pot.is_free()) return 0;
  const double a = pot.a;
  int L = static_cast<int>(std::ceil(1.5 * R * a + 2.0 * std::sqrt(std::abs(pot.v0)) * a)) + 10;
  const int L_start = L;
  for (;;) {
    bool empty[3];
    for_each_index(3, exec, [&](std::size_t i) { empty[i] = channel_empty(L + 1 + static_cast<int>(i), pot, R, tol); });
    if (empty[0] && empty[1] && empty[2]) break;
    if (++L > L_start + 50) {
      throw NumericalError("ell_cutoff: channels above l = " + std::to_string(L_start) +
                           " do not empty within +50 (a=" + format_double(a) + ", v0=" + show(pot.v0) + ")");
    }
  }
  while (L > 0 && channel_empty(L, pot, R, tol)) --L;
  return L;
}

ResonanceSet find_resonances(const RadialStepPotential& pot, double R, const SolverTolerances& tol, Execution exec) {
  check_radius(R);
  pot.validate();
  ResonanceSet set;
  set.potential = pot;
  set.search_radius = R;
  set.tolerances = tol;
  if (pot.is_free()) return set;
  set.ell_max = ell_cutoff(pot, R, tol, exec);
  std::vector<std::vector<Resonance>> per_channel(static_cast<std::size_t>(set.ell_max) + 1);
  for_each_index(per_channel.size(), exec, [&](std::size_t ell) {
    const int l = static_cast<int>(ell);
    per_channel[ell] = with_context(channel_tag(l, pot), [&] { return channel_resonances(l, pot, R, tol); });
  });
  for (auto& c : per_channel) set.resonances.insert(set.resonances.end(), c.begin(), c.end());
  std::sort(set.resonances.begin(), set.resonances.end(), resonance_less);
  return set;
}

// ---------------------------------------------------------------------------

std::string ResonanceSet::to_csv() const {
  std::string s = "ell,re_lambda,im_lambda,multiplicity,residual\n";
  for (const Resonance& r : resonances) {
    s += std::to_string(r.ell) + "," + format_double(r.lambda.real()) + "," + format_double(r.lambda.imag()) + "," +
         std::to_string(r.multiplicity) + "," + format_double(r.residual) + "\n";
  }
  return s;
}

nlohmann::json ResonanceSet::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const Resonance& r : resonances) {
    rows.push_back({{"ell", r.ell},
                    {"re_lambda", r.lambda.real()},
                    {"im_lambda", r.lambda.imag()},
                    {"multiplicity", r.multiplicity},
                    {"residual", r.residual}});
  }
  return {{"potential", {{"a", potential.a}, {"v0_re", potential.v0.real()}, {"v0_im", potential.v0.imag()}}},
          {"R", search_radius},
          {"ell_max", ell_max},
          {"tolerances",
           {{"location_tol", tolerances.location_tol},
            {"residual_tol", tolerances.residual_tol},
            {"axis_offset", tolerances.axis_offset},
            {"max_grid_shifts", tolerances.max_grid_shifts}}},
          {"resonances", rows}};
}

ResonanceSet ResonanceSet::from_json(const nlohmann::json& j) {
  ResonanceSet s;
  const auto& p = j.at("potential");
  s.potential.a = p.at("a").get<double>();
  s.potential.v0 = cplx(p.at("v0_re").get<double>(), p.at("v0_im").get<double>());
  s.potential.validate();
  s.search_radius = j.at("R").get<double>();
  check_radius(s.search_radius);
  s.ell_max = j.at("ell_max").get<int>();
  const auto& t = j.at("tolerances");
  s.tolerances.location_tol = t.at("location_tol").get<double>();
  s.tolerances.residual_tol = t.at("residual_tol").get<double>();
  s.tolerances.axis_offset = t.at("axis_offset").get<double>();
  s.tolerances.max_grid_shifts = t.at("max_grid_shifts").get<int>();
  for (const auto& r : j.at("resonances")) {
    Resonance res;
    res.ell = r.at("ell").get<int>();
    res.lambda = cplx(r.at("re_lambda").get<double>(), r.at("im_lambda").get<double>());
    res.multiplicity = r.at("multiplicity").get<int>();
    res.residual = r.at("residual").get<double>();
    if (!(res.lambda.imag() < 0.0)) throw DomainError("resonance with Im lambda >= 0 in input");
    s.resonances.push_back(res);
  }
  return s;
}

} // namespace resonance_atlas
