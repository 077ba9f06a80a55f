#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "resonance_atlas/errors.hpp"
#include "resonance_atlas/density.hpp"
#include "resonance_atlas/radial_resonances.hpp"
#include "resonance_atlas/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace resonance_atlas;
using std::numbers::pi;

namespace {

const RadialStepPotential kWell{1.0, {-20.0, 0.0}};

cplx wronskian_direct(int ell, const RadialStepPotential& p, cplx lambda, double sign = 1.0) {
  const cplx k = sign * std::sqrt(lambda * lambda - p.v0);
  return k * sph_bessel_j_deriv(ell, k * p.a) * sph_hankel1(ell, lambda * p.a) -
         lambda * sph_bessel_j(ell, k * p.a) * sph_hankel1_deriv(ell, lambda * p.a);
}

bool has_match(const std::vector<Resonance>& set, int ell, cplx lambda, double tol) {
  return std::any_of(set.begin(), set.end(), [&](const Resonance& r) {
    return r.ell == ell && std::abs(r.lambda - lambda) <= tol * std::max(1.0, std::abs(lambda));
  });
}

// Independent l = 0 oracle: g(lambda) = k cos k - i lambda sin k, k^2 = lambda^2 - v0,
// solved by real two-variable Newton from every node of a 50 x 50 grid.
std::vector<cplx> s_wave_oracle(double v0, double R) {
  const auto g = [v0](cplx l) {
    const cplx k = std::sqrt(l * l - v0);
    return k * std::cos(k) - cplx(0, 1) * l * std::sin(k);
  };
  std::vector<cplx> found;
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 50; ++j) {
      double x = -R + 2 * R * (i + 0.5) / 50;
      double y = -R * (j + 0.5) / 50;
      bool ok = false;
      for (int it = 0; it < 60; ++it) {
        const cplx f = g({x, y});
        const double h = 1e-7;
        const cplx fx = (g({x + h, y}) - g({x - h, y})) / (2 * h);
        const cplx fy = (g({x, y + h}) - g({x, y - h})) / (2 * h);
        const double det = fx.real() * fy.imag() - fy.real() * fx.imag();
        if (det == 0.0) break;
        const double dx = (f.real() * fy.imag() - fy.real() * f.imag()) / det;
        const double dy = (fx.real() * f.imag() - f.real() * fx.imag()) / det;
        x -= dx;
        y -= dy;
        if (std::hypot(dx, dy) < 1e-14 * std::max(1.0, std::hypot(x, y))) {
          ok = true;
          break;
        }
      }
      const cplx z(x, y);
      if (!ok || std::abs(z) > R || !(y < -1e-6)) continue;
      if (std::none_of(found.begin(), found.end(), [&](cplx w) { return std::abs(w - z) < 1e-7; })) found.push_back(z);
    }
  }
  return found;
}

} // namespace

TEST_CASE("free channel condition is the Wronskian") {
  const RadialStepPotential free{1.3, {0.0, 0.0}};
  for (int ell : {0, 1, 4, 12}) {
    for (cplx lam : {cplx(2.0, -5.0), cplx(-0.7, 0.3), cplx(9.0, -1.0)}) {
      // k = lambda needs the negated branch when Re lambda < 0
      const KBranch b = lam.real() < 0.0 ? KBranch::negated : KBranch::principal;
      const cplx w = channel_condition(ell, free, lam, b);
      const cplx want = -cplx(0, 1) / (lam * free.a * free.a);
      CHECK(std::abs(w - want) < 1e-12 * std::abs(want));
    }
    const ChannelValue v = channel_function(ell, free, {3.0, -7.0});
    CHECK(std::abs(v.value - cplx_ld(0, -1)) < 1e-14L);
  }
}

TEST_CASE("channel condition matches the direct formula") {
  const RadialStepPotential p{1.2, {-15.0, 2.0}};
  for (int ell : {0, 1, 3, 8}) {
    for (cplx lam : {cplx(3.3, -0.7), cplx(-1.1, -2.5), cplx(0.4, 1.5), cplx(6.0, -0.2)}) {
      const cplx want = wronskian_direct(ell, p, lam);
      CHECK(std::abs(channel_condition(ell, p, lam) - want) < 1e-10 * std::abs(want));
    }
  }
}

TEST_CASE("k branch flip multiplies W by (-1)^l") {
  const RadialStepPotential p{0.9, {-8.0, -1.0}};
  const cplx lam(2.2, -0.9);
  for (int ell = 0; ell < 6; ++ell) {
    const cplx w = channel_condition(ell, p, lam, KBranch::principal);
    const cplx wn = channel_condition(ell, p, lam, KBranch::negated);
    const double sign = ell % 2 == 0 ? 1.0 : -1.0;
    CHECK(std::abs(wn - sign * w) < 1e-12 * std::abs(w));
    CHECK(std::abs(wn - wronskian_direct(ell, p, lam, -1.0)) < 1e-10 * std::abs(wn));
  }
}

TEST_CASE("channel derivative matches a difference quotient") {
  for (int ell : {0, 1, 2, 7}) {
    const cplx lam(3.3, -0.7);
    const ChannelValue v = channel_function(ell, kWell, lam, true);
    const double h = 1e-6;
    const cplx_ld fd = (channel_function(ell, kWell, lam + h).value - channel_function(ell, kWell, lam - h).value) /
                       static_cast<long double>(2 * h);
    CHECK(std::abs(v.derivative - fd) < 1e-7L * std::abs(v.derivative));
  }
}

TEST_CASE("deep lower half plane stays finite") {
  const ChannelValue v = channel_function(30, kWell, {25.0, -39.0});
  CHECK(std::isfinite(static_cast<double>(std::abs(v.value))));
  CHECK(v.scale > 0.0L);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(channel_condition(0, kWell, 0.0), DomainError);
  CHECK_THROWS_AS(channel_condition(-1, kWell, 1.0), DomainError);
  CHECK_THROWS_AS(find_resonances({0.0, {-1.0, 0.0}}, 5.0), DomainError);
  CHECK_THROWS_AS(find_resonances(kWell, -1.0), DomainError);
  CHECK_THROWS_AS(ell_cutoff(kWell, 0.0), DomainError);
}

TEST_CASE("s-wave resonances against grid Newton oracle") {
  const auto oracle = s_wave_oracle(-20.0, 6.0);
  const auto got = channel_resonances(0, kWell, 6.0);
  REQUIRE(!oracle.empty());
  CHECK(got.size() == oracle.size());
  for (cplx z : oracle) CHECK(has_match(got, 0, z, 1e-8));
  for (const Resonance& r : got) {
    CHECK(r.multiplicity == 1);
    CHECK(r.residual < 1e-8);
  }
}

TEST_CASE("free potential has no resonances") {
  const RadialStepPotential free{1.0, {0.0, 0.0}};
  for (double R : {1.0, 10.0, 40.0}) {
    const ResonanceSet s = find_resonances(free, R);
    CHECK(s.resonances.empty());
    CHECK(s.ell_max == 0);
  }
  CHECK(ell_cutoff(free, 10.0) == 0);
  for (int ell : {0, 3, 10}) CHECK(half_disk_winding(ell, free, 30.0) == 0);
}

TEST_CASE("well at R = 10: invariants, symmetry and frozen cutoff") {
  const ResonanceSet s = find_resonances(kWell, 10.0);
  CHECK(s.ell_max == 12);
  REQUIRE(!s.resonances.empty());
  long total = 0;
  for (std::size_t k = 0; k < s.resonances.size(); ++k) {
    const Resonance& r = s.resonances[k];
    CHECK(r.lambda.imag() < 0.0);
    CHECK(std::abs(r.lambda) <= 10.0);
    CHECK(r.residual < s.tolerances.residual_tol);
    CHECK(r.multiplicity % (2 * r.ell + 1) == 0);
    CHECK(has_match(s.resonances, r.ell, -std::conj(r.lambda), 1e-8));
    if (k > 0) CHECK(std::abs(s.resonances[k - 1].lambda) <= std::abs(r.lambda));
    total += r.multiplicity;
  }
  CHECK(total == 1239);
  for (int ell = s.ell_max + 1; ell <= s.ell_max + 3; ++ell) CHECK(channel_empty(ell, kWell, 10.0));
}

TEST_CASE("cutoff is nondecreasing in R") {
  int prev = 0;
  for (double R : {2.0, 4.0, 6.0, 8.0}) {
    const int L = ell_cutoff(kWell, R);
    CHECK(L >= prev);
    prev = L;
  }
}

TEST_CASE("randomized dilation covariance and reflection symmetry") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ua(0.6, 1.6), uv(-30.0, -3.0), ui(-5.0, 5.0);
  for (int trial = 0; trial < 3; ++trial) {
    const RadialStepPotential p{ua(rng), {uv(rng), ui(rng)}};
    const double R = 5.0 / p.a;
    const double c = 2.0;
    const ResonanceSet base = find_resonances(p, R);
    const ResonanceSet scaled = find_resonances({c * p.a, p.v0 / (c * c)}, R / c);
    REQUIRE(base.resonances.size() == scaled.resonances.size());
    for (const Resonance& r : base.resonances) CHECK(has_match(scaled.resonances, r.ell, r.lambda / c, 1e-8));

    const RadialStepPotential real_pot{p.a, {p.v0.real(), 0.0}};
    const ResonanceSet rs = find_resonances(real_pot, R);
    for (const Resonance& r : rs.resonances) CHECK(has_match(rs.resonances, r.ell, -std::conj(r.lambda), 1e-8));
  }
}

TEST_CASE("bound states stay out of the set") {
  const RadialStepPotential deep{1.0, {-60.0, 0.0}};
  // lambda = i kappa: k cos k + kappa sin k = 0 with k = sqrt(60 - kappa^2)
  const auto g = [](double kappa) {
    const double k = std::sqrt(60.0 - kappa * kappa);
    return k * std::cos(k) + kappa * std::sin(k);
  };
  double lo = 0.05, hi = 0.05;
  while (hi < 7.7 && g(lo) * g(hi) > 0.0) {
    lo = hi;
    hi += 0.05;
  }
  REQUIRE(g(lo) * g(hi) <= 0.0);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(lo) * g(mid) <= 0.0 ? hi : lo) = mid;
  }
  const cplx bound(0.0, 0.5 * (lo + hi));
  CHECK(std::abs(channel_condition(0, deep, bound)) < 1e-9);
  for (const Resonance& r : channel_resonances(0, deep, 8.0)) {
    CHECK(r.lambda.imag() < 0.0);
    CHECK(std::abs(r.lambda - bound) > 1e-3);
  }
}

TEST_CASE("scattering determinant") {
  const RadialStepPotential free{1.0, {0.0, 0.0}};
  CHECK(scattering_log_det(free, {3.0, 2.0}, 50) == 0.0);
  CHECK_THROWS_AS(scattering_log_det(kWell, {1.0, -1.0}, 10), DomainError);
  for (const RadialStepPotential& p : {kWell, RadialStepPotential{1.0, {-12.0, 3.0}}}) {
    for (double x : {0.37, 2.9, 11.0}) {
      CHECK(std::fabs(scattering_log_det(p, x, 300) + scattering_log_det(p, -x, 300)) < 1e-8);
    }
  }
  const cplx lam = std::polar(20.0, pi / 2);
  const double lhs = scattering_log_det(kWell, lam, 1000) / 8000.0;
  CHECK(std::isfinite(lhs));
  CHECK(lhs <= h3_closed_form(pi / 2) + 0.05);
}

TEST_CASE("S-matrix pole is reported") {
  const auto res = channel_resonances(0, kWell, 6.0);
  REQUIRE(!res.empty());
  CHECK_THROWS_AS(scattering_matrix_element(0, kWell, res.front().lambda), NumericalError);
  const cplx s = scattering_matrix_element(2, kWell, 1.7);
  CHECK(std::fabs(std::abs(s) - 1.0) < 1e-12);
}

TEST_CASE("serialization round trip") {
  const ResonanceSet s = find_resonances(kWell, 5.0);
  const ResonanceSet back = ResonanceSet::from_json(nlohmann::json::parse(s.to_json().dump()));
  CHECK(back.to_csv() == s.to_csv());
  CHECK(back.ell_max == s.ell_max);
  CHECK(back.search_radius == s.search_radius);
  CHECK(back.potential.v0 == s.potential.v0);
  CHECK(s.to_csv().rfind("ell,re_lambda,im_lambda,multiplicity,residual\n", 0) == 0);
  nlohmann::json bad = s.to_json();
  bad["resonances"][0]["im_lambda"] = 0.5;
  CHECK_THROWS_AS(ResonanceSet::from_json(bad), DomainError);
}

TEST_CASE("parallel solve equals serial reference") {
  set_thread_count(3);
  const ResonanceSet a = find_resonances(kWell, 8.0, {}, Execution::serial);
  const ResonanceSet b = find_resonances(kWell, 8.0, {}, Execution::parallel);
  CHECK(a.ell_max == b.ell_max);
  CHECK(a.to_csv() == b.to_csv());
}
