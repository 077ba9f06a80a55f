#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "resonance_atlas/errors.hpp"
#include "resonance_atlas/special_functions.hpp"

#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace resonance_atlas;
using std::numbers::pi;

namespace {

struct BesselFixture {
  int ell;
  cplx z, j, jd, h, hd;
};

const BesselFixture kFixtures[] = {
#include "fixtures/bessel_fixtures.inc"
};

double rel_err(cplx got, cplx want) { return std::abs(got - want) / std::abs(want); }

} // namespace

TEST_CASE("rho at simple points") {
  CHECK(std::abs(rho(cplx(1.0, 0.0))) < 1e-15);
  const double expected = std::log(2.0 + std::sqrt(3.0)) - std::sqrt(3.0) / 2.0;
  CHECK(std::abs(rho(cplx(0.5, 0.0)) - expected) < 1e-15);
  CHECK(std::abs(rho(cplx(0.5, 0.0)).real() - 0.450932) < 1e-6);
}

TEST_CASE("rho domain errors") {
  CHECK_THROWS_AS(rho(cplx(0.0, 0.0)), DomainError);
  CHECK_THROWS_AS(rho(cplx(-2.0, 0.0)), DomainError);
  CHECK_THROWS_AS(rho(cplx(0.3, -1e-3)), DomainError);
}

TEST_CASE("rho on the real axis beyond 1 is the limit from above") {
  for (double x : {1.5, 3.0, 40.0}) {
    const cplx on_axis = rho(cplx(x, 0.0));
    const cplx above = rho(cplx(x, 1e-10));
    CHECK(std::abs(on_axis - above) < 1e-8);
  }
}

TEST_CASE("rho is continuous along arcs") {
  for (double radius : {0.3, 0.9, 1.0, 1.7, 25.0}) {
    const int n = 1000;
    const double delta = 1e-3;
    const double step = (pi - 2 * delta) / (n - 1);
    cplx prev = rho(std::polar(radius, delta));
    double worst = 0.0;
    for (int i = 1; i < n; ++i) {
      const cplx cur = rho(std::polar(radius, delta + i * step));
      worst = std::max(worst, std::abs(cur - prev) / (radius * step));
      prev = cur;
    }
    // |rho'(z)| = |w| / |z|, bounded by about max(1, 1/|z|) on the arc.
    CHECK(worst < 2.0 * std::max(1.0, 1.0 / radius) + 1.0);
  }
}

TEST_CASE("s0 solves coth s = s") {
  const double s = s0();
  CHECK(std::abs(1.0 / std::tanh(s) - s) < 1e-12);
  CHECK(s == doctest::Approx(1.19968).epsilon(1e-5));
  CHECK(std::abs(z0_point(s, CurveBranch::plus).real()) < 1e-10);
}

TEST_CASE("z0_point limits and reflection") {
  CHECK(std::abs(z0_point(1e-4, CurveBranch::plus) - cplx(1.0, 0.0)) < 1e-3);
  const cplx top = z0_point(s0(), CurveBranch::plus);
  CHECK(top.imag() == doctest::Approx(std::sqrt(s0() * s0() - 1.0)).epsilon(1e-12));
  CHECK(top.imag() == doctest::Approx(0.662742).epsilon(1e-6));
  for (double s : {0.01, 0.3, 0.8, 1.1}) {
    const cplx p = z0_point(s, CurveBranch::plus);
    const cplx m = z0_point(s, CurveBranch::minus);
    CHECK(p.real() == -m.real());
    CHECK(p.imag() == m.imag());
  }
  CHECK_THROWS_AS(z0_point(0.0, CurveBranch::plus), DomainError);
  CHECK_THROWS_AS(z0_point(1.3, CurveBranch::plus), DomainError);
}

TEST_CASE("Re rho vanishes on the z0 curve") {
  for (int i = 1; i < 40; ++i) {
    const double s = s0() * i / 40.0;
    CHECK(std::abs(rho(z0_point(s, CurveBranch::plus)).real()) < 1e-12);
    CHECK(std::abs(rho(z0_point(s, CurveBranch::minus)).real()) < 1e-12);
  }
}

TEST_CASE("z0_modulus values and symmetry") {
  CHECK(z0_modulus(pi / 2) == doctest::Approx(std::sqrt(s0() * s0() - 1.0)).epsilon(1e-14));
  CHECK(std::abs(z0_modulus(1e-3) - 1.0) < 1e-2);
  for (double th : {0.01, 0.2, 0.7, 1.2, 1.5}) {
    CHECK(std::abs(z0_modulus(th) - z0_modulus(pi - th)) < 1e-14);
    CHECK(std::arg(z0_curve_point(th)) == doctest::Approx(th).epsilon(1e-12));
  }
  CHECK_THROWS_AS(z0_modulus(0.0), DomainError);
  CHECK_THROWS_AS(z0_modulus(pi), DomainError);
}

TEST_CASE("curve table invariants") {
  const CurveConstants& c = curve_constants();
  CHECK(std::abs(1.0 / std::tanh(c.s0) - c.s0) < 1e-12);
  const double lo = std::sqrt(c.s0 * c.s0 - 1.0);
  for (std::size_t i = 0; i < c.thetas.size(); ++i) {
    CHECK(c.moduli[i] > lo - 1e-12);
    CHECK(c.moduli[i] < 1.0 + 1e-12);
    if (i > 0) CHECK(c.thetas[i] > c.thetas[i - 1]);
  }
  const std::size_t n = c.thetas.size();
  for (std::size_t i = 0; i < n / 2; i += 97) {
    CHECK(std::abs(c.thetas[i] + c.thetas[n - 1 - i] - pi) < 1e-14);
    CHECK(std::abs(c.moduli[i] - c.moduli[n - 1 - i]) < 1e-14);
  }
  for (double th : {0.05, 0.9, 2.0}) {
    CHECK(std::abs(c.sample_modulus(th) - z0_modulus(th)) < 1e-5);
  }
}

TEST_CASE("sign of Re rho across the curve") {
  for (int i = 1; i < 30; ++i) {
    const double th = pi * i / 30.0;
    const double m = z0_modulus(th);
    for (double f : {0.2, 0.9, 0.999}) CHECK(RayPoint::at(f * m, th).rho_value.real() > 0.0);
    for (double f : {1.001, 1.2, 10.0}) CHECK(RayPoint::at(f * m, th).rho_value.real() < 0.0);
  }
}

TEST_CASE("closed forms of low-order functions") {
  CHECK(sph_bessel_j(0, 1.0).real() == doctest::Approx(std::sin(1.0)).epsilon(1e-15));
  CHECK(std::abs(sph_hankel1(0, cplx(0.0, 1.0)) - cplx(-std::exp(-1.0), 0.0)) < 1e-15);
  const cplx z(2.3, -0.7);
  const cplx i(0.0, 1.0);
  CHECK(rel_err(sph_bessel_j(1, z), std::sin(z) / (z * z) - std::cos(z) / z) < 1e-14);
  CHECK(rel_err(sph_hankel1(1, z), -std::exp(i * z) * (z + i) / (z * z)) < 1e-14);
  CHECK(rel_err(sph_hankel2(0, z), i * std::exp(-i * z) / z) < 1e-14);
  CHECK(sph_bessel_j(0, 0.0) == cplx(1.0, 0.0));
  CHECK(sph_bessel_j(3, 0.0) == cplx(0.0, 0.0));
}

TEST_CASE("frozen high-precision values") {
  for (const auto& f : kFixtures) {
    CAPTURE(f.ell);
    CAPTURE(f.z);
    CHECK(rel_err(sph_bessel_j(f.ell, f.z), f.j) < 1e-10);
    CHECK(rel_err(sph_bessel_j_deriv(f.ell, f.z), f.jd) < 1e-10);
    CHECK(rel_err(sph_hankel1(f.ell, f.z), f.h) < 1e-10);
    CHECK(rel_err(sph_hankel1_deriv(f.ell, f.z), f.hd) < 1e-10);
  }
}

TEST_CASE("real axis against Boost") {
  for (int ell : {0, 1, 4, 17, 60, 150}) {
    for (double x : {0.3, 2.0, 9.5, 77.0, 640.0}) {
      if (ell > 40 * x) continue; // y_ell overflows double
      const double j = boost::math::sph_bessel(ell, x);
      const double y = boost::math::sph_neumann(ell, x);
      if (std::abs(j) < 1e-280 || std::abs(y) > 1e280) continue;
      CAPTURE(ell);
      CAPTURE(x);
      CHECK(rel_err(sph_bessel_j(ell, x), j) < 1e-10);
      CHECK(rel_err(sph_hankel1(ell, x), cplx(j, y)) < 1e-10);
    }
  }
}

TEST_CASE("Wronskian identity") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> re(-30.0, 30.0), im(-8.0, 8.0);
  std::uniform_int_distribution<int> order(0, 50);
  for (int k = 0; k < 300; ++k) {
    const cplx z(re(gen), im(gen));
    const int ell = order(gen);
    cplx w;
    try {
      w = sph_bessel_j(ell, z) * sph_hankel1_deriv(ell, z) - sph_bessel_j_deriv(ell, z) * sph_hankel1(ell, z);
    } catch (const OverflowError&) {
      continue;
    }
    const cplx want = cplx(0.0, 1.0) / (z * z);
    CAPTURE(ell);
    CAPTURE(z);
    CHECK(rel_err(w, want) < 1e-8);
  }
}

TEST_CASE("parity of j") {
  for (int ell = 0; ell <= 30; ell += 3) {
    for (cplx z : {cplx(0.4, 0.1), cplx(5.0, -2.0), cplx(-13.0, 4.0)}) {
      const double sign = (ell % 2 == 0) ? 1.0 : -1.0;
      CHECK(rel_err(sph_bessel_j(ell, -z), sign * sph_bessel_j(ell, z)) < 1e-13);
    }
  }
}

TEST_CASE("order and pole errors") {
  CHECK_THROWS_AS(sph_bessel_j(-1, 1.0), DomainError);
  CHECK_THROWS_AS(sph_hankel1(-2, 1.0), DomainError);
  CHECK_THROWS_AS(sph_hankel1(0, 0.0), DomainError);
}

TEST_CASE("overflow is reported") {
  CHECK_THROWS_AS(sph_hankel1(0, cplx(1.0, -800.0)), OverflowError);
  CHECK_THROWS_AS(sph_hankel1(200, cplx(1e-3, 0.0)), OverflowError);
  CHECK_THROWS_AS(sph_bessel_j(0, cplx(0.0, 800.0)), OverflowError);
}

TEST_CASE("reduced sequences are consistent with the public functions") {
  const cplx_ld z(3.5L, -1.25L);
  std::vector<cplx_ld> jt(12), ht(12);
  reduced_bessel_j(z * z, jt);
  reduced_hankel(z, HankelKind::first, ht);
  for (int n = 0; n < 12; ++n) {
    const cplx zd(3.5, -1.25);
    const cplx j_direct = sph_bessel_j(n, zd);
    const cplx h_direct = sph_hankel1(n, zd);
    const cplx_ld zn = std::pow(z, n);
    const cplx j_from(static_cast<double>((jt[n] * zn).real()), static_cast<double>((jt[n] * zn).imag()));
    const cplx_ld hh = ht[n] / (zn * z);
    CHECK(rel_err(j_from, j_direct) < 1e-14);
    CHECK(rel_err(cplx(static_cast<double>(hh.real()), static_cast<double>(hh.imag())), h_direct) < 1e-14);
  }
}

TEST_CASE("gamma_real") {
  CHECK(gamma_real(1.0) == 1.0);
  CHECK(gamma_real(4.0) == 6.0);
  CHECK(gamma_real(2.5) == doctest::Approx(3.0 * std::sqrt(pi) / 4.0).epsilon(1e-15));
  CHECK(gamma_real(0.5) == doctest::Approx(std::sqrt(pi)).epsilon(1e-15));
  CHECK(gamma_real(10.5) == doctest::Approx(std::tgamma(10.5)).epsilon(1e-13));
  CHECK_THROWS_AS(gamma_real(0.0), DomainError);
  CHECK_THROWS_AS(gamma_real(-1.5), DomainError);
}
