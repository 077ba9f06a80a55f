#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "resonance_atlas/density.hpp"
#include "resonance_atlas/errors.hpp"
#include "resonance_atlas/parallel.hpp"

#include <cmath>
#include <numbers>

using namespace resonance_atlas;
using std::numbers::pi;

TEST_CASE("h_3 matches the closed form") {
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double t = 0.05 + (pi - 0.1) * i / 49.0;
    worst = std::max(worst, std::fabs(h_d(3, t) - h3_closed_form(t)));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("h_d symmetric about pi/2 and vanishing at the ends") {
  for (int d : {3, 5}) {
    for (double t : {0.2, 0.7, 1.3}) CHECK(std::fabs(h_d(d, t) - h_d(d, pi - t)) < 1e-10);
    CHECK(h_d(d, 0.0) == 0.0);
    CHECK(h_d(d, pi) == 0.0);
    CHECK(std::fabs(h_d_prime(d, pi / 2)) < 1e-8);
    CHECK(h_d(d, pi / 2) > 0.0);
  }
}

TEST_CASE("h_d' agrees with a difference quotient") {
  const double t = 0.9;
  const double e = 1e-4;
  const double fd = (h_d(3, t + e) - h_d(3, t - e)) / (2 * e);
  CHECK(std::fabs(fd - h_d_prime(3, t)) < 1e-6);
}

TEST_CASE("h_d'(0+) limit") {
  CHECK(std::fabs(h_d_prime(3, 1e-3) - 4.0 / 3.0) < 1e-2);
  CHECK(std::fabs(hd_prime_at_zero(3) - 4.0 / 3.0) < 1e-14);
  for (int d : {3, 5, 7}) {
    CHECK(std::fabs(hd_prime_at_zero_integral(d).value - hd_prime_at_zero(d)) < 1e-8);
  }
}

TEST_CASE("c_d line and area integrals agree") {
  const double line = c_d(3);
  CHECK(line > 0.0);
  CHECK(std::fabs(line - c_d_planar(3).value) < 1e-5);
  CHECK(std::fabs(line - 1.8898062257) < 1e-8);
  CHECK(c_d(5) > 0.0);
}

TEST_CASE("sector coefficients telescope") {
  const double t = 1.1;
  const double near = near_axis_coeff(3, t);
  const double far = far_axis_coeff(3, t);
  CHECK(std::fabs(near + far - c_d(3)) < 1e-8);
  const double mid = s_tilde(3, 0.4, t) / (2 * pi * 3);
  CHECK(std::fabs(near_axis_coeff(3, 0.4) + mid - near) < 1e-8);
  CHECK(near > 0.0);
  CHECK(far > 0.0);
}

TEST_CASE("odd dimension required") {
  CHECK_THROWS_AS(h_d(4, 1.0), DomainError);
  CHECK_THROWS_AS(c_d(2), DomainError);
  CHECK_THROWS_AS(build_density_table(6, 11), DomainError);
  CHECK_THROWS_AS(build_density_table(3, 2), DomainError);
}

TEST_CASE("density table invariants and serialization") {
  const DensityTable t = build_density_table(3, 37);
  CHECK(t.invariant_violations(1e-8).empty());
  CHECK(t.thetas.size() == 37);
  const std::string csv = t.to_csv();
  CHECK(csv.rfind("theta,h,h_prime\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 38);
  const DensityTable back = DensityTable::from_json(t.to_json());
  CHECK(back.h == t.h);
  CHECK(back.h_prime == t.h_prime);
  CHECK(back.c_d == t.c_d);
  CHECK(back.to_csv() == csv);
}

TEST_CASE("density table: parallel path equals serial reference") {
  set_thread_count(3);
  const DensityTable s = build_density_table(5, 25, {}, Execution::serial);
  const DensityTable p = build_density_table(5, 25, {}, Execution::parallel);
  CHECK(s.h == p.h);
  CHECK(s.h_prime == p.h_prime);
  CHECK(s.to_csv() == p.to_csv());
}

TEST_CASE("broken invariants are reported") {
  DensityTable t = build_density_table(3, 11);
  t.h.front() = 1e-3;
  CHECK_FALSE(t.invariant_violations(1e-8).empty());
}
