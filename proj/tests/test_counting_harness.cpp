#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "resonance_atlas/counting_harness.hpp"
#include "resonance_atlas/density.hpp"
#include "resonance_atlas/errors.hpp"

#include <cmath>
#include <numbers>

using namespace resonance_atlas;
using std::numbers::pi;

namespace {

ResonanceSet handcrafted(std::vector<Resonance> rs, double R = 5.0) {
  ResonanceSet s;
  s.potential = {1.0, {-1.0, 0.0}};
  s.search_radius = R;
  s.resonances = std::move(rs);
  return s;
}

} // namespace

TEST_CASE("count_norm on handcrafted sets") {
  const ResonanceSet empty = handcrafted({});
  CHECK(count_norm(empty, 3.0) == 0);
  const ResonanceSet s = handcrafted({{{-0.5, -1.0}, 0, 1, 0.0}, {{2.0, -1.0}, 1, 3, 0.0}});
  CHECK(count_norm(s, 2.0) == 1);
  CHECK(count_norm(s, 2.3) == 4);
  CHECK_THROWS_AS(count_norm(s, 5.5), DomainError);
  CHECK_THROWS_AS(count_norm(s, 0.0), DomainError);
  long prev = 0;
  for (double r = 0.1; r <= 5.0; r += 0.1) {
    const long n = count_norm(s, r);
    CHECK(n >= prev);
    prev = n;
  }
}

TEST_CASE("count_sector inclusivity and partition") {
  const double phi = 1.25 * pi;
  const ResonanceSet s = handcrafted({{std::polar(1.0, phi), 0, 1, 0.0},
                                      {std::polar(2.0, 1.6 * pi), 1, 3, 0.0},
                                      {std::polar(3.0, 1.1 * pi), 2, 5, 0.0}});
  CHECK(count_sector(s, {4.0, phi, 1.4 * pi}) == 1);
  CHECK(count_sector(s, {4.0, 1.1 * pi, phi}) == 6);
  CHECK(count_sector(s, SectorQuery::full(4.0)) == count_norm(s, 4.0));
  CHECK(count_sector(s, {4.0, pi, 1.5 * pi}) + count_sector(s, {4.0, std::nextafter(1.5 * pi, 7.0), 2 * pi}) ==
        count_norm(s, 4.0));
  CHECK_THROWS_AS(count_sector(s, {4.0, 0.5 * pi, pi}), DomainError);
  CHECK_THROWS_AS(count_sector(s, {4.0, 1.5 * pi, 1.2 * pi}), DomainError);
}

TEST_CASE("integrated count") {
  CHECK(integrated_count(handcrafted({}), 2.0) == 0.0);
  const double r = 4.0;
  const ResonanceSet one = handcrafted({{cplx(0.0, -r / std::exp(1.0)), 0, 1, 0.0}});
  CHECK(std::fabs(integrated_count(one, r) - 1.0) < 1e-15);

  const ResonanceSet s = handcrafted({{{0.3, -0.2}, 0, 1, 0.0}, {{-1.1, -0.9}, 1, 3, 0.0}, {{2.0, -2.5}, 2, 5, 0.0}});
  const int n = 200000;
  double trap = 0.0;
  const double lo = 1e-6;
  for (int k = 0; k < n; ++k) {
    const double t0 = lo + (r - lo) * k / n;
    const double t1 = lo + (r - lo) * (k + 1) / n;
    trap += 0.5 * (count_norm(s, t0) / t0 + count_norm(s, t1) / t1) * (t1 - t0);
  }
  CHECK(std::fabs(trap - integrated_count(s, r)) < 1e-3);
}

TEST_CASE("origin resonance aborts counting") {
  ResonanceSet s = handcrafted({{cplx(0.0, -1e-9), 0, 1, 0.0}});
  CHECK_THROWS_AS(count_norm(s, 1.0), NumericalError);
}

TEST_CASE("predictions") {
  CHECK(std::fabs(predict_total(3, 1.0, 10.0) - c_d(3) * 1000.0) < 1e-9);
  CHECK(std::fabs(predict_total(3, 2.0, 5.0) - predict_total(3, 1.0, 10.0)) < 1e-9);
  const double full = predict_sector(3, 1.0, SectorQuery::full(10.0));
  CHECK(std::fabs(full - predict_total(3, 1.0, 10.0)) < 1e-9);
  for (double t : {0.3, 1.2, 2.5}) {
    const double a = predict_sector(3, 1.0, {10.0, pi, pi + t});
    const double b = predict_sector(3, 1.0, {10.0, pi + t, 2 * pi});
    CHECK(std::fabs((a + b) / full - 1.0) < 1e-8);
    CHECK(a > 0.0);
    CHECK(b > 0.0);
  }
  const double interior = predict_sector(3, 1.0, {10.0, pi + 0.4, pi + 1.9});
  CHECK(std::fabs(interior - s_tilde(3, 0.4, 1.9) / (6 * pi) * 1000.0) < 1e-9);
  const double left = predict_sector(3, 1.0, {10.0, pi, pi + 0.4});
  const double right = predict_sector(3, 1.0, {10.0, pi + 1.9, 2 * pi});
  CHECK(std::fabs(left + interior + right - full) < 1e-8 * full);
  CHECK(predict_sector(3, 1.0, {10.0, 1.3 * pi, 1.3 * pi}) == 0.0);
}

TEST_CASE("power-law fit") {
  std::vector<double> r, y;
  for (double x : {2.0, 4.0, 8.0, 16.0, 32.0}) {
    r.push_back(x);
    y.push_back(0.7 * x * x * x);
  }
  const auto fit = fit_power_law(r, y, 3);
  REQUIRE(fit);
  CHECK(std::fabs(fit->exponent - 3.0) < 1e-12);
  CHECK(std::fabs(fit->coefficient - 0.7) < 1e-12);
  CHECK(std::fabs(fit->fixed_coefficient - 0.7) < 1e-12);
  CHECK_FALSE(fit_power_law({1.0}, {1.0}, 3));
  CHECK_FALSE(fit_power_law({1.0, 2.0, 3.0}, {0.0, 0.0, 0.0}, 3));
}

TEST_CASE("compare: free potential") {
  const ResonanceSet s = find_resonances({1.0, {0.0, 0.0}}, 20.0);
  const auto reps = compare(s, {SectorQuery::full(20.0), {20.0, pi, 1.25 * pi}}, {5, 10, 15, 20});
  REQUIRE(reps.size() == 2);
  for (const CountReport& r : reps) {
    CHECK(r.empirical == 0);
    CHECK(r.no_resonances);
    CHECK_FALSE(r.fit);
    CHECK_FALSE(r.upper_bound_violated);
  }
  const auto j = reports_to_json(reps);
  CHECK(j[0]["fit"].is_null());
  CHECK(reports_to_csv(reps).find("no_resonances") != std::string::npos);
}

TEST_CASE("compare: well at desk scale") {
  const ResonanceSet s = find_resonances({1.0, {-20.0, 0.0}}, 20.0);
  const auto reps = compare(s, {SectorQuery::full(20.0)}, {8, 10, 12, 14, 16, 18, 20});
  const CountReport& r = reps.front();
  CHECK(r.empirical == count_norm(s, 20.0));
  CHECK(r.ratio > 0.7);
  CHECK(r.ratio < 1.2);
  REQUIRE(r.fit);
  CHECK(r.fit->exponent > 2.7);
  CHECK(r.fit->exponent < 3.6);
  CHECK_FALSE(r.upper_bound_violated);
  CHECK(3.0 * integrated_count(s, 20.0) <= predict_total(3, 1.0, 20.0) * 1.1);
  const auto j = r.to_json();
  CHECK(j["query"]["r"] == 20.0);
  CHECK(j["empirical"] == r.empirical);
}

TEST_CASE("family experiment: constant family and linearity") {
  const RadialStepPotential v{1.0, {-20.0, 0.0}};
  FamilyExperiment e = FamilyExperiment::radial_bump(v, v, 0.0, 0.5, 3);
  e.sectors = {SectorQuery::full(6.0)};
  CHECK_NOTHROW(e.validate());
  const FamilySolution sol = solve_family(e);
  CHECK(sol.sets.size() == 9);
  const long single = count_sector(find_resonances(v, 6.0), SectorQuery::full(6.0));
  const double avg = family_average(e, sol, SectorQuery::full(6.0));
  CHECK(std::fabs(avg - single * e.psi_mass()) < 1e-9 * avg);

  FamilyExperiment v2 = FamilyExperiment::radial_bump(v, {1.0, {-14.0, 2.0}}, 0.0, 0.5, 3);
  v2.sectors = e.sectors;
  FamilyExperiment v3 = v2;
  for (auto& n : v3.nodes) n.psi = 2.0 * n.psi + (n.psi > 0.0 ? 0.1 : 0.0);
  FamilyExperiment v4 = v2;
  for (auto& n : v4.nodes) n.psi = n.psi + (n.psi > 0.0 ? 0.1 : 0.0);
  const FamilySolution s2 = solve_family(v2);
  const SectorQuery q{6.0, pi, 1.5 * pi};
  // psi_3 = psi_2 + psi_4 on a common support
  CHECK(std::fabs(family_average(v3, s2, q) - family_average(v2, s2, q) - family_average(v4, s2, q)) < 1e-9);
  const auto report = family_report(v2, s2);
  CHECK(report["members"].size() == 9);
  CHECK(report["results"].size() == 1);
}

TEST_CASE("family validation") {
  FamilyExperiment e = FamilyExperiment::radial_bump({1.0, {-20.0, 0.0}}, {2.0, {-12.0, 3.0}}, 0.0, 0.5, 3);
  CHECK_THROWS_AS(e.validate(), DomainError);
  e = FamilyExperiment::radial_bump({1.0, {-20.0, 0.0}}, {1.0, {-12.0, 3.0}}, 0.0, 0.5, 3);
  for (auto& n : e.nodes) n.psi = 0.0;
  CHECK_THROWS_AS(e.validate(), DomainError);
  CHECK_THROWS_AS(FamilyExperiment::radial_bump({1.0, {-20.0, 0.0}}, {1.0, {-12.0, 3.0}}, 0.0, -1.0, 3), DomainError);
  const auto m = FamilyExperiment::radial_bump({1.0, {-20.0, 0.0}}, {1.0, {-12.0, 3.0}}, 0.0, 0.5, 3).member({0.5, 0.0});
  CHECK(std::abs(m.v0 - cplx(-16.0, 1.5)) < 1e-15);
}

TEST_CASE("family solve: parallel equals serial") {
  set_thread_count(3);
  FamilyExperiment e = FamilyExperiment::radial_bump({1.0, {-20.0, 0.0}}, {1.0, {-12.0, 3.0}}, 0.0, 0.5, 3);
  e.sectors = {SectorQuery::full(5.0)};
  const FamilySolution a = solve_family(e, Execution::serial);
  const FamilySolution b = solve_family(e, Execution::parallel);
  REQUIRE(a.sets.size() == b.sets.size());
  for (std::size_t k = 0; k < a.sets.size(); ++k) CHECK(a.sets[k].to_csv() == b.sets[k].to_csv());
  CHECK(family_report(e, a).dump() == family_report(e, b).dump());
}
