#include "resonance_atlas/acceptance.hpp"

#include "resonance_atlas/contour_counting.hpp"
#include "resonance_atlas/counting_harness.hpp"
#include "resonance_atlas/density.hpp"
#include "resonance_atlas/radial_resonances.hpp"
#include "resonance_atlas/special_functions.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

namespace resonance_atlas {

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    note(ok ? what : "FAILED " + what);
  }
  void note(const std::string& what) {
    if (detail.tellp() != 0) detail << "; ";
    detail << what;
  }
};

std::string num(double x, int digits = 6) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

// Shared by the counting criteria: v0 = -20, a = 1, solved once to r = 40.
struct Workbench {
  Execution exec;
  std::unique_ptr<ResonanceSet> reference;

  const ResonanceSet& reference_set() {
    if (!reference) reference = std::make_unique<ResonanceSet>(find_resonances({1.0, {-20.0, 0.0}}, 40.0, {}, exec));
    return *reference;
  }
  static std::vector<double> r_grid() { return {10, 15, 20, 25, 30, 35, 40}; }
};

void criterion_1(Outcome& o, Workbench&) {
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double t = 0.05 + (pi - 0.1) * i / 49.0;
    worst = std::max(worst, std::fabs(h_d(3, t) - h3_closed_form(t)));
  }
  o.require(worst <= 1e-6, "max |h_3 - closed form| = " + num(worst, 3));
}

void criterion_2(Outcome& o, Workbench& wb) {
  const DensityTable t = build_density_table(3, 181, {}, wb.exec);
  const auto bad = t.invariant_violations(1e-8);
  o.require(bad.empty(), bad.empty() ? "181-row table invariants hold at 1e-8" : bad.front());
}

void criterion_3(Outcome& o, Workbench&) {
  const double hp = h_d_prime(3, 1e-3);
  o.require(std::fabs(hp - 4.0 / 3.0) <= 1e-2, "h_3'(1e-3) = " + num(hp, 8));
  for (int d : {3, 5, 7}) {
    const double diff = std::fabs(hd_prime_at_zero_integral(d).value - hd_prime_at_zero(d));
    o.require(diff <= 1e-8, "d=" + std::to_string(d) + " integral vs Gamma form " + num(diff, 3));
  }
}

void criterion_4(Outcome& o, Workbench&) {
  const double line = c_d(3);
  const double plane = c_d_planar(3).value;
  o.require(line > 0.0 && std::fabs(line - plane) <= 1e-5,
            "c_3 = " + num(line, 12) + " vs planar " + num(plane, 12));
}

void criterion_5(Outcome& o, Workbench&) {
  const cplx i(0.0, 1.0);
  double worst = 0.0;
  const auto track = [&](double r) { worst = std::max(worst, r); };
  track(jensen_residual({{i}, {-i}}, 2.0));
  track(jensen_residual({{}, {}}, 1.0));
  track(jensen_residual({{2.0 * i, 3.0 * i}, {-2.0 * i, -3.0 * i}}, 4.0));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const double r = 2.0 + 4.0 * unit(rng);
    const int n = 1 + k % 4;
    std::vector<cplx> zeros;
    std::vector<cplx> poles;
    for (int j = 0; j < n; ++j) {
      const double m = 0.05 * r + 0.45 * r * unit(rng);
      const double t = 0.05 + (pi - 0.1) * unit(rng);
      zeros.push_back(std::polar(m, t));
      poles.push_back(std::polar(0.3 * r + 1.5 * r * unit(rng), -0.05 - (pi - 0.1) * unit(rng)));
    }
    track(jensen_residual({zeros, poles}, r));
  }
  o.note("23 full-plane cases, worst " + num(worst, 3));
  o.require(worst < 1e-6, "full-plane residual " + num(worst, 3));

  const cplx alpha = std::polar(std::sqrt(2.0), pi / 4);
  const cplx beta = std::polar(3.0, pi / 3);
  const JensenTestCase one({alpha}, {std::conj(alpha)});
  const JensenTestCase two({alpha, beta}, {std::conj(alpha), std::conj(beta)});
  double sector = 0.0;
  sector = std::max(sector, sector_jensen_residual(one, 2.0, pi / 8, 3 * pi / 8));
  sector = std::max(sector, sector_jensen_residual(one, 2.0, pi / 2, 3 * pi / 4));
  sector = std::max(sector, sector_jensen_residual(two, 4.0, pi / 8, 5 * pi / 12));
  o.require(sector < 1e-6, "sector residual " + num(sector, 3));
}

bool same_up_to(const cplx& x, const cplx& y, double tol) { return std::abs(x - y) <= tol * std::max(1.0, std::abs(x)); }

bool contains_match(const std::vector<Resonance>& set, const Resonance& r, cplx target, double tol) {
  for (const Resonance& q : set) {
    if (q.ell == r.ell && q.multiplicity == r.multiplicity && same_up_to(q.lambda, target, tol)) return true;
  }
  return false;
}

void criterion_6(Outcome& o, Workbench& wb) {
  const RadialStepPotential free{1.0, {0.0, 0.0}};
  long free_count = 0;
  for (double R : {5.0, 10.0, 20.0, 40.0}) free_count += static_cast<long>(find_resonances(free, R, {}, wb.exec).resonances.size());
  int free_winding = 0;
  for (int ell : {0, 1, 5, 20}) free_winding += half_disk_winding(ell, free, 40.0);
  o.require(free_count == 0 && free_winding == 0, "free potential: no resonances and zero channel windings up to R = 40");

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ua(0.7, 1.5);
  std::uniform_real_distribution<double> uv(-30.0, -5.0);
  std::uniform_real_distribution<double> uim(-4.0, 4.0);
  int reflect_bad = 0;
  int dilate_bad = 0;
  std::size_t checked = 0;
  for (int k = 0; k < 4; ++k) {
    const RadialStepPotential real_pot{ua(rng), {uv(rng), 0.0}};
    const double R = 6.0 / real_pot.a;
    const ResonanceSet s = find_resonances(real_pot, R, {}, wb.exec);
    for (const Resonance& r : s.resonances) {
      if (!contains_match(s.resonances, r, -std::conj(r.lambda), 1e-8)) ++reflect_bad;
    }
    checked += s.resonances.size();

    const RadialStepPotential cpot{ua(rng), {uv(rng), uim(rng)}};
    const double Rc = 6.0 / cpot.a;
    const double c = 2.0;
    const ResonanceSet base = find_resonances(cpot, Rc, {}, wb.exec);
    const ResonanceSet scaled = find_resonances({c * cpot.a, cpot.v0 / (c * c)}, Rc / c, {}, wb.exec);
    if (base.resonances.size() != scaled.resonances.size()) ++dilate_bad;
    for (const Resonance& r : base.resonances) {
      if (!contains_match(scaled.resonances, r, r.lambda / c, 1e-8)) ++dilate_bad;
    }
    checked += base.resonances.size();
  }
  o.require(reflect_bad == 0, "reflection mismatches " + std::to_string(reflect_bad));
  o.require(dilate_bad == 0, "dilation mismatches " + std::to_string(dilate_bad));

  const cplx i(0.0, 1.0);
  int poly_bad = 0;
  {
    const ComplexFunction f = [](cplx z) { return (z - cplx(1, -1)) * (z - cplx(1, -1)); };
    const ContourBox box(cplx(0, -2), cplx(2, 0));
    const auto zs = locate_zeros(f, box, 1e-10);
    if (winding_count(f, box) != 2 || zs.size() != 1 || zs[0].multiplicity != 2) ++poly_bad;
  }
  {
    const std::vector<cplx> roots{0.6 * (1.0 + i), 0.6 * (1.0 - i), 0.6 * (-1.0 + i), 0.6 * (-1.0 - i),
                                  cplx(0.3, -0.2), cplx(0.3, -0.2), cplx(0.05, 0.71)};
    const ComplexFunction f = [roots](cplx z) {
      cplx p = 1.0;
      for (cplx r : roots) p *= z - r;
      return p;
    };
    const ContourBox box(cplx(-1.13, -1.21), cplx(1.17, 1.09));
    int total = 0;
    for (const LocatedZero& z : locate_zeros(f, box, 1e-10)) total += z.multiplicity;
    if (winding_count(f, box) != 7 || total != 7) ++poly_bad;
  }
  o.require(poly_bad == 0, "polynomial winding/multiplicity fixtures");
  o.note(std::to_string(checked) + " randomized resonances checked");
}

void criterion_7(Outcome& o, Workbench& wb) {
  const ResonanceSet& s = wb.reference_set();
  const auto grid = Workbench::r_grid();
  std::vector<double> counts;
  std::vector<double> ratios;
  for (double r : grid) {
    counts.push_back(static_cast<double>(count_norm(s, r)));
    ratios.push_back(counts.back() / predict_total(3, 1.0, r));
  }
  const auto fit = fit_power_law(grid, counts, 3);
  o.require(fit && fit->exponent >= 2.7 && fit->exponent <= 3.3,
            "fitted exponent " + (fit ? num(fit->exponent, 4) : std::string("none")));
  o.require(ratios.back() >= 0.8 && ratios.back() <= 1.2, "n(40)/(c_3 40^3) = " + num(ratios.back(), 4));
  bool monotone = true;
  for (std::size_t k = 1; k < ratios.size(); ++k) {
    if (std::fabs(1.0 - ratios[k]) > std::fabs(1.0 - ratios[k - 1]) + 0.03) monotone = false;
  }
  std::string seq;
  for (double r : ratios) seq += (seq.empty() ? "" : ",") + num(r, 3);
  o.require(monotone, "ratios r=10..40: " + seq);
}

void criterion_8(Outcome& o, Workbench& wb) {
  const ResonanceSet& s = wb.reference_set();
  const std::vector<SectorQuery> qs{{40, pi + pi / 6, pi + pi / 3}, {40, pi, pi + pi / 4}, {40, pi + 3 * pi / 4, 2 * pi}};
  for (const CountReport& rep : compare(s, qs, Workbench::r_grid())) {
    o.require(rep.ratio >= 0.7 && rep.ratio <= 1.3, "sector [" + num(rep.query.phi / pi, 4) + "pi, " +
                                                        num(rep.query.theta / pi, 4) + "pi] ratio " + num(rep.ratio, 4));
  }
}

void criterion_9(Outcome& o, Workbench&) {
  const RadialStepPotential pot{1.0, {-20.0, 0.0}};
  double margin = 1e300;
  for (double th : {pi / 4, pi / 2, 3 * pi / 4}) {
    for (double r : {20.0, 40.0}) {
      const double lhs = scattering_log_det(pot, std::polar(r, th), 1000) / (r * r * r);
      margin = std::min(margin, h_d(3, th) + 0.05 - lhs);
    }
  }
  o.require(margin >= 0.0, "smallest margin to h_3 + 0.05: " + num(margin, 4));
  double anti = 0.0;
  for (const RadialStepPotential& p : {pot, RadialStepPotential{1.0, {-12.0, 3.0}}, RadialStepPotential{1.3, {5.0, -2.0}}}) {
    for (double x : {0.37, 1.7, 3.1, 7.9, 15.2}) {
      anti = std::max(anti, std::fabs(scattering_log_det(p, x, 1000) + scattering_log_det(p, -x, 1000)));
    }
  }
  o.require(anti <= 1e-8, "max |ln|s(x)| + ln|s(-x)|| = " + num(anti, 3));
}

void criterion_10(Outcome& o, Workbench& wb) {
  FamilyExperiment e = FamilyExperiment::radial_bump({1.0, {-20.0, 0.0}}, {1.0, {-12.0, 3.0}}, 0.0, 0.5, 5);
  const SectorQuery full = SectorQuery::full(25.0);
  const SectorQuery near{25.0, pi, 1.5 * pi};
  e.sectors = {full, near};
  const FamilySolution sol = solve_family(e, wb.exec);
  for (const SectorQuery& q : e.sectors) {
    const double ratio = family_average(e, sol, q) / family_prediction(e, q);
    o.require(ratio >= 0.75 && ratio <= 1.25,
              std::string(q.is_full() ? "full" : "(pi, 3pi/2)") + " ratio " + num(ratio, 4));
  }
  o.note(std::to_string(sol.sets.size()) + " members");
}

void criterion_11(Outcome& o, Workbench& wb) {
  const ResonanceSet& s = wb.reference_set();
  const auto grid = Workbench::r_grid();
  std::vector<double> n;
  std::vector<double> big_n;
  for (double r : grid) {
    n.push_back(static_cast<double>(count_norm(s, r)));
    big_n.push_back(integrated_count(s, r));
  }
  const auto fn = fit_power_law(grid, n, 3);
  const auto fN = fit_power_law(grid, big_n, 3);
  if (!fn || !fN) {
    o.require(false, "no fit");
    return;
  }
  const double q = 3.0 * fN->fixed_coefficient / fn->fixed_coefficient;
  o.require(std::fabs(q - 1.0) <= 0.15, "d coeff(N)/coeff(n) = " + num(q, 4));
}

struct Entry {
  const char* title;
  void (*run)(Outcome&, Workbench&);
};

const Entry entries[acceptance_criterion_count] = {
    {"h_3 closed form", criterion_1},
    {"density table symmetry and endpoints", criterion_2},
    {"h_d'(0+)", criterion_3},
    {"c_3 line vs area integral", criterion_4},
    {"Jensen identities", criterion_5},
    {"solver soundness", criterion_6},
    {"total count asymptotics", criterion_7},
    {"sector count asymptotics", criterion_8},
    {"scattering determinant bound", criterion_9},
    {"family average", criterion_10},
    {"n vs N normalization", criterion_11},
};

} // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  Workbench wb{options.exec, nullptr};
  std::vector<CriterionResult> out;
  for (int id = 1; id <= acceptance_criterion_count; ++id) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), id) == options.only.end()) continue;
    const Entry& e = entries[id - 1];
    CriterionResult res;
    res.id = id;
    res.title = e.title;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      e.run(o, wb);
      res.pass = o.pass;
      res.detail = o.detail.str();
    } catch (const std::exception& ex) {
      res.pass = false;
      res.detail = std::string("error: ") + ex.what();
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (on_result) on_result(res);
    out.push_back(res);
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os.precision(3);
  os << (r.pass ? "PASS" : "FAIL") << " [" << r.id << "] " << r.title << ": " << r.detail << " (" << std::fixed
     << r.seconds << " s)";
  return os.str();
}

} // namespace resonance_atlas
