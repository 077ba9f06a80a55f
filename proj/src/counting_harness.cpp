#include "resonance_atlas/counting_harness.hpp"

#include "resonance_atlas/density.hpp"
#include "resonance_atlas/errors.hpp"
#include "resonance_atlas/serialization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace resonance_atlas {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double edge_tol = 1e-12;

void check_radius(const ResonanceSet& set, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("count radius must be > 0");
  if (r > set.search_radius) {
    throw DomainError("count radius " + format_double(r) + " exceeds search radius " +
                      format_double(set.search_radius));
  }
}

void check_origin(const ResonanceSet& set, const Resonance& res) {
  if (std::abs(res.lambda) * set.potential.a < set.tolerances.axis_offset) {
    throw NumericalError("resonance at the origin reported; n(0) is not defined for this set");
  }
}

std::string show_z(cplx z) {
  std::ostringstream os;
  os << "z=(" << format_double(z.real()) << "," << format_double(z.imag()) << ")";
  return os.str();
}

nlohmann::json query_json(const SectorQuery& q) { return {{"r", q.r}, {"phi", q.phi}, {"theta", q.theta}}; }

} // namespace

void SectorQuery::validate() const {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("sector query: r must be > 0");
  if (!(pi <= phi && phi <= theta && theta <= 2.0 * pi)) {
    throw DomainError("sector query: need pi <= phi <= theta <= 2 pi");
  }
}

SectorQuery SectorQuery::full(double r) { return {r, pi, 2.0 * pi}; }

bool SectorQuery::is_full() const { return phi <= pi + edge_tol && theta >= 2.0 * pi - edge_tol; }

long count_norm(const ResonanceSet& set, double r) {
  check_radius(set, r);
  long n = 0;
  for (const Resonance& res : set.resonances) {
    check_origin(set, res);
    if (std::abs(res.lambda) <= r) n += res.multiplicity;
  }
  return n;
}

long count_sector(const ResonanceSet& set, const SectorQuery& q) {
  q.validate();
  check_radius(set, q.r);
  long n = 0;
  for (const Resonance& res : set.resonances) {
    check_origin(set, res);
    if (std::abs(res.lambda) > q.r) continue;
    const double t = arg_2pi(res.lambda);
    if (t >= q.phi - edge_tol && t <= q.theta + edge_tol) n += res.multiplicity;
  }
  return n;
}

double integrated_count(const ResonanceSet& set, double r) {
  check_radius(set, r);
  double sum = 0.0;
  for (const Resonance& res : set.resonances) {
    check_origin(set, res);
    const double m = std::abs(res.lambda);
    if (m <= r) sum += res.multiplicity * std::log(r / m);
  }
  return sum;
}

double predict_total(int d, double a, double r, const QuadratureSpec& spec) {
  if (!(a > 0.0) || !(r > 0.0)) throw DomainError("predict_total: need a > 0 and r > 0");
  return c_d(d, spec) * std::pow(a * r, d);
}

double sector_coefficient(int d, double phi, double theta, const QuadratureSpec& spec) {
  require_odd_dimension(d);
  const SectorQuery q{1.0, phi, theta};
  q.validate();
  const double lo = phi - pi;
  const double hi = theta - pi;
  if (hi - lo <= edge_tol) return 0.0;
  const bool at_start = lo <= edge_tol;
  const bool at_end = hi >= pi - edge_tol;
  if (at_start && at_end) return c_d(d, spec);
  if (at_start) return near_axis_coeff(d, hi, spec);
  if (at_end) return far_axis_coeff(d, lo, spec);
  return s_tilde(d, lo, hi, spec) / (2.0 * pi * d);
}

double predict_sector(int d, double a, const SectorQuery& q, const QuadratureSpec& spec) {
  q.validate();
  if (!(a > 0.0)) throw DomainError("predict_sector: need a > 0");
  return sector_coefficient(d, q.phi, q.theta, spec) * std::pow(a * q.r, d);
}

std::optional<PowerFit> fit_power_law(const std::vector<double>& r, const std::vector<double>& y, int d) {
  if (r.size() != y.size()) throw DomainError("fit_power_law: size mismatch");
  const std::size_t n = r.size();
  if (n < 2) return std::nullopt;
  const std::size_t start = std::min(n / 2, n - 2);
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = start; i < n; ++i) {
    if (r[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(r[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  const std::size_t m = lx.size();
  if (m < 2) return std::nullopt;
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) return std::nullopt;
  PowerFit fit;
  fit.exponent = sxy / sxx;
  fit.coefficient = std::exp(my - fit.exponent * mx);
  fit.fixed_coefficient = std::exp(my - d * mx);
  return fit;
}

std::vector<CountReport> compare(const ResonanceSet& set, const std::vector<SectorQuery>& queries,
                                 const std::vector<double>& r_grid, const CompareOptions& options) {
  constexpr int d = 3;
  const double a = set.potential.a;
  std::vector<double> grid = r_grid;
  std::sort(grid.begin(), grid.end());
  for (double r : grid) check_radius(set, r);

  bool violated = false;
  const double cd = c_d(d, options.quad);
  std::vector<double> bound_radii = grid;
  for (const SectorQuery& q : queries) bound_radii.push_back(q.r);
  for (double r : bound_radii) {
    if (r * a < options.upper_bound_min_ra) continue;
    if (d * integrated_count(set, r) > cd * std::pow(a * r, d) * (1.0 + options.upper_bound_slack)) violated = true;
  }

  std::vector<CountReport> out;
  for (const SectorQuery& q : queries) {
    CountReport rep;
    rep.query = q;
    rep.empirical = count_sector(set, q);
    rep.predicted = predict_sector(d, a, q, options.quad);
    rep.ratio = rep.predicted > 0.0 ? rep.empirical / rep.predicted : 0.0;
    rep.no_resonances = set.resonances.empty();
    rep.upper_bound_violated = violated;
    std::vector<double> counts;
    for (double r : grid) counts.push_back(static_cast<double>(count_sector(set, {r, q.phi, q.theta})));
    rep.fit = fit_power_law(grid, counts, d);
    out.push_back(rep);
  }
  return out;
}

nlohmann::json CountReport::to_json() const {
  nlohmann::json j = {{"query", query_json(query)},
                      {"empirical", empirical},
                      {"predicted", predicted},
                      {"ratio", ratio},
                      {"no_resonances", no_resonances},
                      {"upper_bound_violated", upper_bound_violated}};
  if (fit) {
    j["fit"] = {{"exponent", fit->exponent}, {"coefficient", fit->coefficient}, {"fixed_coefficient", fit->fixed_coefficient}};
  } else {
    j["fit"] = nullptr;
  }
  return j;
}

nlohmann::json reports_to_json(const std::vector<CountReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const CountReport& r : reports) arr.push_back(r.to_json());
  return arr;
}

std::string reports_to_csv(const std::vector<CountReport>& reports) {
  std::string s = "r,phi,theta,empirical,predicted,ratio,fit_exponent,fit_coefficient,flags\n";
  for (const CountReport& r : reports) {
    std::string flags;
    if (r.no_resonances) flags += "no_resonances";
    if (r.upper_bound_violated) flags += flags.empty() ? "upper_bound" : ";upper_bound";
    s += format_double(r.query.r) + "," + format_double(r.query.phi) + "," + format_double(r.query.theta) + "," +
         std::to_string(r.empirical) + "," + format_double(r.predicted) + "," + format_double(r.ratio) + "," +
         (r.fit ? format_double(r.fit->exponent) : "") + "," + (r.fit ? format_double(r.fit->coefficient) : "") + "," +
         flags + "\n";
  }
  return s;
}

// ---------------------------------------------------------------------------

void FamilyExperiment::validate() const {
  v0_base.validate();
  v1_base.validate();
  if (v0_base.a != v1_base.a) throw DomainError("family: base potentials need equal radii");
  if (nodes.empty()) throw DomainError("family: empty parameter grid");
  for (const FamilyNode& n : nodes) {
    if (!(n.psi >= 0.0) || !(n.weight >= 0.0)) throw DomainError("family: weights and psi must be >= 0");
    if (!std::isfinite(n.z.real()) || !std::isfinite(n.z.imag())) throw DomainError("family: non-finite node");
  }
  if (!(psi_mass() > 0.0)) throw DomainError("family: sum of weight * psi must be > 0");
  for (double r : r_grid) {
    if (!(r > 0.0)) throw DomainError("family: r grid values must be > 0");
  }
  for (const SectorQuery& q : sectors) q.validate();
}

RadialStepPotential FamilyExperiment::member(cplx z) const {
  return {v0_base.a, v0_base.v0 + z * (v1_base.v0 - v0_base.v0)};
}

double FamilyExperiment::psi_mass() const {
  double m = 0.0;
  for (const FamilyNode& n : nodes) m += n.weight * n.psi;
  return m;
}

FamilyExperiment FamilyExperiment::radial_bump(const RadialStepPotential& v0, const RadialStepPotential& v1,
                                               cplx center, double radius, int n) {
  if (!(radius > 0.0) || n < 1) throw DomainError("radial_bump: need radius > 0 and n >= 1");
  FamilyExperiment exp;
  exp.v0_base = v0;
  exp.v1_base = v1;
  const double h = 2.0 * radius / n;
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const cplx z = center + cplx(-radius + (ix + 0.5) * h, -radius + (iy + 0.5) * h);
      const double q = std::norm(z - center) / (radius * radius);
      const double psi = q < 1.0 ? std::exp(-1.0 / (1.0 - q)) : 0.0;
      exp.nodes.push_back({z, h * h, psi});
    }
  }
  return exp;
}

FamilySolution solve_family(const FamilyExperiment& exp, Execution exec) {
  exp.validate();
  double R = 0.0;
  for (double r : exp.r_grid) R = std::max(R, r);
  for (const SectorQuery& q : exp.sectors) R = std::max(R, q.r);
  if (!(R > 0.0)) throw DomainError("family: no radius to solve at");
  FamilySolution sol;
  for (std::size_t i = 0; i < exp.nodes.size(); ++i) {
    if (exp.nodes[i].psi > 0.0 && exp.nodes[i].weight > 0.0) sol.node_index.push_back(i);
  }
  sol.sets.resize(sol.node_index.size());
  for_each_index(sol.sets.size(), exec, [&](std::size_t k) {
    const cplx z = exp.nodes[sol.node_index[k]].z;
    sol.sets[k] = with_context("family member " + show_z(z), [&] {
      return find_resonances(exp.member(z), R, exp.tolerances, Execution::serial);
    });
  });
  return sol;
}

double family_average(const FamilyExperiment& exp, const FamilySolution& sol, const SectorQuery& q) {
  if (sol.sets.size() != sol.node_index.size()) throw DomainError("family_average: malformed solution");
  double sum = 0.0;
  for (std::size_t k = 0; k < sol.sets.size(); ++k) {
    const FamilyNode& n = exp.nodes.at(sol.node_index[k]);
    sum += n.weight * n.psi * static_cast<double>(count_sector(sol.sets[k], q));
  }
  return sum;
}

double family_average(const FamilyExperiment& exp, const SectorQuery& q, Execution exec) {
  FamilyExperiment e = exp;
  e.sectors = {q};
  e.r_grid.clear();
  return family_average(e, solve_family(e, exec), q);
}

double family_prediction(const FamilyExperiment& exp, const SectorQuery& q, const QuadratureSpec& spec) {
  return predict_sector(3, exp.v0_base.a, q, spec) * exp.psi_mass();
}

nlohmann::json family_report(const FamilyExperiment& exp, const FamilySolution& sol, const QuadratureSpec& spec) {
  nlohmann::json members = nlohmann::json::array();
  for (std::size_t k = 0; k < sol.sets.size(); ++k) {
    const FamilyNode& n = exp.nodes.at(sol.node_index[k]);
    const ResonanceSet& s = sol.sets[k];
    members.push_back({{"z_re", n.z.real()},
                       {"z_im", n.z.imag()},
                       {"weight", n.weight},
                       {"psi", n.psi},
                       {"v0_re", s.potential.v0.real()},
                       {"v0_im", s.potential.v0.imag()},
                       {"R", s.search_radius},
                       {"ell_max", s.ell_max},
                       {"distinct", s.resonances.size()},
                       {"count", count_norm(s, s.search_radius)}});
  }
  std::vector<SectorQuery> queries = exp.sectors;
  for (double r : exp.r_grid) queries.push_back(SectorQuery::full(r));
  nlohmann::json results = nlohmann::json::array();
  for (const SectorQuery& q : queries) {
    const double avg = family_average(exp, sol, q);
    const double pred = family_prediction(exp, q, spec);
    results.push_back({{"query", query_json(q)}, {"average", avg}, {"predicted", pred},
                       {"ratio", pred > 0.0 ? avg / pred : 0.0}});
  }
  return {{"v0", {{"a", exp.v0_base.a}, {"v0_re", exp.v0_base.v0.real()}, {"v0_im", exp.v0_base.v0.imag()}}},
          {"v1", {{"a", exp.v1_base.a}, {"v0_re", exp.v1_base.v0.real()}, {"v0_im", exp.v1_base.v0.imag()}}},
          {"psi_mass", exp.psi_mass()},
          {"members", members},
          {"results", results}};
}

} // namespace resonance_atlas
