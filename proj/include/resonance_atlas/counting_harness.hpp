#pragma once

#include "resonance_atlas/parallel.hpp"
#include "resonance_atlas/quadrature.hpp"
#include "resonance_atlas/radial_resonances.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace resonance_atlas {

/// Resonances with |lambda| <= r and phi <= arg lambda <= theta, arguments
/// taken in [0, 2pi) so the lower half plane is (pi, 2pi).
struct SectorQuery {
  double r = 0.0;
  double phi = 0.0;
  double theta = 0.0;

  void validate() const;
  /// The whole lower half plane, (pi, 2pi).
  static SectorQuery full(double r);
  bool is_full() const;
};

/// y ~ coefficient * r^exponent.  `fixed_coefficient` is the coefficient with
/// the exponent pinned to the dimension.
struct PowerFit {
  double exponent = 0.0;
  double coefficient = 0.0;
  double fixed_coefficient = 0.0;
};

struct CountReport {
  SectorQuery query;
  long empirical = 0;
  double predicted = 0.0;
  double ratio = 0.0;
  std::optional<PowerFit> fit;
  bool no_resonances = false;
  bool upper_bound_violated = false;

  nlohmann::json to_json() const;
};

std::string reports_to_csv(const std::vector<CountReport>& reports);
nlohmann::json reports_to_json(const std::vector<CountReport>& reports);

/// Sum of multiplicities over |lambda| <= r.  Throws DomainError when r exceeds
/// the search radius of the set.
long count_norm(const ResonanceSet& set, double r);
long count_sector(const ResonanceSet& set, const SectorQuery& q);

/// N(r) = sum over |lambda_j| <= r of mult_j ln(r / |lambda_j|).
double integrated_count(const ResonanceSet& set, double r);

double predict_total(int d, double a, double r, const QuadratureSpec& spec = {});
/// Leading coefficient of the sector count per unit (a r)^d.
double sector_coefficient(int d, double phi, double theta, const QuadratureSpec& spec = {});
double predict_sector(int d, double a, const SectorQuery& q, const QuadratureSpec& spec = {});

/// Least squares in log-log over the upper half of the grid (by index, the grid
/// sorted ascending).  Empty when fewer than two usable points remain.
std::optional<PowerFit> fit_power_law(const std::vector<double>& r, const std::vector<double>& y, int d);

struct CompareOptions {
  double upper_bound_slack = 0.1;
  /// The upper bound is only checked for r a at or above this value.
  double upper_bound_min_ra = 20.0;
  QuadratureSpec quad;
};

/// One report per query, evaluated at the query radius; the fit uses the
/// query's angles over r_grid.
std::vector<CountReport> compare(const ResonanceSet& set, const std::vector<SectorQuery>& queries,
                                 const std::vector<double>& r_grid, const CompareOptions& options = {});

// ---------------------------------------------------------------------------
// Averaged families
// ---------------------------------------------------------------------------

struct FamilyNode {
  cplx z;
  double weight = 0.0;
  double psi = 0.0;
};

/// V(z) = V0 + z (V1 - V0) sampled at grid nodes with quadrature weights.
struct FamilyExperiment {
  RadialStepPotential v0_base;
  RadialStepPotential v1_base;
  std::vector<FamilyNode> nodes;
  std::vector<double> r_grid;
  std::vector<SectorQuery> sectors;
  SolverTolerances tolerances;

  void validate() const;
  RadialStepPotential member(cplx z) const;
  double psi_mass() const;

  /// psi(z) = exp(-1 / (1 - |z - c|^2 / rho^2)) on |z - c| < rho, midpoint
  /// rule with n x n cells on the bounding square.
  static FamilyExperiment radial_bump(const RadialStepPotential& v0, const RadialStepPotential& v1, cplx center,
                                      double radius, int n);
};

/// Resonance sets of the members with psi > 0, in node order.  Solves at the
/// largest radius among r_grid and the sectors.
struct FamilySolution {
  std::vector<std::size_t> node_index;
  std::vector<ResonanceSet> sets;
};

FamilySolution solve_family(const FamilyExperiment& exp, Execution exec = Execution::parallel);

double family_average(const FamilyExperiment& exp, const FamilySolution& sol, const SectorQuery& q);
double family_average(const FamilyExperiment& exp, const SectorQuery& q, Execution exec = Execution::parallel);
double family_prediction(const FamilyExperiment& exp, const SectorQuery& q, const QuadratureSpec& spec = {});

nlohmann::json family_report(const FamilyExperiment& exp, const FamilySolution& sol,
                             const QuadratureSpec& spec = {});

} // namespace resonance_atlas
