#pragma once

#include "resonance_atlas/contour_counting.hpp"
#include "resonance_atlas/parallel.hpp"
#include "resonance_atlas/special_functions.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace resonance_atlas {

/// V(x) = v0 for |x| <= a, 0 outside, in dimension 3.
struct RadialStepPotential {
  double a = 1.0;
  cplx v0 = 0.0;

  /// Throws DomainError unless a > 0 and v0 is finite.
  void validate() const;
  bool is_free() const { return v0 == cplx(0.0, 0.0); }
};

struct Resonance {
  cplx lambda;
  int ell = 0;
  /// (2 ell + 1) times the zero order of the channel function.
  int multiplicity = 1;
  /// |F| / (|first term| + |second term|) of the channel function at lambda.
  double residual = 0.0;
};

struct SolverTolerances {
  /// Location tolerance and multiplicity-circle radius, in units of 1/a.
  double location_tol = 1e-9;
  double residual_tol = 1e-8;
  /// delta_axis * a: the search region is Im lambda < -axis_offset / a.
  double axis_offset = 1e-6;
  /// Grid shifts tried after a boundary conflict before giving up.
  int max_grid_shifts = 8;
};

struct ResonanceSet {
  RadialStepPotential potential;
  double search_radius = 0.0;
  std::vector<Resonance> resonances;
  int ell_max = 0;
  SolverTolerances tolerances;

  std::string to_csv() const;
  nlohmann::json to_json() const;
  static ResonanceSet from_json(const nlohmann::json& j);
};

enum class KBranch { principal, negated };

/// W_l(lambda) = k j_l'(k a) h_l(lambda a) - lambda j_l(k a) h_l'(lambda a),
/// k = +-sqrt(lambda^2 - v0).  Evaluated through the scaled channel function;
/// throws OverflowError when W leaves double range.  lambda != 0.
cplx channel_condition(int ell, const RadialStepPotential& pot, cplx lambda, KBranch branch = KBranch::principal);

/// The channel function
///   F_l(mu) = jt_l(x) Ht_{l+1}(mu) - x^2 jt_{l+1}(x) Ht_l(mu),  mu = lambda a,
///   x^2 = (lambda^2 - v0) a^2,
/// with jt_n(x) = j_n(x)/x^n and Ht_n(z) = z^{n+1} h_n(z).  F is entire in
/// lambda, has no branch cut, F = -i for v0 = 0, and
///   W_l = (k a)^l F_l / (a (lambda a)^{l+1}).
/// Its zeros in Im lambda < 0 are the channel-l resonances.
struct ChannelValue {
  cplx_ld value;
  cplx_ld derivative; // dF/dmu
  long double scale = 0.0L; // |first term| + |second term|
};

ChannelValue channel_function(int ell, const RadialStepPotential& pot, cplx lambda, bool with_derivative = false,
                              HankelKind kind = HankelKind::first);

/// S_l(lambda) = -F^(2)_l / F_l, F^(2) built from h^(2).  Throws
/// NumericalError naming ell when lambda is (numerically) a pole.
cplx scattering_matrix_element(int ell, const RadialStepPotential& pot, cplx lambda);

/// sum_{l <= ell_limit} (2l+1) ln|S_l(lambda)| for Im lambda >= 0, lambda != 0.
/// Past l = max(|lambda|, |k|) a + 1 the sum stops once ten consecutive terms
/// are below rel_tol times the running sum.  Exactly 0 for v0 = 0.
double scattering_log_det(const RadialStepPotential& pot, cplx lambda, int ell_limit, double rel_tol = 1e-14);

/// Winding of F_l around the lower half disk {|lambda| <= R, Im lambda < -delta_axis}.
/// A boundary conflict counts as "not empty" in channel_empty.
int half_disk_winding(int ell, const RadialStepPotential& pot, double R, const SolverTolerances& tol = {});
bool channel_empty(int ell, const RadialStepPotential& pot, double R, const SolverTolerances& tol = {});

/// Resonances of one channel in the search half disk (tiling + locate_zeros).
std::vector<Resonance> channel_resonances(int ell, const RadialStepPotential& pot, double R,
                                          const SolverTolerances& tol = {});

/// Largest channel with a zero in the half disk, after checking that the
/// three channels above the starting guess ceil(1.5 R a + 2 sqrt|v0| a) + 10
/// are empty (the guess grows by one up to 50 times).  0 when every channel is
/// empty.
int ell_cutoff(const RadialStepPotential& pot, double R, const SolverTolerances& tol = {},
               Execution exec = Execution::parallel);

/// All resonances with |lambda| <= R, Im lambda < -delta_axis, sorted by
/// |lambda| then arg lambda in [0, 2 pi).  Channels run concurrently.
ResonanceSet find_resonances(const RadialStepPotential& pot, double R, const SolverTolerances& tol = {},
                             Execution exec = Execution::parallel);

/// Argument in [0, 2 pi).
double arg_2pi(cplx z);

} // namespace resonance_atlas
