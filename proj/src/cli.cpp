#include "resonance_atlas/cli.hpp"

#include "resonance_atlas/acceptance.hpp"
#include "resonance_atlas/contour_counting.hpp"
#include "resonance_atlas/counting_harness.hpp"
#include "resonance_atlas/density.hpp"
#include "resonance_atlas/errors.hpp"
#include "resonance_atlas/parallel.hpp"
#include "resonance_atlas/radial_resonances.hpp"
#include "resonance_atlas/serialization.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace resonance_atlas {

namespace {

constexpr double pi = std::numbers::pi;

struct RunConfig {
  std::string config_path;
  int threads = 0;

  int d = 3;
  int grid = 181;
  QuadratureSpec quad;

  double a = 1.0;
  double v0_re = -20.0;
  double v0_im = 0.0;
  double v1_re = -12.0;
  double v1_im = 3.0;
  double R = 10.0;
  SolverTolerances tol;

  std::string in_path;
  double r = 0.0;
  std::vector<double> r_grid;
  std::vector<std::string> sectors;

  double center_re = 0.0;
  double center_im = 0.0;
  double radius = 0.5;
  int n = 5;

  double jensen_tol = 1e-6;
  int random_cases = 20;
  unsigned seed = 7;

  std::vector<int> only;

  std::string out_path;
  std::string format;
};

/// Raised by the dispatcher for problems with the inputs themselves.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_angle(const std::string& s) {
  std::string t = s;
  t.erase(std::remove_if(t.begin(), t.end(), ::isspace), t.end());
  double factor = 1.0;
  if (t.size() >= 2 && t.compare(t.size() - 2, 2, "pi") == 0) {
    factor = pi;
    t.resize(t.size() - 2);
    if (t.empty()) t = "1";
    if (t.back() == '*') t.pop_back();
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw UsageError("bad angle '" + s + "'");
  }
  if (used != t.size()) throw UsageError("bad angle '" + s + "'");
  return v * factor;
}

std::vector<SectorQuery> parse_sectors(const std::vector<std::string>& specs, double r) {
  std::vector<SectorQuery> out;
  for (const std::string& s : specs) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw UsageError("sector '" + s + "' must be PHI:THETA");
    SectorQuery q{r, parse_angle(s.substr(0, colon)), parse_angle(s.substr(colon + 1))};
    q.validate();
    out.push_back(q);
  }
  if (out.empty()) out.push_back(SectorQuery::full(r));
  return out;
}

std::string resolve_format(const RunConfig& c, const std::string& fallback) {
  if (!c.format.empty()) return c.format;
  const std::string& p = c.out_path;
  if (p.size() >= 5 && p.compare(p.size() - 5, 5, ".json") == 0) return "json";
  if (p.size() >= 4 && p.compare(p.size() - 4, 4, ".csv") == 0) return "csv";
  return fallback;
}

void emit(const RunConfig& c, std::ostream& out, const std::string& text) {
  if (c.out_path.empty()) {
    out << text;
  } else {
    write_text_file(c.out_path, text);
  }
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

RadialStepPotential potential_of(const RunConfig& c) {
  RadialStepPotential p{c.a, {c.v0_re, c.v0_im}};
  p.validate();
  return p;
}

std::vector<double> default_grid(double R) {
  std::vector<double> g;
  for (int k = 1; k <= 7; ++k) g.push_back(R * (0.25 + 0.125 * k - 0.125));
  return g;
}

void validate(const RunConfig& c) {
  if (c.d < 3 || c.d % 2 == 0) throw UsageError("--d must be an odd integer >= 3");
  if (c.grid < 3) throw UsageError("--grid must be >= 3");
  c.quad.validate();
  if (!(c.a > 0.0)) throw UsageError("--a must be > 0");
  if (!(c.R > 0.0)) throw UsageError("--R must be > 0");
  if (c.r < 0.0) throw UsageError("--r must be > 0");
  for (double r : c.r_grid) {
    if (!(r > 0.0)) throw UsageError("--r-grid values must be > 0");
  }
  if (!(c.radius > 0.0) || c.n < 1) throw UsageError("--radius must be > 0 and --n >= 1");
  if (!(c.jensen_tol > 0.0) || c.random_cases < 0) throw UsageError("bad jensen options");
  for (int id : c.only) {
    if (id < 1 || id > acceptance_criterion_count) throw UsageError("--only ids run from 1 to 11");
  }
}

// ---------------------------------------------------------------------------

int cmd_density(const RunConfig& c, std::ostream& out) {
  const DensityTable t = build_density_table(c.d, c.grid, c.quad);
  emit(c, out, resolve_format(c, "csv") == "json" ? dump(t.to_json()) : t.to_csv());
  return 0;
}

int cmd_resonances(const RunConfig& c, std::ostream& out) {
  const ResonanceSet s = find_resonances(potential_of(c), c.R, c.tol);
  emit(c, out, resolve_format(c, "csv") == "json" ? dump(s.to_json()) : s.to_csv());
  return 0;
}

int cmd_count(const RunConfig& c, std::ostream& out) {
  ResonanceSet s;
  if (!c.in_path.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_text_file(c.in_path));
    } catch (const nlohmann::json::exception& e) {
      throw UsageError("cannot parse " + c.in_path + ": " + e.what());
    }
    s = ResonanceSet::from_json(j);
  } else {
    s = find_resonances(potential_of(c), c.R, c.tol);
  }
  const double r = c.r > 0.0 ? c.r : s.search_radius;
  const std::vector<double> grid = c.r_grid.empty() ? default_grid(r) : c.r_grid;
  CompareOptions opt;
  opt.quad = c.quad;
  const auto reports = compare(s, parse_sectors(c.sectors, r), grid, opt);
  emit(c, out, resolve_format(c, "csv") == "json" ? dump(reports_to_json(reports)) : reports_to_csv(reports));
  return 0;
}

int cmd_jensen(const RunConfig& c, std::ostream& out) {
  struct Row {
    std::string name;
    double r;
    double phi;
    double theta;
    JensenSides sides;
  };
  std::vector<Row> rows;
  const cplx i(0.0, 1.0);
  const auto full = [&](const std::string& name, const JensenTestCase& tc, double r) {
    rows.push_back({name, r, 0.0, pi, jensen_sides(tc, r, c.quad)});
  };
  const auto sector = [&](const std::string& name, const JensenTestCase& tc, double r, double phi, double theta) {
    rows.push_back({name, r, phi, theta, sector_jensen_sides(tc, r, phi, theta, c.quad)});
  };
  full("single", {{i}, {-i}}, 2.0);
  full("constant", {{}, {}}, 1.0);
  full("two_zero", {{2.0 * i, 3.0 * i}, {-2.0 * i, -3.0 * i}}, 4.0);
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < c.random_cases; ++k) {
    const double r = 2.0 + 4.0 * unit(rng);
    std::vector<cplx> zeros;
    std::vector<cplx> poles;
    for (int j = 0; j <= k % 4; ++j) {
      zeros.push_back(std::polar(0.05 * r + 0.45 * r * unit(rng), 0.05 + (pi - 0.1) * unit(rng)));
      poles.push_back(std::polar(0.3 * r + 1.5 * r * unit(rng), -0.05 - (pi - 0.1) * unit(rng)));
    }
    full("random_" + std::to_string(k), {zeros, poles}, r);
  }
  const cplx alpha = std::polar(std::sqrt(2.0), pi / 4);
  const cplx beta = std::polar(3.0, pi / 3);
  sector("sector_one_zero", {{alpha}, {std::conj(alpha)}}, 2.0, pi / 8, 3 * pi / 8);
  sector("sector_empty", {{alpha}, {std::conj(alpha)}}, 2.0, pi / 2, 3 * pi / 4);
  sector("sector_two_zero", {{alpha, beta}, {std::conj(alpha), std::conj(beta)}}, 4.0, pi / 8, 5 * pi / 12);

  bool ok = true;
  nlohmann::json arr = nlohmann::json::array();
  std::string csv = "case,r,phi,theta,lhs,rhs,residual\n";
  for (const Row& row : rows) {
    ok = ok && row.sides.residual() < c.jensen_tol;
    csv += row.name + "," + format_double(row.r) + "," + format_double(row.phi) + "," + format_double(row.theta) + "," +
           format_double(row.sides.lhs) + "," + format_double(row.sides.rhs) + "," +
           format_double(row.sides.residual()) + "\n";
    arr.push_back({{"case", row.name},
                   {"r", row.r},
                   {"phi", row.phi},
                   {"theta", row.theta},
                   {"lhs", row.sides.lhs},
                   {"rhs", row.sides.rhs},
                   {"residual", row.sides.residual()}});
  }
  emit(c, out, resolve_format(c, "csv") == "json" ? dump(arr) : csv);
  return ok ? 0 : 1;
}

int cmd_family(const RunConfig& c, std::ostream& out) {
  FamilyExperiment e = FamilyExperiment::radial_bump({c.a, {c.v0_re, c.v0_im}}, {c.a, {c.v1_re, c.v1_im}},
                                                     {c.center_re, c.center_im}, c.radius, c.n);
  const double r = c.r > 0.0 ? c.r : 25.0;
  e.r_grid = c.r_grid;
  e.sectors = parse_sectors(c.sectors, r);
  e.tolerances = c.tol;
  const FamilySolution sol = solve_family(e);
  emit(c, out, dump(family_report(e, sol, c.quad)));
  return 0;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
  AcceptanceOptions opt;
  opt.only = c.only;
  bool ok = true;
  run_acceptance(opt, [&](const CriterionResult& r) {
    ok = ok && r.pass;
    out << format_result(r) << std::endl;
  });
  out << (ok ? "verify: all criteria passed" : "verify: some criteria FAILED") << std::endl;
  return ok ? 0 : 1;
}

// Config file lines `key = value` become `--key value` unless the flag is
// already on the command line.
std::vector<std::string> merge_config(const std::vector<std::string>& args, const std::vector<std::string>& commands) {
  std::string path;
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) path = args[k + 1];
    if (args[k].rfind("--config=", 0) == 0) path = args[k].substr(9);
  }
  if (path.empty()) return args;
  const std::string text = read_text_file(path);
  const auto given = [&](const std::string& flag) {
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
  };
  std::vector<std::string> global;
  std::vector<std::string> local;
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || key == "config") throw UsageError(path + ":" + std::to_string(lineno) + ": bad key");
    const std::string flag = "--" + key;
    if (given(flag)) continue;
    auto& dest = key == "threads" ? global : local;
    dest.push_back(flag);
    dest.push_back(value);
  }
  std::vector<std::string> merged;
  std::size_t k = 0;
  for (; k < args.size(); ++k) {
    if (std::find(commands.begin(), commands.end(), args[k]) != commands.end()) break;
    merged.push_back(args[k]);
  }
  merged.insert(merged.end(), global.begin(), global.end());
  if (k < args.size()) {
    merged.push_back(args[k++]);
    merged.insert(merged.end(), local.begin(), local.end());
    merged.insert(merged.end(), args.begin() + static_cast<std::ptrdiff_t>(k), args.end());
  }
  return merged;
}

void add_output(CLI::App* sub, RunConfig& c) {
  sub->add_option("--out", c.out_path, "Output file (stdout when omitted)");
  sub->add_option("--format", c.format, "csv or json (default from --out extension, else csv)")
      ->check(CLI::IsMember({"csv", "json"}));
}

void add_quadrature(CLI::App* sub, RunConfig& c) {
  sub->add_option("--abs-tol", c.quad.abs_tol, "Quadrature absolute tolerance");
  sub->add_option("--rel-tol", c.quad.rel_tol, "Quadrature relative tolerance");
  sub->add_option("--truncation", c.quad.truncation, "Truncation radius T (0 = from tolerance)");
  sub->add_option("--max-subdivisions", c.quad.max_subdivisions, "Quadrature panel budget");
}

void add_potential(CLI::App* sub, RunConfig& c) {
  sub->add_option("--a", c.a, "Potential radius");
  sub->add_option("--v0-re", c.v0_re, "Re v0");
  sub->add_option("--v0-im", c.v0_im, "Im v0");
}

void add_solver(CLI::App* sub, RunConfig& c) {
  sub->add_option("--location-tol", c.tol.location_tol, "Zero location tolerance");
  sub->add_option("--residual-tol", c.tol.residual_tol, "Relative residual tolerance");
  sub->add_option("--axis-offset", c.tol.axis_offset, "Search below Im(lambda a) = -offset");
  sub->add_option("--max-grid-shifts", c.tol.max_grid_shifts, "Tiling retries on boundary conflicts");
}

void add_sectors(CLI::App* sub, RunConfig& c) {
  sub->add_option("--r", c.r, "Count radius");
  sub->add_option("--r-grid", c.r_grid, "Radii for the power-law fit")->delimiter(',');
  sub->add_option("--sector", c.sectors, "PHI:THETA in [pi, 2pi], radians or with a pi suffix (1.5pi)");
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Resonance counting and density atlas for radial step potentials", "resonance-atlas"};
  app.require_subcommand(1);
  app.add_option("--config", c.config_path, "Plain text file of key = value lines");
  app.add_option("--threads", c.threads, "Thread count (default RESONANCE_ATLAS_THREADS)")->check(CLI::PositiveNumber);

  CLI::App* density = app.add_subcommand("density", "Tabulate h_d and h_d'");
  density->add_option("--d", c.d, "Odd dimension >= 3");
  density->add_option("--grid", c.grid, "Number of theta samples on [0, pi]");
  add_quadrature(density, c);
  add_output(density, c);

  CLI::App* resonances = app.add_subcommand("resonances", "Resonances of a radial step potential");
  add_potential(resonances, c);
  resonances->add_option("--R", c.R, "Search radius");
  add_solver(resonances, c);
  add_output(resonances, c);

  CLI::App* count = app.add_subcommand("count", "Counting reports against the leading asymptotics");
  count->add_option("--in", c.in_path, "Resonance set JSON (otherwise solve)");
  add_potential(count, c);
  count->add_option("--R", c.R, "Search radius when solving");
  add_solver(count, c);
  add_sectors(count, c);
  add_quadrature(count, c);
  add_output(count, c);

  CLI::App* jensen = app.add_subcommand("jensen", "Jensen identity residual suite");
  jensen->add_option("--tol", c.jensen_tol, "Residual threshold");
  jensen->add_option("--random", c.random_cases, "Number of random rational cases");
  jensen->add_option("--seed", c.seed, "Random seed");
  add_quadrature(jensen, c);
  add_output(jensen, c);

  CLI::App* family = app.add_subcommand("family", "Averaged counts over a one-parameter family");
  add_potential(family, c);
  family->add_option("--v1-re", c.v1_re, "Re v0 of the second base potential");
  family->add_option("--v1-im", c.v1_im, "Im v0 of the second base potential");
  family->add_option("--center-re", c.center_re, "Bump center, real part");
  family->add_option("--center-im", c.center_im, "Bump center, imaginary part");
  family->add_option("--radius", c.radius, "Bump radius");
  family->add_option("--n", c.n, "Midpoint cells per side");
  add_solver(family, c);
  add_sectors(family, c);
  add_quadrature(family, c);
  family->add_option("--out", c.out_path, "Output file (stdout when omitted)");

  CLI::App* verify = app.add_subcommand("verify", "Run the acceptance criteria");
  verify->add_option("--only", c.only, "Criterion ids to run")->delimiter(',');

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = merge_config(args, {"density", "resonances", "count", "jensen", "family", "verify"});
    std::reverse(args.begin(), args.end());
    app.parse(args);
    validate(c);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  if (c.threads > 0) set_thread_count(c.threads);

  const CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  const std::map<std::string, std::string> module = {{"density", "density::build_density_table"},
                                                     {"resonances", "radial_resonances::find_resonances"},
                                                     {"count", "counting_harness::compare"},
                                                     {"jensen", "contour_counting::jensen_sides"},
                                                     {"family", "counting_harness::family_average"},
                                                     {"verify", "acceptance::run_acceptance"}};
  try {
    if (name == "density") return cmd_density(c, out);
    if (name == "resonances") return cmd_resonances(c, out);
    if (name == "count") return cmd_count(c, out);
    if (name == "jensen") return cmd_jensen(c, out);
    if (name == "family") return cmd_family(c, out);
    return cmd_verify(c, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "usage error (" << module.at(name) << "): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "numerical failure (" << module.at(name) << "): " << e.what() << "\n";
    return 3;
  }
}

} // namespace resonance_atlas
