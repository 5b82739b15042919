#include "ghdg/experiments.hpp"

#include <toml.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace ghdg {

namespace {

const std::set<std::string> kExperiments{"convergence", "mach", "sip", "solar"};
const std::set<std::string> kPresets{"square-manufactured", "paper-disk", "solar"};

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + num(v[i]);
  return s;
}

std::string mode_name(ConvMode m) { return m == ConvMode::Lifting ? "lifting" : "sip"; }

std::vector<double> mach_list(const RunConfig& c) {
  if (!c.mach_schedule.empty()) return c.mach_schedule;
  if (c.experiment == "solar") return {0.05, 0.5, 1.0, 1.5};
  if (c.experiment == "mach") return {0.05, 0.25, 0.5, 0.75, 1.0, 1.25};
  return {c.mach};
}

}  // namespace

void RunConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (!kExperiments.count(experiment)) fail("unknown experiment '" + experiment + "'");
  if (method != "full" && method != "reduced") fail("method must be 'full' or 'reduced'");
  if (k < 1 || k > 7) fail("k must lie in [1, 7]");
  if (!(alpha > 0.0)) fail("alpha must be positive");
  if (!(lambda > 0.0)) fail("lambda must be positive");
  for (double l : lambdas)
    if (!(l > 0.0)) fail("every entry of lambdas must be positive");
  if (experiment == "sip" && lambdas.empty()) fail("the sip experiment needs at least one lambda");
  if (levels < 1 || levels > 8) fail("levels must lie in [1, 8]");
  if (coarse_n < 1) fail("coarse_n must be >= 1");
  if (!kPresets.count(preset)) fail("unknown preset '" + preset + "'");
  try {
    parse_flow_kind(flow);
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (!(mach >= 0.0) || mach > 1.5) fail("mach must lie in [0, 1.5]");
  for (double m : mach_schedule)
    if (!(m > 0.0) || m > 1.5) fail("mach_schedule entries must lie in (0, 1.5]");
  if (quad_margin < 0 || quad_margin > 20) fail("quad_margin must lie in [0, 20]");
  if (ref_k_increment < 0 || k + ref_k_increment > 8) fail("ref_k_increment out of range");
  if (!(grading >= 1.0)) fail("grading must be >= 1");
  if (raster < 2) fail("raster must be >= 2");

  const bool square = preset == "square-manufactured";
  if (solution != "none") {
    const bool sq_sol = solution == "square-trig" || solution == "square-poly";
    if (sq_sol && !square) fail("solution '" + solution + "' requires the square-manufactured preset");
    if (solution == "paper-disk-refsol" && preset != "paper-disk")
      fail("solution 'paper-disk-refsol' requires the paper-disk preset");
    if (!sq_sol && solution != "paper-disk-refsol") fail("unknown solution '" + solution + "'");
  }
  if ((experiment == "convergence" || experiment == "sip") && solution == "none")
    fail(experiment + " needs a manufactured solution");
  if (experiment == "solar") {
    if (preset != "solar") fail("the solar experiment requires preset = \"solar\"");
    if (solution != "none") fail("the solar experiment has no manufactured solution; set solution = \"none\"");
  } else if (preset == "solar") {
    fail("preset 'solar' is only used by the solar experiment");
  }
}

FormOptions RunConfig::form_options() const {
  FormOptions o;
  o.alpha = alpha;
  o.conv_mode = conv_mode;
  o.lambda = lambda;
  o.quad_margin = quad_margin;
  return o;
}

std::string RunConfig::canonical() const {
  std::ostringstream os;
  os << "experiment=" << experiment << "\nmethod=" << method << "\nk=" << k << "\nalpha=" << num(alpha)
     << "\nmode=" << mode_name(conv_mode) << "\nlambda=" << num(lambda) << "\nlambdas=" << join(lambdas)
     << "\nlevels=" << levels << "\ncoarse_n=" << coarse_n << "\npreset=" << preset
     << "\nsolution=" << solution << "\nflow=" << flow << "\nmach=" << num(mach)
     << "\nmach_schedule=" << join(mach_schedule) << "\nbest=" << best
     << "\nref_k_increment=" << ref_k_increment << "\ngrading=" << num(grading) << "\nraster=" << raster
     << "\nsolar_csv=" << solar_csv << "\nquad_margin=" << quad_margin << "\nseed=" << seed
     << "\nweighted=" << weighted << "\n";
  return os.str();
}

namespace {

double get_double(const toml::node& n, const std::string& key) {
  if (auto v = n.value<double>()) return *v;
  throw ConfigError("config key '" + key + "' must be a number");
}

long long get_int(const toml::node& n, const std::string& key) {
  if (n.is_integer()) return *n.value<long long>();
  throw ConfigError("config key '" + key + "' must be an integer");
}

std::string get_string(const toml::node& n, const std::string& key) {
  if (auto v = n.value<std::string>()) return *v;
  throw ConfigError("config key '" + key + "' must be a string");
}

bool get_bool(const toml::node& n, const std::string& key) {
  if (auto v = n.value<bool>()) return *v;
  throw ConfigError("config key '" + key + "' must be a boolean");
}

std::vector<double> get_list(const toml::node& n, const std::string& key) {
  const toml::array* a = n.as_array();
  if (!a) throw ConfigError("config key '" + key + "' must be an array of numbers");
  std::vector<double> v;
  for (const toml::node& e : *a) v.push_back(get_double(e, key));
  return v;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  toml::table tbl;
  try {
    tbl = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "config parse error: " << e.description() << " (line " << e.source().begin.line << ")";
    throw ConfigError(os.str());
  }
  RunConfig c;
  for (auto&& [k, node] : tbl) {
    const std::string key(k.str());
    if (key == "experiment") c.experiment = get_string(node, key);
    else if (key == "method") c.method = get_string(node, key);
    else if (key == "k") c.k = static_cast<int>(get_int(node, key));
    else if (key == "alpha") c.alpha = get_double(node, key);
    else if (key == "mode") {
      const std::string m = get_string(node, key);
      if (m == "lifting") c.conv_mode = ConvMode::Lifting;
      else if (m == "sip") c.conv_mode = ConvMode::Sip;
      else throw ConfigError("mode must be 'lifting' or 'sip'");
    } else if (key == "lambda") c.lambda = get_double(node, key);
    else if (key == "lambdas") c.lambdas = get_list(node, key);
    else if (key == "levels") c.levels = static_cast<int>(get_int(node, key));
    else if (key == "coarse_n") c.coarse_n = static_cast<int>(get_int(node, key));
    else if (key == "preset") c.preset = get_string(node, key);
    else if (key == "solution") c.solution = get_string(node, key);
    else if (key == "flow") c.flow = get_string(node, key);
    else if (key == "mach") c.mach = get_double(node, key);
    else if (key == "mach_schedule") c.mach_schedule = get_list(node, key);
    else if (key == "best") c.best = get_bool(node, key);
    else if (key == "ref_k_increment") c.ref_k_increment = static_cast<int>(get_int(node, key));
    else if (key == "grading") c.grading = get_double(node, key);
    else if (key == "raster") c.raster = static_cast<int>(get_int(node, key));
    else if (key == "solar_csv") c.solar_csv = get_string(node, key);
    else if (key == "dump_dir") c.dump_dir = get_string(node, key);
    else if (key == "out") c.out = get_string(node, key);
    else if (key == "svg") c.svg = get_string(node, key);
    else if (key == "quad_margin") c.quad_margin = static_cast<int>(get_int(node, key));
    else if (key == "seed") {
      const long long s = get_int(node, key);
      if (s < 0) throw ConfigError("seed must be nonnegative");
      c.seed = static_cast<std::uint64_t>(s);
    } else if (key == "weighted") c.weighted = get_bool(node, key);
    else throw ConfigError("unknown config key '" + key + "'");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

double flow_cb_for_mach(const CoefficientSet& set, FlowKind kind, double mach, const Point2& center,
                        double bump_radius, double eta_scale, const std::vector<Point2>& grid) {
  if (mach == 0.0) return 0.0;
  CoefficientSet unit = set;
  unit.b = background_flow(set, kind, 1.0, center, bump_radius, eta_scale);
  const double m1 = mach_number(unit, grid);
  if (!(m1 > 0.0)) throw std::invalid_argument("flow_cb_for_mach: flow vanishes on the sample grid");
  return mach / m1;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Problem {
  CoefficientSet set;
  std::optional<ComplexVectorField> exact;
  ComplexVectorFn f;
  double mach = 0.0;
  double cb = 0.0;
};

bool on_square(const RunConfig& c) { return c.preset == "square-manufactured"; }

CoefficientSet base_coefficients(const RunConfig& c) {
  if (c.preset != "solar") return preset(c.preset);
  if (c.solar_csv.empty()) {
    CoefficientSet s = solar_coefficients(synthetic_solar_model());
    s.metadata["model"] = "built-in synthetic profile";
    return s;
  }
  CoefficientSet s = solar_coefficients(solar_load(c.solar_csv));
  s.metadata["model"] = c.solar_csv;
  return s;
}

Problem make_problem(const RunConfig& c, const CoefficientSet& base, double mach, const ComplexVectorFn& source) {
  Problem p;
  p.set = base;
  const bool sq = on_square(c);
  const std::vector<Point2> grid = sq ? sample_grid_square(200) : sample_grid_disk(200);
  const Point2 center = sq ? Point2(0.5, 0.5) : Point2::Zero();
  const double radius = sq ? 0.5 : 0.0;
  const FlowKind kind = parse_flow_kind(c.flow);
  p.cb = flow_cb_for_mach(base, kind, mach, center, radius, 1.0, grid);
  p.set.b = background_flow(base, kind, p.cb, center, radius);
  p.mach = mach_number(p.set, grid);
  if (c.solution != "none") {
    p.exact = manufactured_solution(c.solution);
    p.f = strong_rhs(*p.exact, p.set);
  } else {
    p.f = source;
  }
  return p;
}

std::shared_ptr<const Mesh> level_mesh(const RunConfig& c, int L) {
  if (on_square(c)) return std::make_shared<const Mesh>(generate_square(c.coarse_n << L));
  if (c.preset == "solar") return std::make_shared<const Mesh>(generate_polygonal_disk(L + 1, c.grading));
  return std::make_shared<const Mesh>(generate_polygonal_disk(L + 1));
}

HdgSpace make_space(const RunConfig& c, std::shared_ptr<const Mesh> mesh, int k) {
  const int red = c.method == "reduced" ? 1 : 0;
  return HdgSpace(std::move(mesh), k, k - red, k - red);
}

struct LevelSolution {
  DiscreteFunction u;
  FacetConstraints constraints;
  double residual = 0.0;
};

LevelSolution solve_level(const HdgSpace& sp, const CoefficientSet& set, const FormOptions& opt,
                          const ComplexVectorFn& f) {
  LevelSolution s;
  s.constraints = build_constraints(sp, set, opt.conv_mode, opt.quad_margin);
  const CondensedSystem sys = assemble_condensed(sp, s.constraints, galbrun_assembler(sp, set, opt, f));
  SolveInfo info;
  const Eigen::VectorXcd y = sparse_solve(sys.S, sys.g, &info);
  s.u = recover_interior(sys, y);
  s.residual = info.residual;
  return s;
}

// The X_n Gram sees facet modes through the lifting; SIP solves use other constraints.
FacetConstraints best_constraints(const HdgSpace& sp, const CoefficientSet& set, const FormOptions& opt,
                                  const FacetConstraints& solved) {
  if (opt.conv_mode == ConvMode::Lifting) return solved;
  return build_constraints(sp, set, ConvMode::Lifting, opt.quad_margin);
}

ResultRow base_row(int L, const HdgSpace& sp, const std::string& method, double mach) {
  ResultRow r;
  r.L = L;
  r.order = sp.k();
  r.method = method;
  r.mach = mach;
  const CostReport cost = cost_report(sp, apply_normal_bc(sp));
  r.ndofs = cost.ndofs;
  r.ncdofs = cost.ncdofs;
  r.nze = cost.nze;
  r.h = sp.mesh().h_max;
  return r;
}

// Rates along each (method, lamb) series in level order.
void fill_eoc(std::vector<ResultRow>& rows) {
  std::map<std::pair<std::string, double>, std::vector<std::size_t>> series;
  for (std::size_t i = 0; i < rows.size(); ++i)
    series[{rows[i].method, rows[i].lamb.value_or(-1.0)}].push_back(i);
  for (const auto& [key, idx] : series) {
    std::vector<double> e, h;
    for (std::size_t i : idx) {
      e.push_back(rows[i].wxerror.value_or(0.0));
      h.push_back(rows[i].h);
    }
    const auto rates = eoc(e, h);
    for (std::size_t j = 0; j < idx.size(); ++j) rows[idx[j]].eoc = rates[j];
  }
}

void add_common_metadata(RunResult& r, const RunConfig& c, const Problem& p) {
  r.metadata.emplace_back("quadrature", "exactness 2k+" + std::to_string(c.quad_margin) + " on elements and facets");
  r.metadata.emplace_back("solver", "equilibrated sparse LU, COLAMD ordering, extended-precision refinement");
  r.metadata.emplace_back("mach_definition", "max |b|/c_s on a 201x201 sample grid (not squared)");
  r.metadata.emplace_back("flow", c.flow);
  r.metadata.emplace_back("omega", num(p.set.omega));
  for (const auto& [k, v] : p.set.metadata) r.metadata.emplace_back("coeff." + k, v);
}

std::string failure_note(int L, const std::string& what, const std::exception& e) {
  return "level " + std::to_string(L) + " " + what + ": " + e.what();
}

}  // namespace

RunResult run_convergence(const RunConfig& c) {
  c.validate();
  RunResult r;
  const CoefficientSet base = base_coefficients(c);
  const Problem p = make_problem(c, base, c.mach, {});
  const FormOptions opt = c.form_options();
  add_common_metadata(r, c, p);
  r.metadata.emplace_back("c_b", num(p.cb));
  for (int L = 0; L < c.levels; ++L) {
    const auto t0 = Clock::now();
    const HdgSpace sp = make_space(c, level_mesh(c, L), c.k);
    try {
      const LevelSolution s = solve_level(sp, p.set, opt, p.f);
      ResultRow row = base_row(L, sp, c.method, p.mach);
      row.wxerror = dn_error(*p.exact, s.u, p.set, c.quad_margin, c.weighted).total;
      row.residual = s.residual;
      row.runtime_s = seconds_since(t0);
      r.rows.push_back(row);
      if (c.best) {
        const auto t1 = Clock::now();
        SolveInfo info;
        const DiscreteFunction pi = best_approx(analytic_reference(*p.exact, p.set), sp, p.set,
                                                best_constraints(sp, p.set, opt, s.constraints), c.quad_margin,
                                                c.weighted, &info);
        ResultRow b = base_row(L, sp, c.method + ":best", p.mach);
        b.wxerror = dn_error(*p.exact, pi, p.set, c.quad_margin, c.weighted).total;
        b.residual = info.residual;
        b.runtime_s = seconds_since(t1);
        r.rows.push_back(b);
      }
    } catch (const SolverError& e) {
      r.failures.push_back(failure_note(L, "solve failed", e));
    } catch (const AssemblyError& e) {
      r.failures.push_back(failure_note(L, "assembly failed", e));
    } catch (const std::runtime_error& e) {
      r.failures.push_back(failure_note(L, "setup failed", e));
    }
  }
  fill_eoc(r.rows);
  return r;
}

RunResult run_mach(const RunConfig& c) {
  c.validate();
  RunResult r;
  const CoefficientSet base = base_coefficients(c);
  const FormOptions opt = c.form_options();
  const int L = c.levels - 1;
  const HdgSpace sp = make_space(c, level_mesh(c, L), c.k);
  bool meta = false;
  for (double mach : mach_list(c)) {
    const auto t0 = Clock::now();
    const Problem p = make_problem(c, base, mach, mach_source());
    if (!meta) {
      add_common_metadata(r, c, p);
      r.metadata.emplace_back("reference", p.exact ? "manufactured solution " + c.solution
                                                   : "full method, level " + std::to_string(L + 1) + ", degree " +
                                                         std::to_string(c.k + c.ref_k_increment));
      meta = true;
    }
    try {
      const LevelSolution s = solve_level(sp, p.set, opt, p.f);
      ReferenceField ref;
      std::optional<LevelSolution> fine;
      std::optional<HdgSpace> fine_space;
      if (p.exact) {
        ref = analytic_reference(*p.exact, p.set);
      } else {
        fine_space.emplace(level_mesh(c, L + 1), c.k + c.ref_k_increment, c.k + c.ref_k_increment,
                           c.k + c.ref_k_increment);
        fine = solve_level(*fine_space, p.set, opt, p.f);
        ref = discrete_reference(fine->u, p.set, c.quad_margin);
      }
      ResultRow row = base_row(L, sp, c.method, p.mach);
      row.wxerror = dn_error(ref, s.u, p.set, c.quad_margin, c.weighted).total;
      row.residual = s.residual;
      row.runtime_s = seconds_since(t0);
      r.rows.push_back(row);
      if (c.best) {
        const auto t1 = Clock::now();
        SolveInfo info;
        const DiscreteFunction pi = best_approx(ref, sp, p.set, best_constraints(sp, p.set, opt, s.constraints),
                                                c.quad_margin, c.weighted, &info);
        ResultRow b = base_row(L, sp, c.method + ":best", p.mach);
        b.wxerror = dn_error(ref, pi, p.set, c.quad_margin, c.weighted).total;
        b.residual = info.residual;
        b.runtime_s = seconds_since(t1);
        r.rows.push_back(b);
      }
    } catch (const SolverError& e) {
      r.failures.push_back(failure_note(L, "solve failed at Mach " + num(mach), e));
    } catch (const AssemblyError& e) {
      r.failures.push_back(failure_note(L, "assembly failed at Mach " + num(mach), e));
    } catch (const std::runtime_error& e) {
      r.failures.push_back(failure_note(L, "setup failed at Mach " + num(mach), e));
    }
  }
  return r;
}

RunResult run_sip_compare(const RunConfig& c) {
  c.validate();
  RunResult r;
  const CoefficientSet base = base_coefficients(c);
  const Problem p = make_problem(c, base, c.mach, {});
  add_common_metadata(r, c, p);
  r.metadata.emplace_back("c_b", num(p.cb));
  const double k2 = static_cast<double>(c.k) * c.k;
  for (int L = 0; L < c.levels; ++L) {
    const HdgSpace sp = make_space(c, level_mesh(c, L), c.k);
    std::vector<std::optional<double>> lams{std::nullopt};
    for (double l : c.lambdas) lams.emplace_back(l);
    for (const auto& lam : lams) {
      const auto t0 = Clock::now();
      FormOptions opt = c.form_options();
      opt.conv_mode = lam ? ConvMode::Sip : ConvMode::Lifting;
      if (lam) opt.lambda = *lam;
      try {
        const LevelSolution s = solve_level(sp, p.set, opt, p.f);
        ResultRow row = base_row(L, sp, lam ? "sip" : "lifting", p.mach);
        if (lam) row.lamb = *lam * k2;
        row.wxerror = dn_error(*p.exact, s.u, p.set, c.quad_margin, c.weighted).total;
        row.residual = s.residual;
        row.runtime_s = seconds_since(t0);
        r.rows.push_back(row);
      } catch (const SolverError& e) {
        r.failures.push_back(failure_note(L, std::string(lam ? "sip" : "lifting") + " solve failed", e));
      } catch (const AssemblyError& e) {
        r.failures.push_back(failure_note(L, std::string(lam ? "sip" : "lifting") + " assembly failed", e));
      } catch (const std::runtime_error& e) {
        r.failures.push_back(failure_note(L, std::string(lam ? "sip" : "lifting") + " setup failed", e));
      }
    }
  }
  fill_eoc(r.rows);
  return r;
}

namespace {

void dump_raster(const std::string& path, const DiscreteFunction& u, int n) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "x,y,re_ux\n";
  const PointLocator loc(u.space.mesh_ptr());
  const Mesh& m = u.space.mesh();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Point2 x(-1.0 + 2.0 * i / (n - 1), -1.0 + 2.0 * j / (n - 1));
      if (x.squaredNorm() > 1.0) continue;
      const int e = loc.locate(x);
      if (e < 0 || m.barycentric(e, x).minCoeff() < -1e-12) continue;
      const Vector2c v = evaluate(u, e, AffineMap(m, e).inverse(x));
      os << num(x.x()) << ',' << num(x.y()) << ',' << num(v(0).real()) << '\n';
    }
}

}  // namespace

RunResult run_solar(const RunConfig& c) {
  c.validate();
  RunResult r;
  const CoefficientSet base = base_coefficients(c);
  const FormOptions opt = c.form_options();
  const int L = c.levels - 1;
  const HdgSpace sp = make_space(c, level_mesh(c, L), c.k);
  if (!c.dump_dir.empty()) std::filesystem::create_directories(c.dump_dir);
  bool meta = false;
  for (double mach : mach_list(c)) {
    const auto t0 = Clock::now();
    const Problem p = make_problem(c, base, mach, solar_source());
    if (!meta) {
      add_common_metadata(r, c, p);
      r.metadata.emplace_back("mesh", "polygonal disk, " + std::to_string(L + 1) + " refinements, grading " +
                                          num(c.grading));
      r.metadata.emplace_back("wxerror", "not available (no exact solution)");
      meta = true;
    }
    try {
      const LevelSolution s = solve_level(sp, p.set, opt, p.f);
      ResultRow row = base_row(L, sp, c.method, p.mach);
      row.residual = s.residual;
      row.runtime_s = seconds_since(t0);
      r.rows.push_back(row);
      if (!c.dump_dir.empty()) {
        char name[64];
        std::snprintf(name, sizeof name, "solar_%s_mach%.3f.csv", c.flow == "1" ? "b1" : "bcs", mach);
        dump_raster((std::filesystem::path(c.dump_dir) / name).string(), s.u, c.raster);
      }
    } catch (const SolverError& e) {
      r.failures.push_back(failure_note(L, "solve failed at Mach " + num(mach), e));
    } catch (const AssemblyError& e) {
      r.failures.push_back(failure_note(L, "assembly failed at Mach " + num(mach), e));
    } catch (const std::runtime_error& e) {
      r.failures.push_back(failure_note(L, "setup failed at Mach " + num(mach), e));
    }
  }
  return r;
}

RunResult run_experiment(const RunConfig& c) {
  c.validate();
  if (c.experiment == "convergence") return run_convergence(c);
  if (c.experiment == "mach") return run_mach(c);
  if (c.experiment == "sip") return run_sip_compare(c);
  return run_solar(c);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

void write_csv(std::ostream& os, const RunConfig& c, const RunResult& r) {
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(c.canonical())));
  os << "# ghdg " << GHDG_VERSION << "\n# experiment: " << c.experiment << "\n# config_hash: " << hash << '\n';
  for (const auto& [k, v] : r.metadata) os << "# " << k << ": " << v << '\n';
  for (const std::string& f : r.failures) os << "# failure: " << f << '\n';
  os << "L,order,method,lamb,Mach,wxerror,ndofs,ncdofs,nze,eoc,runtime_s,residual\n";
  auto opt = [](const std::optional<double>& v) { return v ? num(*v) : std::string(); };
  for (const ResultRow& row : r.rows) {
    char rt[32];
    std::snprintf(rt, sizeof rt, "%.4f", row.runtime_s);
    os << row.L << ',' << row.order << ',' << row.method << ',' << opt(row.lamb) << ',' << num(row.mach) << ','
       << opt(row.wxerror) << ',' << row.ndofs << ',' << row.ncdofs << ',' << row.nze << ',' << opt(row.eoc) << ','
       << rt << ',' << opt(row.residual) << '\n';
  }
}

void write_svg(const std::string& path, const RunResult& r) {
  std::map<std::string, std::vector<std::pair<int, double>>> series;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  int lmax = 1;
  for (const ResultRow& row : r.rows) {
    if (!row.wxerror || !(*row.wxerror > 0.0)) continue;
    const std::string name = row.method + (row.lamb ? " lambda=" + num(*row.lamb) : "");
    const double y = std::log10(*row.wxerror);
    series[name].emplace_back(row.L, y);
    lo = std::min(lo, y);
    hi = std::max(hi, y);
    lmax = std::max(lmax, row.L);
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  const double W = 640, H = 480, m = 60;
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  auto X = [&](double L) { return m + (W - 2 * m) * L / lmax; };
  auto Y = [&](double y) { return H - m - (H - 2 * m) * (y - lo) / (hi - lo); };
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << m << "\" y1=\"" << H - m << "\" x2=\"" << W - m << "\" y2=\"" << H - m
     << "\" stroke=\"black\"/>\n<line x1=\"" << m << "\" y1=\"" << m << "\" x2=\"" << m << "\" y2=\"" << H - m
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 15 << "\">L</text>\n";
  os << "<text x=\"5\" y=\"" << m - 20 << "\">log10 wxerror [" << num(lo) << ", " << num(hi) << "]</text>\n";
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  int i = 0;
  for (const auto& [name, pts] : series) {
    const char* col = colors[i % 6];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" points=\"";
    for (const auto& [L, y] : pts) os << X(L) << ',' << Y(y) << ' ';
    os << "\"/>\n<text x=\"" << W - m - 150 << "\" y=\"" << m + 15 * i << "\" fill=\"" << col << "\">" << name
       << "</text>\n";
    ++i;
  }
  os << "</svg>\n";
}

std::vector<std::string> check_thresholds(const RunConfig& c, const RunResult& r) {
  std::vector<std::string> v = r.failures;
  if (c.experiment == "convergence") {
    const ResultRow* last = nullptr;
    for (const ResultRow& row : r.rows)
      if (row.method == c.method) last = &row;
    const double target = c.k - 0.2;
    if (!last || !last->eoc) v.push_back("convergence: no final rate available");
    else if (*last->eoc < target)
      v.push_back("convergence: final EOC " + num(*last->eoc) + " < " + num(target));
  } else if (c.experiment == "mach") {
    std::map<double, std::pair<double, double>> e;  // mach -> (method, best)
    for (const ResultRow& row : r.rows) {
      if (!row.wxerror) continue;
      (row.method == c.method ? e[row.mach].first : e[row.mach].second) = *row.wxerror;
    }
    for (const auto& [mach, pr] : e)
      if (mach <= 0.05 + 1e-9 && pr.second > 0.0 && pr.first / pr.second > 10.0)
        v.push_back("mach: error/best ratio " + num(pr.first / pr.second) + " > 10 at Mach " + num(mach));
  } else if (c.experiment == "sip") {
    int Lmax = -1;
    for (const ResultRow& row : r.rows) Lmax = std::max(Lmax, row.L);
    double lift = -1.0, smin = std::numeric_limits<double>::infinity(), smax = 0.0;
    for (const ResultRow& row : r.rows) {
      if (row.L != Lmax || !row.wxerror) continue;
      if (row.method == "lifting") lift = *row.wxerror;
      else {
        smin = std::min(smin, *row.wxerror);
        smax = std::max(smax, *row.wxerror);
      }
    }
    if (lift < 0.0 || !(smax > 0.0)) v.push_back("sip: finest level incomplete");
    else {
      if (lift > 2.0 * smin) v.push_back("sip: lifting error " + num(lift) + " > 2 x best SIP " + num(smin));
      if (c.mach > 0.0 && smax / smin <= 1.1)
        v.push_back("sip: SIP errors vary only by factor " + num(smax / smin) + " over lambda");
    }
  } else {
    for (const ResultRow& row : r.rows)
      if (row.residual && *row.residual > 1e-8)
        v.push_back("solar: residual " + num(*row.residual) + " > 1e-8 at Mach " + num(row.mach));
  }
  return v;
}

}  // namespace ghdg
