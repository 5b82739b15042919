#pragma once
// Experiment harness: run configuration, the convergence, Mach, lifting-vs-SIP
// and solar studies, CSV/SVG output and threshold checks.

#include "ghdg/postproc.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ghdg {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string experiment = "convergence";  // convergence | mach | sip | solar
  std::string method = "full";             // full | reduced (facet and lifting degree k-1)
  int k = 1;
  double alpha = 100.0;  // times k^2
  ConvMode conv_mode = ConvMode::Lifting;
  double lambda = 10.0;                       // times k^2, SIP convection penalty
  std::vector<double> lambdas{1.0, 10.0, 100.0};  // sip study, times k^2
  int levels = 5;                             // levels 0 .. levels-1
  int coarse_n = 4;                           // square cells per side at level 0
  std::string preset = "square-manufactured";
  std::string solution = "square-trig";       // manufactured solution, or "none"
  std::string flow = "cs";                    // 1 | cs | cs/rho
  double mach = 0.25;
  std::vector<double> mach_schedule;          // mach/solar studies
  bool best = true;                           // also report the X_n best approximation
  int ref_k_increment = 1;                    // discrete reference: degree k + increment, one level finer
  double grading = 2.0;                       // solar mesh grading toward r = 1
  int raster = 101;                           // solar dump resolution per axis
  std::string solar_csv;                      // empty: built-in synthetic model
  std::string dump_dir;                       // solar raster dumps; empty disables
  std::string out;                            // CSV path; empty writes to stdout
  std::string svg;                            // optional convergence plot
  int quad_margin = 4;
  std::uint64_t seed = 0;
  bool weighted = true;

  // Throws ConfigError on the first inconsistency.
  void validate() const;
  FormOptions form_options() const;
  // Canonical key = value text; the basis of the config hash.
  std::string canonical() const;
};

// Reads a TOML file; unknown keys are rejected.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& toml_text);

struct ResultRow {
  int L = 0;
  int order = 0;
  std::string method;
  std::optional<double> lamb;
  double mach = 0.0;
  std::optional<double> wxerror;
  long ndofs = 0, ncdofs = 0, nze = 0;
  std::optional<double> eoc;
  double runtime_s = 0.0;
  std::optional<double> residual;
  double h = 0.0;  // not written; used for rates
};

struct RunResult {
  std::vector<ResultRow> rows;
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> failures;  // levels aborted by a solver or assembly error
};

RunResult run_convergence(const RunConfig& c);
RunResult run_mach(const RunConfig& c);
RunResult run_sip_compare(const RunConfig& c);
RunResult run_solar(const RunConfig& c);
RunResult run_experiment(const RunConfig& c);

std::uint64_t fnv1a(const std::string& s);
void write_csv(std::ostream& os, const RunConfig& c, const RunResult& r);
void write_svg(const std::string& path, const RunResult& r);

// Threshold violations for --check mode; empty when all pass.
std::vector<std::string> check_thresholds(const RunConfig& c, const RunResult& r);

// c_b giving the requested Mach number for a flow of the given kind (flows are linear in c_b).
double flow_cb_for_mach(const CoefficientSet& set, FlowKind kind, double mach, const Point2& center,
                        double bump_radius, double eta_scale, const std::vector<Point2>& grid);

}  // namespace ghdg
