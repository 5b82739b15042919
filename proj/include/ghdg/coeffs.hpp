#pragma once
// Coefficient fields with exact first and second derivatives, model presets,
// background flows, manufactured solutions and diagnostics.

#include "ghdg/fespace.hpp"
#include "ghdg/jet.hpp"

#include <array>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ghdg {

struct ScalarField {
  std::function<Jet(const Point2&)> jet;

  double value(const Point2& x) const { return jet(x).v; }
  Eigen::Vector2d gradient(const Point2& x) const { return jet(x).g; }
  Eigen::Matrix2d hessian(const Point2& x) const { return jet(x).h; }

  static ScalarField constant(double c) {
    return {[c](const Point2&) { return Jet(c); }};
  }
};

struct VectorField {
  std::function<std::array<Jet, 2>(const Point2&)> jet;

  Eigen::Vector2d value(const Point2& x) const {
    const auto j = jet(x);
    return {j[0].v, j[1].v};
  }
  // Row i is the gradient of component i.
  Eigen::Matrix2d jacobian(const Point2& x) const {
    const auto j = jet(x);
    Eigen::Matrix2d J;
    J.row(0) = j[0].g.transpose();
    J.row(1) = j[1].g.transpose();
    return J;
  }

  static VectorField zero() {
    return {[](const Point2&) { return std::array<Jet, 2>{Jet(0.0), Jet(0.0)}; }};
  }
};

struct ComplexVectorField {
  std::function<std::array<CJet, 2>(const Point2&)> jet;

  Vector2c value(const Point2& x) const {
    const auto j = jet(x);
    return {j[0].v, j[1].v};
  }
  Matrix2c jacobian(const Point2& x) const {
    const auto j = jet(x);
    Matrix2c J;
    J.row(0) = j[0].g.transpose();
    J.row(1) = j[1].g.transpose();
    return J;
  }
  ComplexVectorFn as_function() const {
    return [f = *this](const Point2& x) { return f.value(x); };
  }
};

struct CoefficientSet {
  std::string name;
  ScalarField rho, cs2, p, phi, gamma;
  VectorField b = VectorField::zero();
  double omega = 1.0;
  double rot = 0.0;  // 2D angular speed; rot x u := rot * (-u_y, u_x)
  std::map<std::string, std::string> metadata;
};

// "paper-disk", "square-manufactured" or "solar" (built-in synthetic model).
CoefficientSet preset(const std::string& name);

// Centered Gaussian model coefficients around `center`.
CoefficientSet gaussian_model(const Point2& center);

enum class FlowKind { One, SoundSpeed, SoundSpeedOverRho };
FlowKind parse_flow_kind(const std::string& s);
std::string to_string(FlowKind k);

// b = eta * c_b * (-(y - cy), x - cx) * bump, where bump = (1 - |x-c|^2/R^2)^6
// inside the disk of radius R and 0 outside (R <= 0 disables the bump).
VectorField background_flow(const CoefficientSet& set, FlowKind kind, double c_b,
                            const Point2& center = Point2::Zero(), double bump_radius = 0.0,
                            double eta_scale = 1.0);

// Square preset flow: centered at (0.5, 0.5), bump radius 0.5.
VectorField square_flow(const CoefficientSet& set, FlowKind kind, double c_b);
// c_b for which the square flow of kind SoundSpeed has the requested Mach number
// (closed form: max_r r (1 - r^2/R^2)^6 = R/sqrt(13) (12/13)^6).
double square_cs_flow_cb(double mach);

std::vector<Point2> sample_grid_square(int n);
std::vector<Point2> sample_grid_disk(int n);

double mach_number(const CoefficientSet& set, const std::vector<Point2>& grid);

struct ThetaReport {
  double C_m = 0.0;
  double theta = 0.0;
  double sup_lambda_over_gamma = 0.0;  // before clipping at zero
};
ThetaReport theta_diagnostic(const CoefficientSet& set, const std::vector<Point2>& grid);

struct MachBoundReport {
  double mach = 0.0;
  double mach_squared = 0.0;
  double threshold = 0.0;  // 1 / (C (1 + tan^2 theta))
  bool satisfied = false;
};
MachBoundReport mach_bound_report(const CoefficientSet& set, double C_const,
                                  const std::vector<Point2>& grid);

// "paper-disk-refsol", "square-poly", "square-trig".
ComplexVectorField manufactured_solution(const std::string& name);

// Left side of the strong damped Galbrun operator applied to u.
ComplexVectorFn strong_rhs(const ComplexVectorField& u, const CoefficientSet& set);

// Right sides used by the robustness and solar studies.
ComplexVectorFn mach_source();
ComplexVectorFn solar_source();

class SolarLoadError : public std::runtime_error {
 public:
  enum class Kind { Missing, Malformed, NonMonotone, NonPositive };
  SolarLoadError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Radial monotone cubic model read from CSV (radius, soundspeed, density[, pressure]).
struct SolarModel {
  std::vector<double> radius, cs, rho, p;
  bool has_pressure = false;
};
SolarModel solar_load(const std::string& path);
SolarModel synthetic_solar_model(int samples = 400);
void write_solar_csv(const std::string& path, const SolarModel& m);
CoefficientSet solar_coefficients(const SolarModel& m);

// Shape-preserving (Fritsch-Carlson) cubic interpolant with value and two derivatives.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y, bool zero_left_slope = false);
  // Returns {f, f', f''}; constant extrapolation of the end slopes outside the range.
  std::array<double, 3> eval(double x) const;

 private:
  std::vector<double> x_, y_, d_;
};

}  // namespace ghdg
