#include "ghdg/coeffs.hpp"

#include "ghdg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ghdg {

namespace {

const cplx I(0.0, 1.0);

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

CoefficientSet gaussian_model(const Point2& center) {
  CoefficientSet s;
  const double cx = center.x(), cy = center.y();
  auto rho = [cx, cy](const Point2& x) {
    const Jet X = jet_x(x.x()) - cx, Y = jet_y(x.y()) - cy;
    return std::sqrt(10.0 / M_PI) * exp(-10.0 * (X * X + Y * Y));
  };
  s.rho = {rho};
  s.cs2 = {[rho](const Point2& x) { return 1.44 + 0.25 * rho(x); }};
  s.p = {[rho](const Point2& x) {
    const Jet r = rho(x);
    return 1.44 * r + 0.08 * r * r;
  }};
  s.phi = ScalarField::constant(0.0);
  s.gamma = ScalarField::constant(0.1);
  s.omega = 0.78 * 2.0 * M_PI;
  s.rot = 0.0;
  s.metadata["center"] = fmt(cx) + " " + fmt(cy);
  return s;
}

CoefficientSet preset(const std::string& name) {
  if (name == "paper-disk") {
    CoefficientSet s = gaussian_model(Point2::Zero());
    s.name = name;
    s.metadata["domain"] = "polygonal unit disk";
    return s;
  }
  if (name == "square-manufactured") {
    CoefficientSet s = gaussian_model(Point2(0.5, 0.5));
    s.name = name;
    s.metadata["domain"] = "unit square";
    return s;
  }
  if (name == "solar") {
    CoefficientSet s = solar_coefficients(synthetic_solar_model());
    s.metadata["model"] = "built-in synthetic profile";
    return s;
  }
  throw std::invalid_argument("unknown coefficient preset '" + name + "'");
}

FlowKind parse_flow_kind(const std::string& s) {
  if (s == "1" || s == "one") return FlowKind::One;
  if (s == "cs") return FlowKind::SoundSpeed;
  if (s == "cs/rho" || s == "cs_over_rho") return FlowKind::SoundSpeedOverRho;
  throw std::invalid_argument("unknown flow kind '" + s + "' (expected 1, cs, cs/rho)");
}

std::string to_string(FlowKind k) {
  switch (k) {
    case FlowKind::One: return "1";
    case FlowKind::SoundSpeed: return "cs";
    default: return "cs/rho";
  }
}

VectorField background_flow(const CoefficientSet& set, FlowKind kind, double c_b, const Point2& center,
                            double bump_radius, double eta_scale) {
  if (c_b < 0.0) throw std::invalid_argument("background_flow: c_b must be nonnegative");
  const ScalarField rho = set.rho, cs2 = set.cs2;
  const double cx = center.x(), cy = center.y(), R = bump_radius;
  return {[=](const Point2& x) {
    const Jet X = jet_x(x.x()) - cx, Y = jet_y(x.y()) - cy;
    Jet eta(eta_scale * c_b);
    if (kind == FlowKind::SoundSpeed) eta = eta * sqrt(cs2.jet(x));
    if (kind == FlowKind::SoundSpeedOverRho) eta = eta * sqrt(cs2.jet(x)) / rho.jet(x);
    if (R > 0.0) {
      const Jet s = (X * X + Y * Y) / (R * R);
      if (s.v >= 1.0) return std::array<Jet, 2>{Jet(0.0), Jet(0.0)};
      eta = eta * pow(1.0 - s, 6);
    }
    return std::array<Jet, 2>{-eta * Y, eta * X};
  }};
}

VectorField square_flow(const CoefficientSet& set, FlowKind kind, double c_b) {
  return background_flow(set, kind, c_b, Point2(0.5, 0.5), 0.5);
}

double square_cs_flow_cb(double mach) {
  const double R = 0.5;
  return mach / (R / std::sqrt(13.0) * std::pow(12.0 / 13.0, 6));
}

std::vector<Point2> sample_grid_square(int n) {
  std::vector<Point2> g;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) g.emplace_back(double(i) / n, double(j) / n);
  return g;
}

std::vector<Point2> sample_grid_disk(int n) {
  std::vector<Point2> g;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      const Point2 p(-1.0 + 2.0 * i / n, -1.0 + 2.0 * j / n);
      if (p.squaredNorm() < 1.0) g.push_back(p);
    }
  for (int i = 0; i < 4 * n; ++i) {
    const double a = 2.0 * M_PI * i / (4 * n);
    g.emplace_back(std::cos(a), std::sin(a));
  }
  return g;
}

double mach_number(const CoefficientSet& set, const std::vector<Point2>& grid) {
  if (grid.empty()) throw std::invalid_argument("mach_number: empty sample grid");
  double m = 0.0;
  for (const Point2& x : grid) m = std::max(m, set.b.value(x).norm() / std::sqrt(set.cs2.value(x)));
  return m;
}

ThetaReport theta_diagnostic(const CoefficientSet& set, const std::vector<Point2>& grid) {
  if (grid.empty()) throw std::invalid_argument("theta_diagnostic: empty sample grid");
  ThetaReport r;
  r.sup_lambda_over_gamma = -std::numeric_limits<double>::infinity();
  for (const Point2& x : grid) {
    const double g = set.gamma.value(x);
    if (!(g > 0.0)) throw std::invalid_argument("theta_diagnostic: gamma must be positive");
    const Eigen::Matrix2d m = -set.p.hessian(x) / set.rho.value(x) + set.phi.hessian(x);
    r.sup_lambda_over_gamma = std::max(r.sup_lambda_over_gamma, sym2_eigs(m).first / g);
  }
  r.C_m = std::max(0.0, r.sup_lambda_over_gamma);
  r.theta = std::atan(r.C_m / std::abs(set.omega));
  return r;
}

MachBoundReport mach_bound_report(const CoefficientSet& set, double C_const,
                                  const std::vector<Point2>& grid) {
  if (!(C_const > 0.0)) throw std::invalid_argument("mach_bound_report: constant must be positive");
  MachBoundReport r;
  r.mach = mach_number(set, grid);
  r.mach_squared = r.mach * r.mach;
  const double t = std::tan(theta_diagnostic(set, grid).theta);
  r.threshold = 1.0 / (C_const * (1.0 + t * t));
  r.satisfied = r.mach_squared < r.threshold;
  return r;
}

ComplexVectorField manufactured_solution(const std::string& name) {
  if (name == "paper-disk-refsol") {
    return {[](const Point2& x) {
      const double alpha = std::log(1e9);
      const Jet X = jet_x(x.x()), Y = jet_y(x.y());
      const Jet r2 = X * X + Y * Y;
      const Jet rho = std::sqrt(10.0 / M_PI) * exp(-10.0 * r2);
      const Jet g = std::sqrt(alpha / M_PI) * exp(-alpha * r2);
      const CJet s = (sin(r2) * sin(r2 - 1.0) * g / rho).cast<cplx>();
      return std::array<CJet, 2>{cplx(1, 1) * s, cplx(-1, -1) * s};
    }};
  }
  if (name == "square-poly") {
    return {[](const Point2& x) {
      const Jet X = jet_x(x.x()), Y = jet_y(x.y());
      const CJet q = (X * (1.0 - X) * Y * (1.0 - Y)).cast<cplx>();
      return std::array<CJet, 2>{cplx(1, 1) * q, cplx(-1, -1) * q};
    }};
  }
  if (name == "square-trig") {
    return {[](const Point2& x) {
      const Jet X = jet_x(x.x()), Y = jet_y(x.y());
      const CJet ux = (sin(M_PI * X) * exp(Y)).cast<cplx>();
      const CJet uy = (sin(M_PI * Y) * exp(-X)).cast<cplx>();
      return std::array<CJet, 2>{cplx(1, 1) * ux, cplx(1, -2) * uy};
    }};
  }
  throw std::invalid_argument("unknown manufactured solution '" + name + "'");
}

ComplexVectorFn strong_rhs(const ComplexVectorField& u, const CoefficientSet& set) {
  return [u, set](const Point2& x) -> Vector2c {
    const auto uj = u.jet(x);
    const auto bj = set.b.jet(x);
    const Jet rho = set.rho.jet(x), cs2 = set.cs2.jet(x), p = set.p.jet(x), phi = set.phi.jet(x);
    const double gamma = set.gamma.value(x);
    const double om = set.omega, rot = set.rot;

    const Vector2c uv(uj[0].v, uj[1].v);
    Matrix2c Ju;
    Ju.row(0) = uj[0].g.transpose();
    Ju.row(1) = uj[1].g.transpose();
    const Eigen::Vector2d b(bj[0].v, bj[1].v);
    Eigen::Matrix2d Jb;
    Jb.row(0) = bj[0].g.transpose();
    Jb.row(1) = bj[1].g.transpose();
    const Eigen::Vector2cd bc = b.cast<cplx>();
    auto cross = [rot](const Vector2c& v) { return Vector2c(-rot * v(1), rot * v(0)); };

    // d_b u and d_b(d_b u) = b^T H_i b + (J_u J_b b)_i.
    const Vector2c dbu = Ju * bc;
    Vector2c dbdbu;
    for (int i = 0; i < 2; ++i) dbdbu(i) = bc.dot(uj[i].h * bc);  // b real: dot conj is harmless
    dbdbu += Ju * (Jb * b).cast<cplx>();

    const Vector2c Wu = om * uv + I * dbu + I * cross(uv);
    const Vector2c dbWu = om * dbu + I * dbdbu + I * cross(dbu);
    const Vector2c WWu = om * Wu + I * dbWu + I * cross(Wu);

    const cplx divu = Ju(0, 0) + Ju(1, 1);
    const Vector2c grad_divu(uj[0].h(0, 0) + uj[1].h(0, 1), uj[0].h(1, 0) + uj[1].h(1, 1));
    const Jet sigma = rho * cs2;
    const Vector2c grad_sigma_div = sigma.v * grad_divu + divu * sigma.g.cast<cplx>();
    const Eigen::Vector2cd gp = p.g.cast<cplx>();
    const Eigen::Matrix2cd Hp = p.h.cast<cplx>();
    const Vector2c grad_gp_u = Hp * uv + Ju.transpose() * gp;

    return -rho.v * WWu - grad_sigma_div + divu * gp - grad_gp_u +
           (Hp - rho.v * phi.h.cast<cplx>()) * uv - I * om * gamma * rho.v * uv;
  };
}

ComplexVectorFn mach_source() {
  return [](const Point2& x) {
    const double r2 = (x.x() - 0.35) * (x.x() - 0.35) + (x.y() - 0.35) * (x.y() - 0.35);
    return Vector2c(0.5 * std::sqrt(55.0 / M_PI) * std::exp(-55.0 * r2), 0.0);
  };
}

ComplexVectorFn solar_source() {
  return [](const Point2& x) {
    const double a = std::log(1e6) / (0.1 * 0.1);
    const double r2 = (x.x() - 0.5) * (x.x() - 0.5) + (x.y() - 0.5) * (x.y() - 0.5);
    return Vector2c(1e7 * std::sqrt(a / M_PI) * std::exp(-a * r2), 0.0);
  };
}

}  // namespace ghdg
