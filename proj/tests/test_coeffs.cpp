#include "support.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace ghdg;
using namespace ghdg::test;

namespace {

void check_scalar_fd(const ScalarField& f, const Point2& x) {
  auto val = [&](const Point2& p) { return f.value(p); };
  const Eigen::Vector2d g = fd_gradient(val, x);
  CHECK((f.gradient(x) - g).norm() <= 1e-6 * std::max(1.0, g.norm()));
  Eigen::Matrix2d H;
  for (int i = 0; i < 2; ++i) {
    auto gi = [&](const Point2& p) { return f.gradient(p)(i); };
    H.row(i) = fd_gradient(gi, x).transpose();
  }
  CHECK((f.hessian(x) - H).norm() <= 1e-4 * std::max(1.0, H.norm()));
}

void check_vector_fd(const VectorField& b, const Point2& x) {
  for (int c = 0; c < 2; ++c) {
    auto bc = [&](const Point2& p) { return b.value(p)(c); };
    const Eigen::Vector2d g = fd_gradient(bc, x);
    CHECK((b.jacobian(x).row(c).transpose() - g).norm() <= 1e-6 * std::max(1.0, g.norm()));
  }
}

double div_rho_b(const CoefficientSet& s, const Point2& x) {
  return s.rho.gradient(x).dot(s.b.value(x)) + s.rho.value(x) * s.b.jacobian(x).trace();
}

ComplexVectorField constant_field(const Vector2c& c) {
  return {[c](const Point2&) { return std::array<CJet, 2>{CJet(c(0)), CJet(c(1))}; }};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("ghdg_test_" + name)).string();
}

void write_text(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("paper-disk preset values") {
  const CoefficientSet s = preset("paper-disk");
  CHECK(s.omega == doctest::Approx(0.78 * 2 * M_PI));
  CHECK(s.gamma.value({0.3, -0.2}) == doctest::Approx(0.1));
  CHECK(s.rot == 0.0);
  const double r0 = std::sqrt(10.0 / M_PI);
  CHECK(s.rho.value({0, 0}) == doctest::Approx(r0).epsilon(1e-15));
  CHECK(s.cs2.value({0, 0}) == doctest::Approx(1.44 + 0.25 * r0).epsilon(1e-15));
  CHECK(s.p.gradient({0, 0}).norm() < 1e-15);
  CHECK_THROWS_AS(preset("nope"), std::invalid_argument);
}

TEST_CASE("coefficient derivatives agree with finite differences") {
  for (const char* name : {"paper-disk", "square-manufactured", "solar"}) {
    CoefficientSet s = preset(name);
    if (std::string(name) != "solar") s.b = background_flow(s, FlowKind::SoundSpeedOverRho, 0.3);
    for (int t = 0; t < 10; ++t) {
      const Point2 x = std::string(name) == "square-manufactured" ? random_point_in_square()
                                                                 : Point2(uniform(-0.6, 0.6), uniform(-0.6, 0.6));
      for (const ScalarField* f : {&s.rho, &s.cs2, &s.p, &s.phi, &s.gamma}) check_scalar_fd(*f, x);
      check_vector_fd(s.b, x);
    }
  }
}

TEST_CASE("coefficients are positive and flows conserve mass") {
  for (const char* name : {"paper-disk", "square-manufactured"}) {
    CoefficientSet s = preset(name);
    const bool sq = std::string(name) == "square-manufactured";
    const std::vector<Point2> grid = sq ? sample_grid_square(21) : sample_grid_disk(21);
    for (const Point2& x : grid) {
      CHECK(s.rho.value(x) > 0.0);
      CHECK(s.cs2.value(x) > 0.0);
      CHECK(s.gamma.value(x) > 0.0);
    }
    for (FlowKind kind : {FlowKind::One, FlowKind::SoundSpeed, FlowKind::SoundSpeedOverRho}) {
      s.b = sq ? square_flow(s, kind, 0.7) : background_flow(s, kind, 0.7);
      for (int t = 0; t < 1000; ++t) {
        const Point2 x = sq ? random_point_in_square(0.0) : Point2(uniform(-0.7, 0.7), uniform(-0.7, 0.7));
        CHECK(std::abs(div_rho_b(s, x)) <= 1e-10);
      }
    }
    // Tangential on the boundary.
    if (sq) {
      for (double t = 0.0; t <= 1.0; t += 0.125) {
        CHECK(s.b.value({t, 0.0}).y() == doctest::Approx(0.0));
        CHECK(s.b.value({1.0, t}).x() == doctest::Approx(0.0));
      }
    } else {
      for (int i = 0; i < 16; ++i) {
        const Point2 x(std::cos(i * M_PI / 8), std::sin(i * M_PI / 8));
        CHECK(std::abs(s.b.value(x).dot(x)) < 1e-14);
      }
    }
  }
}

TEST_CASE("background flow and Mach number examples") {
  CoefficientSet s = preset("paper-disk");
  s.b = background_flow(s, FlowKind::One, 0.8);
  CHECK(s.b.value({0, 0}).norm() == 0.0);
  CHECK(mach_number(preset("paper-disk"), sample_grid_disk(31)) == 0.0);

  CoefficientSet unit = s;
  unit.cs2 = ScalarField::constant(1.0);
  unit.b = background_flow(unit, FlowKind::One, 0.8);
  CHECK(mach_number(unit, sample_grid_disk(41)) == doctest::Approx(0.8).epsilon(1e-3));

  CoefficientSet c2 = s;
  c2.cs2 = ScalarField::constant(4.0);
  c2.b = {[](const Point2&) { return std::array<Jet, 2>{Jet(1.0), Jet(0.0)}; }};
  CHECK(mach_number(c2, sample_grid_square(5)) == doctest::Approx(0.5));

  s.b = background_flow(s, FlowKind::SoundSpeed, 0.5);
  CHECK(mach_number(s, sample_grid_disk(81)) == doctest::Approx(0.5).epsilon(5e-3));

  CoefficientSet sq = preset("square-manufactured");
  for (double m : {0.05, 0.25, 0.45}) {
    sq.b = square_flow(sq, FlowKind::SoundSpeed, square_cs_flow_cb(m));
    CHECK(mach_number(sq, sample_grid_square(201)) == doctest::Approx(m).epsilon(1e-3));
  }
}

TEST_CASE("theta diagnostic") {
  CoefficientSet s = preset("paper-disk");
  s.p = ScalarField::constant(1.0);
  s.phi = ScalarField::constant(0.0);
  ThetaReport r = theta_diagnostic(s, sample_grid_disk(21));
  CHECK(r.C_m == 0.0);
  CHECK(r.theta == 0.0);

  s.phi = {[](const Point2& x) {
    const Jet a = jet_x(x.x()), b = jet_y(x.y());
    return 0.5 * (a * a + b * b);
  }};
  s.gamma = ScalarField::constant(1.0);
  s.omega = 1.0;
  r = theta_diagnostic(s, sample_grid_disk(21));
  CHECK(r.C_m == doctest::Approx(1.0));
  CHECK(r.theta == doctest::Approx(M_PI / 4));

  const ThetaReport disk = theta_diagnostic(preset("paper-disk"), sample_grid_disk(41));
  CHECK(disk.C_m >= 0.0);
  CHECK(disk.theta >= 0.0);
  CHECK(disk.theta < M_PI / 2);
  CHECK(std::isfinite(disk.sup_lambda_over_gamma));

  s.gamma = ScalarField::constant(0.0);
  CHECK_THROWS_AS(theta_diagnostic(s, sample_grid_disk(5)), std::invalid_argument);
}

TEST_CASE("Mach bound report") {
  CoefficientSet s = preset("paper-disk");
  CHECK(mach_bound_report(s, 1e6, sample_grid_disk(11)).satisfied);

  CoefficientSet u = s;
  u.p = ScalarField::constant(1.0);
  u.phi = ScalarField::constant(0.0);
  u.cs2 = ScalarField::constant(1.0);
  u.b = {[](const Point2&) { return std::array<Jet, 2>{Jet(0.5), Jet(0.0)}; }};
  MachBoundReport r = mach_bound_report(u, 1.0, sample_grid_disk(11));
  CHECK(r.mach_squared == doctest::Approx(0.25));
  CHECK(r.threshold == doctest::Approx(1.0));
  CHECK(r.satisfied);

  u.phi = {[](const Point2& x) {
    const Jet a = jet_x(x.x()), b = jet_y(x.y());
    return 0.5 * (a * a + b * b);
  }};
  u.gamma = ScalarField::constant(1.0);
  u.omega = 1.0;
  u.b = {[](const Point2&) { return std::array<Jet, 2>{Jet(0.8), Jet(0.0)}; }};
  r = mach_bound_report(u, 1.0, sample_grid_disk(11));
  CHECK(r.threshold == doctest::Approx(0.5));
  CHECK(r.mach_squared == doctest::Approx(0.64));
  CHECK_FALSE(r.satisfied);
}

TEST_CASE("manufactured solutions") {
  const ComplexVectorField d = manufactured_solution("paper-disk-refsol");
  for (int i = 0; i < 8; ++i) CHECK(d.value({std::cos(i * 0.7), std::sin(i * 0.7)}).norm() < 1e-14);

  for (const char* name : {"square-poly", "square-trig"}) {
    const ComplexVectorField u = manufactured_solution(name);
    for (double t = 0.0; t <= 1.0; t += 0.1) {
      CHECK(std::abs(u.value({0.0, t})(0)) < 1e-15);
      CHECK(std::abs(u.value({1.0, t})(0)) < 1e-15);
      CHECK(std::abs(u.value({t, 0.0})(1)) < 1e-15);
      CHECK(std::abs(u.value({t, 1.0})(1)) < 1e-15);
    }
  }
  const ComplexVectorField p = manufactured_solution("square-poly");
  const Point2 x(0.3, 0.6);
  const cplx q = 0.3 * 0.7 * 0.6 * 0.4;
  CHECK(std::abs(p.value(x)(0) - q * cplx(1, 1)) < 1e-15);
  CHECK(std::abs(p.value(x)(1) + q * cplx(1, 1)) < 1e-15);

  for (const char* name : {"paper-disk-refsol", "square-poly", "square-trig"}) {
    const ComplexVectorField u = manufactured_solution(name);
    for (int t = 0; t < 20; ++t) {
      const Point2 y = random_point_in_square(0.1);
      for (int c = 0; c < 2; ++c)
        for (int part = 0; part < 2; ++part) {
          auto f = [&](const Point2& z) {
            const cplx v = u.value(z)(c);
            return part == 0 ? v.real() : v.imag();
          };
          const Eigen::Vector2d g = fd_gradient(f, y);
          const Eigen::Vector2d re = u.jacobian(y).row(c).real().transpose();
          const Eigen::Vector2d im = u.jacobian(y).row(c).imag().transpose();
          const Eigen::Vector2d jac = part == 0 ? re : im;
          CHECK((jac - g).norm() <= 1e-6 * std::max(1.0, g.norm()));
        }
    }
  }
  CHECK_THROWS_AS(manufactured_solution("nope"), std::invalid_argument);
}

TEST_CASE("strong right-hand side") {
  CoefficientSet s = preset("paper-disk");
  s.p = ScalarField::constant(2.0);
  s.phi = ScalarField::constant(0.0);
  const Vector2c c(cplx(1.0, -0.5), cplx(0.25, 2.0));
  const ComplexVectorFn f = strong_rhs(constant_field(c), s);
  for (int t = 0; t < 10; ++t) {
    const Point2 x(uniform(-0.7, 0.7), uniform(-0.7, 0.7));
    const cplx factor = -(s.omega * s.omega + cplx(0.0, s.omega * s.gamma.value(x))) * s.rho.value(x);
    CHECK((f(x) - factor * c).norm() <= 1e-12 * c.norm() * std::abs(factor));
  }
  CHECK(strong_rhs(constant_field(Vector2c::Zero()), preset("paper-disk"))({0.2, 0.1}).norm() == 0.0);

  // Linearity with the full operator and a nonzero flow.
  CoefficientSet full = preset("square-manufactured");
  full.b = square_flow(full, FlowKind::SoundSpeed, 0.4);
  full.rot = 0.3;
  const ComplexVectorField u = manufactured_solution("square-trig"), v = manufactured_solution("square-poly");
  const cplx a(0.7, -0.2), b(-1.1, 0.4);
  const ComplexVectorField w{[&](const Point2& x) {
    const auto ju = u.jet(x), jv = v.jet(x);
    return std::array<CJet, 2>{CJet(a) * ju[0] + CJet(b) * jv[0], CJet(a) * ju[1] + CJet(b) * jv[1]};
  }};
  const ComplexVectorFn fu = strong_rhs(u, full), fv = strong_rhs(v, full), fw = strong_rhs(w, full);
  for (int t = 0; t < 20; ++t) {
    const Point2 x = random_point_in_square();
    const Vector2c lin = a * fu(x) + b * fv(x);
    CHECK((fw(x) - lin).norm() <= 1e-10 * std::max(1.0, lin.norm()));
  }
}

TEST_CASE("monotone cubic interpolation") {
  std::vector<double> r, y;
  for (int i = 0; i < 100; ++i) {
    r.push_back(i / 99.0);
    y.push_back(std::exp(-r.back()));
  }
  const MonotoneCubic m(r, y);
  for (int i = 0; i + 1 < 100; ++i) {
    const double x = 0.5 * (r[i] + r[i + 1]);
    CHECK(std::abs(m.eval(x)[0] - std::exp(-x)) <= 1e-6);
  }
  // Shape preservation on steep data.
  const MonotoneCubic step({0, 1, 2, 3}, {0, 0, 1, 1});
  for (double x = 0.0; x <= 3.0; x += 0.01) {
    CHECK(step.eval(x)[0] >= -1e-15);
    CHECK(step.eval(x)[0] <= 1.0 + 1e-15);
  }
}

TEST_CASE("solar model loading") {
  const std::string good = temp_path("good.csv");
  std::string text = "radius,soundspeed,density\n";
  for (int i = 0; i < 100; ++i) {
    const double rr = i / 99.0;
    text += std::to_string(rr) + "," + std::to_string(2.0 - rr) + "," + std::to_string(std::exp(-rr)) + "\n";
  }
  write_text(good, text);
  const SolarModel m = solar_load(good);
  CHECK(m.radius.size() == 100);
  CHECK_FALSE(m.has_pressure);
  const CoefficientSet s = solar_coefficients(m);
  CHECK(s.gamma.value({0.1, 0.1}) == doctest::Approx(s.omega / 100));
  CHECK(s.omega == doctest::Approx(0.003 * 2 * M_PI * m.radius.back()));
  for (int i = 0; i < 10; ++i) {
    const double rr = (i + 0.5) / 10.0;
    CHECK(std::abs(s.rho.value({rr, 0.0}) - std::exp(-rr)) <= 1e-5);
    CHECK(s.rho.value({0.0, rr}) > 0.0);
    CHECK(s.cs2.value({rr, 0.0}) > 0.0);
  }

  using K = SolarLoadError::Kind;
  auto kind_of = [](const std::string& path) {
    try {
      solar_load(path);
    } catch (const SolarLoadError& e) {
      return static_cast<int>(e.kind());
    }
    return -1;
  };
  CHECK(kind_of(temp_path("missing_does_not_exist.csv")) == static_cast<int>(K::Missing));
  const std::string dup = temp_path("dup.csv");
  write_text(dup, "radius,soundspeed,density\n0.1,1,1\n0.1,1,1\n0.2,1,1\n");
  CHECK(kind_of(dup) == static_cast<int>(K::NonMonotone));
  const std::string neg = temp_path("neg.csv");
  write_text(neg, "radius,soundspeed,density\n0.1,1,1\n0.2,1,-1\n");
  CHECK(kind_of(neg) == static_cast<int>(K::NonPositive));
  const std::string bad = temp_path("bad.csv");
  write_text(bad, "radius,soundspeed,density\n0.1,1,1\n0.2,abc,1\n");
  CHECK(kind_of(bad) == static_cast<int>(K::Malformed));
  write_text(bad, "radius,soundspeed,density\n0.1,1\n");
  CHECK(kind_of(bad) == static_cast<int>(K::Malformed));

  const std::string round = temp_path("round.csv");
  const SolarModel syn = synthetic_solar_model(50);
  write_solar_csv(round, syn);
  const SolarModel back = solar_load(round);
  CHECK(back.radius == syn.radius);
  CHECK(back.rho == syn.rho);
  for (const std::string& p : {good, dup, neg, bad, round}) std::remove(p.c_str());
}
