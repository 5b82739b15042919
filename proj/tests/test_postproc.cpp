#include "support.hpp"

#include <doctest.h>

using namespace ghdg;
using namespace ghdg::test;

namespace {

VectorField constant_flow(double bx, double by) {
  return {[bx, by](const Point2&) { return std::array<Jet, 2>{Jet(bx), Jet(by)}; }};
}

CoefficientSet bump_flow_set(double mach = 0.25) {
  CoefficientSet s = preset("square-manufactured");
  s.b = square_flow(s, FlowKind::SoundSpeed, square_cs_flow_cb(mach));
  return s;
}

// Quadratic field tangent to the boundary of the unit square.
ComplexVectorField quadratic_field() {
  return {[](const Point2& x) {
    const CJet a = jet_x(x.x()).cast<cplx>(), b = jet_y(x.y()).cast<cplx>();
    return std::array<CJet, 2>{a * (1.0 - a) * cplx(1.0, 0.5), b * (1.0 - b) * cplx(0.0, 1.0)};
  }};
}

ReferenceField combine_refs(const ReferenceField& f, const ReferenceField& g, cplx a, cplx b) {
  return [=](const Point2& x) {
    const ReferenceSample p = f(x), q = g(x);
    return ReferenceSample{a * p.u + b * q.u, a * p.div + b * q.div, a * p.db + b * q.db};
  };
}

double rel_inf(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1e-300, b.cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("eoc examples") {
  auto r = eoc({1.0, 0.25}, {1.0, 0.5});
  REQUIRE(r.size() == 2);
  CHECK_FALSE(r[0].has_value());
  CHECK(*r[1] == doctest::Approx(2.0));
  r = eoc({0.3, 0.3, 0.3}, {1.0, 0.5, 0.25});
  CHECK(*r[1] == 0.0);
  CHECK(*r[2] == 0.0);
  std::vector<double> h{0.4, 0.2, 0.1, 0.05}, e;
  for (double hi : h) e.push_back(7.0 * hi * hi * hi);
  r = eoc(e, h);
  for (int i = 1; i < 4; ++i) CHECK(*r[i] == doctest::Approx(3.0).epsilon(1e-12));
  r = eoc({1.0, 0.0, 0.5}, {1.0, 0.5, 0.25});
  CHECK_FALSE(r[1].has_value());
  CHECK_FALSE(r[2].has_value());
}

TEST_CASE("error of a representable solution vanishes") {
  const CoefficientSet s = bump_flow_set();
  const ComplexVectorField u = manufactured_solution("square-poly");
  const HdgSpace sp(square(3), 4, 4, 4);
  const DiscreteFunction iu = interpolate(u.as_function(), sp);
  const ErrorBreakdown e = dn_error(u, iu, s);
  CHECK(e.total <= 1e-12);
  const double sum = e.div_term * e.div_term + e.l2_term * e.l2_term + e.conv_term * e.conv_term +
                     e.jump_term * e.jump_term;
  CHECK(e.total * e.total == doctest::Approx(sum).epsilon(1e-14));
}

TEST_CASE("error of the zero function is the weighted norm") {
  const CoefficientSet s = bump_flow_set(0.5);
  const ComplexVectorField u = manufactured_solution("square-trig");
  const HdgSpace sp(square(4), 2, 2, 2);
  const ErrorBreakdown e = dn_error(u, DiscreteFunction(sp), s);
  double div2 = 0.0, l22 = 0.0, conv2 = 0.0;
  for (int t = 0; t < sp.mesh().num_elements(); ++t) {
    const ElementOperators o = element_operators(sp, s, t);
    for (int q = 0; q < o.nq; ++q) {
      const Point2& x = o.x[q];
      const Matrix2c J = u.jacobian(x);
      const double rho = s.rho.value(x);
      div2 += o.w(q) * s.cs2.value(x) * rho * std::norm(J.trace());
      l22 += o.w(q) * u.value(x).squaredNorm();
      conv2 += o.w(q) * rho * (J * s.b.value(x).cast<cplx>()).squaredNorm();
    }
  }
  CHECK(e.div_term == doctest::Approx(std::sqrt(div2)).epsilon(1e-12));
  CHECK(e.l2_term == doctest::Approx(std::sqrt(l22)).epsilon(1e-12));
  CHECK(e.conv_term == doctest::Approx(std::sqrt(conv2)).epsilon(1e-12));
  CHECK(e.jump_term == 0.0);
  CHECK(e.total == doctest::Approx(std::sqrt(div2 + l22 + conv2)).epsilon(1e-12));
}

TEST_CASE("interpolation error decays at rate k") {
  const CoefficientSet s = bump_flow_set();
  const ComplexVectorField u = manufactured_solution("square-trig");
  for (int k = 1; k <= 2; ++k) {
    std::vector<double> err, h;
    for (int n : {4, 8, 16}) {
      const HdgSpace sp(square(n), k, k, k);
      err.push_back(dn_error(u, interpolate(u.as_function(), sp), s).total);
      h.push_back(sp.mesh().h_max);
    }
    const auto r = eoc(err, h);
    CHECK(*r.back() >= k - 0.2);
  }
}

TEST_CASE("discrete reference on a finer mesh") {
  const CoefficientSet s = bump_flow_set();
  const ComplexVectorField u = manufactured_solution("square-trig");
  const HdgSpace coarse(square(4), 2, 2, 2);
  const auto fine_mesh = std::make_shared<const Mesh>(uniform_refine(uniform_refine(generate_square(4))));
  const HdgSpace fine(fine_mesh, 3, 3, 3);
  const DiscreteFunction approx = interpolate(u.as_function(), coarse);
  const double exact = dn_error(u, approx, s).total;
  const double disc = dn_error(discrete_reference(interpolate(u.as_function(), fine), s), approx, s).total;
  CHECK(disc == doctest::Approx(exact).epsilon(0.05));

  PointLocator loc(fine_mesh);
  for (int e = 0; e < fine_mesh->num_elements(); e += 7) CHECK(loc.locate(fine_mesh->centroid(e)) == e);
  const int outside = loc.locate({1.2, 0.5});
  CHECK(outside >= 0);
  CHECK(fine_mesh->centroid(outside).x() > 0.9);
}

TEST_CASE("best approximation is a projection") {
  CoefficientSet s = preset("square-manufactured");
  s.b = constant_flow(1.0, 0.3);
  const HdgSpace sp(square(3), 2, 2, 2);
  const FacetConstraints c = apply_normal_bc(sp);
  DiscreteFunction u = interpolate(quadratic_field().as_function(), sp);
  apply_normal_bc(u);
  SolveInfo info;
  const DiscreteFunction p = best_approx(discrete_reference(u, s), sp, s, c, 4, true, &info);
  CHECK(rel_inf(p.coeffs, u.coeffs) <= 1e-11);
  CHECK(info.residual <= 1e-10);
}

TEST_CASE("best approximation is optimal and linear") {
  const CoefficientSet s = bump_flow_set();
  const HdgSpace sp(square(4), 2, 2, 2);
  const FacetConstraints c = build_constraints(sp, s, ConvMode::Lifting);
  const ComplexVectorField u = manufactured_solution("square-trig");
  const ReferenceField ru = analytic_reference(u, s);
  const DiscreteFunction p = best_approx(ru, sp, s, c);
  const double best = dn_error(ru, p, s).total;
  for (int t = 0; t < 100; ++t) {
    DiscreteFunction w = p;
    const double eps = std::pow(10.0, uniform(-4.0, -1.0));
    w.coeffs.head(sp.num_volume_dofs()) += eps * random_complex(sp.num_volume_dofs());
    DiscreteFunction d(sp);
    expand_facets(d, c, random_complex(c.size));
    w.coeffs.tail(sp.num_facet_dofs()) += eps * d.coeffs.tail(sp.num_facet_dofs());
    CHECK(best <= dn_error(ru, w, s).total * (1.0 + 1e-12));
  }

  const ReferenceField rv = analytic_reference(manufactured_solution("square-poly"), s);
  const cplx a(0.4, -1.0), b(2.0, 0.3);
  const DiscreteFunction pv = best_approx(rv, sp, s, c);
  const DiscreteFunction pw = best_approx(combine_refs(ru, rv, a, b), sp, s, c);
  const Eigen::VectorXcd lin = a * p.coeffs + b * pv.coeffs;
  const long nv = sp.num_volume_dofs();
  CHECK(rel_inf(pw.coeffs.head(nv), lin.head(nv)) <= 1e-9);
  CHECK(rel_inf(restrict_facets(pw, c), restrict_facets(p, c) * a + restrict_facets(pv, c) * b) <= 1e-9);
}
