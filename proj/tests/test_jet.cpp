#include "support.hpp"

#include <doctest.h>

using namespace ghdg;
using namespace ghdg::test;

namespace {

// f(x, y) built from every jet primitive.
template <typename T>
T composite(const T& x, const T& y) {
  using std::exp;
  using std::sin;
  using std::cos;
  using std::sqrt;
  using std::log;
  return exp(x * y) * sin(x) / (2.0 + cos(y)) + sqrt(1.5 + x * x) * log(2.0 + y * y) + pow(x - y, 3);
}

double pow(double a, int n) { return std::pow(a, n); }

}  // namespace

TEST_CASE("jet arithmetic matches closed-form derivatives") {
  const Jet x = jet_x(0.7), y = jet_y(-0.4);
  const Jet p = x * x * y;  // x^2 y
  CHECK(p.v == doctest::Approx(0.49 * -0.4));
  CHECK(p.g(0) == doctest::Approx(2 * 0.7 * -0.4));
  CHECK(p.g(1) == doctest::Approx(0.49));
  CHECK(p.h(0, 0) == doctest::Approx(2 * -0.4));
  CHECK(p.h(0, 1) == doctest::Approx(2 * 0.7));
  CHECK(p.h(1, 1) == doctest::Approx(0.0));

  const Jet q = 1.0 / x;
  CHECK(q.g(0) == doctest::Approx(-1.0 / 0.49));
  CHECK(q.h(0, 0) == doctest::Approx(2.0 / (0.7 * 0.7 * 0.7)));
}

TEST_CASE("jet derivatives agree with finite differences at random points") {
  for (int t = 0; t < 20; ++t) {
    const Point2 x0(uniform(-0.8, 0.8), uniform(-0.8, 0.8));
    const Jet j = composite(jet_x(x0.x()), jet_y(x0.y()));
    auto f = [](const Point2& p) { return composite(p.x(), p.y()); };
    CHECK(j.v == doctest::Approx(f(x0)).epsilon(1e-14));
    const Eigen::Vector2d g = fd_gradient(f, x0);
    CHECK((j.g - g).norm() <= 1e-6 * std::max(1.0, g.norm()));
    Eigen::Matrix2d H;
    for (int i = 0; i < 2; ++i) {
      const Point2 e = 1e-4 * Point2::Unit(i);
      auto fi = [&](const Point2& p) { return composite(jet_x(p.x()), jet_y(p.y())).g(i); };
      H.row(i) = ((fd_gradient(fi, x0 + e, 1e-5) + fd_gradient(fi, x0 - e, 1e-5)) / 2).transpose();
    }
    CHECK((j.h - H).norm() <= 1e-4 * std::max(1.0, H.norm()));
    CHECK((j.h - j.h.transpose()).norm() <= 1e-12 * std::max(1.0, j.h.norm()));
  }
}

TEST_CASE("jet pow handles small exponents") {
  const Jet x = jet_x(1.3);
  CHECK(pow(x, 0).v == 1.0);
  CHECK(pow(x, 0).g.norm() == 0.0);
  CHECK(pow(x, 1).g(0) == 1.0);
  const Jet c = pow(x, 6);
  CHECK(c.g(0) == doctest::Approx(6 * std::pow(1.3, 5)));
  CHECK(c.h(0, 0) == doctest::Approx(30 * std::pow(1.3, 4)));
}

TEST_CASE("complex jets follow the same rules") {
  const CJet z = jet_x(0.3).cast<cplx>() * cplx(1.0, 2.0);
  const CJet e = exp(z);
  CHECK(std::abs(e.v - std::exp(cplx(0.3, 0.6))) < 1e-15);
  CHECK(std::abs(e.g(0) - cplx(1.0, 2.0) * std::exp(cplx(0.3, 0.6))) < 1e-14);
  CHECK(std::abs(e.h(0, 0) - cplx(1.0, 2.0) * cplx(1.0, 2.0) * std::exp(cplx(0.3, 0.6))) < 1e-14);
}
