#pragma once
// Shared helpers for the unit tests: seeded random data and finite differences.

#include "ghdg/postproc.hpp"

#include <random>

namespace ghdg::test {

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(20240917);
  return g;
}

inline double uniform(double a = -1.0, double b = 1.0) {
  return std::uniform_real_distribution<double>(a, b)(rng());
}

inline Eigen::VectorXd random_real(long n) {
  Eigen::VectorXd v(n);
  for (long i = 0; i < n; ++i) v(i) = uniform();
  return v;
}

inline Eigen::VectorXcd random_complex(long n) {
  Eigen::VectorXcd v(n);
  for (long i = 0; i < n; ++i) v(i) = cplx(uniform(), uniform());
  return v;
}

inline Point2 random_point_in_square(double margin = 0.05) {
  return {uniform(margin, 1.0 - margin), uniform(margin, 1.0 - margin)};
}

inline DiscreteFunction random_function(const HdgSpace& sp) {
  DiscreteFunction u(sp);
  u.coeffs = random_complex(sp.total_dofs());
  return u;
}

// Central difference gradient of a scalar function.
template <typename F>
Eigen::Vector2d fd_gradient(const F& f, const Point2& x, double h = 1e-6) {
  const Point2 ex(h, 0.0), ey(0.0, h);
  return {(f(x + ex) - f(x - ex)) / (2 * h), (f(x + ey) - f(x - ey)) / (2 * h)};
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

inline std::shared_ptr<const Mesh> square(int n) { return std::make_shared<const Mesh>(generate_square(n)); }

}  // namespace ghdg::test
