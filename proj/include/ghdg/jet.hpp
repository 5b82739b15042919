#pragma once
// Second-order forward-mode jets in two variables.
//
// A Jet2 carries a value together with its gradient and Hessian with respect
// to (x, y). Coefficient fields and manufactured solutions are written once as
// templated expressions and evaluated on jets to obtain exact derivatives.

#include <Eigen/Core>
#include <cmath>
#include <complex>

namespace ghdg {

template <typename T>
struct Jet2 {
  using Vec = Eigen::Matrix<T, 2, 1>;
  using Mat = Eigen::Matrix<T, 2, 2>;

  T v{};
  Vec g = Vec::Zero();
  Mat h = Mat::Zero();

  Jet2() = default;
  Jet2(T value) : v(value) {}  // NOLINT: implicit promotion of constants
  Jet2(T value, const Vec& grad, const Mat& hess) : v(value), g(grad), h(hess) {}

  // Independent variable i (0 -> x, 1 -> y) at the given value.
  static Jet2 variable(T value, int i) {
    Jet2 j(value);
    j.g(i) = T(1);
    return j;
  }

  template <typename U>
  Jet2<U> cast() const {
    return Jet2<U>(U(v), g.template cast<U>(), h.template cast<U>());
  }

  Jet2 operator-() const { return Jet2(-v, -g, -h); }

  Jet2& operator+=(const Jet2& o) { v += o.v; g += o.g; h += o.h; return *this; }
  Jet2& operator-=(const Jet2& o) { v -= o.v; g -= o.g; h -= o.h; return *this; }
  Jet2& operator*=(const Jet2& o) { *this = *this * o; return *this; }
  Jet2& operator/=(const Jet2& o) { *this = *this / o; return *this; }

  friend Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
  friend Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
  friend Jet2 operator*(const Jet2& a, const Jet2& b) {
    return Jet2(a.v * b.v, a.g * b.v + a.v * b.g,
                a.h * b.v + a.v * b.h + a.g * b.g.transpose() + b.g * a.g.transpose());
  }
  friend Jet2 operator/(const Jet2& a, const Jet2& b) {
    const T inv = T(1) / b.v;
    return a * chain(b, inv, -inv * inv, T(2) * inv * inv * inv);
  }

  friend Jet2 operator+(Jet2 a, T s) { a.v += s; return a; }
  friend Jet2 operator+(T s, Jet2 a) { a.v += s; return a; }
  friend Jet2 operator-(Jet2 a, T s) { a.v -= s; return a; }
  friend Jet2 operator-(T s, const Jet2& a) { return Jet2(s - a.v, -a.g, -a.h); }
  friend Jet2 operator*(Jet2 a, T s) { a.v *= s; a.g *= s; a.h *= s; return a; }
  friend Jet2 operator*(T s, Jet2 a) { return a * s; }
  friend Jet2 operator/(Jet2 a, T s) { return a * (T(1) / s); }
  friend Jet2 operator/(T s, const Jet2& a) { return Jet2(s) / a; }

  // f(a) given f(a.v), f'(a.v), f''(a.v).
  friend Jet2 chain(const Jet2& a, T f0, T f1, T f2) {
    return Jet2(f0, f1 * a.g, f1 * a.h + f2 * a.g * a.g.transpose());
  }
};

template <typename T>
Jet2<T> exp(const Jet2<T>& a) {
  using std::exp;
  const T e = exp(a.v);
  return chain(a, e, e, e);
}

template <typename T>
Jet2<T> log(const Jet2<T>& a) {
  const T inv = T(1) / a.v;
  using std::log;
  return chain(a, log(a.v), inv, -inv * inv);
}

template <typename T>
Jet2<T> sin(const Jet2<T>& a) {
  using std::sin;
  using std::cos;
  const T s = sin(a.v);
  return chain(a, s, cos(a.v), -s);
}

template <typename T>
Jet2<T> cos(const Jet2<T>& a) {
  using std::sin;
  using std::cos;
  const T c = cos(a.v);
  return chain(a, c, -sin(a.v), -c);
}

template <typename T>
Jet2<T> sqrt(const Jet2<T>& a) {
  using std::sqrt;
  const T s = sqrt(a.v);
  return chain(a, s, T(0.5) / s, T(-0.25) / (s * a.v));
}

template <typename T>
Jet2<T> pow(const Jet2<T>& a, int n) {
  using std::pow;
  if (n == 0) return Jet2<T>(T(1));
  if (n == 1) return a;
  const T pn2 = n >= 2 ? pow(a.v, n - 2) : T(1) / pow(a.v, 2 - n);
  const T pn1 = pn2 * a.v;
  return chain(a, pn1 * a.v, T(n) * pn1, T(n) * T(n - 1) * pn2);
}

using Jet = Jet2<double>;
using CJet = Jet2<std::complex<double>>;

// Jets for the coordinates of a point.
inline Jet jet_x(double x) { return Jet::variable(x, 0); }
inline Jet jet_y(double y) { return Jet::variable(y, 1); }

}  // namespace ghdg
