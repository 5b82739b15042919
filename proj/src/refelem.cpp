#include "ghdg/refelem.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace ghdg {

namespace {

// n-point Gauss-Legendre on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2 * j - 1) * z * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = z;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2 * j - 1) * z * p1 - (j - 1) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

void check_exactness(int exactness, const char* who) {
  if (exactness < 0 || exactness > kMaxQuadExactness)
    throw std::invalid_argument(std::string(who) + ": exactness " + std::to_string(exactness) +
                                " outside implemented range [0, " +
                                std::to_string(kMaxQuadExactness) + "]");
}

}  // namespace

QuadRule quad_segment(int exactness) {
  check_exactness(exactness, "quad_segment");
  const int n = std::max(1, (exactness + 2) / 2);
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  QuadRule q;
  q.exactness = exactness;
  q.points.resize(1, n);
  q.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    q.points(0, i) = 0.5 * (x[i] + 1.0);
    q.weights(i) = 0.5 * w[i];
  }
  return q;
}

QuadRule quad_triangle(int exactness) {
  check_exactness(exactness, "quad_triangle");
  // Collapsed (Duffy) product rule; the (1-b) Jacobian raises the degree in b by one.
  const int n = std::max(1, (exactness + 3) / 2);
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  QuadRule q;
  q.exactness = exactness;
  q.points.resize(2, n * n);
  q.weights.resize(n * n);
  int idx = 0;
  for (int j = 0; j < n; ++j) {
    const double b = 0.5 * (x[j] + 1.0), wb = 0.5 * w[j];
    for (int i = 0; i < n; ++i) {
      const double a = 0.5 * (x[i] + 1.0), wa = 0.5 * w[i];
      q.points(0, idx) = a * (1.0 - b);
      q.points(1, idx) = b;
      q.weights(idx) = wa * wb * (1.0 - b);
      ++idx;
    }
  }
  return q;
}

void jacobi(int order, double a, double x, double* p, double* dp) {
  p[0] = 1.0;
  dp[0] = 0.0;
  if (order == 0) return;
  p[1] = 0.5 * ((a + 2.0) * x + a);
  dp[1] = 0.5 * (a + 2.0);
  for (int n = 2; n <= order; ++n) {
    const double s = 2.0 * n + a;
    const double c0 = 2.0 * n * (n + a) * (s - 2.0);
    const double c1 = (s - 1.0) * s * (s - 2.0);
    const double c2 = (s - 1.0) * a * a;
    const double c3 = 2.0 * (n + a - 1.0) * (n - 1.0) * s;
    p[n] = ((c1 * x + c2) * p[n - 1] - c3 * p[n - 2]) / c0;
    dp[n] = (c1 * p[n - 1] + (c1 * x + c2) * dp[n - 1] - c3 * dp[n - 2]) / c0;
  }
}

namespace {

// Evaluates the Dubiner basis and optionally its gradient at one point.
void dubiner(int k, double x, double y, double* val, double* gx, double* gy) {
  std::vector<double> Q(k + 1), Qx(k + 1), Qy(k + 1);
  const double s = 2.0 * x + y - 1.0, w = (1.0 - y) * (1.0 - y);
  Q[0] = 1.0;
  Qx[0] = Qy[0] = 0.0;
  if (k >= 1) {
    Q[1] = s;
    Qx[1] = 2.0;
    Qy[1] = 1.0;
  }
  for (int p = 1; p < k; ++p) {
    Q[p + 1] = ((2 * p + 1) * s * Q[p] - p * w * Q[p - 1]) / (p + 1);
    Qx[p + 1] = ((2 * p + 1) * (2.0 * Q[p] + s * Qx[p]) - p * w * Qx[p - 1]) / (p + 1);
    Qy[p + 1] = ((2 * p + 1) * (Q[p] + s * Qy[p]) -
                 p * (-2.0 * (1.0 - y) * Q[p - 1] + w * Qy[p - 1])) /
                (p + 1);
  }
  std::vector<double> P(k + 1), dP(k + 1);
  int idx = 0;
  for (int d = 0; d <= k; ++d) {
    for (int p = 0; p <= d; ++p) {
      const int q = d - p;
      jacobi(q, 2.0 * p + 1.0, 2.0 * y - 1.0, P.data(), dP.data());
      const double c = std::sqrt(2.0 * (2 * p + 1) * (p + q + 1));
      val[idx] = c * Q[p] * P[q];
      if (gx) {
        gx[idx] = c * Qx[p] * P[q];
        gy[idx] = c * (Qy[p] * P[q] + Q[p] * 2.0 * dP[q]);
      }
      ++idx;
    }
  }
}

}  // namespace

Eigen::MatrixXd eval_basis(int k, const Eigen::MatrixXd& points) {
  if (k < 0) throw std::invalid_argument("eval_basis: negative degree");
  const int nb = triangle_dim(k);
  Eigen::MatrixXd v(nb, points.cols());
  for (int i = 0; i < points.cols(); ++i)
    dubiner(k, points(0, i), points(1, i), v.col(i).data(), nullptr, nullptr);
  return v;
}

BasisGrad eval_basis_grad(int k, const Eigen::MatrixXd& points) {
  if (k < 0) throw std::invalid_argument("eval_basis_grad: negative degree");
  const int nb = triangle_dim(k);
  BasisGrad g{Eigen::MatrixXd(nb, points.cols()), Eigen::MatrixXd(nb, points.cols())};
  Eigen::VectorXd tmp(nb);
  for (int i = 0; i < points.cols(); ++i)
    dubiner(k, points(0, i), points(1, i), tmp.data(), g.dx.col(i).data(), g.dy.col(i).data());
  return g;
}

Eigen::MatrixXd eval_segment_basis(int k, const Eigen::VectorXd& t) {
  if (k < 0) throw std::invalid_argument("eval_segment_basis: negative degree");
  Eigen::MatrixXd v(k + 1, t.size());
  std::vector<double> P(k + 1), dP(k + 1);
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    jacobi(k, 0.0, 2.0 * t(i) - 1.0, P.data(), dP.data());
    for (int n = 0; n <= k; ++n) v(n, i) = std::sqrt(2.0 * n + 1.0) * P[n];
  }
  return v;
}

}  // namespace ghdg
