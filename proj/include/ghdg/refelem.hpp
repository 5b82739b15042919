#pragma once
// Quadrature and orthonormal modal bases on the reference triangle
// {x, y >= 0, x + y <= 1} and the reference segment [0, 1].

#include <Eigen/Core>

namespace ghdg {

struct QuadRule {
  Eigen::MatrixXd points;   // dim x n
  Eigen::VectorXd weights;  // n, positive
  int exactness = 0;

  int size() const { return static_cast<int>(weights.size()); }
};

constexpr int kMaxQuadExactness = 60;

QuadRule quad_segment(int exactness);
QuadRule quad_triangle(int exactness);

constexpr int triangle_dim(int k) { return (k + 1) * (k + 2) / 2; }
constexpr int segment_dim(int k) { return k + 1; }

// Rows index basis functions (ordered by total degree), columns index points.
Eigen::MatrixXd eval_basis(int k, const Eigen::MatrixXd& points);

struct BasisGrad {
  Eigen::MatrixXd dx;
  Eigen::MatrixXd dy;
};
BasisGrad eval_basis_grad(int k, const Eigen::MatrixXd& points);

// Scaled Legendre polynomials sqrt(2n+1) L_n(2t-1); `t` is 1 x n or n.
Eigen::MatrixXd eval_segment_basis(int k, const Eigen::VectorXd& t);

// Jacobi polynomials P_n^{(a,0)}(x) for n = 0..order with derivatives.
void jacobi(int order, double a, double x, double* p, double* dp);

}  // namespace ghdg
