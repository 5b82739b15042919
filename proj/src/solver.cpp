#include "ghdg/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

namespace ghdg {

namespace {

double relative_residual(double r, double b) { return b > 0.0 ? r / b : r; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void check_structure(const SpMat& S) {
  std::vector<char> row_hit(S.rows(), 0), col_hit(S.cols(), 0);
  for (int j = 0; j < S.outerSize(); ++j)
    for (SpMat::InnerIterator it(S, j); it; ++it)
      if (it.value() != std::complex<double>(0.0)) {
        row_hit[it.row()] = 1;
        col_hit[it.col()] = 1;
      }
  for (Eigen::Index i = 0; i < S.rows(); ++i)
    if (!row_hit[i] || !col_hit[i])
      throw SolverError(SolverError::Kind::StructurallySingular,
                        "sparse_solve: empty row/column " + std::to_string(i));
}

// Row then column max-norm scaling, rounded to powers of two so scaling is exact.
std::pair<Eigen::VectorXd, Eigen::VectorXd> equilibrate(const SpMat& S) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(S.rows()), c = Eigen::VectorXd::Zero(S.cols());
  auto pow2 = [](double v) { return std::exp2(-std::round(std::log2(v))); };
  for (int j = 0; j < S.outerSize(); ++j)
    for (SpMat::InnerIterator it(S, j); it; ++it) r(it.row()) = std::max(r(it.row()), std::abs(it.value()));
  for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = pow2(r(i));
  for (int j = 0; j < S.outerSize(); ++j)
    for (SpMat::InnerIterator it(S, j); it; ++it) c(it.col()) = std::max(c(it.col()), r(it.row()) * std::abs(it.value()));
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = pow2(c(i));
  return {r, c};
}

// g - S x accumulated in extended precision.
Eigen::VectorXcd residual_extended(const SpMat& S, const Eigen::VectorXcd& x, const Eigen::VectorXcd& g) {
  using lcplx = std::complex<long double>;
  std::vector<lcplx> acc(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) acc[i] = lcplx(g(i).real(), g(i).imag());
  for (int j = 0; j < S.outerSize(); ++j) {
    const lcplx xj(x(j).real(), x(j).imag());
    for (SpMat::InnerIterator it(S, j); it; ++it)
      acc[it.row()] -= lcplx(it.value().real(), it.value().imag()) * xj;
  }
  Eigen::VectorXcd r(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i)
    r(i) = std::complex<double>(static_cast<double>(acc[i].real()), static_cast<double>(acc[i].imag()));
  return r;
}

}  // namespace

Eigen::MatrixXcd dense_lu_solve(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B, double* residual) {
  if (A.rows() != A.cols() || A.rows() != B.rows())
    throw std::invalid_argument("dense_lu_solve: dimension mismatch");
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  const double rc = lu.rcond();
  if (!(rc > std::numeric_limits<double>::epsilon()))
    throw SolverError(SolverError::Kind::Singular,
                      "dense_lu_solve: matrix singular to working precision (rcond " +
                          std::to_string(rc) + ")");
  Eigen::MatrixXcd X = lu.solve(B);
  if (residual) {
    const double scale = A.norm() * X.norm();
    *residual = relative_residual((A * X - B).norm(), scale);
  }
  return X;
}

Eigen::VectorXcd sparse_solve(const SpMat& S, const Eigen::VectorXcd& g, SolveInfo* info, double tol) {
  if (S.rows() != S.cols() || S.rows() != g.size())
    throw std::invalid_argument("sparse_solve: dimension mismatch");
  check_structure(S);
  const auto t0 = std::chrono::steady_clock::now();
  const auto [r, c] = equilibrate(S);
  const SpMat E = r.cast<std::complex<double>>().asDiagonal() * S * c.cast<std::complex<double>>().asDiagonal();
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(E);
  lu.factorize(E);
  if (lu.info() != Eigen::Success)
    throw SolverError(SolverError::Kind::NumericallySingular,
                      "sparse_solve: factorization failed: " + lu.lastErrorMessage());
  const double tf = seconds_since(t0);
  auto solve = [&](const Eigen::VectorXcd& b) -> Eigen::VectorXcd {
    const Eigen::VectorXcd y = lu.solve((r.array() * b.array()).matrix());
    return (c.array() * y.array()).matrix();
  };
  Eigen::VectorXcd x = solve(g);
  // Iterative refinement with extended-precision residuals.
  for (int step = 0; step < 3; ++step) {
    const Eigen::VectorXcd d = solve(residual_extended(S, x, g));
    x += d;
    if (d.norm() <= 1e-15 * x.norm()) break;
  }
  const double res = relative_residual(residual_extended(S, x, g).norm(), g.norm());
  if (info) {
    info->residual = res;
    info->method = "SparseLU";
    info->ordering = "COLAMD";
    info->n = S.rows();
    info->nnz = S.nonZeros();
    info->factor_seconds = tf;
  }
  if (!std::isfinite(res) || res > tol)
    throw SolverError(SolverError::Kind::Inaccurate,
                      "sparse_solve: relative residual " + std::to_string(res) + " exceeds " +
                          std::to_string(tol));
  return x;
}

Eigen::VectorXcd hermitian_solve(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& g, SolveInfo* info,
                                 double tol) {
  Eigen::LLT<Eigen::MatrixXcd> llt(H);
  if (llt.info() != Eigen::Success)
    throw SolverError(SolverError::Kind::Indefinite, "hermitian_solve: matrix not positive definite");
  Eigen::VectorXcd x = llt.solve(g);
  const double res = relative_residual((H * x - g).norm(), g.norm());
  if (info) {
    info->residual = res;
    info->method = "LLT";
    info->ordering = "none";
    info->n = H.rows();
    info->nnz = H.size();
  }
  if (!std::isfinite(res) || res > tol)
    throw SolverError(SolverError::Kind::Inaccurate,
                      "hermitian_solve: relative residual " + std::to_string(res));
  return x;
}

Eigen::VectorXcd hermitian_solve(const SpMat& H, const Eigen::VectorXcd& g, SolveInfo* info, double tol) {
  const auto t0 = std::chrono::steady_clock::now();
  Eigen::SimplicialLLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> llt(H);
  if (llt.info() != Eigen::Success)
    throw SolverError(SolverError::Kind::Indefinite, "hermitian_solve: matrix not positive definite");
  const double tf = seconds_since(t0);
  Eigen::VectorXcd x = llt.solve(g);
  double res = relative_residual((H * x - g).norm(), g.norm());
  if (res > 1e-13) {
    x += llt.solve(g - H * x);
    res = relative_residual((H * x - g).norm(), g.norm());
  }
  if (info) {
    info->residual = res;
    info->method = "SimplicialLLT";
    info->ordering = "AMD";
    info->n = H.rows();
    info->nnz = H.nonZeros();
    info->factor_seconds = tf;
  }
  if (!std::isfinite(res) || res > tol)
    throw SolverError(SolverError::Kind::Inaccurate,
                      "hermitian_solve: relative residual " + std::to_string(res));
  return x;
}

std::pair<double, double> sym2_eigs(const Eigen::Matrix2d& m) {
  const double a = m(0, 0), d = m(1, 1), b = 0.5 * (m(0, 1) + m(1, 0));
  const double mean = 0.5 * (a + d);
  const double rad = std::hypot(0.5 * (a - d), b);
  return {mean - rad, mean + rad};
}

}  // namespace ghdg
