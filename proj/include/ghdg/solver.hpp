#pragma once
// Dense and sparse complex solves with machine-checked residuals.

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

namespace ghdg {

using SpMat = Eigen::SparseMatrix<std::complex<double>>;

class SolverError : public std::runtime_error {
 public:
  enum class Kind { Singular, StructurallySingular, NumericallySingular, Indefinite, Inaccurate };
  SolverError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct SolveInfo {
  double residual = 0.0;  // ||A x - b|| / ||b|| (0 for b = 0)
  std::string method;
  std::string ordering;
  long n = 0;
  long nnz = 0;
  double factor_seconds = 0.0;
};

// Partial-pivoting LU. Throws SolverError::Singular when the reciprocal
// condition estimate falls below machine precision.
Eigen::MatrixXcd dense_lu_solve(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                                double* residual = nullptr);

// Equilibrated sparse LU with COLAMD ordering and iterative refinement using
// extended-precision residuals; throws when the relative residual exceeds `tol`.
Eigen::VectorXcd sparse_solve(const SpMat& S, const Eigen::VectorXcd& g, SolveInfo* info = nullptr,
                              double tol = 1e-10);

// Cholesky for Hermitian positive definite systems; indefiniteness is reported.
Eigen::VectorXcd hermitian_solve(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& g,
                                 SolveInfo* info = nullptr, double tol = 1e-10);
Eigen::VectorXcd hermitian_solve(const SpMat& H, const Eigen::VectorXcd& g,
                                 SolveInfo* info = nullptr, double tol = 1e-10);

// Eigenvalues (lambda_min, lambda_max) of a symmetric 2x2 matrix in closed form.
std::pair<double, double> sym2_eigs(const Eigen::Matrix2d& m);

}  // namespace ghdg
