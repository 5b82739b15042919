#pragma once
// Independent reference computations shared by the unit tests and the
// acceptance binary: the lifting defining system and the scalar-lifting SIP form.

#include "ghdg/postproc.hpp"

#include <Eigen/Cholesky>

namespace ghdg::test {

// Lifting basis of degree l evaluated at physical points of element e; rows are points.
inline Eigen::MatrixXd psi_at(const Mesh& m, int e, int l, const std::vector<Point2>& pts) {
  const AffineMap F(m, e);
  Eigen::MatrixXd xi(2, pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) xi.col(i) = F.inverse(pts[i]);
  return eval_basis(l, xi).transpose();
}

// Residual of M R_c u - B_c u for both lifting components, with the weighted
// mass M and the boundary right side B assembled from scratch. Returns
// ||residual|| / max(1, ||B u||).
inline double lifting_residual(const HdgSpace& sp, const CoefficientSet& s, const ElementOperators& o, int e,
                               const Eigen::VectorXcd& u) {
  const int nl = sp.nl(), nqf3 = 3 * o.nqf;
  const Eigen::MatrixXd P = psi_at(sp.mesh(), e, sp.l(), o.x);
  const Eigen::MatrixXd Pf = psi_at(sp.mesh(), e, sp.l(), o.xf);
  Eigen::VectorXd wr(o.nq), fwb(nqf3);
  for (int q = 0; q < o.nq; ++q) wr(q) = o.w(q) * s.rho.value(o.x[q]);
  for (int q = 0; q < nqf3; ++q) fwb(q) = o.wf(q) * s.rho.value(o.xf[q]) * s.b.value(o.xf[q]).dot(o.fnu.col(q));
  const Eigen::MatrixXd M = P.transpose() * wr.asDiagonal() * P;
  double res2 = 0.0, ref2 = 0.0;
  for (int c = 0; c < 2; ++c) {
    const Eigen::VectorXcd Bu = (-Pf.transpose() * fwb.asDiagonal() * o.Jmp.middleRows(c * nqf3, nqf3)).cast<cplx>() * u;
    const Eigen::VectorXcd Mr = M.cast<cplx>() * (o.R.middleRows(c * nl, nl).cast<cplx>() * u);
    res2 += (Mr - Bu).squaredNorm();
    ref2 += Bu.squaredNorm();
  }
  return std::sqrt(res2) / std::max(1.0, std::sqrt(ref2));
}

// Scalar lifting Rs from its definition <Rs u, psi> = -<[[u]]_nu, psi> (unit weights).
inline Eigen::MatrixXd scalar_lifting(const HdgSpace& sp, const ElementOperators& o, int e, Eigen::MatrixXd* mass = nullptr) {
  const int l = sp.l();
  const Eigen::MatrixXd P = psi_at(sp.mesh(), e, l, o.x);
  const Eigen::MatrixXd Pf = psi_at(sp.mesh(), e, l, o.xf);
  const Eigen::MatrixXd M = P.transpose() * o.w.asDiagonal() * P;
  if (mass) *mass = M;
  return M.ldlt().solve(-Pf.transpose() * o.wf.asDiagonal() * o.Jn);
}

// Divergence form written through the scalar lifting,
// ||div_n u||^2 - alpha k^2 ||h^-1/2 [[u]]_nu||^2 - ||Rs u||^2, valid for unit coefficients.
inline Eigen::MatrixXd sip_lifted_form(const HdgSpace& sp, const ElementOperators& o, int e, double alpha) {
  Eigen::MatrixXd M;
  const Eigen::MatrixXd Rs = scalar_lifting(sp, o, e, &M);
  const Eigen::MatrixXd DivN = o.Div + psi_at(sp.mesh(), e, sp.l(), o.x) * Rs;
  const double ak2 = alpha * sp.k() * sp.k();
  return DivN.transpose() * o.w.asDiagonal() * DivN -
         ak2 * o.Jn.transpose() * o.fh.cwiseInverse().cwiseProduct(o.wf).asDiagonal() * o.Jn - Rs.transpose() * M * Rs;
}

}  // namespace ghdg::test
