#include "ghdg/forms.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace ghdg {

namespace {
const cplx I(0.0, 1.0);

Eigen::VectorXd stack2(const Eigen::VectorXd& v) {
  Eigen::VectorXd s(2 * v.size());
  s << v, v;
  return s;
}
}  // namespace

void FormOptions::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("FormOptions: alpha must be positive");
  if (conv_mode == ConvMode::Sip && !(lambda > 0.0))
    throw std::invalid_argument("FormOptions: lambda must be positive in SIP mode");
  if (quad_margin < 0) throw std::invalid_argument("FormOptions: quad_margin must be nonnegative");
}

std::shared_ptr<const ReferenceTables> reference_tables(int k, int kf, int l, int degree) {
  static std::mutex mtx;
  static std::map<std::tuple<int, int, int, int>, std::shared_ptr<const ReferenceTables>> cache;
  const auto key = std::make_tuple(k, kf, l, degree);
  std::lock_guard<std::mutex> lock(mtx);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  auto t = std::make_shared<ReferenceTables>();
  t->k = k;
  t->kf = kf;
  t->l = l;
  t->degree = degree;
  t->vol = quad_triangle(degree);
  t->seg = quad_segment(degree);
  t->phi = eval_basis(k, t->vol.points).transpose();
  const BasisGrad g = eval_basis_grad(k, t->vol.points);
  t->dphi_xi = g.dx.transpose();
  t->dphi_eta = g.dy.transpose();
  t->psi = eval_basis(l, t->vol.points).transpose();
  const int nqf = t->seg.size();
  const Eigen::VectorXd s = t->seg.points.row(0).transpose();
  for (int j = 0; j < 3; ++j) {
    Eigen::MatrixXd pts(2, nqf);
    for (int q = 0; q < nqf; ++q) pts.col(q) = facet_ref_point(j, s(q));
    t->fphi[j] = eval_basis(k, pts).transpose();
    const BasisGrad fg = eval_basis_grad(k, pts);
    t->fdphi_xi[j] = fg.dx.transpose();
    t->fdphi_eta[j] = fg.dy.transpose();
    t->fpsi[j] = eval_basis(l, pts).transpose();
  }
  t->fbasis[0] = eval_segment_basis(kf, s).transpose();
  t->fbasis[1] = eval_segment_basis(kf, (1.0 - s.array()).matrix()).transpose();
  cache.emplace(key, t);
  return t;
}

ElementOperators element_operators(const HdgSpace& space, const CoefficientSet& set, int e,
                                   int quad_margin) {
  const Mesh& m = space.mesh();
  const int k = space.k(), nk = space.nk(), nf = space.nf(), nl = space.nl();
  const auto tab = reference_tables(k, space.k_facet(), space.l(),
                                    std::min(kMaxQuadExactness, 2 * k + quad_margin));
  const AffineMap map(m, e);
  const Eigen::Matrix2d& G = map.JinvT;

  ElementOperators o;
  o.element = e;
  o.N = space.local_size();
  o.nq = tab->vol.size();
  o.nqf = tab->seg.size();
  o.omega = set.omega;
  o.rot = set.rot;
  const int nq = o.nq, nqf = o.nqf, nq3 = 3 * nqf, N = o.N;

  // Volume samples.
  o.w = tab->vol.weights * map.detJ;
  o.x.resize(nq);
  o.rho.resize(nq);
  o.cs2.resize(nq);
  o.gamma.resize(nq);
  o.b.resize(2, nq);
  o.grad_p.resize(2, nq);
  o.hess_p.resize(nq);
  o.hess_phi.resize(nq);
  for (int q = 0; q < nq; ++q) {
    const Point2 xq = map(tab->vol.points.col(q));
    o.x[q] = xq;
    o.rho(q) = set.rho.value(xq);
    o.cs2(q) = set.cs2.value(xq);
    o.gamma(q) = set.gamma.value(xq);
    o.b.col(q) = set.b.value(xq);
    const Jet p = set.p.jet(xq);
    o.grad_p.col(q) = p.g;
    o.hess_p[q] = p.h;
    o.hess_phi[q] = set.phi.hessian(xq);
  }

  const Eigen::MatrixXd gx = tab->dphi_xi * G(0, 0) + tab->dphi_eta * G(0, 1);
  const Eigen::MatrixXd gy = tab->dphi_xi * G(1, 0) + tab->dphi_eta * G(1, 1);
  o.U = Eigen::MatrixXd::Zero(2 * nq, N);
  o.Div = Eigen::MatrixXd::Zero(nq, N);
  o.Db = Eigen::MatrixXd::Zero(2 * nq, N);
  o.GpU = Eigen::MatrixXd::Zero(nq, N);
  const Eigen::MatrixXd bgrad =
      o.b.row(0).transpose().asDiagonal() * gx + o.b.row(1).transpose().asDiagonal() * gy;
  for (int c = 0; c < 2; ++c) {
    o.U.block(c * nq, c * nk, nq, nk) = tab->phi;
    o.Db.block(c * nq, c * nk, nq, nk) = bgrad;
    o.GpU.block(0, c * nk, nq, nk) = o.grad_p.row(c).transpose().asDiagonal() * tab->phi;
  }
  o.Div.block(0, 0, nq, nk) = gx;
  o.Div.block(0, nk, nq, nk) = gy;

  // Facet samples.
  o.wf.resize(nq3);
  o.xf.resize(nq3);
  o.frho.resize(nq3);
  o.fcs2.resize(nq3);
  o.fbn.resize(nq3);
  o.fh.resize(nq3);
  o.fnu.resize(2, nq3);
  o.Tr = Eigen::MatrixXd::Zero(2 * nq3, N);
  o.Jmp = Eigen::MatrixXd::Zero(2 * nq3, N);
  o.Jn = Eigen::MatrixXd::Zero(nq3, N);
  o.DivT = Eigen::MatrixXd::Zero(nq3, N);
  o.DbT = Eigen::MatrixXd::Zero(2 * nq3, N);
  Eigen::MatrixXd fpsi(nq3, nl);
  for (int j = 0; j < 3; ++j) {
    const Facet& F = m.facets[m.elements[e].facets[j]];
    const Point2 nu = F.normals[F.side_of(e)];
    const int ori = m.elements[e].orientation[j];
    const Eigen::MatrixXd& fb = tab->fbasis[ori > 0 ? 0 : 1];
    const int r0 = j * nqf, c0 = 2 * nk + j * 2 * nf;
    for (int q = 0; q < nqf; ++q) {
      const int r = r0 + q;
      const Point2 xq = map(facet_ref_point(j, tab->seg.points(0, q)));
      o.xf[r] = xq;
      o.wf(r) = tab->seg.weights(q) * F.h;
      o.frho(r) = set.rho.value(xq);
      o.fcs2(r) = set.cs2.value(xq);
      o.fbn(r) = set.b.value(xq).dot(nu);
      o.fh(r) = F.h;
      o.fnu.col(r) = nu;
    }
    const Eigen::MatrixXd fgx = tab->fdphi_xi[j] * G(0, 0) + tab->fdphi_eta[j] * G(0, 1);
    const Eigen::MatrixXd fgy = tab->fdphi_xi[j] * G(1, 0) + tab->fdphi_eta[j] * G(1, 1);
    Eigen::VectorXd bx(nqf), by(nqf);
    for (int q = 0; q < nqf; ++q) {
      const Eigen::Vector2d bq = set.b.value(o.xf[r0 + q]);
      bx(q) = bq.x();
      by(q) = bq.y();
    }
    const Eigen::MatrixXd fbgrad = bx.asDiagonal() * fgx + by.asDiagonal() * fgy;
    // Facet unknowns live in the frame (nu0, t) of the side-0 normal, so the
    // normal jump of a tangential mode is exactly zero.
    const Point2 nu0 = F.normals[0], t0(-nu0.y(), nu0.x());
    const double sgn = F.side_of(e) == 0 ? 1.0 : -1.0;
    for (int c = 0; c < 2; ++c) {
      o.Tr.block(c * nq3 + r0, c * nk, nqf, nk) = tab->fphi[j];
      o.Jmp.block(c * nq3 + r0, c * nk, nqf, nk) = tab->fphi[j];
      o.Jmp.block(c * nq3 + r0, c0, nqf, nf) = -nu0(c) * fb;
      o.Jmp.block(c * nq3 + r0, c0 + nf, nqf, nf) = -t0(c) * fb;
      o.DbT.block(c * nq3 + r0, c * nk, nqf, nk) = fbgrad;
    }
    o.Jn.block(r0, 0, nqf, nk) = nu.x() * tab->fphi[j];
    o.Jn.block(r0, nk, nqf, nk) = nu.y() * tab->fphi[j];
    o.Jn.block(r0, c0, nqf, nf) = -sgn * fb;
    o.DivT.block(r0, 0, nqf, nk) = fgx;
    o.DivT.block(r0, nk, nqf, nk) = fgy;
    fpsi.middleRows(r0, nqf) = tab->fpsi[j];
  }

  // Liftings: <rho R u, psi> = -<rho [[u]]_b, psi>, <cs2 rho Rs u, psi> = -<cs2 rho [[u]]_nu, psi>.
  const Eigen::VectorXd wrho = o.w.cwiseProduct(o.rho);
  const Eigen::VectorXd wsig = wrho.cwiseProduct(o.cs2);
  o.Mrho = tab->psi.transpose() * wrho.asDiagonal() * tab->psi;
  o.Ms = tab->psi.transpose() * wsig.asDiagonal() * tab->psi;
  const Eigen::VectorXd fwrb = o.wf.cwiseProduct(o.frho).cwiseProduct(o.fbn);
  const Eigen::VectorXd fwsig = o.wf.cwiseProduct(o.frho).cwiseProduct(o.fcs2);
  o.Bvec.resize(2 * nl, N);
  for (int c = 0; c < 2; ++c)
    o.Bvec.middleRows(c * nl, nl) = -fpsi.transpose() * fwrb.asDiagonal() * o.Jmp.middleRows(c * nq3, nq3);
  o.Bs = -fpsi.transpose() * fwsig.asDiagonal() * o.Jn;

  Eigen::LLT<Eigen::MatrixXd> lr(o.Mrho), ls(o.Ms);
  if (lr.info() != Eigen::Success || ls.info() != Eigen::Success)
    throw std::runtime_error("element_operators: weighted mass matrix not positive definite on element " +
                             std::to_string(e));
  o.R.resize(2 * nl, N);
  for (int c = 0; c < 2; ++c) o.R.middleRows(c * nl, nl) = lr.solve(o.Bvec.middleRows(c * nl, nl));
  o.Rs = ls.solve(o.Bs);
  o.RV.resize(2 * nq, N);
  for (int c = 0; c < 2; ++c) o.RV.middleRows(c * nq, nq) = tab->psi * o.R.middleRows(c * nl, nl);
  o.RsV = tab->psi * o.Rs;
  o.DbN = o.Db + o.RV;
  o.DivN = o.Div + o.RsV;
  return o;
}

namespace {

// J U = (-u_y, u_x) applied to stacked component rows.
Eigen::MatrixXd rotate(const Eigen::MatrixXd& U) {
  const Eigen::Index n = U.rows() / 2;
  Eigen::MatrixXd R(U.rows(), U.cols());
  R.topRows(n) = -U.bottomRows(n);
  R.bottomRows(n) = U.topRows(n);
  return R;
}

}  // namespace

Eigen::MatrixXcd ElementOperators::W() const {
  return (omega * U).cast<cplx>() + I * (DbN + rot * rotate(U)).cast<cplx>();
}

Eigen::MatrixXcd ElementOperators::W0() const {
  return (omega * U).cast<cplx>() + I * (Db + rot * rotate(U)).cast<cplx>();
}

Eigen::MatrixXcd ElementOperators::W0f() const {
  return (omega * Tr).cast<cplx>() + I * (DbT + rot * rotate(Tr)).cast<cplx>();
}

Eigen::MatrixXd ElementOperators::Jb() const { return stack2(fbn).asDiagonal() * Jmp; }

Eigen::MatrixXcd local_div_block(const ElementOperators& o, const HdgSpace& space, const FormOptions& opt) {
  const double ak2 = opt.alpha * space.k() * space.k();
  const Eigen::VectorXd ws = o.w.cwiseProduct(o.rho).cwiseProduct(o.cs2);
  const Eigen::VectorXd fws = o.wf.cwiseProduct(o.frho).cwiseProduct(o.fcs2);
  const Eigen::VectorXd fwsh = fws.cwiseQuotient(o.fh);
  // SIP shape of <cs2 rho div_n u, div_n u'> + s_n(u, u'); the penalty enters with a minus sign.
  Eigen::MatrixXd A = o.Div.transpose() * ws.asDiagonal() * o.Div;
  const Eigen::MatrixXd cross = o.DivT.transpose() * fws.asDiagonal() * o.Jn;
  A -= cross + cross.transpose();
  A -= ak2 * (o.Jn.transpose() * fwsh.asDiagonal() * o.Jn);
  const Eigen::MatrixXd gp = o.GpU.transpose() * o.w.asDiagonal() * o.DivN;
  A += gp + gp.transpose();
  return A.cast<cplx>();
}

Eigen::MatrixXcd local_conv_block(const ElementOperators& o) {
  const Eigen::MatrixXcd W = o.W();
  const Eigen::VectorXd wr = stack2(o.w.cwiseProduct(o.rho));
  return W.adjoint() * wr.asDiagonal() * W;
}

Eigen::MatrixXcd local_conv_block_sip(const ElementOperators& o, const HdgSpace& space, double lambda) {
  const double lk2 = lambda * space.k() * space.k();
  const Eigen::MatrixXcd W0 = o.W0();
  const Eigen::MatrixXcd W0f = o.W0f();
  const Eigen::MatrixXcd Jb = o.Jb().cast<cplx>();
  const Eigen::VectorXd wr = stack2(o.w.cwiseProduct(o.rho));
  const Eigen::VectorXd fwr = stack2(o.wf.cwiseProduct(o.frho));
  const Eigen::VectorXd fwrh = fwr.cwiseQuotient(stack2(o.fh));
  // i<rho W0 u, [[u']]_b> - i<rho [[u]]_b, W0 u'>: the Hermitian pair produced by
  // substituting the lifting definition into the lifted convection form.
  const Eigen::MatrixXcd c = I * (Jb.transpose() * fwr.asDiagonal() * W0f);
  Eigen::MatrixXcd A = W0.adjoint() * wr.asDiagonal() * W0;
  A += c + c.adjoint();
  A -= lk2 * (Jb.transpose() * fwrh.asDiagonal() * Jb);
  return A;
}

Eigen::MatrixXcd local_rem_block(const ElementOperators& o) {
  const int nq = o.nq;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(o.N, o.N);
  Eigen::VectorXd wm(nq);
  for (int a = 0; a < 2; ++a)
    for (int c = 0; c < 2; ++c) {
      for (int q = 0; q < nq; ++q) wm(q) = o.w(q) * (o.hess_p[q](a, c) - o.rho(q) * o.hess_phi[q](a, c));
      A += (o.U.middleRows(a * nq, nq).transpose() * wm.asDiagonal() * o.U.middleRows(c * nq, nq))
               .cast<cplx>();
    }
  const Eigen::VectorXd wg = stack2(o.w.cwiseProduct(o.gamma).cwiseProduct(o.rho));
  A -= I * o.omega * (o.U.transpose() * wg.asDiagonal() * o.U).cast<cplx>();
  return A;
}

Eigen::MatrixXcd combine(const Eigen::MatrixXcd& div, const Eigen::MatrixXcd& conv, const Eigen::MatrixXcd& rem) {
  return div - conv + rem;
}

Eigen::VectorXcd local_rhs(const ElementOperators& o, const ComplexVectorFn& f) {
  Eigen::VectorXcd fv(2 * o.nq);
  for (int q = 0; q < o.nq; ++q) {
    const Vector2c v = f(o.x[q]);
    fv(q) = o.w(q) * v(0);
    fv(o.nq + q) = o.w(q) * v(1);
  }
  return o.U.transpose().cast<cplx>() * fv;
}

Eigen::MatrixXcd local_matrix(const ElementOperators& o, const HdgSpace& space, const FormOptions& opt) {
  const Eigen::MatrixXcd conv = opt.conv_mode == ConvMode::Lifting ? local_conv_block(o)
                                                                   : local_conv_block_sip(o, space, opt.lambda);
  return combine(local_div_block(o, space, opt), conv, local_rem_block(o));
}

Eigen::MatrixXd local_gram(const ElementOperators& o, bool weighted) {
  const Eigen::VectorXd ws = weighted ? o.w.cwiseProduct(o.rho).cwiseProduct(o.cs2) : o.w;
  const Eigen::VectorXd wr = stack2(weighted ? o.w.cwiseProduct(o.rho) : o.w);
  const Eigen::VectorXd fws =
      (weighted ? o.wf.cwiseProduct(o.frho).cwiseProduct(o.fcs2) : o.wf).cwiseQuotient(o.fh);
  return o.DivN.transpose() * ws.asDiagonal() * o.DivN + o.U.transpose() * stack2(o.w).asDiagonal() * o.U +
         o.DbN.transpose() * wr.asDiagonal() * o.DbN + o.Jn.transpose() * fws.asDiagonal() * o.Jn;
}

FacetVisibility facet_visibility(const ElementOperators& o, const HdgSpace& space, ConvMode mode) {
  const int nk = space.nk(), nf = space.nf();
  FacetVisibility v;
  const Eigen::VectorXd wr = stack2(o.w.cwiseProduct(o.rho));
  const Eigen::VectorXd fwrh = stack2(o.wf.cwiseProduct(o.frho).cwiseQuotient(o.fh));
  const Eigen::MatrixXd Jb = mode == ConvMode::Sip ? o.Jb() : Eigen::MatrixXd();
  for (int j = 0; j < 3; ++j) {
    // Tangential modes are the trailing nf columns of the facet block.
    const int c0 = 2 * nk + j * 2 * nf + nf;
    if (mode == ConvMode::Lifting) {
      const Eigen::MatrixXd M = o.RV.middleCols(c0, nf);
      v.gram[j] = M.transpose() * wr.asDiagonal() * M;
    } else {
      const Eigen::MatrixXd M = Jb.middleCols(c0, nf);
      v.gram[j] = M.transpose() * fwrh.asDiagonal() * M;
    }
    v.scale[j] = o.fcs2.segment(j * o.nqf, o.nqf).cwiseProduct(o.frho.segment(j * o.nqf, o.nqf)).maxCoeff();
  }
  return v;
}

double lifting_bound_ratio(const ElementOperators& o, const Eigen::VectorXd& u) {
  const Eigen::VectorXd wr = stack2(o.w.cwiseProduct(o.rho));
  const Eigen::VectorXd fwrh = stack2(o.wf.cwiseProduct(o.frho).cwiseQuotient(o.fh));
  const Eigen::VectorXd Ru = o.RV * u, Ju = o.Jb() * u;
  const double den = Ju.dot(fwrh.cwiseProduct(Ju));
  return den > 0.0 ? Ru.dot(wr.cwiseProduct(Ru)) / den : 0.0;
}

}  // namespace ghdg
