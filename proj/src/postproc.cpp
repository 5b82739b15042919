#include "ghdg/postproc.hpp"

#include <algorithm>
#include <cmath>

namespace ghdg {

ReferenceField analytic_reference(const ComplexVectorField& u, const CoefficientSet& set) {
  return [u, b = set.b](const Point2& x) {
    const auto j = u.jet(x);
    const Eigen::Vector2d bx = b.value(x);
    ReferenceSample s;
    s.u = Vector2c(j[0].v, j[1].v);
    s.div = j[0].g(0) + j[1].g(1);
    s.db = Vector2c((j[0].g.transpose() * bx.cast<cplx>()).value(), (j[1].g.transpose() * bx.cast<cplx>()).value());
    return s;
  };
}

PointLocator::PointLocator(std::shared_ptr<const Mesh> mesh) : mesh_(std::move(mesh)) {
  const Mesh& m = *mesh_;
  Point2 lo = m.vertices.front(), hi = lo;
  for (const Point2& v : m.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  lo_ = lo;
  cell_ = std::max(m.h_max, 1e-12);
  nx_ = std::max(1, static_cast<int>(std::ceil((hi.x() - lo.x()) / cell_)) + 1);
  ny_ = std::max(1, static_cast<int>(std::ceil((hi.y() - lo.y()) / cell_)) + 1);
  cells_.resize(static_cast<std::size_t>(nx_) * ny_);
  for (int e = 0; e < m.num_elements(); ++e) {
    Point2 a = m.vertex(e, 0), c = a;
    for (int j = 1; j < 3; ++j) {
      a = a.cwiseMin(m.vertex(e, j));
      c = c.cwiseMax(m.vertex(e, j));
    }
    const int i0 = std::clamp(static_cast<int>((a.x() - lo_.x()) / cell_), 0, nx_ - 1);
    const int i1 = std::clamp(static_cast<int>((c.x() - lo_.x()) / cell_), 0, nx_ - 1);
    const int j0 = std::clamp(static_cast<int>((a.y() - lo_.y()) / cell_), 0, ny_ - 1);
    const int j1 = std::clamp(static_cast<int>((c.y() - lo_.y()) / cell_), 0, ny_ - 1);
    for (int i = i0; i <= i1; ++i)
      for (int j = j0; j <= j1; ++j) cells_[static_cast<std::size_t>(j) * nx_ + i].push_back(e);
  }
}

int PointLocator::locate(const Point2& x) const {
  const Mesh& m = *mesh_;
  const int ci = std::clamp(static_cast<int>((x.x() - lo_.x()) / cell_), 0, nx_ - 1);
  const int cj = std::clamp(static_cast<int>((x.y() - lo_.y()) / cell_), 0, ny_ - 1);
  int best = -1;
  double best_min = -std::numeric_limits<double>::infinity();
  auto scan = [&](int i, int j) {
    for (int e : cells_[static_cast<std::size_t>(j) * nx_ + i]) {
      const double mn = m.barycentric(e, x).minCoeff();
      if (mn > best_min) {
        best_min = mn;
        best = e;
      }
    }
  };
  scan(ci, cj);
  if (best_min >= -1e-12) return best;
  // Outside the mesh (curved boundary): widen the search ring by ring.
  for (int r = 1; r < std::max(nx_, ny_); ++r) {
    for (int i = ci - r; i <= ci + r; ++i)
      for (int j = cj - r; j <= cj + r; ++j)
        if (i >= 0 && j >= 0 && i < nx_ && j < ny_ && (std::abs(i - ci) == r || std::abs(j - cj) == r))
          scan(i, j);
    if (best >= 0) break;
  }
  return best;
}

ReferenceField discrete_reference(const DiscreteFunction& ref, const CoefficientSet& set, int quad_margin) {
  const HdgSpace& space = ref.space;
  const int ne = space.mesh().num_elements(), nl = space.nl();
  // Lifting coefficients of the reference function per element.
  auto lift = std::make_shared<std::vector<Eigen::VectorXcd>>(ne);
  for (int e = 0; e < ne; ++e) {
    const ElementOperators ops = element_operators(space, set, e, quad_margin);
    const Eigen::VectorXcd x = ref.local(e);
    Eigen::VectorXcd c(3 * nl);
    c.head(2 * nl) = ops.R.cast<cplx>() * x;
    c.tail(nl) = ops.Rs.cast<cplx>() * x;
    (*lift)[e] = c;
  }
  auto locator = std::make_shared<PointLocator>(space.mesh_ptr());
  return [ref, lift, locator, b = set.b, nl](const Point2& x) {
    const int e = locator->locate(x);
    const HdgSpace& sp = ref.space;
    const AffineMap map(sp.mesh(), e);
    const Eigen::Vector2d xi = map.inverse(x);
    const Eigen::VectorXd psi = eval_basis(sp.l(), xi);
    const Eigen::VectorXcd& c = (*lift)[e];
    const Matrix2c G = evaluate_grad(ref, e, xi);
    const Eigen::Vector2d bx = b.value(x);
    ReferenceSample s;
    s.u = evaluate(ref, e, xi);
    const Eigen::RowVectorXcd p = psi.transpose().cast<cplx>();
    s.div = G.trace() + (p * c.tail(nl))(0);
    s.db = G * bx.cast<cplx>();
    for (int i = 0; i < 2; ++i) s.db(i) += (p * c.segment(i * nl, nl))(0);
    return s;
  };
}

namespace {

struct Samples {
  Eigen::VectorXcd u, div, db;  // u and db stacked [x; y]
};

Samples sample_reference(const ReferenceField& ref, const ElementOperators& ops) {
  const int nq = ops.nq;
  Samples s{Eigen::VectorXcd(2 * nq), Eigen::VectorXcd(nq), Eigen::VectorXcd(2 * nq)};
  for (int q = 0; q < nq; ++q) {
    const ReferenceSample r = ref(ops.x[q]);
    s.u(q) = r.u(0);
    s.u(nq + q) = r.u(1);
    s.div(q) = r.div;
    s.db(q) = r.db(0);
    s.db(nq + q) = r.db(1);
  }
  return s;
}

double weighted_sq(const Eigen::VectorXd& w, const Eigen::VectorXcd& v) {
  return w.dot(v.cwiseAbs2());
}

Eigen::VectorXd stack2(const Eigen::VectorXd& v) {
  Eigen::VectorXd s(2 * v.size());
  s << v, v;
  return s;
}

}  // namespace

ErrorBreakdown dn_error(const ReferenceField& ref, const DiscreteFunction& un, const CoefficientSet& set,
                        int quad_margin, bool weighted) {
  const HdgSpace& space = un.space;
  const int ne = space.mesh().num_elements();
  std::vector<std::array<double, 4>> parts(ne);
#pragma omp parallel for schedule(dynamic, 16)
  for (int e = 0; e < ne; ++e) {
    const ElementOperators o = element_operators(space, set, e, quad_margin);
    const Samples s = sample_reference(ref, o);
    const Eigen::VectorXcd x = un.local(e);
    const Eigen::VectorXd wr = weighted ? o.w.cwiseProduct(o.rho) : o.w;
    const Eigen::VectorXd ws = weighted ? wr.cwiseProduct(o.cs2) : o.w;
    const Eigen::VectorXd fws =
        (weighted ? o.wf.cwiseProduct(o.frho).cwiseProduct(o.fcs2) : o.wf).cwiseQuotient(o.fh);
    parts[e] = {weighted_sq(ws, s.div - o.DivN.cast<cplx>() * x),
                weighted_sq(stack2(o.w), s.u - o.U.cast<cplx>() * x),
                weighted_sq(stack2(wr), s.db - o.DbN.cast<cplx>() * x),
                weighted_sq(fws, o.Jn.cast<cplx>() * x)};
  }
  std::array<double, 4> sum{};
  for (const auto& p : parts)
    for (int i = 0; i < 4; ++i) sum[i] += p[i];
  ErrorBreakdown r;
  r.div_term = std::sqrt(sum[0]);
  r.l2_term = std::sqrt(sum[1]);
  r.conv_term = std::sqrt(sum[2]);
  r.jump_term = std::sqrt(sum[3]);
  r.total = std::sqrt(sum[0] + sum[1] + sum[2] + sum[3]);
  return r;
}

ErrorBreakdown dn_error(const ComplexVectorField& u, const DiscreteFunction& un, const CoefficientSet& set,
                        int quad_margin, bool weighted) {
  return dn_error(analytic_reference(u, set), un, set, quad_margin, weighted);
}

std::vector<std::optional<double>> eoc(const std::vector<double>& errors, const std::vector<double>& h) {
  if (errors.size() != h.size()) throw std::invalid_argument("eoc: errors and h differ in length");
  std::vector<std::optional<double>> r(errors.size());
  for (std::size_t i = 1; i < errors.size(); ++i) {
    if (!(errors[i - 1] > 0.0) || !(errors[i] > 0.0) || !(h[i - 1] > 0.0) || !(h[i] > 0.0) || h[i - 1] == h[i])
      continue;
    r[i] = std::log(errors[i - 1] / errors[i]) / std::log(h[i - 1] / h[i]);
  }
  return r;
}

LocalAssembler gram_assembler(const HdgSpace& space, const CoefficientSet& set, const ReferenceField& ref,
                              int quad_margin, bool weighted) {
  return [&space, &set, ref, quad_margin, weighted](int e) {
    const ElementOperators o = element_operators(space, set, e, quad_margin);
    LocalSystem ls;
    ls.A = local_gram(o, weighted).cast<cplx>();
    if (ref) {
      const Samples s = sample_reference(ref, o);
      const Eigen::VectorXd wr = weighted ? o.w.cwiseProduct(o.rho) : o.w;
      const Eigen::VectorXd ws = weighted ? wr.cwiseProduct(o.cs2) : o.w;
      ls.b = o.DivN.transpose().cast<cplx>() * ws.cast<cplx>().cwiseProduct(s.div) +
             o.U.transpose().cast<cplx>() * stack2(o.w).cast<cplx>().cwiseProduct(s.u) +
             o.DbN.transpose().cast<cplx>() * stack2(wr).cast<cplx>().cwiseProduct(s.db);
    } else {
      ls.b = Eigen::VectorXcd::Zero(o.N);
    }
    return ls;
  };
}

DiscreteFunction best_approx(const ReferenceField& ref, const HdgSpace& space, const CoefficientSet& set,
                             const FacetConstraints& c, int quad_margin, bool weighted, SolveInfo* info) {
  const CondensedSystem sys = assemble_condensed(space, c, gram_assembler(space, set, ref, quad_margin, weighted));
  // Condensation leaves rounding-level asymmetry; use the Hermitian part.
  const SpMat H = 0.5 * (sys.S + SpMat(sys.S.adjoint()));
  const Eigen::VectorXcd y = hermitian_solve(H, sys.g, info);
  return recover_interior(sys, y);
}

}  // namespace ghdg
