#include "ghdg/assembly.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>

namespace ghdg {

LocalAssembler galbrun_assembler(const HdgSpace& space, const CoefficientSet& set, const FormOptions& opt,
                                 ComplexVectorFn f) {
  opt.validate();
  return [&space, &set, opt, f = std::move(f)](int e) {
    const ElementOperators ops = element_operators(space, set, e, opt.quad_margin);
    LocalSystem s;
    s.A = local_matrix(ops, space, opt);
    s.b = f ? local_rhs(ops, f) : Eigen::VectorXcd::Zero(ops.N);
    return s;
  };
}

FacetConstraints build_constraints(const HdgSpace& space, const CoefficientSet& set, ConvMode mode,
                                   int quad_margin, double tol) {
  const Mesh& m = space.mesh();
  const int nf = space.nf();
  const FacetConstraints bc = apply_normal_bc(space);
  std::vector<Eigen::MatrixXd> gram(m.num_facets(), Eigen::MatrixXd::Zero(nf, nf));
  std::vector<double> scale(m.num_facets(), 0.0);
  for (int e = 0; e < m.num_elements(); ++e) {
    const ElementOperators ops = element_operators(space, set, e, quad_margin);
    const FacetVisibility v = facet_visibility(ops, space, mode);
    for (int j = 0; j < 3; ++j) {
      const int f = m.elements[e].facets[j];
      gram[f] += v.gram[j];
      scale[f] = std::max(scale[f], v.scale[j]);
    }
  }
  return reduce_tangential(space, bc, gram, scale, tol);
}

Eigen::MatrixXd local_constraint(const HdgSpace& space, const FacetConstraints& c, int e) {
  const Element& el = space.mesh().elements[e];
  int m = space.volume_block();
  for (int f : el.facets) m += c.modes(f);
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(space.local_size(), m);
  P.topLeftCorner(space.volume_block(), space.volume_block()).setIdentity();
  int col = space.volume_block();
  for (int j = 0; j < 3; ++j) {
    const int f = el.facets[j];
    P.block(space.volume_block() + j * space.facet_block(), col, space.facet_block(), c.modes(f)) = c.basis[f];
    col += c.modes(f);
  }
  return P;
}

std::vector<long> local_facet_indices(const HdgSpace& space, const FacetConstraints& c, int e) {
  std::vector<long> idx;
  for (int f : space.mesh().elements[e].facets)
    for (int i = 0; i < c.modes(f); ++i) idx.push_back(c.offsets[f] + i);
  return idx;
}

namespace {

using Triplet = Eigen::Triplet<cplx>;

struct ElementCondensation {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu;
  Eigen::MatrixXcd AtF;
  Eigen::VectorXcd bt;
  Eigen::MatrixXcd S;
  Eigen::VectorXcd g;
};

ElementCondensation condense_element(const HdgSpace& space, const FacetConstraints& c,
                                     const LocalAssembler& local, int e) {
  const LocalSystem ls = local(e);
  const Eigen::MatrixXd P = local_constraint(space, c, e);
  const Eigen::MatrixXcd Pc = P.cast<cplx>();
  const Eigen::MatrixXcd A = Pc.transpose() * ls.A * Pc;
  const Eigen::VectorXcd b = Pc.transpose() * ls.b;
  const int nt = space.volume_block(), mF = static_cast<int>(A.rows()) - nt;

  ElementCondensation ec;
  ec.lu.compute(A.topLeftCorner(nt, nt));
  if (!(ec.lu.rcond() > std::numeric_limits<double>::epsilon()))
    throw AssemblyError(e, "assemble_condensed: volume block singular on element " + std::to_string(e));
  ec.AtF = A.topRightCorner(nt, mF);
  ec.bt = b.head(nt);
  const Eigen::MatrixXcd X = ec.lu.solve(ec.AtF);
  const Eigen::VectorXcd y = ec.lu.solve(ec.bt);
  ec.S = A.bottomRightCorner(mF, mF) - A.bottomLeftCorner(mF, nt) * X;
  ec.g = b.tail(mF) - A.bottomLeftCorner(mF, nt) * y;
  return ec;
}

}  // namespace

CondensedSystem assemble_condensed(const HdgSpace& space, const FacetConstraints& c,
                                   const LocalAssembler& local) {
  const int ne = space.mesh().num_elements();
  CondensedSystem sys;
  sys.space = space;
  sys.constraints = c;
  sys.Att.resize(ne);
  sys.AtF.resize(ne);
  sys.bt.resize(ne);
  sys.g = Eigen::VectorXcd::Zero(c.size);

  std::vector<ElementCondensation> parts(ne);
  std::string error;
  int error_element = -1;
#pragma omp parallel for schedule(dynamic, 16)
  for (int e = 0; e < ne; ++e) {
    try {
      parts[e] = condense_element(space, c, local, e);
    } catch (const std::exception& ex) {
#pragma omp critical
      if (error_element < 0 || e < error_element) {
        error_element = e;
        error = ex.what();
      }
    }
  }
  if (error_element >= 0) throw AssemblyError(error_element, error);

  // Sequential merge in element order keeps the floating-point sums reproducible.
  std::vector<Triplet> trip;
  std::size_t total = 0;
  for (const auto& p : parts) total += static_cast<std::size_t>(p.S.size());
  trip.reserve(total);
  for (int e = 0; e < ne; ++e) {
    const std::vector<long> idx = local_facet_indices(space, c, e);
    ElementCondensation& p = parts[e];
    for (std::size_t j = 0; j < idx.size(); ++j) {
      sys.g(idx[j]) += p.g(j);
      for (std::size_t i = 0; i < idx.size(); ++i) trip.emplace_back(idx[i], idx[j], p.S(i, j));
    }
    sys.Att[e] = std::move(p.lu);
    sys.AtF[e] = std::move(p.AtF);
    sys.bt[e] = std::move(p.bt);
    p.S.resize(0, 0);
  }
  sys.S.resize(c.size, c.size);
  sys.S.setFromTriplets(trip.begin(), trip.end());
  sys.S.makeCompressed();
  return sys;
}

FullSystem assemble_full(const HdgSpace& space, const FacetConstraints& c, const LocalAssembler& local) {
  const int ne = space.mesh().num_elements();
  const long nvol = space.num_volume_dofs();
  const int nt = space.volume_block();
  FullSystem fs;
  fs.b = Eigen::VectorXcd::Zero(nvol + c.size);
  std::vector<Triplet> trip;
  for (int e = 0; e < ne; ++e) {
    const LocalSystem ls = local(e);
    const Eigen::MatrixXcd Pc = local_constraint(space, c, e).cast<cplx>();
    const Eigen::MatrixXcd A = Pc.transpose() * ls.A * Pc;
    const Eigen::VectorXcd b = Pc.transpose() * ls.b;
    std::vector<long> idx;
    for (int i = 0; i < nt; ++i) idx.push_back(space.vol_offset(e) + i);
    for (long i : local_facet_indices(space, c, e)) idx.push_back(nvol + i);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      fs.b(idx[j]) += b(j);
      for (std::size_t i = 0; i < idx.size(); ++i)
        if (A(i, j) != cplx(0.0)) trip.emplace_back(idx[i], idx[j], A(i, j));
    }
  }
  fs.A.resize(nvol + c.size, nvol + c.size);
  fs.A.setFromTriplets(trip.begin(), trip.end());
  fs.A.makeCompressed();
  return fs;
}

DiscreteFunction recover_interior(const CondensedSystem& sys, const Eigen::VectorXcd& y, double* max_residual) {
  DiscreteFunction u(sys.space);
  expand_facets(u, sys.constraints, y);
  double worst = 0.0;
  for (int e = 0; e < sys.space.mesh().num_elements(); ++e) {
    const std::vector<long> idx = local_facet_indices(sys.space, sys.constraints, e);
    Eigen::VectorXcd yF(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) yF(i) = y(idx[i]);
    const Eigen::VectorXcd rhs = sys.bt[e] - sys.AtF[e] * yF;
    const Eigen::VectorXcd ut = sys.Att[e].solve(rhs);
    u.volume(e) = ut;
    if (max_residual) {
      const Eigen::MatrixXcd A = sys.Att[e].reconstructedMatrix();
      const double scale = A.norm() * ut.norm() + rhs.norm();
      worst = std::max(worst, scale > 0 ? (A * ut - rhs).norm() / scale : 0.0);
    }
  }
  if (max_residual) *max_residual = worst;
  return u;
}

DiscreteFunction full_to_function(const HdgSpace& space, const FacetConstraints& c, const Eigen::VectorXcd& x) {
  DiscreteFunction u(space);
  const long nvol = space.num_volume_dofs();
  u.coeffs.head(nvol) = x.head(nvol);
  expand_facets(u, c, x.tail(c.size));
  return u;
}

Eigen::VectorXcd function_to_full(const DiscreteFunction& u, const FacetConstraints& c) {
  const long nvol = u.space.num_volume_dofs();
  Eigen::VectorXcd x(nvol + c.size);
  x.head(nvol) = u.coeffs.head(nvol);
  x.tail(c.size) = restrict_facets(u, c);
  return x;
}

CostReport cost_report(const HdgSpace& space, const FacetConstraints& bc) {
  const Mesh& m = space.mesh();
  CostReport r;
  r.ndofs = space.total_dofs();
  r.ncdofs = bc.size;
  std::set<std::pair<int, int>> pairs;
  for (const Element& el : m.elements)
    for (int a : el.facets)
      for (int b : el.facets) pairs.emplace(a, b);
  for (const auto& [a, b] : pairs) r.nze += static_cast<long>(bc.modes(a)) * bc.modes(b);
  return r;
}

void write_matrix_market(const std::string& path, const SpMat& A) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os.precision(17);
  os << "%%MatrixMarket matrix coordinate complex general\n";
  os << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
  for (int j = 0; j < A.outerSize(); ++j)
    for (SpMat::InnerIterator it(A, j); it; ++it)
      os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value().real() << ' ' << it.value().imag() << '\n';
}

}  // namespace ghdg
