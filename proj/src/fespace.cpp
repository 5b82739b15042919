#include "ghdg/fespace.hpp"

#include "ghdg/refelem.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace ghdg {

HdgSpace::HdgSpace(std::shared_ptr<const Mesh> mesh, int k, int k_facet, int l)
    : mesh_(std::move(mesh)), k_(k), kf_(k_facet), l_(l) {
  if (!mesh_) throw std::invalid_argument("HdgSpace: null mesh");
  if (k < 1) throw std::invalid_argument("HdgSpace: volume degree must be >= 1");
  if (k_facet != k && k_facet != k - 1)
    throw std::invalid_argument("HdgSpace: facet degree must be k or k-1");
  if (l != k && l != k - 1) throw std::invalid_argument("HdgSpace: lifting degree must be k or k-1");
}

HdgSpace build_space(std::shared_ptr<const Mesh> mesh, int k, int k_facet, int l) {
  return HdgSpace(std::move(mesh), k, k_facet, l);
}

std::vector<long> HdgSpace::local_dofs(int e) const {
  std::vector<long> idx;
  idx.reserve(local_size());
  for (int i = 0; i < volume_block(); ++i) idx.push_back(vol_offset(e) + i);
  for (int j = 0; j < 3; ++j) {
    const long off = facet_offset(mesh_->elements[e].facets[j]);
    for (int i = 0; i < facet_block(); ++i) idx.push_back(off + i);
  }
  return idx;
}

Eigen::VectorXcd DiscreteFunction::local(int e) const {
  Eigen::VectorXcd x(space.local_size());
  x.head(space.volume_block()) = volume(e);
  for (int j = 0; j < 3; ++j)
    x.segment(space.volume_block() + j * space.facet_block(), space.facet_block()) =
        facet(space.mesh().elements[e].facets[j]);
  return x;
}

AffineMap::AffineMap(const Mesh& m, int e) {
  origin = m.vertex(e, 0);
  J.col(0) = m.vertex(e, 1) - origin;
  J.col(1) = m.vertex(e, 2) - origin;
  detJ = J.determinant();
  JinvT = J.inverse().transpose();
}

Eigen::Vector2d facet_ref_point(int j, double s) {
  switch (j) {
    case 0: return {1.0 - s, s};
    case 1: return {0.0, 1.0 - s};
    default: return {s, 0.0};
  }
}

Vector2c evaluate(const DiscreteFunction& u, int e, const Eigen::Vector2d& xi) {
  const int nk = u.space.nk();
  const Eigen::RowVectorXcd phi = eval_basis(u.space.k(), xi).transpose().cast<cplx>();
  const auto c = u.volume(e);
  return {(phi * c.head(nk))(0), (phi * c.tail(nk))(0)};
}

Matrix2c evaluate_grad(const DiscreteFunction& u, int e, const Eigen::Vector2d& xi) {
  const int nk = u.space.nk();
  const BasisGrad g = eval_basis_grad(u.space.k(), xi);
  const AffineMap map(u.space.mesh(), e);
  const auto c = u.volume(e);
  Matrix2c grad;
  for (int comp = 0; comp < 2; ++comp) {
    const Eigen::VectorXcd cc = c.segment(comp * nk, nk);
    const Eigen::Vector2cd gref((g.dx.col(0).transpose().cast<cplx>() * cc)(0),
                                (g.dy.col(0).transpose().cast<cplx>() * cc)(0));
    grad.row(comp) = (map.JinvT.cast<cplx>() * gref).transpose();
  }
  return grad;
}

cplx evaluate_div(const DiscreteFunction& u, int e, const Eigen::Vector2d& xi) {
  const Matrix2c g = evaluate_grad(u, e, xi);
  return g(0, 0) + g(1, 1);
}

Vector2c evaluate_facet(const DiscreteFunction& u, int f, double t) {
  const int nf = u.space.nf();
  Eigen::VectorXd tv(1);
  tv(0) = t;
  const Eigen::RowVectorXcd psi = eval_segment_basis(u.space.k_facet(), tv).transpose().cast<cplx>();
  const auto c = u.facet(f);
  const Point2 nu = u.space.mesh().facets[f].normals[0];
  const cplx an = (psi * c.head(nf))(0), at = (psi * c.tail(nf))(0);
  return {nu.x() * an - nu.y() * at, nu.y() * an + nu.x() * at};
}

Eigen::Matrix2Xcd hdg_jump(const DiscreteFunction& u, int e, int j, const Eigen::VectorXd& s) {
  const Mesh& m = u.space.mesh();
  const int f = m.elements[e].facets[j];
  const int o = m.elements[e].orientation[j];
  Eigen::Matrix2Xcd out(2, s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    out.col(i) = evaluate(u, e, facet_ref_point(j, s(i))) - evaluate_facet(u, f, facet_param(o, s(i)));
  return out;
}

Eigen::VectorXcd jump_nu(const DiscreteFunction& u, int e, int j, const Eigen::VectorXd& s) {
  const Mesh& m = u.space.mesh();
  const Facet& F = m.facets[m.elements[e].facets[j]];
  const Point2 nu = F.normals[F.side_of(e)];
  const Eigen::Matrix2Xcd jmp = hdg_jump(u, e, j, s);
  return (nu.transpose().cast<cplx>() * jmp).transpose();
}

Eigen::Matrix2Xcd jump_b(const DiscreteFunction& u, int e, int j, const Eigen::VectorXd& s,
                         const RealVectorFn& b) {
  const Mesh& m = u.space.mesh();
  const Facet& F = m.facets[m.elements[e].facets[j]];
  const Point2 nu = F.normals[F.side_of(e)];
  const AffineMap map(m, e);
  Eigen::Matrix2Xcd jmp = hdg_jump(u, e, j, s);
  for (Eigen::Index i = 0; i < s.size(); ++i)
    jmp.col(i) *= b(map(facet_ref_point(j, s(i)))).dot(nu);
  return jmp;
}

DiscreteFunction interpolate(const ComplexVectorFn& f, const HdgSpace& space, int quad_margin) {
  DiscreteFunction u(space);
  const Mesh& m = space.mesh();
  const int nk = space.nk(), nf = space.nf();
  const QuadRule qv = quad_triangle(std::min(kMaxQuadExactness, 2 * space.k() + quad_margin));
  const Eigen::MatrixXd phi = eval_basis(space.k(), qv.points);
  for (int e = 0; e < m.num_elements(); ++e) {
    const AffineMap map(m, e);
    Eigen::VectorXcd cx = Eigen::VectorXcd::Zero(nk), cy = Eigen::VectorXcd::Zero(nk);
    for (int q = 0; q < qv.size(); ++q) {
      const Vector2c fv = f(map(qv.points.col(q)));
      // Orthonormal on the reference triangle, so the reference mass matrix is I.
      cx += qv.weights(q) * fv(0) * phi.col(q);
      cy += qv.weights(q) * fv(1) * phi.col(q);
    }
    u.volume(e).head(nk) = cx;
    u.volume(e).tail(nk) = cy;
  }
  const QuadRule qf = quad_segment(std::min(kMaxQuadExactness, 2 * space.k() + quad_margin));
  const Eigen::VectorXd t = qf.points.row(0).transpose();
  const Eigen::MatrixXd psi = eval_segment_basis(space.k_facet(), t);
  for (int fi = 0; fi < m.num_facets(); ++fi) {
    const Facet& F = m.facets[fi];
    const int nsides = F.boundary ? 1 : 2;
    const Point2 nu = F.normals[0];
    Eigen::VectorXcd cn = Eigen::VectorXcd::Zero(nf), ct = Eigen::VectorXcd::Zero(nf);
    for (int q = 0; q < qf.size(); ++q) {
      Vector2c avg = Vector2c::Zero();
      for (int side = 0; side < nsides; ++side) {
        const int e = F.elements[side], j = F.local_index[side];
        const double s = facet_param(m.elements[e].orientation[j], t(q));
        avg += evaluate(u, e, facet_ref_point(j, s));
      }
      avg /= double(nsides);
      cn += qf.weights(q) * (nu.x() * avg(0) + nu.y() * avg(1)) * psi.col(q);
      ct += qf.weights(q) * (nu.x() * avg(1) - nu.y() * avg(0)) * psi.col(q);
    }
    u.facet(fi).head(nf) = cn;
    u.facet(fi).tail(nf) = ct;
  }
  return u;
}

Eigen::MatrixXd facet_frame(const HdgSpace& space, int f) {
  const int nf = space.nf();
  const Point2 nu = space.mesh().facets[f].normals[0];
  const Point2 tau(-nu.y(), nu.x());
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(2 * nf, 2 * nf);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(nf, nf);
  F.block(0, 0, nf, nf) = nu.x() * I;
  F.block(nf, 0, nf, nf) = nu.y() * I;
  F.block(0, nf, nf, nf) = tau.x() * I;
  F.block(nf, nf, nf, nf) = tau.y() * I;
  return F;
}

void apply_normal_bc(DiscreteFunction& u) {
  const Mesh& m = u.space.mesh();
  const int nf = u.space.nf();
  for (int f = 0; f < m.num_facets(); ++f) {
    if (m.facets[f].boundary) u.facet(f).head(nf).setZero();
  }
}

FacetConstraints apply_normal_bc(const HdgSpace& space) {
  const Mesh& m = space.mesh();
  const int nf = space.nf();
  FacetConstraints c;
  c.basis.resize(m.num_facets());
  c.offsets.resize(m.num_facets());
  for (int f = 0; f < m.num_facets(); ++f) {
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2 * nf, 2 * nf);
    if (m.facets[f].boundary) {
      c.basis[f] = I.rightCols(nf);
      c.removed_normal += nf;
    } else {
      c.basis[f] = I;
    }
    c.offsets[f] = c.size;
    c.size += c.basis[f].cols();
  }
  return c;
}

FacetConstraints reduce_tangential(const HdgSpace& space, const FacetConstraints& bc,
                                   const std::vector<Eigen::MatrixXd>& tangential_gram,
                                   const std::vector<double>& scale, double tol) {
  const Mesh& m = space.mesh();
  const int nf = space.nf();
  FacetConstraints c;
  c.removed_normal = bc.removed_normal;
  c.basis.resize(m.num_facets());
  c.offsets.resize(m.num_facets());
  for (int f = 0; f < m.num_facets(); ++f) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tangential_gram[f]);
    const Eigen::VectorXd& ev = es.eigenvalues();
    // Drop modes at roundoff level of the facet scale, and modes whose
    // eigenvectors cannot be resolved relative to the facet's strongest mode.
    const double cut = std::max(kInvisibleLevel * scale[f], tol * ev(nf - 1));
    int keep = 0;
    for (int i = 0; i < nf; ++i) keep += ev(i) > cut;
    const int nnormal = m.facets[f].boundary ? 0 : nf;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2 * nf, nnormal + keep);
    if (nnormal) B.topLeftCorner(nf, nf).setIdentity();
    // Eigenvalues ascend; keep the trailing (visible) eigenvectors, scaled to unit
    // relative visibility so weakly seen modes do not degrade the conditioning.
    B.bottomRightCorner(nf, keep) = es.eigenvectors().rightCols(keep);
    for (int i = 0; i < keep; ++i)
      B.col(nnormal + i) *= std::sqrt(std::max(scale[f], 0.0) / ev(nf - keep + i));
    c.basis[f] = B;
    c.removed_tangential += nf - keep;
    c.offsets[f] = c.size;
    c.size += B.cols();
  }
  return c;
}

Eigen::VectorXcd restrict_facets(const DiscreteFunction& u, const FacetConstraints& c) {
  Eigen::VectorXcd y(c.size);
  for (std::size_t f = 0; f < c.basis.size(); ++f) {
    // Columns are mutually orthogonal: least-squares coefficients per column.
    const Eigen::MatrixXd& B = c.basis[f];
    const Eigen::VectorXd n2 = B.colwise().squaredNorm().transpose();
    y.segment(c.offsets[f], B.cols()) =
        (B.transpose().cast<cplx>() * u.facet(static_cast<int>(f))).cwiseQuotient(n2.cast<cplx>());
  }
  return y;
}

void expand_facets(DiscreteFunction& u, const FacetConstraints& c, const Eigen::VectorXcd& y) {
  for (std::size_t f = 0; f < c.basis.size(); ++f)
    u.facet(static_cast<int>(f)) =
        c.basis[f].cast<cplx>() * y.segment(c.offsets[f], c.basis[f].cols());
}

namespace {

constexpr char kMagic[8] = {'G', 'H', 'D', 'G', 'F', 'U', 'N', '\0'};
constexpr std::uint32_t kFormatVersion = 1;

template <typename T>
void put_le(std::ostream& os, T v) {
  unsigned char buf[sizeof(T)];
  std::uint64_t bits = 0;
  std::memcpy(&bits, &v, sizeof(T));
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  unsigned char buf[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(T)))
    throw std::runtime_error("read_function: truncated input");
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= std::uint64_t(buf[i]) << (8 * i);
  T v;
  std::memcpy(&v, &bits, sizeof(T));
  return v;
}

}  // namespace

void write_function(std::ostream& os, const DiscreteFunction& u) {
  os.write(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(os, kFormatVersion);
  put_le<std::int32_t>(os, u.space.k());
  put_le<std::int32_t>(os, u.space.k_facet());
  put_le<std::int32_t>(os, u.space.l());
  put_le<std::uint64_t>(os, mesh_hash(u.space.mesh()));
  put_le<std::uint64_t>(os, static_cast<std::uint64_t>(u.coeffs.size()));
  for (Eigen::Index i = 0; i < u.coeffs.size(); ++i) {
    put_le<double>(os, u.coeffs(i).real());
    put_le<double>(os, u.coeffs(i).imag());
  }
}

DiscreteFunction read_function(std::istream& is, const HdgSpace& space) {
  char magic[8];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
    throw std::runtime_error("read_function: not a discrete function file");
  if (get_le<std::uint32_t>(is) != kFormatVersion)
    throw std::runtime_error("read_function: unsupported format version");
  const int k = get_le<std::int32_t>(is), kf = get_le<std::int32_t>(is), l = get_le<std::int32_t>(is);
  const std::uint64_t hash = get_le<std::uint64_t>(is);
  if (k != space.k() || kf != space.k_facet() || l != space.l() || hash != mesh_hash(space.mesh()))
    throw std::runtime_error("read_function: space signature mismatch");
  const std::uint64_t n = get_le<std::uint64_t>(is);
  if (n != static_cast<std::uint64_t>(space.total_dofs()))
    throw std::runtime_error("read_function: coefficient count mismatch");
  DiscreteFunction u(space);
  for (std::uint64_t i = 0; i < n; ++i) {
    const double re = get_le<double>(is);
    const double im = get_le<double>(is);
    u.coeffs(static_cast<Eigen::Index>(i)) = cplx(re, im);
  }
  return u;
}

}  // namespace ghdg
