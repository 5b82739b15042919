#pragma once
// The HDG product space: volume polynomials of degree k per element and
// facet polynomials of degree k_facet per facet, both vector valued.

#include "ghdg/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/LU>
#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace ghdg {

using cplx = std::complex<double>;
using Vector2c = Eigen::Matrix<cplx, 2, 1>;
using Matrix2c = Eigen::Matrix<cplx, 2, 2>;

// Degrees and dof numbering. A volume block is laid out as [x modes, y modes];
// a facet block as [normal modes, tangential modes] in the frame of the facet's
// side-0 normal nu and tangent (-nu_y, nu_x).
class HdgSpace {
 public:
  HdgSpace() = default;
  HdgSpace(std::shared_ptr<const Mesh> mesh, int k, int k_facet, int l);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  int k() const { return k_; }
  int k_facet() const { return kf_; }
  int l() const { return l_; }
  bool reduced() const { return kf_ < k_; }

  int nk() const { return (k_ + 1) * (k_ + 2) / 2; }
  int nf() const { return kf_ + 1; }
  int nl() const { return (l_ + 1) * (l_ + 2) / 2; }
  int volume_block() const { return 2 * nk(); }
  int facet_block() const { return 2 * nf(); }
  int local_size() const { return volume_block() + 3 * facet_block(); }

  long vol_offset(int e) const { return static_cast<long>(e) * volume_block(); }
  long facet_offset(int f) const {
    return static_cast<long>(mesh_->num_elements()) * volume_block() +
           static_cast<long>(f) * facet_block();
  }
  long num_volume_dofs() const { return static_cast<long>(mesh_->num_elements()) * volume_block(); }
  long num_facet_dofs() const { return static_cast<long>(mesh_->num_facets()) * facet_block(); }
  long total_dofs() const { return num_volume_dofs() + num_facet_dofs(); }

  // Global indices of the local element vector [volume, facet 0, facet 1, facet 2].
  std::vector<long> local_dofs(int e) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  int k_ = 1, kf_ = 1, l_ = 1;
};

HdgSpace build_space(std::shared_ptr<const Mesh> mesh, int k, int k_facet, int l);

struct DiscreteFunction {
  HdgSpace space;
  Eigen::VectorXcd coeffs;

  DiscreteFunction() = default;
  explicit DiscreteFunction(HdgSpace s)
      : space(std::move(s)), coeffs(Eigen::VectorXcd::Zero(space.total_dofs())) {}

  Eigen::VectorXcd local(int e) const;
  auto volume(int e) { return coeffs.segment(space.vol_offset(e), space.volume_block()); }
  auto volume(int e) const { return coeffs.segment(space.vol_offset(e), space.volume_block()); }
  auto facet(int f) { return coeffs.segment(space.facet_offset(f), space.facet_block()); }
  auto facet(int f) const { return coeffs.segment(space.facet_offset(f), space.facet_block()); }
};

// Reference-to-physical affine map of an element.
struct AffineMap {
  Point2 origin;
  Eigen::Matrix2d J;      // columns: v1 - v0, v2 - v0
  Eigen::Matrix2d JinvT;  // inverse transpose, maps reference gradients
  double detJ = 0.0;

  AffineMap(const Mesh& m, int e);
  Point2 operator()(const Eigen::Vector2d& xi) const { return origin + J * xi; }
  Eigen::Vector2d inverse(const Point2& x) const { return J.inverse() * (x - origin); }
};

// Reference coordinates of a point on local facet j at local parameter s,
// running from vertex (j+1)%3 to vertex (j+2)%3.
Eigen::Vector2d facet_ref_point(int j, double s);
// Parameter of the facet's own basis (lower global vertex to higher).
inline double facet_param(int orientation, double s) { return orientation > 0 ? s : 1.0 - s; }

Vector2c evaluate(const DiscreteFunction& u, int e, const Eigen::Vector2d& xi);
cplx evaluate_div(const DiscreteFunction& u, int e, const Eigen::Vector2d& xi);
// Row i is the gradient of component i.
Matrix2c evaluate_grad(const DiscreteFunction& u, int e, const Eigen::Vector2d& xi);
// Facet function value at its own parameter t.
Vector2c evaluate_facet(const DiscreteFunction& u, int f, double t);

// Jumps on local facet j of element e at local parameters s; one column per point.
Eigen::Matrix2Xcd hdg_jump(const DiscreteFunction& u, int e, int j, const Eigen::VectorXd& s);
Eigen::VectorXcd jump_nu(const DiscreteFunction& u, int e, int j, const Eigen::VectorXd& s);
using RealVectorFn = std::function<Eigen::Vector2d(const Point2&)>;
Eigen::Matrix2Xcd jump_b(const DiscreteFunction& u, int e, int j, const Eigen::VectorXd& s,
                         const RealVectorFn& b);

using ComplexVectorFn = std::function<Vector2c(const Point2&)>;
// Elementwise L2 projection plus facetwise projection of the averaged trace.
DiscreteFunction interpolate(const ComplexVectorFn& f, const HdgSpace& space, int quad_margin = 4);

// Removes the normal component of facet unknowns on boundary facets.
void apply_normal_bc(DiscreteFunction& u);

// Per-facet linear constraints u_F = P_f y_f. The boundary condition drops
// the normal modes of boundary facets; `reduce_tangential` further removes
// tangential modes the discrete form cannot see.
struct FacetConstraints {
  std::vector<Eigen::MatrixXd> basis;  // 2nf x m_f, mutually orthogonal columns
  std::vector<long> offsets;           // into the reduced facet vector
  long size = 0;
  long removed_normal = 0;
  long removed_tangential = 0;

  int modes(int f) const { return static_cast<int>(basis[f].cols()); }
};

FacetConstraints apply_normal_bc(const HdgSpace& space);

// Tangential visibility Gram per facet (nf x nf, acting on tangential modes)
// and a reference scale per facet. Modes with eigenvalue below
// max(kInvisibleLevel * scale, tol * largest eigenvalue) are removed; kept
// tangential modes are scaled to unit visibility relative to `scale`.
inline constexpr double kInvisibleLevel = 1e-28;
FacetConstraints reduce_tangential(const HdgSpace& space, const FacetConstraints& bc,
                                   const std::vector<Eigen::MatrixXd>& tangential_gram,
                                   const std::vector<double>& scale, double tol);

// Map from facet frame coefficients to [x modes, y modes] coefficients.
Eigen::MatrixXd facet_frame(const HdgSpace& space, int f);

// Facet part of u expressed in / expanded from reduced coordinates.
Eigen::VectorXcd restrict_facets(const DiscreteFunction& u, const FacetConstraints& c);
void expand_facets(DiscreteFunction& u, const FacetConstraints& c, const Eigen::VectorXcd& y);

void write_function(std::ostream& os, const DiscreteFunction& u);
DiscreteFunction read_function(std::istream& is, const HdgSpace& space);

}  // namespace ghdg
