#pragma once
// Error measurement in the discrete energy distance d_n, rates, and the
// X_n best approximation.

#include "ghdg/assembly.hpp"

#include <optional>
#include <vector>

namespace ghdg {

struct ErrorBreakdown {
  double div_term = 0.0;   // ||(cs2 rho)^1/2 (div u - div_n u_n)||
  double l2_term = 0.0;    // ||u - u_tau||
  double conv_term = 0.0;  // ||rho^1/2 (d_b u - D_b^n u_n)||
  double jump_term = 0.0;  // ||(cs2 rho)^1/2 h^-1/2 [[u_n]]_nu|| over element boundaries
  double total = 0.0;
};

// Value, divergence and convective derivative of a reference field at a point.
struct ReferenceSample {
  Vector2c u;
  cplx div;
  Vector2c db;
};
using ReferenceField = std::function<ReferenceSample(const Point2&)>;

ReferenceField analytic_reference(const ComplexVectorField& u, const CoefficientSet& set);

// Bucket grid over element bounding boxes; points are assigned to the
// element with the largest minimal barycentric coordinate.
class PointLocator {
 public:
  explicit PointLocator(std::shared_ptr<const Mesh> mesh);
  // Returns the containing element (tolerance 1e-12), or the nearest one for
  // points outside the mesh.
  int locate(const Point2& x) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  Point2 lo_;
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> cells_;
};

// Discrete reference: u_tau, div_n and D_b^n of a (finer) discrete function.
ReferenceField discrete_reference(const DiscreteFunction& ref, const CoefficientSet& set, int quad_margin = 4);

ErrorBreakdown dn_error(const ReferenceField& ref, const DiscreteFunction& un, const CoefficientSet& set,
                        int quad_margin = 4, bool weighted = true);
ErrorBreakdown dn_error(const ComplexVectorField& u, const DiscreteFunction& un, const CoefficientSet& set,
                        int quad_margin = 4, bool weighted = true);

// rate_i = log(e_{i-1}/e_i) / log(h_{i-1}/h_i); undefined entries are empty.
std::vector<std::optional<double>> eoc(const std::vector<double>& errors, const std::vector<double>& h);

// X_n projection: <Pi u, v>_X = <u, v>_X for all v in the constrained space.
LocalAssembler gram_assembler(const HdgSpace& space, const CoefficientSet& set, const ReferenceField& ref,
                              int quad_margin = 4, bool weighted = true);
DiscreteFunction best_approx(const ReferenceField& ref, const HdgSpace& space, const CoefficientSet& set,
                             const FacetConstraints& c, int quad_margin = 4, bool weighted = true,
                             SolveInfo* info = nullptr);

}  // namespace ghdg
