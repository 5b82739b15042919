#pragma once
// Global systems: static condensation onto the facet skeleton and the
// uncondensed oracle system.

#include "ghdg/forms.hpp"
#include "ghdg/solver.hpp"

#include <Eigen/LU>
#include <functional>
#include <string>
#include <vector>

namespace ghdg {

struct LocalSystem {
  Eigen::MatrixXcd A;  // local_size x local_size
  Eigen::VectorXcd b;
};
using LocalAssembler = std::function<LocalSystem(int element)>;

// Discrete Galbrun problem with source f.
LocalAssembler galbrun_assembler(const HdgSpace& space, const CoefficientSet& set, const FormOptions& opt,
                                 ComplexVectorFn f);

// Boundary condition plus removal of tangential facet modes invisible to the
// convection term (eigenvalue threshold `tol` relative to the facet's strongest mode).
FacetConstraints build_constraints(const HdgSpace& space, const CoefficientSet& set, ConvMode mode,
                                   int quad_margin = 4, double tol = 1e-12);

// Local constraint matrix blockdiag(I, P_f0, P_f1, P_f2) and the matching reduced facet indices.
Eigen::MatrixXd local_constraint(const HdgSpace& space, const FacetConstraints& c, int e);
std::vector<long> local_facet_indices(const HdgSpace& space, const FacetConstraints& c, int e);

struct CondensedSystem {
  HdgSpace space;
  FacetConstraints constraints;
  SpMat S;
  Eigen::VectorXcd g;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXcd>> Att;
  std::vector<Eigen::MatrixXcd> AtF;
  std::vector<Eigen::VectorXcd> bt;
};

class AssemblyError : public std::runtime_error {
 public:
  AssemblyError(int element, const std::string& what) : std::runtime_error(what), element_(element) {}
  int element() const { return element_; }

 private:
  int element_;
};

CondensedSystem assemble_condensed(const HdgSpace& space, const FacetConstraints& c,
                                   const LocalAssembler& local);

struct FullSystem {
  SpMat A;  // unknowns: [volume dofs, reduced facet dofs]
  Eigen::VectorXcd b;
};
FullSystem assemble_full(const HdgSpace& space, const FacetConstraints& c, const LocalAssembler& local);

DiscreteFunction recover_interior(const CondensedSystem& sys, const Eigen::VectorXcd& facet_solution,
                                  double* max_residual = nullptr);
DiscreteFunction full_to_function(const HdgSpace& space, const FacetConstraints& c, const Eigen::VectorXcd& x);
Eigen::VectorXcd function_to_full(const DiscreteFunction& u, const FacetConstraints& c);

struct CostReport {
  long ndofs = 0;   // all volume and facet unknowns
  long ncdofs = 0;  // facet unknowns after the boundary condition
  long nze = 0;     // structural nonzeros of the condensed matrix
};
CostReport cost_report(const HdgSpace& space, const FacetConstraints& bc);

void write_matrix_market(const std::string& path, const SpMat& A);

}  // namespace ghdg
