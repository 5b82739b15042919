#pragma once
// Element-local operators and blocks of the discrete sesquilinear form
//   a_n = a_div - a_conv + a_rem.
//
// Every discrete quantity is expressed as a real matrix acting on the local
// coefficient vector [volume (2 nk), facet 0, facet 1, facet 2 (2 nf each)]
// and sampled at quadrature points. A term <c L u, M u'> becomes M^H diag(c w) L.

#include "ghdg/coeffs.hpp"
#include "ghdg/fespace.hpp"
#include "ghdg/refelem.hpp"

#include <memory>

namespace ghdg {

enum class ConvMode { Lifting, Sip };

struct FormOptions {
  double alpha = 100.0;  // divergence penalty, multiplied by k^2
  ConvMode conv_mode = ConvMode::Lifting;
  double lambda = 10.0;  // SIP convection penalty, multiplied by k^2
  int quad_margin = 4;   // quadrature exactness 2k + quad_margin

  void validate() const;
};

// Reference tables shared by all elements of a space.
struct ReferenceTables {
  int k = 0, kf = 0, l = 0, degree = 0;
  QuadRule vol, seg;
  Eigen::MatrixXd phi, dphi_xi, dphi_eta;  // nq x nk
  Eigen::MatrixXd psi;                     // nq x nl (lifting basis)
  std::array<Eigen::MatrixXd, 3> fphi, fdphi_xi, fdphi_eta;  // nqf x nk per local facet
  std::array<Eigen::MatrixXd, 3> fpsi;                       // nqf x nl
  std::array<Eigen::MatrixXd, 2> fbasis;                     // nqf x nf at t = s and t = 1 - s
};

std::shared_ptr<const ReferenceTables> reference_tables(int k, int kf, int l, int degree);

struct ElementOperators {
  int element = -1;
  int N = 0, nq = 0, nqf = 0;  // nqf is per facet; facet rows stack 3 * nqf points
  double omega = 0.0, rot = 0.0;

  // Volume quadrature.
  Eigen::VectorXd w;                      // physical weights
  std::vector<Point2> x;
  Eigen::VectorXd rho, cs2, gamma;
  Eigen::Matrix2Xd b;                     // 2 x nq
  Eigen::Matrix2Xd grad_p;
  std::vector<Eigen::Matrix2d> hess_p, hess_phi;

  Eigen::MatrixXd U;     // 2nq x N, components stacked [x; y]
  Eigen::MatrixXd Div;   // nq x N
  Eigen::MatrixXd Db;    // 2nq x N, d_b u_tau
  Eigen::MatrixXd GpU;   // nq x N, grad p . u_tau

  // Facet quadrature (3 * nqf rows, local facet j occupies rows [j nqf, (j+1) nqf)).
  Eigen::VectorXd wf;
  std::vector<Point2> xf;
  Eigen::VectorXd frho, fcs2, fbn, fh;  // b . nu and facet diameter per point
  Eigen::Matrix2Xd fnu;
  Eigen::MatrixXd Tr;    // 2 nqf3 x N, trace of u_tau
  Eigen::MatrixXd Jmp;   // 2 nqf3 x N, u_tau - u_F
  Eigen::MatrixXd Jn;    // nqf3 x N
  Eigen::MatrixXd DivT;  // nqf3 x N
  Eigen::MatrixXd DbT;   // 2 nqf3 x N

  // Liftings.
  Eigen::MatrixXd Mrho;  // nl x nl, <rho psi, psi>
  Eigen::MatrixXd Ms;    // nl x nl, <cs2 rho psi, psi>
  Eigen::MatrixXd Bvec;  // 2nl x N, -<rho [[u]]_b, psi> per component
  Eigen::MatrixXd Bs;    // nl x N, -<cs2 rho [[u]]_nu, psi>
  Eigen::MatrixXd R;     // 2nl x N, vector lifting coefficients
  Eigen::MatrixXd Rs;    // nl x N, scalar lifting coefficients
  Eigen::MatrixXd RV;    // 2nq x N, vector lifting at volume points
  Eigen::MatrixXd RsV;   // nq x N
  Eigen::MatrixXd DbN;   // 2nq x N, D_b^n
  Eigen::MatrixXd DivN;  // nq x N, div_n

  Eigen::MatrixXcd W() const;   // (omega + i D_b^n + i rot x) at volume points
  Eigen::MatrixXcd W0() const;  // (omega + i d_b + i rot x) at volume points
  Eigen::MatrixXcd W0f() const; // same at facet points using the volume trace
  Eigen::MatrixXd Jb() const;   // (b . nu) [[u]] at facet points
};

ElementOperators element_operators(const HdgSpace& space, const CoefficientSet& set, int e,
                                   int quad_margin = 4);

Eigen::MatrixXcd local_div_block(const ElementOperators& ops, const HdgSpace& space,
                                 const FormOptions& opt);
Eigen::MatrixXcd local_conv_block(const ElementOperators& ops);
Eigen::MatrixXcd local_conv_block_sip(const ElementOperators& ops, const HdgSpace& space, double lambda);
Eigen::MatrixXcd local_rem_block(const ElementOperators& ops);
Eigen::MatrixXcd combine(const Eigen::MatrixXcd& div, const Eigen::MatrixXcd& conv,
                         const Eigen::MatrixXcd& rem);
Eigen::VectorXcd local_rhs(const ElementOperators& ops, const ComplexVectorFn& f);

// Full local matrix for the chosen convection treatment.
Eigen::MatrixXcd local_matrix(const ElementOperators& ops, const HdgSpace& space, const FormOptions& opt);

// X_n Gram matrix contribution; unweighted drops the rho and cs2 weights.
Eigen::MatrixXd local_gram(const ElementOperators& ops, bool weighted = true);

// Tangential visibility of each local facet: Gram of the tangential facet
// modes (nf x nf) as seen by the convection term, and a reference scale.
struct FacetVisibility {
  std::array<Eigen::MatrixXd, 3> gram;
  std::array<double, 3> scale{};
};
FacetVisibility facet_visibility(const ElementOperators& ops, const HdgSpace& space, ConvMode mode);

// Empirical lifting bound ||rho^1/2 R u||^2 / ||rho^1/2 h^-1/2 [[u]]_b||^2 for a local vector.
double lifting_bound_ratio(const ElementOperators& ops, const Eigen::VectorXd& u);

}  // namespace ghdg
