#pragma once

// The explicit approximate solution on edges plus vertex and its exact residual.

#include <complex>
#include <memory>
#include <optional>

#include "wgl/coupling.hpp"
#include "wgl/kernels.hpp"
#include "wgl/source.hpp"

namespace wgl {

/// Transverse Dirichlet mode sqrt(2) sin(n pi u).
double chi(int n, double u);

/// Composite Gauss-Legendre over V = (-1,1) x (0,1).
struct QuadratureSpec {
  int s_panels = 64;
  int u_panels = 16;
  int order = 8;
};

struct ApproxSolution {
  CurvatureProfile profile;
  int n = 1;
  cplx z;
  double epsilon = 0.0;
  double delta = 0.0;
  SourceFunction f1, f2;
  CouplingCoefficients coeffs;
  VertexKernel kernel;  // at eps^2 z
  EdgeProfile x1, x2;   // (r_0 f_j)(s) + q_j e^{i sqrt z s}
  std::shared_ptr<const VertexSpectrum> spectrum;
  std::optional<KirchhoffProjector> projector;

  bool resonant() const { return coeffs.vertex_case.resonant; }
  const EdgeProfile& edge(int j) const;
  cplx edge_value(int j, double s) const { return edge(j).value(s); }
  cplx edge_derivative(int j, double s) const { return edge(j).derivative(s); }
  /// phi(s) = eps [xi_1 r_v(eps^2 z; s, -1) + xi_2 r_v(eps^2 z; s, 1)]
  cplx phi(double s) const;
  cplx phi_derivative(double s) const;
  cplx vertex_value(double s, double u) const { return phi(s) * chi(n, u); }
};

ApproxSolution assemble(const CouplingContext& ctx, int n, cplx z, double epsilon, double delta,
                        const SourceFunction& f1, const SourceFunction& f2);
ApproxSolution assemble(const CurvatureProfile& profile, int n, cplx z, double epsilon,
                        double delta, const SourceFunction& f1, const SourceFunction& f2);

/// {(1/g - 1)(gamma^2/4 + eps^2 z) phi + (W + gamma^2/4) phi - d_s(1/g) phi'} chi_n(u).
cplx residual_field(const ApproxSolution& sol, double s, double u);

struct ResidualReport {
  double residual_l2_V = 0.0;
  double residual_Hnorm = 0.0;  // eps^{-3/2} residual_l2_V
  double xi_norm = 0.0;         // |xi_1| + |xi_2|
  double psi_star_norm = 0.0;   // Case 2 only
  double psi_star_deriv_norm = 0.0;
  double bound_case1 = 0.0;     // (delta/eps) eps (|xi_1| + |xi_2|)
  double bound_case2 = 0.0;     // (delta/eps) [eps (|xi_1|+|xi_2|) + ||psi*|| + ||d_s psi*||]
  double bound_ratio = 0.0;     // residual_l2_V over the bound of the solution's case
  double source_norm = 0.0;     // (||f_1||^2 + ||f_2||^2)^{1/2}
  double theorem_shape = 0.0;   // delta/eps^{3/2} (Case 1) or + delta/eps^{5/2} (Case 2)
  bool resonant = false;
};

/// Rejects quadrature orders below 4.
ResidualReport residual_norms(const ApproxSolution& sol, const QuadratureSpec& quad = {});

struct InterfaceDefects {
  double value_left = 0.0;   // |x_1(0) - phi(-1)|
  double value_right = 0.0;  // |x_2(0) - phi(1)|
  double deriv_left = 0.0;   // |x_1'(0) + phi'(-1)/eps|
  double deriv_right = 0.0;  // |x_2'(0) - phi'(1)/eps|
  double max_value() const { return std::max(value_left, value_right); }
  double max_deriv() const { return std::max(deriv_left, deriv_right); }
};

InterfaceDefects interface_matching(const ApproxSolution& sol);

struct SubtractedNorms {
  double diff_norm = 0.0;        // ||psi_v - psi*||_{L2(V)}
  double diff_deriv_norm = 0.0;  // ||d_s(psi_v - psi*)||_{L2(V)}
  double scale = 0.0;            // eps (|xi_1| + |xi_2|)
  double ratio = 0.0;
  double ratio_deriv = 0.0;
};

/// Case 2 only.
SubtractedNorms vertex_subtracted_norms(const ApproxSolution& sol, const QuadratureSpec& quad = {});

double source_norm(const SourceFunction& f1, const SourceFunction& f2);

}  // namespace wgl
