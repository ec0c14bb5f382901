#pragma once

// Limit operators on the two-edge graph: decoupled Dirichlet and weighted
// Kirchhoff, their resolvents, the transverse projections and boundary diagnostics.

#include <array>
#include <complex>
#include <functional>
#include <optional>

#include "wgl/approx_residual.hpp"
#include "wgl/coupling.hpp"
#include "wgl/kernels.hpp"

namespace wgl {

enum class GraphKind { Decoupled, WeightedKirchhoff };

struct GraphResolvent {
  GraphKind kind = GraphKind::Decoupled;
  cplx z;
  std::optional<KirchhoffProjector> projector;  // WeightedKirchhoff only
};

GraphResolvent decoupled_resolvent(cplx z);
GraphResolvent kirchhoff_resolvent(cplx z, const KirchhoffProjector& projector);
/// The limit matching the solution's case.
GraphResolvent limit_resolvent_for(const ApproxSolution& sol);

/// Both edge profiles of r(z)(f_1, f_2).
struct GraphSolution {
  EdgeProfile x1, x2;
  Vec2 p, q;
};

GraphSolution apply_graph_resolvent(const GraphResolvent& res, const SourceFunction& f1,
                                    const SourceFunction& f2);

/// Edge `edge` (1 or 2) of r(z)(f_1, f_2) at s.
cplx apply_resolvent(const GraphResolvent& res, const SourceFunction& f1, const SourceFunction& f2,
                     double s, int edge);

/// L2 norm over both edges of x_eps - r(z) f, in closed form
/// (|q_eps - q| / (2 Im sqrt z)^{1/2} summed in quadrature). Throws on case mismatch.
double limit_comparison(const ApproxSolution& sol, const GraphResolvent& res);

struct BoundaryLimits {
  bool resonant = false;
  // Case 1
  double value1 = 0.0, value2 = 0.0;  // |x_j(0)|
  double flux1 = 0.0, flux2 = 0.0;    // |x_j'(0) - p_j|
  // Case 2
  double kirchhoff_value = 0.0;  // |alpha_2 x_1(0) - alpha_1 x_2(0)|
  double kirchhoff_flux = 0.0;   // |alpha_1 x_1'(0) + alpha_2 x_2'(0)|
};

BoundaryLimits boundary_limits(const ApproxSolution& sol);

/// delta_ij - alpha_i conj(alpha_j) / sum |alpha_k|^2 for N = 2.
Mat2 pi_theta_projector(const std::array<cplx, 2>& alpha);

/// (chi_n, psi(s, .))_{L2(0,1)} by Gauss-Legendre with `panels` x 16 nodes.
cplx transverse_projection(const std::function<cplx(double)>& psi_of_u, int n, int panels = 8);

}  // namespace wgl
