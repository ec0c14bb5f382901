#include "wgl/graph_limit.hpp"

#include <cmath>

#include "wgl/errors.hpp"
#include "wgl/gauss_legendre.hpp"

namespace wgl {

namespace {

constexpr cplx I{0.0, 1.0};

}  // namespace

GraphResolvent decoupled_resolvent(cplx z) {
  make_half_line_resolvent(z);
  return {GraphKind::Decoupled, z, std::nullopt};
}

GraphResolvent kirchhoff_resolvent(cplx z, const KirchhoffProjector& projector) {
  make_half_line_resolvent(z);
  return {GraphKind::WeightedKirchhoff, z, projector};
}

GraphResolvent limit_resolvent_for(const ApproxSolution& sol) {
  if (sol.resonant()) return kirchhoff_resolvent(sol.z, *sol.projector);
  return decoupled_resolvent(sol.z);
}

GraphSolution apply_graph_resolvent(const GraphResolvent& res, const SourceFunction& f1,
                                    const SourceFunction& f2) {
  auto hl = make_half_line_resolvent(res.z);
  GraphSolution out;
  out.p = Vec2{{boundary_derivative(hl, f1), boundary_derivative(hl, f2)}};
  if (res.kind == GraphKind::WeightedKirchhoff) {
    if (!res.projector) throw ValidationError("weighted Kirchhoff resolvent needs a projector");
    out.q = (I / hl.sqrt_z) * (res.projector->lambda0 * out.p);
  }
  out.x1 = EdgeProfile(hl, f1, out.q[0]);
  out.x2 = EdgeProfile(hl, f2, out.q[1]);
  return out;
}

cplx apply_resolvent(const GraphResolvent& res, const SourceFunction& f1, const SourceFunction& f2,
                     double s, int edge) {
  if (edge != 1 && edge != 2) throw ValidationError("edge index must be 1 or 2");
  auto g = apply_graph_resolvent(res, f1, f2);
  return edge == 1 ? g.x1.value(s) : g.x2.value(s);
}

double limit_comparison(const ApproxSolution& sol, const GraphResolvent& res) {
  bool kirchhoff = res.kind == GraphKind::WeightedKirchhoff;
  if (kirchhoff != sol.resonant())
    throw ValidationError(sol.resonant()
                              ? "a resonant (Case 2) solution must be compared with the weighted Kirchhoff limit"
                              : "a generic (Case 1) solution must be compared with the decoupled limit");
  if (res.z != sol.z) throw ValidationError("solution and resolvent must share z");
  cplx k = sqrt_upper(sol.z);
  Vec2 q_lim;
  if (kirchhoff) q_lim = (I / k) * (res.projector->lambda0 * sol.coeffs.p);
  return norm(sol.coeffs.q - q_lim) / std::sqrt(2.0 * k.imag());
}

BoundaryLimits boundary_limits(const ApproxSolution& sol) {
  BoundaryLimits b;
  b.resonant = sol.resonant();
  cplx x1 = sol.edge_value(1, 0.0), x2 = sol.edge_value(2, 0.0);
  cplx d1 = sol.edge_derivative(1, 0.0), d2 = sol.edge_derivative(2, 0.0);
  if (!b.resonant) {
    b.value1 = std::abs(x1);
    b.value2 = std::abs(x2);
    b.flux1 = std::abs(d1 - sol.coeffs.p[0]);
    b.flux2 = std::abs(d2 - sol.coeffs.p[1]);
  } else {
    double a1 = sol.coeffs.vertex_case.alpha1, a2 = sol.coeffs.vertex_case.alpha2;
    b.kirchhoff_value = std::abs(a2 * x1 - a1 * x2);
    b.kirchhoff_flux = std::abs(a1 * d1 + a2 * d2);
  }
  return b;
}

Mat2 pi_theta_projector(const std::array<cplx, 2>& alpha) {
  double s = std::norm(alpha[0]) + std::norm(alpha[1]);
  if (!(s > 0.0)) throw ValidationError("alpha must not vanish");
  Mat2 m = Mat2::identity();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) -= alpha[static_cast<std::size_t>(i)] * std::conj(alpha[static_cast<std::size_t>(j)]) / s;
  return m;
}

cplx transverse_projection(const std::function<cplx(double)>& psi_of_u, int n, int panels) {
  auto r = composite_gauss(0.0, 1.0, panels, 16);
  cplx acc = 0.0;
  for (std::size_t k = 0; k < r.nodes.size(); ++k) acc += r.weights[k] * chi(n, r.nodes[k]) * psi_of_u(r.nodes[k]);
  return acc;
}

}  // namespace wgl
