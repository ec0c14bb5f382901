#include "wgl/approx_residual.hpp"

#include <cmath>
#include <numbers>

#include "wgl/errors.hpp"
#include "wgl/gauss_legendre.hpp"

namespace wgl {

double chi(int n, double u) { return std::numbers::sqrt2 * std::sin(n * std::numbers::pi * u); }

const EdgeProfile& ApproxSolution::edge(int j) const {
  if (j == 1) return x1;
  if (j == 2) return x2;
  throw ValidationError("edge index must be 1 or 2");
}

cplx ApproxSolution::phi(double s) const {
  const auto& xi = coeffs.xi;
  if (xi[0] == 0.0 && xi[1] == 0.0) return 0.0;
  return epsilon * (xi[0] * vertex_kernel(kernel, s, -1.0) + xi[1] * vertex_kernel(kernel, s, 1.0));
}

cplx ApproxSolution::phi_derivative(double s) const {
  const auto& xi = coeffs.xi;
  if (xi[0] == 0.0 && xi[1] == 0.0) return 0.0;
  return epsilon *
         (xi[0] * kernel_s_derivative(kernel, s, -1) + xi[1] * kernel_s_derivative(kernel, s, 1));
}

ApproxSolution assemble(const CouplingContext& ctx, int n, cplx z, double epsilon, double delta,
                        const SourceFunction& f1, const SourceFunction& f2) {
  if (n < 1) throw ValidationError("transverse mode n must be >= 1");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ValidationError("epsilon must lie in (0, 1]");
  if (!(delta > 0.0 && delta <= epsilon)) throw ValidationError("delta must lie in (0, epsilon]");
  auto res = make_half_line_resolvent(z);
  ApproxSolution sol;
  sol.profile = ctx.profile();
  sol.n = n;
  sol.z = z;
  sol.epsilon = epsilon;
  sol.delta = delta;
  sol.f1 = f1;
  sol.f2 = f2;
  sol.spectrum = ctx.spectrum_ptr();
  sol.projector = ctx.projector();
  Vec2 p{{boundary_derivative(res, f1), boundary_derivative(res, f2)}};
  sol.kernel = make_vertex_kernel(ctx.profile(), epsilon * epsilon * z);
  sol.coeffs = solve_coupling(ctx, sol.kernel, z, epsilon, p);
  sol.x1 = EdgeProfile(res, f1, sol.coeffs.q[0]);
  sol.x2 = EdgeProfile(res, f2, sol.coeffs.q[1]);
  return sol;
}

ApproxSolution assemble(const CurvatureProfile& profile, int n, cplx z, double epsilon,
                        double delta, const SourceFunction& f1, const SourceFunction& f2) {
  return assemble(CouplingContext(profile), n, z, epsilon, delta, f1, f2);
}

namespace {

/// Residual at (s,u) given phi, phi' and the profile jet at s; chi excluded.
cplx residual_core(const ApproxSolution& sol, double s, double u, cplx ph, cplx dph) {
  double ratio = sol.delta / sol.epsilon;
  auto geo = eval_geometry(sol.profile, s, u, ratio);
  double g0 = sol.profile.jet(s).g0;
  double v = 0.25 * g0 * g0;
  cplx w = sol.epsilon * sol.epsilon * sol.z;
  return (geo.inv_g - 1.0) * (v + w) * ph + (geo.W + v) * ph - geo.ds_inv_g * dph;
}

}  // namespace

cplx residual_field(const ApproxSolution& sol, double s, double u) {
  if (!(s >= -1.0 && s <= 1.0 && u >= 0.0 && u <= 1.0))
    throw ValidationError("residual_field: (s,u) must lie in [-1,1] x [0,1]");
  return residual_core(sol, s, u, sol.phi(s), sol.phi_derivative(s)) * chi(sol.n, u);
}

double source_norm(const SourceFunction& f1, const SourceFunction& f2) {
  return std::hypot(f1.l2_norm(), f2.l2_norm());
}

ResidualReport residual_norms(const ApproxSolution& sol, const QuadratureSpec& quad) {
  if (quad.order < 4) throw ValidationError("quadrature order must be >= 4");
  if (quad.s_panels < 1 || quad.u_panels < 1) throw ValidationError("quadrature panels must be >= 1");
  auto rs = composite_gauss(-1.0, 1.0, quad.s_panels, quad.order);
  auto ru = composite_gauss(0.0, 1.0, quad.u_panels, quad.order);
  std::vector<double> chi2(ru.nodes.size());
  for (std::size_t k = 0; k < ru.nodes.size(); ++k) chi2[k] = std::pow(chi(sol.n, ru.nodes[k]), 2);

  double acc = 0.0;
  for (std::size_t i = 0; i < rs.nodes.size(); ++i) {
    double s = rs.nodes[i];
    cplx ph = sol.phi(s), dph = sol.phi_derivative(s);
    double row = 0.0;
    for (std::size_t k = 0; k < ru.nodes.size(); ++k)
      row += ru.weights[k] * chi2[k] * std::norm(residual_core(sol, s, ru.nodes[k], ph, dph));
    acc += rs.weights[i] * row;
  }

  ResidualReport r;
  double eps = sol.epsilon, ratio = sol.delta / sol.epsilon;
  r.residual_l2_V = std::sqrt(acc);
  r.residual_Hnorm = std::pow(eps, -1.5) * r.residual_l2_V;
  r.xi_norm = std::abs(sol.coeffs.xi[0]) + std::abs(sol.coeffs.xi[1]);
  r.resonant = sol.resonant();
  r.source_norm = source_norm(sol.f1, sol.f2);
  r.bound_case1 = ratio * eps * r.xi_norm;
  if (r.resonant) {
    const auto& info = sol.coeffs.vertex_case;
    const auto& y = sol.spectrum->eigenfunctions.at(static_cast<std::size_t>(info.n_star - 1));
    cplx c = -(sol.coeffs.xi[0] * info.alpha1 + sol.coeffs.xi[1] * info.alpha2) / (eps * sol.z);
    double chi_norm2 = 0.0;
    for (std::size_t k = 0; k < ru.nodes.size(); ++k) chi_norm2 += ru.weights[k] * chi2[k];
    double y2 = 0.0, dy2 = 0.0;
    for (std::size_t i = 0; i < rs.nodes.size(); ++i) {
      y2 += rs.weights[i] * std::pow(y.value(rs.nodes[i]), 2);
      dy2 += rs.weights[i] * std::pow(y.derivative(rs.nodes[i]), 2);
    }
    r.psi_star_norm = std::abs(c) * std::sqrt(y2 * chi_norm2);
    r.psi_star_deriv_norm = std::abs(c) * std::sqrt(dy2 * chi_norm2);
    r.bound_case2 = ratio * (eps * r.xi_norm + r.psi_star_norm + r.psi_star_deriv_norm);
    r.theorem_shape = (sol.delta / std::pow(eps, 1.5) + sol.delta / std::pow(eps, 2.5)) * r.source_norm;
    r.bound_ratio = r.bound_case2 > 0.0 ? r.residual_l2_V / r.bound_case2 : 0.0;
  } else {
    r.theorem_shape = sol.delta / std::pow(eps, 1.5) * r.source_norm;
    r.bound_ratio = r.bound_case1 > 0.0 ? r.residual_l2_V / r.bound_case1 : 0.0;
  }
  return r;
}

InterfaceDefects interface_matching(const ApproxSolution& sol) {
  InterfaceDefects d;
  double eps = sol.epsilon;
  d.value_left = std::abs(sol.edge_value(1, 0.0) - sol.phi(-1.0));
  d.value_right = std::abs(sol.edge_value(2, 0.0) - sol.phi(1.0));
  d.deriv_left = std::abs(sol.edge_derivative(1, 0.0) + sol.phi_derivative(-1.0) / eps);
  d.deriv_right = std::abs(sol.edge_derivative(2, 0.0) - sol.phi_derivative(1.0) / eps);
  return d;
}

SubtractedNorms vertex_subtracted_norms(const ApproxSolution& sol, const QuadratureSpec& quad) {
  if (!sol.resonant()) throw ValidationError("vertex_subtracted_norms needs a resonant (Case 2) solution");
  if (quad.order < 4) throw ValidationError("quadrature order must be >= 4");
  const auto& info = sol.coeffs.vertex_case;
  const auto& y = sol.spectrum->eigenfunctions.at(static_cast<std::size_t>(info.n_star - 1));
  double eps = sol.epsilon;
  cplx c = -(sol.coeffs.xi[0] * info.alpha1 + sol.coeffs.xi[1] * info.alpha2) / (eps * sol.z);
  auto rs = composite_gauss(-1.0, 1.0, quad.s_panels, quad.order);
  // chi_n has unit norm on (0,1), so the V-norm reduces to an s-integral
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < rs.nodes.size(); ++i) {
    double s = rs.nodes[i];
    a += rs.weights[i] * std::norm(sol.phi(s) - c * y.value(s));
    b += rs.weights[i] * std::norm(sol.phi_derivative(s) - c * y.derivative(s));
  }
  SubtractedNorms out;
  out.diff_norm = std::sqrt(a);
  out.diff_deriv_norm = std::sqrt(b);
  out.scale = eps * (std::abs(sol.coeffs.xi[0]) + std::abs(sol.coeffs.xi[1]));
  if (out.scale > 0.0) {
    out.ratio = out.diff_norm / out.scale;
    out.ratio_deriv = out.diff_deriv_norm / out.scale;
  }
  return out;
}

}  // namespace wgl
