#include "wgl/coupling.hpp"

#include <cmath>
#include <sstream>

#include "wgl/errors.hpp"

namespace wgl {

namespace {

constexpr cplx I{0.0, 1.0};

Vec2 real_mat_times(const Mat2& m, const Vec2& v) { return m * v; }

}  // namespace

KirchhoffProjector kirchhoff_projector(double alpha1, double alpha2) {
  double a = alpha1 * alpha1 + alpha2 * alpha2;
  if (!(a > 0.0) || !std::isfinite(a)) throw ValidationError("Kirchhoff weights must not both vanish");
  KirchhoffProjector k;
  k.alpha1 = alpha1;
  k.alpha2 = alpha2;
  k.lambda0(0, 0) = alpha1 * alpha1 / a;
  k.lambda0(0, 1) = alpha1 * alpha2 / a;
  k.lambda0(1, 0) = alpha1 * alpha2 / a;
  k.lambda0(1, 1) = alpha2 * alpha2 / a;
  k.lambda0_perp = Mat2::identity() - k.lambda0;
  return k;
}

Mat2 build_lambda_eps(const VertexKernel& kernel, double epsilon) {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  Mat2 m;
  m(0, 0) = vertex_kernel(kernel, -1.0, -1.0);
  m(0, 1) = vertex_kernel(kernel, -1.0, 1.0);
  m(1, 0) = vertex_kernel(kernel, 1.0, -1.0);
  m(1, 1) = vertex_kernel(kernel, 1.0, 1.0);
  return m;
}

CouplingContext::CouplingContext(CurvatureProfile profile, double zero_tolerance)
    : profile_(profile) {
  spectrum_ = std::make_shared<const VertexSpectrum>(
      eigenvalues(profile_, classification_count(profile_), zero_tolerance));
  case_ = classify_case(*spectrum_);
}

CouplingContext::CouplingContext(CurvatureProfile profile,
                                 std::shared_ptr<const VertexSpectrum> spectrum)
    : profile_(profile), spectrum_(std::move(spectrum)) {
  if (!spectrum_) throw ValidationError("coupling context needs a spectrum");
  case_ = classify_case(*spectrum_);
}

std::optional<KirchhoffProjector> CouplingContext::projector() const {
  if (!case_.resonant) return std::nullopt;
  return kirchhoff_projector(case_.alpha1, case_.alpha2);
}

CouplingCoefficients solve_coupling(const CouplingContext& ctx, const VertexKernel& kernel,
                                    cplx z, double epsilon, const Vec2& p) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ValidationError("epsilon must lie in (0, 1]");
  CouplingCoefficients c;
  c.epsilon = epsilon;
  c.z = z;
  c.p = p;
  c.vertex_case = ctx.vertex_case();
  c.lambda_eps = build_lambda_eps(kernel, epsilon);

  cplx k = sqrt_upper(c.z);
  Mat2 A = Mat2::identity() - (I * epsilon * k) * c.lambda_eps;
  cplx d = det(A);
  if (std::abs(d) < kDeterminantGuard) {
    std::ostringstream os;
    os << "coupling system is singular at eps=" << epsilon << ", z=" << c.z << " (|det| = " << std::abs(d)
       << ")";
    throw SingularSystem(os.str());
  }
  Vec2 rhs = cplx(epsilon) * (c.lambda_eps * p);
  auto solve = [&](const Vec2& b) {
    return Vec2{{(A(1, 1) * b[0] - A(0, 1) * b[1]) / d, (A(0, 0) * b[1] - A(1, 0) * b[0]) / d}};
  };
  c.q = solve(rhs);
  // det(A) loses digits to cancellation as eps -> 0 in the resonant case; two
  // refinement sweeps bring the back-substitution residual to rounding level.
  for (int sweep = 0; sweep < 2; ++sweep) c.q = c.q + solve(rhs - A * c.q);
  c.xi = p + (I * k) * c.q;
  c.residual = norm(A * c.q - rhs);
  return c;
}

CouplingCoefficients solve_coupling(const CouplingContext& ctx, cplx z, double epsilon,
                                    const Vec2& p) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ValidationError("epsilon must lie in (0, 1]");
  auto kernel = make_vertex_kernel(ctx.profile(), epsilon * epsilon * z);
  return solve_coupling(ctx, kernel, z, epsilon, p);
}

CouplingCoefficients solve_coupling(const CurvatureProfile& profile, cplx z, double epsilon,
                                    const Vec2& p) {
  return solve_coupling(CouplingContext(profile), z, epsilon, p);
}

AsymptoticDeviation asymptotic_deviation(const CouplingCoefficients& c,
                                         const std::optional<KirchhoffProjector>& projector) {
  if (c.vertex_case.resonant != projector.has_value())
    throw ValidationError("a projector must be supplied exactly for resonant (Case 2) coefficients");
  double pn = norm(c.p);
  AsymptoticDeviation d;
  if (pn == 0.0) return d;
  cplx k = sqrt_upper(c.z);
  if (!projector) {
    d.dev_q = norm(c.q) / pn;
    d.dev_xi = norm(c.xi - c.p) / pn;
    return d;
  }
  const auto& P = *projector;
  double A = P.alpha1 * P.alpha1 + P.alpha2 * P.alpha2;
  Vec2 L0p = real_mat_times(P.lambda0, c.p);
  Vec2 Lpp = real_mat_times(P.lambda0_perp, c.p);
  d.dev_q = norm(c.q - (I / k) * L0p) / pn;
  d.dev_xi = norm(c.xi - Lpp - (c.epsilon * I * k / A) * L0p) / pn;
  return d;
}

Mat2 reduced_corner_matrix(const CouplingContext& ctx) {
  const auto& info = ctx.vertex_case();
  if (!info.resonant) throw ValidationError("the reduced resolvent needs a resonant profile");
  const auto& spec = ctx.spectrum();
  double lam = spec.eigenvalues.at(static_cast<std::size_t>(info.n_star - 1));
  double a[2] = {info.alpha1, info.alpha2};
  // Lambda(w) - a a^T / (lambda* - w) = R0 + O(w); the symmetric pair cancels the O(w) term
  const double w = 1e-3;
  Mat2 acc;
  for (double sgn : {1.0, -1.0}) {
    auto kern = make_vertex_kernel(ctx.profile(), sgn * w);
    Mat2 L = build_lambda_eps(kern, 1.0);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) acc(i, j) += 0.5 * (L(i, j) - a[i] * a[j] / (lam - sgn * w));
  }
  return acc;
}

double corrected_xi_deviation(const CouplingCoefficients& c, const KirchhoffProjector& P,
                              const Mat2& R0) {
  double pn = norm(c.p);
  if (pn == 0.0) return 0.0;
  cplx k = sqrt_upper(c.z);
  double A = P.alpha1 * P.alpha1 + P.alpha2 * P.alpha2;
  Vec2 L0p = P.lambda0 * c.p;
  Vec2 Lpp = P.lambda0_perp * c.p;
  Vec2 RQ = (P.lambda0_perp * R0 * P.lambda0_perp) * c.p;
  Vec2 approx = Lpp - (I * c.epsilon * k / A) * L0p + (I * c.epsilon * k) * RQ;
  return norm(c.xi - approx) / pn;
}

double naive_xi_deviation(const CouplingCoefficients& c, const KirchhoffProjector& P) {
  double pn = norm(c.p);
  if (pn == 0.0) return 0.0;
  return norm(c.xi - P.lambda0_perp * c.p) / pn;
}

Mat2 coupling_matrix(const CouplingCoefficients& c) {
  cplx k = sqrt_upper(c.z);
  Mat2 A = Mat2::identity() - (I * c.epsilon * k) * c.lambda_eps;
  cplx d = det(A);
  if (std::abs(d) < kDeterminantGuard) throw SingularSystem("coupling matrix is singular");
  Mat2 inv;
  inv(0, 0) = A(1, 1) / d;
  inv(0, 1) = -A(0, 1) / d;
  inv(1, 0) = -A(1, 0) / d;
  inv(1, 1) = A(0, 0) / d;
  return inv * (cplx(c.epsilon) * c.lambda_eps);
}

}  // namespace wgl
