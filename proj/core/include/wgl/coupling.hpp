#pragma once

// The 2x2 vertex coupling system: Lambda_eps, (q, xi), the Kirchhoff projector
// Lambda_0 and deviations from the small-eps expansions.

#include <complex>
#include <memory>
#include <optional>

#include "wgl/kernels.hpp"
#include "wgl/linalg2.hpp"
#include "wgl/profile.hpp"
#include "wgl/vertex_spectrum.hpp"

namespace wgl {

inline constexpr double kDeterminantGuard = 1e-12;

struct KirchhoffProjector {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  Mat2 lambda0;
  Mat2 lambda0_perp;
};

KirchhoffProjector kirchhoff_projector(double alpha1, double alpha2);

struct CouplingCoefficients {
  cplx z;
  double epsilon = 0.0;
  Vec2 p, q, xi;
  Mat2 lambda_eps;
  CaseInfo vertex_case;
  double residual = 0.0;  // ||(1 - i eps sqrt z Lambda) q - eps Lambda p||
};

/// Corner values of r_v(eps^2 z; ., .) in the order (-1,-1), (-1,1); (1,-1), (1,1).
/// `kernel` must be built at eps^2 z.
Mat2 build_lambda_eps(const VertexKernel& kernel, double epsilon);

/// Shares one spectrum (for the case tag) across many solves.
class CouplingContext {
 public:
  explicit CouplingContext(CurvatureProfile profile, double zero_tolerance = 1e-9);
  CouplingContext(CurvatureProfile profile, std::shared_ptr<const VertexSpectrum> spectrum);

  const CurvatureProfile& profile() const { return profile_; }
  const VertexSpectrum& spectrum() const { return *spectrum_; }
  std::shared_ptr<const VertexSpectrum> spectrum_ptr() const { return spectrum_; }
  const CaseInfo& vertex_case() const { return case_; }
  std::optional<KirchhoffProjector> projector() const;

 private:
  CurvatureProfile profile_;
  std::shared_ptr<const VertexSpectrum> spectrum_;
  CaseInfo case_;
};

CouplingCoefficients solve_coupling(const CouplingContext& ctx, cplx z, double epsilon,
                                    const Vec2& p);
/// Same with a kernel already built at eps^2 z.
CouplingCoefficients solve_coupling(const CouplingContext& ctx, const VertexKernel& kernel,
                                    cplx z, double epsilon, const Vec2& p);
/// Convenience overload that computes the classification spectrum itself.
CouplingCoefficients solve_coupling(const CurvatureProfile& profile, cplx z, double epsilon,
                                    const Vec2& p);

struct AsymptoticDeviation {
  double dev_q = 0.0;
  double dev_xi = 0.0;
};

/// Case 1 (no projector): ||q||/||p||, ||xi - p||/||p||.
/// Case 2: ||q - (i/sqrt z) L0 p||/||p||, ||xi - L0perp p - eps (i sqrt z / A) L0 p||/||p||.
AsymptoticDeviation asymptotic_deviation(const CouplingCoefficients& coeffs,
                                         const std::optional<KirchhoffProjector>& projector);

/// Corner matrix of the reduced resolvent sum_{n != n*} y_n(a) y_n(b) / lambda_n.
Mat2 reduced_corner_matrix(const CouplingContext& ctx);

/// Second-order-consistent Case 2 xi deviation:
/// ||xi - L0perp p + i eps sqrt z (L0/A) p - i eps sqrt z L0perp R0 L0perp p|| / ||p||.
double corrected_xi_deviation(const CouplingCoefficients& coeffs, const KirchhoffProjector& proj,
                              const Mat2& reduced_corners);

/// ||xi - L0perp p|| / ||p||: the first-order-only deviation.
double naive_xi_deviation(const CouplingCoefficients& coeffs, const KirchhoffProjector& proj);

/// (1 - i eps sqrt z Lambda_eps)^{-1} eps Lambda_eps, the map p -> q.
Mat2 coupling_matrix(const CouplingCoefficients& coeffs);

}  // namespace wgl
