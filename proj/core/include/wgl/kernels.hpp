#pragma once

// Resolvent kernels: the vertex kernel r_v(z; s, s'), the free Neumann kernel,
// and the Dirichlet half-line resolvent r_0(z) with its boundary functional.

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "wgl/profile.hpp"
#include "wgl/source.hpp"
#include "wgl/vertex_spectrum.hpp"

namespace wgl {

using cplx = std::complex<double>;

inline constexpr double kNearEigenvalueThreshold = 1e-13;

enum class KernelMode { Wronskian, Series };

/// Tail added to the truncated eigenfunction series. ShiftedFree adds the
/// modes n > n_terms of the free kernel with eigenvalues shifted by the mean
/// potential, in closed form.
enum class SeriesTail { None, ShiftedFree };

struct VertexKernel {
  CurvatureProfile profile;
  cplx z;
  KernelMode mode = KernelMode::Wronskian;
  int n_terms = 200;
  SeriesTail tail = SeriesTail::ShiftedFree;
  std::shared_ptr<const ShootingSolution> shooting;  // Wronskian mode
  std::shared_ptr<const VertexSpectrum> spectrum;    // Series mode
  double mean_shift = 0.0;                           // (1/2) * integral of gamma^2/4
};

/// Wronskian mode shoots at z; Series mode computes n_terms eigenpairs.
/// Throws NearEigenvalue when |W(z)| is below the threshold (Wronskian mode).
VertexKernel make_vertex_kernel(const CurvatureProfile& profile, cplx z,
                                KernelMode mode = KernelMode::Wronskian, int n_terms = 200,
                                SeriesTail tail = SeriesTail::ShiftedFree);

/// Series kernel reusing an existing spectrum (its size sets n_terms).
VertexKernel make_series_kernel(const CurvatureProfile& profile,
                                std::shared_ptr<const VertexSpectrum> spectrum, cplx z,
                                SeriesTail tail = SeriesTail::ShiftedFree);

cplx vertex_kernel(const VertexKernel& kernel, double s, double sp);

/// d/ds r_v(z; s, endpoint), endpoint = -1 or +1.
cplx kernel_s_derivative(const VertexKernel& kernel, double s, int endpoint);

/// -cos(sqrt z (s+1)) cos(sqrt z (s'-1)) / (sqrt z sin(2 sqrt z)) for s <= s'.
cplx neumann_free_kernel(cplx z, double s, double sp);
/// d/ds of the free kernel at s' = endpoint.
cplx neumann_free_kernel_ds(cplx z, double s, int endpoint);

/// gamma = 0 Neumann eigenfunction ((n-1) pi / 2 frequency, unit norm) and its derivative.
double neumann_mode(int n, double s);
double neumann_mode_ds(int n, double s);

struct HalfLineResolvent {
  cplx z;
  cplx sqrt_z;  // Im > 0
};

/// Rejects z on [0, inf), where Im sqrt z = 0.
HalfLineResolvent make_half_line_resolvent(cplx z);

/// (r_0(z) f)(s) with r_0(z) = (-d^2/ds^2 - z)^{-1} on (0, inf), Dirichlet at 0;
/// exactly 0 at s = 0.
cplx half_line_apply(const HalfLineResolvent& res, const SourceFunction& f, double s);
/// d/ds (r_0(z) f)(s).
cplx half_line_derivative(const HalfLineResolvent& res, const SourceFunction& f, double s);
/// p = (r_0(z) f)'(0) = integral of e^{i sqrt z s'} f(s').
cplx boundary_derivative(const HalfLineResolvent& res, const SourceFunction& f);

/// x(s) = (r_0(z) f)(s) + q e^{i sqrt z s}, with the boundary integral cached.
class EdgeProfile {
 public:
  EdgeProfile() = default;
  EdgeProfile(HalfLineResolvent res, SourceFunction f, cplx q = 0.0);

  cplx value(double s) const;
  cplx derivative(double s) const;
  cplx p() const { return p_; }
  cplx q() const { return q_; }
  const SourceFunction& source() const { return f_; }
  const HalfLineResolvent& resolvent() const { return res_; }

 private:
  HalfLineResolvent res_{};
  SourceFunction f_;
  cplx q_ = 0.0;
  cplx p_ = 0.0;

  void pieces(double s, cplx& left, cplx& right) const;
};

/// Adaptive Gauss-Kronrod over [a, b], split at the given interior points.
/// Throws QuadratureFailure if the estimated error exceeds rel_tol.
cplx integrate_complex(const std::function<cplx(double)>& f, double a, double b,
                       const std::vector<double>& splits = {}, double rel_tol = 1e-10);

}  // namespace wgl
