#pragma once

// Neumann problem for h_v = -d^2/ds^2 - gamma^2/4 on (-1,1): shooting
// solutions, Wronskian, eigenpairs and the generic/resonant classification.

#include <complex>
#include <iosfwd>
#include <vector>

#include "wgl/ode.hpp"
#include "wgl/profile.hpp"

namespace wgl {

using cplx = std::complex<double>;

/// zeta(-1) = 1, zeta'(-1) = 0 and eta(1) = 1, eta'(1) = 0.
struct ShootingSolution {
  cplx z;
  HermiteRecord<cplx> zeta;
  HermiteRecord<cplx> eta;
  cplx wronskian;  // eta zeta' - zeta eta', taken at s = 1 where it equals zeta'(1)

  cplx wronskian_at(double s) const;
  /// max over both meshes of |W(s) - W| / |W|.
  double wronskian_constancy() const;
};

ShootingSolution shoot(const CurvatureProfile& profile, cplx z, const OdeOptions& opt = {});

/// zeta'(lambda; 1) for real lambda, without dense output. Its zeros are the eigenvalues.
double real_wronskian(const CurvatureProfile& profile, double lambda, const OdeOptions& opt = {});

/// gamma = 0 Neumann eigenvalue ((n-1) pi / 2)^2, n >= 1.
double neumann_eigenvalue(int n);

enum class VertexCase { Generic, Resonant };

struct VertexSpectrum {
  std::vector<double> eigenvalues;                   // ascending
  std::vector<HermiteRecord<double>> eigenfunctions; // unit L2 norm
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  VertexCase vertex_case = VertexCase::Generic;
  int n_star = 0;  // 1-based, 0 when generic
  double zero_tolerance = 1e-9;

  const HermiteRecord<double>& resonant_function() const;
};

/// First `count` eigenpairs. Throws BracketFailure when fewer roots are found.
VertexSpectrum eigenvalues(const CurvatureProfile& profile, int count,
                           double zero_tolerance = 1e-9, const OdeOptions& opt = {});

/// Smallest count whose eigenvalues cover [-sup gamma^2/4, 1].
int classification_count(const CurvatureProfile& profile);

struct CaseInfo {
  bool resonant = false;
  int n_star = 0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
};

CaseInfo classify_case(const VertexSpectrum& spectrum);

/// Columns n, lambda, y_at_minus1, y_at_plus1.
void write_spectrum_csv(std::ostream& os, const VertexSpectrum& spectrum);

/// Integral of f*g over [-1,1] using 5-point Gauss on every mesh interval.
double record_inner(const HermiteRecord<double>& f, const HermiteRecord<double>& g);

}  // namespace wgl
