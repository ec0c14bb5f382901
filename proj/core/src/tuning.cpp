#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <sstream>

#include "wgl/errors.hpp"
#include "wgl/profile.hpp"
#include "wgl/vertex_spectrum.hpp"

namespace wgl {

CurvatureProfile tune_to_resonance(const CurvatureProfile& base, int target_index,
                                   double amplitude_max) {
  if (base.kind() == ProfileKind::Zero)
    throw ValidationError("the zero profile has no amplitude to tune");
  if (target_index < 2)
    throw ValidationError("target_index must be >= 2; lambda_1 < 0 for every nonzero bump");
  if (!(amplitude_max > 0.0) || amplitude_max > kTunedAmplitudeMax)
    throw ValidationError("amplitude_max must lie in (0, 20]");

  // lambda_n(a) is nonincreasing in a: the potential -a^2 b(s)^2/4 deepens pointwise.
  auto lam = [&](double a) {
    auto p = CurvatureProfile::tuned_bump(a, target_index);
    return eigenvalues(p, target_index, 1e-300).eigenvalues.back();
  };
  double lo = 0.0, flo = neumann_eigenvalue(target_index);
  double hi = 0.0, fhi = flo;
  const double step = 0.5;
  for (double a = std::min(step, amplitude_max);; a = std::min(a + step, amplitude_max)) {
    double f = lam(a);
    if (f <= 0.0) {
      hi = a;
      fhi = f;
      break;
    }
    lo = a;
    flo = f;
    if (a >= amplitude_max) {
      std::ostringstream os;
      os << "no amplitude in (0, " << amplitude_max << "] brings lambda_" << target_index
         << " to zero (lambda = " << f << " at the upper end)";
      throw BracketFailure(os.str());
    }
  }
  double a_star = hi;
  if (fhi != 0.0) {
    auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-14 * std::abs(a); };
    std::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(lam, lo, hi, flo, fhi, tol, iters);
    a_star = std::abs(lam(r.first)) < std::abs(lam(r.second)) ? r.first : r.second;
  }
  double residual = lam(a_star);
  if (std::abs(residual) > 1e-10) {
    std::ostringstream os;
    os << "resonance tuning stalled at |lambda_" << target_index << "| = " << residual;
    throw BracketFailure(os.str());
  }
  return CurvatureProfile::tuned_bump(a_star, target_index);
}

}  // namespace wgl
