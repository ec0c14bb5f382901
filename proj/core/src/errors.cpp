#include "wgl/errors.hpp"

#include <sstream>

namespace wgl {

namespace {

std::string near_eigenvalue_message(std::complex<double> z, double w) {
  std::ostringstream os;
  os << "spectral parameter " << z << " is numerically an eigenvalue of h_v (|W| = " << w << ")";
  return os.str();
}

}  // namespace

NearEigenvalue::NearEigenvalue(std::complex<double> z_, double w)
    : NumericalError(near_eigenvalue_message(z_, w)), z(z_), wronskian_abs(w) {}

QuadratureFailure::QuadratureFailure(const std::string& what, double err)
    : NumericalError(what), achieved_error(err) {}

}  // namespace wgl
