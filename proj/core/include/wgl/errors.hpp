#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace wgl {

/// Bad input: out-of-range parameters, malformed config. CLI exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation that could not reach its tolerance. CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IntegratorFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NearEigenvalue : public NumericalError {
 public:
  NearEigenvalue(std::complex<double> z, double wronskian_abs);
  std::complex<double> z;
  double wronskian_abs;
};

class SingularSystem : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class QuadratureFailure : public NumericalError {
 public:
  QuadratureFailure(const std::string& what, double achieved_error);
  double achieved_error;
};

class BracketFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace wgl
