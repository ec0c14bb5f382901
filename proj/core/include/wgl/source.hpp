#pragma once

// Edge data f on (0, inf): closed-form records or uniform samples with a cutoff.

#include <complex>
#include <nlohmann/json.hpp>
#include <vector>

namespace wgl {

class SourceFunction {
 public:
  enum class Kind { Zero, Exponential, Gaussian, Indicator, Sampled };

  SourceFunction() = default;

  static SourceFunction zero();
  /// scale * exp(-rate s), rate > 0.
  static SourceFunction exponential(double scale, double rate);
  /// scale * exp(-(s - center)^2 / (2 width^2)).
  static SourceFunction gaussian(double scale, double center, double width);
  /// scale on [a, b], 0 elsewhere; 0 <= a < b.
  static SourceFunction indicator(double scale, double a, double b);
  /// Piecewise linear through values at s_k = k * cutoff / (n-1); zero beyond cutoff.
  static SourceFunction sampled(std::vector<double> values, double cutoff);

  Kind kind() const { return kind_; }
  bool is_zero() const;

  double operator()(double s) const;

  /// Beyond this point |f| < 1e-17 * scale (or f = 0 exactly).
  double effective_end() const;
  /// Points in (0, effective_end) where f is not smooth.
  std::vector<double> breakpoints() const;

  /// ||f||_{L2(0,inf)}: closed form where available, otherwise exact per-segment integration.
  double l2_norm() const;

  SourceFunction scaled(double c) const;

  nlohmann::json to_json() const;
  static SourceFunction from_json(const nlohmann::json& j);

 private:
  Kind kind_ = Kind::Zero;
  double scale_ = 0.0;
  double a_ = 0.0;  // rate, center or left end
  double b_ = 0.0;  // width or right end
  double cutoff_ = 0.0;
  std::vector<double> values_;
};

}  // namespace wgl
