#include "wgl/source.hpp"

#include <cmath>
#include <numbers>

#include "wgl/errors.hpp"

namespace wgl {

SourceFunction SourceFunction::zero() { return {}; }

SourceFunction SourceFunction::exponential(double scale, double rate) {
  if (!(rate > 0.0) || !std::isfinite(scale)) throw ValidationError("exponential source needs rate > 0");
  SourceFunction f;
  f.kind_ = Kind::Exponential;
  f.scale_ = scale;
  f.a_ = rate;
  return f;
}

SourceFunction SourceFunction::gaussian(double scale, double center, double width) {
  if (!(width > 0.0) || !std::isfinite(scale) || !std::isfinite(center))
    throw ValidationError("gaussian source needs width > 0");
  SourceFunction f;
  f.kind_ = Kind::Gaussian;
  f.scale_ = scale;
  f.a_ = center;
  f.b_ = width;
  return f;
}

SourceFunction SourceFunction::indicator(double scale, double a, double b) {
  if (!(a >= 0.0 && b > a) || !std::isfinite(b) || !std::isfinite(scale))
    throw ValidationError("indicator source needs 0 <= a < b < inf");
  SourceFunction f;
  f.kind_ = Kind::Indicator;
  f.scale_ = scale;
  f.a_ = a;
  f.b_ = b;
  return f;
}

SourceFunction SourceFunction::sampled(std::vector<double> values, double cutoff) {
  if (values.size() < 2) throw ValidationError("sampled source needs at least two samples");
  if (!(cutoff > 0.0) || !std::isfinite(cutoff)) throw ValidationError("sampled source needs cutoff > 0");
  for (double v : values)
    if (!std::isfinite(v)) throw ValidationError("sampled source values must be finite");
  SourceFunction f;
  f.kind_ = Kind::Sampled;
  f.scale_ = 1.0;
  f.cutoff_ = cutoff;
  f.values_ = std::move(values);
  return f;
}

bool SourceFunction::is_zero() const {
  if (kind_ == Kind::Zero) return true;
  if (kind_ == Kind::Sampled) {
    for (double v : values_)
      if (v != 0.0) return false;
    return true;
  }
  return scale_ == 0.0;
}

double SourceFunction::operator()(double s) const {
  if (s < 0.0) return 0.0;
  switch (kind_) {
    case Kind::Zero: return 0.0;
    case Kind::Exponential: return scale_ * std::exp(-a_ * s);
    case Kind::Gaussian: {
      double x = (s - a_) / b_;
      return scale_ * std::exp(-0.5 * x * x);
    }
    case Kind::Indicator: return (s >= a_ && s <= b_) ? scale_ : 0.0;
    case Kind::Sampled: {
      if (s >= cutoff_) return 0.0;
      double h = cutoff_ / static_cast<double>(values_.size() - 1);
      auto k = static_cast<std::size_t>(s / h);
      if (k >= values_.size() - 1) return values_.back();
      double t = s / h - static_cast<double>(k);
      return (1.0 - t) * values_[k] + t * values_[k + 1];
    }
  }
  return 0.0;
}

double SourceFunction::effective_end() const {
  switch (kind_) {
    case Kind::Zero: return 0.0;
    case Kind::Exponential: return 40.0 / a_;
    case Kind::Gaussian: return std::max(0.0, a_ + 9.0 * b_);
    case Kind::Indicator: return b_;
    case Kind::Sampled: return cutoff_;
  }
  return 0.0;
}

std::vector<double> SourceFunction::breakpoints() const {
  std::vector<double> out;
  if (kind_ == Kind::Indicator) {
    if (a_ > 0.0) out.push_back(a_);
  } else if (kind_ == Kind::Sampled) {
    double h = cutoff_ / static_cast<double>(values_.size() - 1);
    for (std::size_t k = 1; k + 1 < values_.size(); ++k) out.push_back(h * static_cast<double>(k));
  } else if (kind_ == Kind::Gaussian && a_ > 0.0) {
    out.push_back(a_);
  }
  return out;
}

double SourceFunction::l2_norm() const {
  switch (kind_) {
    case Kind::Zero: return 0.0;
    case Kind::Exponential: return std::abs(scale_) / std::sqrt(2.0 * a_);
    case Kind::Gaussian: {
      // integral over (0,inf) of exp(-(s-c)^2 / w^2)
      double v = 0.5 * std::sqrt(std::numbers::pi) * b_ * std::erfc(-a_ / b_);
      return std::abs(scale_) * std::sqrt(v);
    }
    case Kind::Indicator: return std::abs(scale_) * std::sqrt(b_ - a_);
    case Kind::Sampled: {
      double h = cutoff_ / static_cast<double>(values_.size() - 1);
      double acc = 0.0;
      for (std::size_t k = 0; k + 1 < values_.size(); ++k) {
        double p = values_[k], q = values_[k + 1];
        acc += h * (p * p + p * q + q * q) / 3.0;
      }
      return std::sqrt(acc);
    }
  }
  return 0.0;
}

SourceFunction SourceFunction::scaled(double c) const {
  SourceFunction f = *this;
  f.scale_ *= c;
  for (double& v : f.values_) v *= c;
  if (kind_ == Kind::Sampled) f.scale_ = 1.0;
  return f;
}

nlohmann::json SourceFunction::to_json() const {
  switch (kind_) {
    case Kind::Zero: return {{"kind", "zero"}};
    case Kind::Exponential: return {{"kind", "exponential"}, {"scale", scale_}, {"rate", a_}};
    case Kind::Gaussian:
      return {{"kind", "gaussian"}, {"scale", scale_}, {"center", a_}, {"width", b_}};
    case Kind::Indicator: return {{"kind", "indicator"}, {"scale", scale_}, {"a", a_}, {"b", b_}};
    case Kind::Sampled: return {{"kind", "sampled"}, {"cutoff", cutoff_}, {"values", values_}};
  }
  return {};
}

SourceFunction SourceFunction::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw ValidationError("source must be an object with a string \"kind\"");
  auto num = [&](const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ValidationError(std::string("source field \"") + key + "\" must be a number");
    return j[key].get<double>();
  };
  auto kind = j["kind"].get<std::string>();
  if (kind == "zero") return zero();
  if (kind == "exponential") return exponential(num("scale", 1.0), num("rate", 1.0));
  if (kind == "gaussian") return gaussian(num("scale", 1.0), num("center", 0.0), num("width", 1.0));
  if (kind == "indicator") return indicator(num("scale", 1.0), num("a", 0.0), num("b", 1.0));
  if (kind == "sampled") {
    if (!j.contains("values") || !j["values"].is_array())
      throw ValidationError("sampled source needs a \"values\" array");
    std::vector<double> v;
    for (const auto& x : j["values"]) {
      if (!x.is_number()) throw ValidationError("sampled source values must be numbers");
      v.push_back(x.get<double>());
    }
    return sampled(std::move(v), num("cutoff", 0.0));
  }
  throw ValidationError("unknown source kind \"" + kind + "\"");
}

}  // namespace wgl
