#include "wgl/profile.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "wgl/errors.hpp"

namespace wgl {

CurvatureProfile CurvatureProfile::zero() { return {}; }

CurvatureProfile CurvatureProfile::bump(double amplitude) {
  if (!std::isfinite(amplitude) || std::abs(amplitude) > kBumpAmplitudeCap)
    throw ValidationError("bump amplitude must satisfy |a| <= 0.999, got " + std::to_string(amplitude));
  CurvatureProfile p;
  p.kind_ = ProfileKind::Bump;
  p.amplitude_ = amplitude;
  return p;
}

CurvatureProfile CurvatureProfile::tuned_bump(double amplitude, int target_index) {
  if (!std::isfinite(amplitude) || amplitude <= 0.0 || amplitude > kTunedAmplitudeMax)
    throw ValidationError("tuned bump amplitude must lie in (0, 20], got " + std::to_string(amplitude));
  if (target_index < 2) throw ValidationError("tuned bump target_index must be >= 2");
  CurvatureProfile p;
  p.kind_ = ProfileKind::TunedBump;
  p.amplitude_ = amplitude;
  p.target_index_ = target_index;
  return p;
}

CurvatureProfile::Jet CurvatureProfile::jet(double s) const {
  Jet j;
  if (kind_ == ProfileKind::Zero || std::abs(s) >= 1.0) return j;
  double t = 1.0 - s * s;
  double inv_t = 1.0 / t;
  // exp(1 - 1/t) underflows long before 1/t overflows; stop early to avoid 0*inf below.
  if (inv_t > 700.0) return j;
  double g = amplitude_ * std::exp(1.0 - inv_t);
  double inv_t2 = inv_t * inv_t;
  j.g0 = g;
  j.g1 = g * (-2.0 * s * inv_t2);
  j.g2 = g * (4.0 * s * s * inv_t2 * inv_t2 - 2.0 * inv_t2 - 8.0 * s * s * inv_t2 * inv_t);
  return j;
}

std::string CurvatureProfile::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case ProfileKind::Zero: os << "zero"; break;
    case ProfileKind::Bump: os << "bump(" << amplitude_ << ")"; break;
    case ProfileKind::TunedBump:
      os << "tuned_bump(" << amplitude_ << ", n*=" << target_index_ << ")";
      break;
  }
  return os.str();
}

double eval_gamma(const CurvatureProfile& profile, double s, int order) {
  auto j = profile.jet(s);
  switch (order) {
    case 0: return j.g0;
    case 1: return j.g1;
    case 2: return j.g2;
    default: throw ValidationError("eval_gamma order must be 0, 1 or 2");
  }
}

namespace {

void check_ratio(double ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0))
    throw ValidationError("ratio delta/eps must lie in (0,1], got " + std::to_string(ratio));
}

}  // namespace

GeometryAt eval_geometry(const CurvatureProfile& profile, double s, double u, double ratio) {
  check_ratio(ratio);
  auto j = profile.jet(s);
  GeometryAt out;
  out.s = s;
  out.u = u;
  out.ratio = ratio;
  double k1 = u * ratio * j.g1;
  double k2 = u * ratio * j.g2;
  double b = 1.0 + u * ratio * j.g0;
  double ib = 1.0 / b;
  double ib2 = ib * ib;
  out.g = b * b;
  out.inv_g = ib2;
  out.ds_inv_g = -2.0 * ib2 * ib * k1;
  out.W = -0.25 * j.g0 * j.g0 * ib2 + 0.5 * k2 * ib2 * ib - 1.25 * k1 * k1 * ib2 * ib2;
  return out;
}

PotentialTerms potential_terms(const CurvatureProfile& profile, double s, double u, double ratio) {
  check_ratio(ratio);
  auto j = profile.jet(s);
  double b = 1.0 + u * ratio * j.g0;
  double g = b * b;
  // s-derivatives of g
  double gs = 2.0 * b * u * ratio * j.g1;
  double gss = 2.0 * std::pow(u * ratio * j.g1, 2) + 2.0 * b * u * ratio * j.g2;
  // u-derivatives of g
  double gu = 2.0 * b * ratio * j.g0;
  double guu = 2.0 * ratio * ratio * j.g0 * j.g0;

  // h = g^{-1/4} and its first two derivatives along one coordinate.
  auto h_derivs = [g](double d1, double d2) {
    double h1 = -0.25 * std::pow(g, -1.25) * d1;
    double h2 = 0.3125 * std::pow(g, -2.25) * d1 * d1 - 0.25 * std::pow(g, -1.25) * d2;
    return std::pair<double, double>{h1, h2};
  };
  double pre = -std::pow(g, -0.25);

  PotentialTerms out;
  {
    // W~ = -g^{-1/4} d_s(g^{-1/2} d_s g^{-1/4})
    auto [h1, h2] = h_derivs(gs, gss);
    out.W_tilde = pre * (-0.5 * std::pow(g, -1.5) * gs * h1 + std::pow(g, -0.5) * h2);
  }
  {
    // W~~ = -g^{-1/4} d_u(g^{1/2} d_u g^{-1/4})
    auto [h1, h2] = h_derivs(gu, guu);
    out.W_tilde_tilde = pre * (0.5 * std::pow(g, -0.5) * gu * h1 + std::pow(g, 0.5) * h2);
  }
  auto geo = eval_geometry(profile, s, u, ratio);
  out.ds_inv_g = geo.ds_inv_g;
  out.W = geo.W;
  return out;
}

double check_potential_identity(const CurvatureProfile& profile, double ratio,
                                const std::vector<std::pair<double, double>>& sample_grid) {
  if (sample_grid.empty()) throw ValidationError("potential identity needs a nonempty grid");
  double worst = 0.0;
  for (auto [s, u] : sample_grid) {
    auto t = potential_terms(profile, s, u, ratio);
    double lhs = t.W_tilde + t.W_tilde_tilde / (ratio * ratio);
    worst = std::max(worst, std::abs(lhs - t.W));
  }
  return worst;
}

double literal_potential_identity_defect(const CurvatureProfile& profile, double ratio,
                                         const std::vector<std::pair<double, double>>& sample_grid) {
  if (sample_grid.empty()) throw ValidationError("potential identity needs a nonempty grid");
  double worst = 0.0;
  for (auto [s, u] : sample_grid) {
    auto t = potential_terms(profile, s, u, ratio);
    double lhs = -t.ds_inv_g + t.W_tilde + t.W_tilde_tilde / (ratio * ratio);
    worst = std::max(worst, std::abs(lhs - t.W));
  }
  return worst;
}

std::vector<std::pair<double, double>> uniform_sample_grid(int n) {
  if (n < 1) throw ValidationError("grid size must be positive");
  std::vector<std::pair<double, double>> grid;
  grid.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      grid.emplace_back(-1.0 + 2.0 * (i + 0.5) / n, (k + 0.5) / n);
  return grid;
}

nlohmann::json to_json(const CurvatureProfile& profile) {
  switch (profile.kind()) {
    case ProfileKind::Zero: return {{"kind", "zero"}};
    case ProfileKind::Bump: return {{"kind", "bump"}, {"amplitude", profile.amplitude()}};
    case ProfileKind::TunedBump:
      return {{"kind", "tuned_bump"},
              {"amplitude", profile.amplitude()},
              {"target_index", profile.target_index()}};
  }
  return {};
}

CurvatureProfile profile_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw ValidationError("profile must be an object with a string \"kind\"");
  auto kind = j["kind"].get<std::string>();
  auto number = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number())
      throw ValidationError(std::string("profile field \"") + key + "\" must be a number");
    return j[key].get<double>();
  };
  if (kind == "zero") return CurvatureProfile::zero();
  if (kind == "bump") return CurvatureProfile::bump(number("amplitude"));
  if (kind == "tuned_bump") {
    int target = 2;
    if (j.contains("target_index")) {
      if (!j["target_index"].is_number_integer())
        throw ValidationError("profile field \"target_index\" must be an integer");
      target = j["target_index"].get<int>();
    }
    if (j.contains("amplitude") && !j["amplitude"].is_null())
      return CurvatureProfile::tuned_bump(number("amplitude"), target);
    return tune_to_resonance(CurvatureProfile::bump(0.5), target);
  }
  throw ValidationError("unknown profile kind \"" + kind + "\"");
}

CurvatureProfile parse_profile(const std::string& text) {
  if (!text.empty() && text.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("profile JSON: ") + e.what());
    }
    return profile_from_json(j);
  }
  auto colon = text.find(':');
  std::string head = text.substr(0, colon);
  std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  auto to_number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ValidationError("bad number in profile spec: \"" + s + "\"");
    }
  };
  if (head == "zero") return CurvatureProfile::zero();
  if (head == "bump") return CurvatureProfile::bump(arg.empty() ? 0.5 : to_number(arg));
  if (head == "tuned" || head == "tuned_bump")
    return tune_to_resonance(CurvatureProfile::bump(0.5),
                             arg.empty() ? 2 : static_cast<int>(to_number(arg)));
  throw ValidationError("unknown profile \"" + text + "\"");
}

}  // namespace wgl
