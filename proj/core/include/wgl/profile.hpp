#pragma once

// Curvature profile gamma on (-1,1) and the vertex-region geometry it induces.

#include <cmath>
#include <nlohmann/json.hpp>
#include <string>
#include <utility>
#include <vector>

namespace wgl {

enum class ProfileKind { Zero, Bump, TunedBump };

/// Amplitude cap of the plain bump family (sup|gamma| < 1).
inline constexpr double kBumpAmplitudeCap = 0.999;
/// Search range used when tuning a bump to resonance. The resonant amplitude
/// lies above the cap, see tune_to_resonance.
inline constexpr double kTunedAmplitudeMax = 20.0;

class CurvatureProfile {
 public:
  CurvatureProfile() = default;

  static CurvatureProfile zero();
  /// amplitude * exp(1 - 1/(1 - s^2)); |amplitude| <= kBumpAmplitudeCap.
  static CurvatureProfile bump(double amplitude);
  /// Same shape with an amplitude produced by tune_to_resonance.
  static CurvatureProfile tuned_bump(double amplitude, int target_index);

  ProfileKind kind() const { return kind_; }
  double amplitude() const { return amplitude_; }
  int target_index() const { return target_index_; }

  double sup_abs() const { return kind_ == ProfileKind::Zero ? 0.0 : std::abs(amplitude_); }
  /// sup of gamma^2/4, the depth of the effective potential.
  double potential_bound() const { return 0.25 * sup_abs() * sup_abs(); }
  bool satisfies_cap() const { return sup_abs() < 1.0; }

  /// gamma and its first two derivatives at once.
  struct Jet {
    double g0 = 0.0, g1 = 0.0, g2 = 0.0;
  };
  Jet jet(double s) const;

  std::string describe() const;

 private:
  ProfileKind kind_ = ProfileKind::Zero;
  double amplitude_ = 0.0;
  int target_index_ = 0;
};

/// gamma (order 0), gamma' (order 1) or gamma'' (order 2); exactly 0 for |s| >= 1.
double eval_gamma(const CurvatureProfile& profile, double s, int order);

struct GeometryAt {
  double s = 0.0;
  double u = 0.0;
  double ratio = 0.0;  // delta / epsilon
  double g = 1.0;
  double inv_g = 1.0;
  double ds_inv_g = 0.0;
  double W = 0.0;
};

GeometryAt eval_geometry(const CurvatureProfile& profile, double s, double u, double ratio);

/// Pieces of the transformed vertex operator, computed from g by the chain rule
/// for g^{-1/4} rather than from the closed form of W.
struct PotentialTerms {
  double W_tilde = 0.0;        // s-part
  double W_tilde_tilde = 0.0;  // u-part, multiplied by (eps/delta)^2 in the identity
  double ds_inv_g = 0.0;
  double W = 0.0;
};
PotentialTerms potential_terms(const CurvatureProfile& profile, double s, double u, double ratio);

/// max over the grid of |W~ + (eps/delta)^2 W~~ - W|.
double check_potential_identity(const CurvatureProfile& profile, double ratio,
                                const std::vector<std::pair<double, double>>& sample_grid);

/// Same defect with the extra -d_s(1/g) term kept; nonzero whenever gamma != 0.
double literal_potential_identity_defect(const CurvatureProfile& profile, double ratio,
                                         const std::vector<std::pair<double, double>>& sample_grid);

/// Uniform n x n grid strictly inside (-1,1) x (0,1).
std::vector<std::pair<double, double>> uniform_sample_grid(int n);

/// Bump amplitude for which lambda_{target_index} = 0 to within 1e-10.
/// target_index >= 2. Throws BracketFailure when no amplitude up to
/// `amplitude_max` gives a sign change.
CurvatureProfile tune_to_resonance(const CurvatureProfile& base, int target_index,
                                   double amplitude_max = kTunedAmplitudeMax);

nlohmann::json to_json(const CurvatureProfile& profile);
/// {"kind": "zero"|"bump"|"tuned_bump", "amplitude": x, "target_index": k}.
/// A tuned_bump without amplitude is tuned on load.
CurvatureProfile profile_from_json(const nlohmann::json& j);
/// "zero", "bump:0.5", "tuned:2" or a JSON object literal.
CurvatureProfile parse_profile(const std::string& text);

}  // namespace wgl
