#pragma once

// Parameter sweeps, log-log slope fits, the FD oracle comparison report and
// result persistence.

#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wgl/approx_residual.hpp"
#include "wgl/fd_oracle.hpp"
#include "wgl/linalg2.hpp"
#include "wgl/profile.hpp"
#include "wgl/source.hpp"

namespace wgl {

inline constexpr int kSchemaVersion = 1;

/// Library version string.
const char* version();

enum class SweepKind { Coupling, Residual, GraphLimit, Oracle };
enum class SweepVariable { Epsilon, Delta };

struct DeltaRule {
  enum class Kind { FixedRatio, Power };
  Kind kind = Kind::Power;
  double value = 1.5;  // r in delta = r eps, or a in delta = eps^a
  double apply(double epsilon) const;
};

struct WindowPolicy {
  enum class Kind { Auto, DropLeading };
  Kind kind = Kind::Auto;
  int drop = 0;  // DropLeading only
};

struct OracleGrid {
  double h_s = 1.0 / 64.0;
  int u_cells = 32;
  bool refine = true;  // also solve on the s-halved grid
};

struct ExperimentConfig {
  SweepKind kind = SweepKind::Residual;
  CurvatureProfile profile;
  nlohmann::json profile_spec = "zero";  // as given, before tuning
  cplx z{1.0, 1.0};
  int n = 1;
  SweepVariable variable = SweepVariable::Epsilon;
  std::vector<double> eps_grid;
  DeltaRule delta_rule;
  double epsilon = 0.2;             // fixed epsilon of delta sweeps and oracle runs
  std::vector<double> delta_grid;   // delta sweeps
  std::optional<Vec2> p;            // coupling sweeps; derived from f1, f2 when absent
  SourceFunction f1 = SourceFunction::exponential(1.0, 1.0);
  SourceFunction f2 = SourceFunction::zero();
  QuadratureSpec quadrature;
  WindowPolicy window;
  double zero_tolerance = 1e-9;
  OracleGrid oracle;
  std::string csv_path;
  std::string json_path;
  unsigned seed = 1;
  int threads = 0;  // 0: hardware concurrency, capped by WGL_THREADS
};

/// Throws ValidationError on any malformed or inconsistent field.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);
void validate(const ExperimentConfig& cfg);

/// "0.5+1i", "i", "-2", "1-0.25i", or "re,im".
cplx parse_complex(const std::string& text);
/// Comma list "0.5,0.25" or "pow2:a:b" for 2^-a, ..., 2^-b.
std::vector<double> parse_grid(const std::string& text);
/// "power:1.5", "power 1.5", "fixed-ratio:0.5".
DeltaRule parse_delta_rule(const std::string& text);

struct SlopeFit {
  std::string metric;
  bool ok = false;
  double slope = 0.0;
  double half_width = 0.0;  // 2 standard errors
  std::size_t first = 0;    // window start in the sorted usable points
  std::size_t count = 0;
  std::string error;
};

/// OLS of log y on log x. Points are taken in the given order (largest x
/// first); non-finite or non-positive values are dropped. Needs >= 4 points.
SlopeFit fit_slope(const std::vector<double>& x, const std::vector<double>& y,
                   const WindowPolicy& policy = {});

struct SweepRow {
  double epsilon = 0.0;
  double delta = 0.0;
  std::vector<double> values;
};

struct PointFailure {
  double epsilon = 0.0;
  double delta = 0.0;
  std::string error;
};

struct SweepResult {
  ExperimentConfig config;
  bool resonant = false;
  std::vector<std::string> metrics;
  std::vector<SweepRow> rows;  // sorted by the swept variable, largest first
  std::vector<SlopeFit> fits;
  std::vector<PointFailure> failures;
  std::string version;

  /// Column of `metric`; throws ValidationError if unknown.
  std::vector<double> column(const std::string& metric) const;
  const SlopeFit& fit(const std::string& metric) const;
};

/// WGL_THREADS caps hardware concurrency; `requested` > 0 caps it further.
int worker_count(int requested = 0);

/// Evaluates every grid point on a worker pool, fits every metric and writes
/// csv_path / json_path when set. Point failures are recorded, not thrown.
SweepResult run_sweep(const ExperimentConfig& cfg);

void write_csv(std::ostream& os, const SweepResult& result);
nlohmann::json to_json(const SweepResult& result);

struct OracleReport {
  bool resonant = false;
  WaveguideGrid grid;
  WaveguideGrid fine_grid;
  double source_norm = 0.0;       // continuum ||(f1, f2)||
  double solver_residual = 0.0;
  double resolvent_bound = 0.0;   // ||psi_h|| |Im z| / ||xi_h||, at most 1 in exact arithmetic
  double limit_mismatch = 0.0;    // ||P psi_h - r(z) f|| / ||f||, edges
  double approx_mismatch = 0.0;   // ||P psi_h - psi_hat|| / ||f||, edges and eps-weighted vertex
  double limit_mismatch_fine = 0.0;
  double approx_mismatch_fine = 0.0;
  double refinement_factor = 0.0; // approx_mismatch / approx_mismatch_fine
  double seconds = 0.0;
};

/// FD oracle at cfg.epsilon with delta from cfg.delta_rule, compared with the
/// matching graph limit and the assembled approximate solution.
OracleReport run_oracle(const ExperimentConfig& cfg);
nlohmann::json to_json(const OracleReport& report, const ExperimentConfig& cfg);

}  // namespace wgl
