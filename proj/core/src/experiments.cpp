#include "wgl/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <thread>

#include "wgl/errors.hpp"
#include "wgl/graph_limit.hpp"

namespace wgl {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Ols {
  double slope = 0.0;
  double se = 0.0;
};

Ols ols(const std::vector<double>& lx, const std::vector<double>& ly, std::size_t first) {
  std::size_t m = lx.size() - first;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = first; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = first; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  Ols r;
  if (!(sxx > 0.0)) return {kNaN, kNaN};
  r.slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = first; i < lx.size(); ++i) {
    double res = ly[i] - my - r.slope * (lx[i] - mx);
    rss += res * res;
  }
  r.se = m > 2 ? std::sqrt(rss / static_cast<double>(m - 2) / sxx) : 0.0;
  return r;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Vec2 sweep_p(const ExperimentConfig& cfg) {
  if (cfg.p) return *cfg.p;
  auto hl = make_half_line_resolvent(cfg.z);
  return Vec2{{boundary_derivative(hl, cfg.f1), boundary_derivative(hl, cfg.f2)}};
}

std::vector<std::string> metric_names(SweepKind kind, bool resonant) {
  switch (kind) {
    case SweepKind::Coupling:
      return {"q_norm", "dev_q", "dev_xi", "dev_xi_corrected", "system_residual"};
    case SweepKind::Residual:
      return {"residual_Hnorm", "xi_norm", "bound_ratio", "residual_l2_V", "relative_Hnorm",
              "theorem_shape"};
    case SweepKind::GraphLimit:
      if (resonant) return {"comparison_norm", "relative_comparison", "kirchhoff_value", "kirchhoff_flux"};
      return {"comparison_norm", "relative_comparison", "value1", "value2", "flux1", "flux2"};
    case SweepKind::Oracle: break;
  }
  throw ValidationError("oracle runs are not sweeps; use run_oracle");
}

}  // namespace

const char* version() { return WGL_VERSION; }

SlopeFit fit_slope(const std::vector<double>& x, const std::vector<double>& y,
                   const WindowPolicy& policy) {
  if (x.size() != y.size()) throw ValidationError("fit_slope: x and y sizes differ");
  SlopeFit fit;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isfinite(x[i]) && std::isfinite(y[i]) && x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  std::size_t m = lx.size();
  if (m < 4) {
    fit.error = "insufficient points: " + std::to_string(m) + " usable, 4 needed";
    return fit;
  }
  std::size_t first = 0;
  if (policy.kind == WindowPolicy::Kind::DropLeading) {
    first = static_cast<std::size_t>(std::max(0, policy.drop));
    if (m < first + 4) {
      fit.error = "insufficient points after dropping " + std::to_string(first);
      return fit;
    }
  } else {
    first = m - 4;
    double prev = ols(lx, ly, 0).slope;
    for (std::size_t d = 1; d + 4 <= m; ++d) {
      double cur = ols(lx, ly, d).slope;
      if (std::abs(cur - prev) < 0.02) {
        first = d;
        break;
      }
      prev = cur;
    }
    if (m == 4) first = 0;
  }
  auto r = ols(lx, ly, first);
  if (!std::isfinite(r.slope)) {
    fit.error = "degenerate abscissae";
    return fit;
  }
  fit.ok = true;
  fit.slope = r.slope;
  fit.half_width = 2.0 * r.se;
  fit.first = first;
  fit.count = m - first;
  return fit;
}

std::vector<double> SweepResult::column(const std::string& metric) const {
  auto it = std::find(metrics.begin(), metrics.end(), metric);
  if (it == metrics.end()) throw ValidationError("unknown metric \"" + metric + "\"");
  auto k = static_cast<std::size_t>(it - metrics.begin());
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r.values[k]);
  return out;
}

const SlopeFit& SweepResult::fit(const std::string& metric) const {
  for (const auto& f : fits)
    if (f.metric == metric) return f;
  throw ValidationError("no fit for metric \"" + metric + "\"");
}

int worker_count(int requested) {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("WGL_THREADS"); env && *env) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw ValidationError("WGL_THREADS must be a positive integer");
    n = std::min<long>(n, v);
  }
  if (requested > 0) n = std::min(n, requested);
  return n;
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
  validate(cfg);
  SweepResult out;
  out.config = cfg;
  out.version = version();
  CouplingContext ctx(cfg.profile, cfg.zero_tolerance);
  out.resonant = ctx.vertex_case().resonant;
  out.metrics = metric_names(cfg.kind, out.resonant);

  std::vector<std::pair<double, double>> points;
  if (cfg.variable == SweepVariable::Epsilon)
    for (double e : cfg.eps_grid) points.emplace_back(e, cfg.delta_rule.apply(e));
  else
    for (double d : cfg.delta_grid) points.emplace_back(cfg.epsilon, d);

  Vec2 p;
  std::optional<Mat2> reduced;
  if (cfg.kind == SweepKind::Coupling) {
    p = sweep_p(cfg);
    if (norm(p) == 0.0) throw ValidationError("coupling sweep needs p != 0");
    if (out.resonant) reduced = reduced_corner_matrix(ctx);
  }
  auto projector = ctx.projector();
  double fnorm = source_norm(cfg.f1, cfg.f2);

  auto evaluate = [&](double eps, double delta) -> std::vector<double> {
    switch (cfg.kind) {
      case SweepKind::Coupling: {
        auto c = solve_coupling(ctx, cfg.z, eps, p);
        auto dev = asymptotic_deviation(c, projector);
        double corrected = reduced ? corrected_xi_deviation(c, *projector, *reduced) : kNaN;
        return {norm(c.q) / norm(p), dev.dev_q, dev.dev_xi, corrected, c.residual};
      }
      case SweepKind::Residual: {
        auto sol = assemble(ctx, cfg.n, cfg.z, eps, delta, cfg.f1, cfg.f2);
        auto r = residual_norms(sol, cfg.quadrature);
        double rel = r.source_norm > 0.0 ? r.residual_Hnorm / r.source_norm : kNaN;
        return {r.residual_Hnorm, r.xi_norm, r.bound_ratio, r.residual_l2_V, rel, r.theorem_shape};
      }
      case SweepKind::GraphLimit: {
        auto sol = assemble(ctx, cfg.n, cfg.z, eps, delta, cfg.f1, cfg.f2);
        double cmp = limit_comparison(sol, limit_resolvent_for(sol));
        auto b = boundary_limits(sol);
        double rel = fnorm > 0.0 ? cmp / fnorm : kNaN;
        if (out.resonant) return {cmp, rel, b.kirchhoff_value, b.kirchhoff_flux};
        return {cmp, rel, b.value1, b.value2, b.flux1, b.flux2};
      }
      case SweepKind::Oracle: break;
    }
    return {};
  };

  std::vector<std::vector<double>> values(points.size());
  std::vector<std::string> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        values[i] = evaluate(points[i].first, points[i].second);
      } catch (const std::exception& e) {
        errors[i] = e.what();
        if (errors[i].empty()) errors[i] = "unknown failure";
      }
    }
  };
  int nthreads = std::min<int>(worker_count(cfg.threads), static_cast<int>(points.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!errors[i].empty())
      out.failures.push_back({points[i].first, points[i].second, errors[i]});
    else
      out.rows.push_back({points[i].first, points[i].second, std::move(values[i])});
  }
  bool by_eps = cfg.variable == SweepVariable::Epsilon;
  std::stable_sort(out.rows.begin(), out.rows.end(), [&](const SweepRow& a, const SweepRow& b) {
    return by_eps ? a.epsilon > b.epsilon : a.delta > b.delta;
  });

  std::vector<double> x;
  for (const auto& r : out.rows) x.push_back(by_eps ? r.epsilon : r.delta);
  for (const auto& m : out.metrics) {
    auto f = fit_slope(x, out.column(m), cfg.window);
    f.metric = m;
    out.fits.push_back(std::move(f));
  }

  if (!cfg.csv_path.empty()) {
    std::ofstream os(cfg.csv_path);
    if (!os) throw ValidationError("cannot write " + cfg.csv_path);
    write_csv(os, out);
  }
  if (!cfg.json_path.empty()) {
    std::ofstream os(cfg.json_path);
    if (!os) throw ValidationError("cannot write " + cfg.json_path);
    os << to_json(out).dump(2) << "\n";
  }
  return out;
}

void write_csv(std::ostream& os, const SweepResult& r) {
  os << "# schema_version: " << kSchemaVersion << "\n";
  os << "# wgl_version: " << r.version << "\n";
  os << "# config: " << to_json(r.config).dump() << "\n";
  for (const auto& f : r.failures)
    os << "# failed: epsilon=" << format_double(f.epsilon) << " delta=" << format_double(f.delta)
       << " error=" << f.error << "\n";
  os << "epsilon,delta";
  for (const auto& m : r.metrics) os << "," << m;
  os << "\n";
  for (const auto& row : r.rows) {
    os << format_double(row.epsilon) << "," << format_double(row.delta);
    for (double v : row.values) os << "," << format_double(v);
    os << "\n";
  }
  // Trailing summary rows aligned with the metric columns; commented so loaders can skip them.
  os << "# slope,";
  for (const auto& m : r.metrics) {
    const auto& f = r.fit(m);
    os << "," << (f.ok ? format_double(f.slope) : std::string("nan"));
  }
  os << "\n# half_width,";
  for (const auto& m : r.metrics) {
    const auto& f = r.fit(m);
    os << "," << (f.ok ? format_double(f.half_width) : std::string("nan"));
  }
  os << "\n";
}

json to_json(const SweepResult& r) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["wgl_version"] = r.version;
  j["config"] = to_json(r.config);
  j["resonant"] = r.resonant;
  j["metrics"] = r.metrics;
  json rows = json::array();
  for (const auto& row : r.rows) {
    json values;
    for (std::size_t k = 0; k < r.metrics.size(); ++k)
      values[r.metrics[k]] = std::isfinite(row.values[k]) ? json(row.values[k]) : json(nullptr);
    rows.push_back({{"epsilon", row.epsilon}, {"delta", row.delta}, {"values", values}});
  }
  j["rows"] = rows;
  json fits = json::array();
  for (const auto& f : r.fits) {
    json e{{"metric", f.metric}, {"ok", f.ok}};
    if (f.ok) {
      e["slope"] = f.slope;
      e["half_width"] = f.half_width;
      e["window_first"] = f.first;
      e["window_count"] = f.count;
    } else {
      e["error"] = f.error;
    }
    fits.push_back(e);
  }
  j["fits"] = fits;
  json failures = json::array();
  for (const auto& f : r.failures)
    failures.push_back({{"epsilon", f.epsilon}, {"delta", f.delta}, {"error", f.error}});
  j["failures"] = failures;
  return j;
}

OracleReport run_oracle(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.kind = SweepKind::Oracle;
  validate(c);
  auto t0 = std::chrono::steady_clock::now();
  double eps = c.epsilon, delta = c.delta_rule.apply(eps);
  CouplingContext ctx(c.profile, c.zero_tolerance);
  auto sol = assemble(ctx, c.n, c.z, eps, delta, c.f1, c.f2);
  auto limit = apply_graph_resolvent(limit_resolvent_for(sol), c.f1, c.f2);
  double fnorm = source_norm(c.f1, c.f2);
  if (!(fnorm > 0.0)) throw ValidationError("oracle comparison needs a nonzero source");

  OracleReport rep;
  rep.resonant = sol.resonant();
  rep.source_norm = fnorm;
  auto limit_ref = [&](int j, double s) { return j == 1 ? limit.x1.value(s) : limit.x2.value(s); };
  auto approx_edge = [&](int j, double s) { return sol.edge_value(j, s); };
  auto approx_vertex = [&](double s) { return sol.phi(s); };
  auto measure = [&](const WaveguideGrid& g, double& lim, double& approx) {
    auto field = fd_resolvent(g, c.profile, c.n, c.z, c.f1, c.f2);
    lim = edge_mismatch(field, limit_ref) / fnorm;
    approx = std::hypot(edge_mismatch(field, approx_edge), vertex_mismatch(field, approx_vertex)) / fnorm;
    return field;
  };

  rep.grid = make_grid(eps, delta, c.z, c.oracle.h_s, c.oracle.u_cells);
  auto field = measure(rep.grid, rep.limit_mismatch, rep.approx_mismatch);
  rep.solver_residual = field.solver_residual;
  rep.resolvent_bound = field.source_norm > 0.0
                            ? field.field_norm * std::abs(c.z.imag()) / field.source_norm
                            : 0.0;
  if (c.oracle.refine) {
    rep.fine_grid = refine_s(rep.grid);
    auto fine = measure(rep.fine_grid, rep.limit_mismatch_fine, rep.approx_mismatch_fine);
    rep.solver_residual = std::max(rep.solver_residual, fine.solver_residual);
    rep.refinement_factor =
        rep.approx_mismatch_fine > 0.0 ? rep.approx_mismatch / rep.approx_mismatch_fine : kNaN;
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

json to_json(const OracleReport& r, const ExperimentConfig& cfg) {
  auto grid_json = [](const WaveguideGrid& g) {
    return json{{"epsilon", g.epsilon},       {"delta", g.delta},
                {"edge_length", g.edge_length}, {"edge_cells", g.edge_cells},
                {"vertex_cells", g.vertex_cells}, {"u_cells", g.u_cells},
                {"h_edge", g.h_edge()},       {"h_vertex", g.h_vertex()},
                {"h_u", g.h_u()},             {"unknowns", g.unknowns()}};
  };
  json j;
  j["schema_version"] = kSchemaVersion;
  j["wgl_version"] = version();
  j["config"] = to_json(cfg);
  j["resonant"] = r.resonant;
  j["limit"] = r.resonant ? "weighted-kirchhoff" : "decoupled";
  j["grid"] = grid_json(r.grid);
  if (r.fine_grid.edge_cells > 0) j["fine_grid"] = grid_json(r.fine_grid);
  j["tolerances"] = {{"limit_relative", 0.10}, {"refinement_factor", {3.0, 5.0}}, {"solver_residual", 1e-10}};
  j["norms"] = {{"source", r.source_norm}, {"resolvent_bound", r.resolvent_bound},
                {"solver_residual", r.solver_residual}};
  j["mismatch"] = {{"limit", r.limit_mismatch},
                   {"approx", r.approx_mismatch},
                   {"limit_fine", r.fine_grid.edge_cells > 0 ? json(r.limit_mismatch_fine) : json(nullptr)},
                   {"approx_fine", r.fine_grid.edge_cells > 0 ? json(r.approx_mismatch_fine) : json(nullptr)}};
  j["refinement_factor"] = std::isfinite(r.refinement_factor) && r.fine_grid.edge_cells > 0
                               ? json(r.refinement_factor)
                               : json(nullptr);
  j["seconds"] = r.seconds;
  return j;
}

}  // namespace wgl
