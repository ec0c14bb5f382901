// wgl command line tool. Exit codes: 0 ok, 2 invalid input, 3 numerical failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "wgl/coupling.hpp"
#include "wgl/source.hpp"
#include "wgl/errors.hpp"
#include "wgl/experiments.hpp"
#include "wgl/fd_oracle.hpp"
#include "wgl/kernels.hpp"
#include "wgl/vertex_spectrum.hpp"

namespace {

using nlohmann::json;
using namespace wgl;

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json vec_json(const Vec2& v) { return json::array({complex_json(v[0]), complex_json(v[1])}); }

json mat_json(const Mat2& m) {
  return json::array({json::array({complex_json(m(0, 0)), complex_json(m(0, 1))}),
                      json::array({complex_json(m(1, 0)), complex_json(m(1, 1))})});
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config ") + path + ": " + e.what());
  }
}

CurvatureProfile profile_of(const json& j) {
  if (!j.contains("profile")) return CurvatureProfile::zero();
  const auto& v = j["profile"];
  return v.is_string() ? parse_profile(v.get<std::string>()) : profile_from_json(v);
}

cplx z_of(const json& j) {
  if (!j.contains("z")) return {1.0, 1.0};
  const auto& v = j["z"];
  if (v.is_string()) return parse_complex(v.get<std::string>());
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2) return {v[0].get<double>(), v[1].get<double>()};
  if (v.is_object()) return {v.value("re", 0.0), v.value("im", 0.0)};
  throw ValidationError("z must be a number, [re, im], {re, im} or a string");
}

/// Write to `path`, or stdout when empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot write " + path);
  os << text;
}

struct Common {
  std::string profile, z, eps_grid, delta_rule, window, out;
  std::vector<std::string> delta_rule_tokens;
  int n = 0, threads = -1;
  double eps = 0.0;
};

/// Flag values override the config file.
void apply_overrides(json& j, const Common& c) {
  if (!c.profile.empty()) j["profile"] = c.profile;
  if (!c.z.empty()) j["z"] = c.z;
  if (c.n > 0) j["n"] = c.n;
  if (!c.eps_grid.empty()) j["eps_grid"] = c.eps_grid;
  if (!c.delta_rule_tokens.empty()) {
    std::string joined;
    for (const auto& t : c.delta_rule_tokens) joined += (joined.empty() ? "" : " ") + t;
    j["delta_rule"] = joined;
  }
  if (c.eps > 0.0) j["epsilon"] = c.eps;
  if (!c.window.empty()) {
    if (c.window == "auto")
      j["window"] = {{"kind", "auto"}};
    else
      j["window"] = {{"kind", "drop"}, {"count", std::stoi(c.window)}};
  }
  if (c.threads >= 0) j["threads"] = c.threads;
}

void add_common(CLI::App* sub, Common& c, bool sweep) {
  sub->add_option("--profile", c.profile, "zero | bump:A | tuned:K | JSON object");
  sub->add_option("--z", c.z, "spectral parameter, e.g. 1+1i");
  if (sweep) {
    sub->add_option("--n", c.n, "transverse mode");
    sub->add_option("--eps-grid", c.eps_grid, "comma list or pow2:a:b");
    sub->add_option("--delta-rule", c.delta_rule_tokens, "fixed-ratio r | power a")->expected(1, 2);
    sub->add_option("--window", c.window, "auto or the number of leading points to drop");
    sub->add_option("--threads", c.threads, "worker cap (WGL_THREADS also applies)");
  }
}

void print_fits(const SweepResult& r) {
  for (const auto& f : r.fits) {
    if (f.ok)
      std::cerr << f.metric << ": slope " << f.slope << " +- " << f.half_width << " over " << f.count
                << " points\n";
    else
      std::cerr << f.metric << ": " << f.error << "\n";
  }
  for (const auto& f : r.failures)
    std::cerr << "failed at epsilon=" << f.epsilon << " delta=" << f.delta << ": " << f.error << "\n";
}

int run_sweep_command(json j, const char* kind, const std::string& csv, const std::string& json_out) {
  j["kind"] = kind;
  if (!csv.empty()) j["output"]["csv"] = csv == "-" ? "" : csv;
  if (!json_out.empty()) j["output"]["json"] = json_out;
  auto cfg = config_from_json(j);
  auto res = run_sweep(cfg);
  if (cfg.csv_path.empty()) write_csv(std::cout, res);
  print_fits(res);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thin curved waveguide to graph limit: spectra, kernels, couplings, sweeps and oracles"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(wgl::version()));
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override its fields");

  Common c;
  std::string csv_out, json_out;

  auto* spectrum = app.add_subcommand("spectrum", "eigenpairs of h_v and the case classification");
  int count = 6, fd_cells = 0;
  double zero_tol = 1e-9;
  add_common(spectrum, c, false);
  spectrum->add_option("--count", count, "number of eigenvalues");
  spectrum->add_option("--zero-tol", zero_tol, "resonance tolerance on |lambda|");
  spectrum->add_option("--fd-cells", fd_cells, "also report FD oracle eigenvalues on this mesh");
  spectrum->add_option("--out", c.out, "CSV output file");

  auto* kernel = app.add_subcommand("kernel", "vertex kernel r_v(z; s, s') on a grid");
  std::string mode = "wronskian";
  int terms = 200, points = 21;
  add_common(kernel, c, false);
  kernel->add_option("--mode", mode, "wronskian | series")->check(CLI::IsMember({"wronskian", "series"}));
  kernel->add_option("--terms", terms, "series terms");
  kernel->add_option("--points", points, "grid points per axis on [-1,1]");
  kernel->add_option("--out", c.out, "CSV output file");

  auto* coupling = app.add_subcommand("coupling", "coupling coefficients at one epsilon");
  std::string p_text;
  add_common(coupling, c, false);
  coupling->add_option("--eps", c.eps, "epsilon");
  std::string case_text = "auto";
  coupling->add_option("--n", c.n, "transverse mode");
  coupling->add_option("--eps-grid", c.eps_grid, "sweep over this grid and emit CSV");
  coupling->add_option("--window", c.window, "auto or the number of leading points to drop");
  coupling->add_option("--threads", c.threads, "worker cap (WGL_THREADS also applies)");
  coupling->add_option("--case", case_text, "auto | generic | resonant; a mismatch is an error")
      ->check(CLI::IsMember({"auto", "generic", "resonant"}));
  coupling->add_option("--p", p_text, "p as two semicolon-separated complex numbers; derived from f1, f2 when absent");
  coupling->add_option("--out", c.out, "output file (JSON for one epsilon, CSV for a sweep)");

  auto* residual = app.add_subcommand("residual-sweep", "residual norms along an epsilon grid");
  add_common(residual, c, true);
  residual->add_option("--csv", csv_out, "CSV output file (stdout by default)");
  residual->add_option("--json", json_out, "JSON output file");

  auto* graph = app.add_subcommand("graph-limit", "distance to the graph limit along an epsilon grid");
  add_common(graph, c, true);
  graph->add_option("--csv", csv_out, "CSV output file (stdout by default)");
  graph->add_option("--json", json_out, "JSON output file");

  auto* oracle = app.add_subcommand("oracle-compare", "2D finite-difference oracle against the limits");
  double h_s = 0.0;
  int u_cells = 0;
  bool no_refine = false;
  add_common(oracle, c, true);
  oracle->add_option("--eps", c.eps, "epsilon");
  oracle->add_option("--h-s", h_s, "s spacing");
  oracle->add_option("--u-cells", u_cells, "transverse cells");
  oracle->add_flag("--no-refine", no_refine, "skip the s-halved grid");
  oracle->add_option("--out", c.out, "JSON output file");

  auto* run = app.add_subcommand("run", "run the experiment described by --config");
  run->add_option("--csv", csv_out, "CSV output file for sweeps");
  run->add_option("--json", json_out, "JSON output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    json j = load_config(config_path);
    apply_overrides(j, c);

    if (spectrum->parsed()) {
      auto profile = profile_of(j);
      if (count < 1) throw ValidationError("--count must be >= 1");
      auto sp = eigenvalues(profile, count, zero_tol);
      std::ostringstream os;
      os << "# schema_version: " << kSchemaVersion << "\n# wgl_version: " << version() << "\n";
      os << "# config: " << json{{"profile", to_json(profile)}, {"count", count}, {"zero_tol", zero_tol}, {"fd_cells", fd_cells}}.dump() << "\n";
      auto ci = classify_case(sp);
      os << "# case: " << (ci.resonant ? "resonant" : "generic");
      if (ci.resonant) os << " n_star=" << ci.n_star << " alpha1=" << ci.alpha1 << " alpha2=" << ci.alpha2;
      os << "\n";
      if (fd_cells > 0) {
        auto fd = fd_vertex_eigen(profile, fd_cells, count);
        os << "n,lambda,lambda_fd,abs_diff\n";
        os.precision(17);
        for (int k = 0; k < count; ++k) {
          double a = sp.eigenvalues[static_cast<std::size_t>(k)], b = fd.pairs[static_cast<std::size_t>(k)].lambda;
          os << k + 1 << "," << a << "," << b << "," << std::abs(a - b) << "\n";
        }
      } else {
        write_spectrum_csv(os, sp);
      }
      emit(c.out, os.str());
      return 0;
    }

    if (kernel->parsed()) {
      auto profile = profile_of(j);
      cplx z = z_of(j);
      if (points < 2) throw ValidationError("--points must be >= 2");
      auto k = make_vertex_kernel(profile, z, mode == "series" ? KernelMode::Series : KernelMode::Wronskian, terms);
      std::ostringstream os;
      os << "# schema_version: " << kSchemaVersion << "\n# wgl_version: " << version() << "\n";
      os << "# config: " << json{{"profile", to_json(profile)}, {"z", complex_json(z)}, {"mode", mode}, {"terms", terms}, {"points", points}}.dump() << "\n";
      os << "s,sp,re,im\n";
      os.precision(17);
      for (int a = 0; a < points; ++a)
        for (int b = 0; b < points; ++b) {
          double s = -1.0 + 2.0 * a / (points - 1), sp = -1.0 + 2.0 * b / (points - 1);
          cplx v = vertex_kernel(k, s, sp);
          os << s << "," << sp << "," << v.real() << "," << v.imag() << "\n";
        }
      emit(c.out, os.str());
      return 0;
    }

    if (coupling->parsed()) {
      std::optional<Vec2> p;
      if (!p_text.empty()) {
        auto semi = p_text.find(';');
        if (semi == std::string::npos) throw ValidationError("--p needs two values separated by ';'");
        p = Vec2{{parse_complex(p_text.substr(0, semi)), parse_complex(p_text.substr(semi + 1))}};
        j["p"] = vec_json(*p);
      }
      auto check_case = [&](bool resonant) {
        if (case_text == "auto") return;
        if (resonant != (case_text == "resonant"))
          throw ValidationError(std::string("--case ") + case_text + " but the profile is " +
                                (resonant ? "resonant" : "generic"));
      };
      if (j.contains("eps_grid")) {
        j["kind"] = "coupling";
        if (!c.out.empty()) j["output"]["csv"] = c.out == "-" ? "" : c.out;
        auto cfg = config_from_json(j);
        check_case(CouplingContext(cfg.profile, cfg.zero_tolerance).vertex_case().resonant);
        auto res = run_sweep(cfg);
        if (cfg.csv_path.empty()) write_csv(std::cout, res);
        print_fits(res);
        return 0;
      }
      auto profile = profile_of(j);
      cplx z = z_of(j);
      double eps = j.value("epsilon", 0.1);
      if (!(eps > 0.0 && eps <= 1.0)) throw ValidationError("--eps must lie in (0, 1]");
      CouplingContext ctx(profile);
      check_case(ctx.vertex_case().resonant);
      if (!p) {
        auto res = make_half_line_resolvent(z);
        p = Vec2{{boundary_derivative(res, SourceFunction::exponential(1.0, 1.0)), cplx{0.0, 0.0}}};
      }
      auto co = solve_coupling(ctx, z, eps, *p);
      auto dev = asymptotic_deviation(co, ctx.projector());
      json out{{"schema_version", kSchemaVersion},
               {"wgl_version", version()},
               {"config", {{"profile", to_json(profile)}, {"z", complex_json(z)}, {"epsilon", eps}, {"p", vec_json(*p)}}},
               {"case", co.vertex_case.resonant ? "resonant" : "generic"},
               {"alpha", {co.vertex_case.alpha1, co.vertex_case.alpha2}},
               {"p", vec_json(co.p)},
               {"q", vec_json(co.q)},
               {"xi", vec_json(co.xi)},
               {"lambda_eps", mat_json(co.lambda_eps)},
               {"system_residual", co.residual},
               {"dev_q", dev.dev_q},
               {"dev_xi", dev.dev_xi}};
      if (auto proj = ctx.projector()) {
        out["lambda0"] = mat_json(proj->lambda0);
        out["dev_xi_corrected"] = corrected_xi_deviation(co, *proj, reduced_corner_matrix(ctx));
      }
      emit(c.out, out.dump(2) + "\n");
      return 0;
    }

    if (residual->parsed()) return run_sweep_command(j, "residual", csv_out, json_out);
    if (graph->parsed()) return run_sweep_command(j, "graph-limit", csv_out, json_out);

    if (oracle->parsed()) {
      j["kind"] = "oracle";
      if (h_s > 0.0) j["oracle"]["h_s"] = h_s;
      if (u_cells > 0) j["oracle"]["u_cells"] = u_cells;
      if (no_refine) j["oracle"]["refine"] = false;
      if (!j.contains("delta_rule")) j["delta_rule"] = "power:3";
      if (!j.contains("epsilon")) j["epsilon"] = 0.3;
      if (!j.contains("z")) j["z"] = "i";
      auto cfg = config_from_json(j);
      auto rep = run_oracle(cfg);
      emit(c.out, to_json(rep, cfg).dump(2) + "\n");
      return 0;
    }

    if (run->parsed()) {
      if (config_path.empty()) throw ValidationError("run needs --config");
      if (!csv_out.empty()) j["output"]["csv"] = csv_out == "-" ? "" : csv_out;
      if (!json_out.empty()) j["output"]["json"] = json_out;
      auto cfg = config_from_json(j);
      if (cfg.kind == SweepKind::Oracle) {
        auto rep = run_oracle(cfg);
        auto text = to_json(rep, cfg).dump(2) + "\n";
        emit(cfg.json_path, text);
        return 0;
      }
      auto res = run_sweep(cfg);
      if (cfg.csv_path.empty() && (cfg.json_path.empty() || csv_out == "-")) write_csv(std::cout, res);
      print_fits(res);
      return 0;
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
