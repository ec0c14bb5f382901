// Acceptance suite: one PASS/FAIL line per criterion, with the measured values
// and wall time. Exits nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "wgl/approx_residual.hpp"
#include "wgl/coupling.hpp"
#include "wgl/errors.hpp"
#include "wgl/experiments.hpp"
#include "wgl/fd_oracle.hpp"
#include "wgl/graph_limit.hpp"
#include "wgl/kernels.hpp"
#include "wgl/profile.hpp"
#include "wgl/vertex_spectrum.hpp"

using namespace wgl;
using nlohmann::json;
using std::numbers::pi;

namespace {

const cplx I{0.0, 1.0};

struct Check {
  std::string what;
  bool ok;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit;  // seconds
  std::function<void(std::vector<Check>&)> body;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

// held back so the lines land under their criterion
std::vector<std::string> pending_info;

void info(const std::string& line) { pending_info.push_back(line); }

SlopeFit sweep_fit(const json& cfg, const std::string& metric) {
  auto r = run_sweep(config_from_json(cfg));
  for (const auto& f : r.failures) info("point failure at eps=" + fmt("%g", f.epsilon) + ": " + f.error);
  return r.fit(metric);
}

bool slope_within(const SlopeFit& f, double target, double tol) { return f.ok && std::abs(f.slope - target) <= tol; }

std::string slope_text(const std::string& name, const SlopeFit& f, double target, double tol) {
  if (!f.ok) return name + " fit failed: " + f.error;
  return name + " slope " + fmt("%.4f", f.slope) + " (target " + fmt("%.2f +- %.2f", target, tol) + ")";
}

// 1 --------------------------------------------------------------------------
void zero_profile_suite(std::vector<Check>& out) {
  auto zero = CurvatureProfile::zero();
  auto sp = eigenvalues(zero, 4);
  double expect[] = {0.0, pi * pi / 4.0, pi * pi, 9.0 * pi * pi / 4.0};
  double eig_err = 0.0;
  for (int k = 0; k < 4; ++k) eig_err = std::max(eig_err, std::abs(sp.eigenvalues[k] - expect[k]));
  out.push_back({"Neumann spectrum max error " + fmt("%.2e", eig_err) + " <= 1e-9", eig_err <= 1e-9});

  cplx z{1.0, 1.0};
  auto k = make_vertex_kernel(zero, z);
  double kern_err = 0.0;
  for (int a = 0; a < 21; ++a)
    for (int b = 0; b < 21; ++b) {
      double s = -1.0 + a * 0.1, t = -1.0 + b * 0.1;
      kern_err = std::max(kern_err, std::abs(vertex_kernel(k, s, t) - neumann_free_kernel(z, s, t)));
    }
  out.push_back({"kernel vs closed form on 21x21 grid " + fmt("%.2e", kern_err) + " <= 1e-8", kern_err <= 1e-8});

  CouplingContext ctx(zero);
  auto P = ctx.projector();
  double l0 = 1.0;
  if (P) {
    l0 = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) l0 = std::max(l0, std::abs(P->lambda0(i, j) - 0.5));
  }
  out.push_back({"Lambda_0 = [[1/2,1/2],[1/2,1/2]] defect " + fmt("%.2e", l0), l0 <= 1e-12});

  double worst = 0.0;
  for (double eps : {0.3, 0.1, 0.01})
    for (cplx zz : {I, z}) {
      auto sol = assemble(ctx, 1, zz, eps, eps * eps, SourceFunction::exponential(1.0, 1.0),
                          SourceFunction::gaussian(0.5, 1.0, 0.4));
      worst = std::max(worst, residual_norms(sol).residual_l2_V);
    }
  out.push_back({"approximate solution residual " + fmt("%.2e", worst) + " <= 1e-10", worst <= 1e-10});
}

// 2 --------------------------------------------------------------------------
void kernel_dual(std::vector<Check>& out) {
  cplx z{1.0, 1.0};
  auto s = oracle::uniform_points(200, -1.0, 1.0, 2024), t = oracle::uniform_points(200, -1.0, 1.0, 2025);
  auto tuned = tune_to_resonance(CurvatureProfile::bump(0.5), 2);
  for (const auto& [name, prof] : {std::pair{std::string("Bump{0.5}"), CurvatureProfile::bump(0.5)},
                                   std::pair{std::string("tuned resonant"), tuned}}) {
    auto w = make_vertex_kernel(prof, z, KernelMode::Wronskian);
    auto ser = make_vertex_kernel(prof, z, KernelMode::Series, 200);
    double worst = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
      worst = std::max(worst, std::abs(vertex_kernel(w, s[i], t[i]) - vertex_kernel(ser, s[i], t[i])));
    out.push_back({name + ": max |wronskian - series| " + fmt("%.2e", worst) + " <= 1e-6", worst <= 1e-6});
  }
}

// 3 --------------------------------------------------------------------------
void coupling_rates(std::vector<Check>& out) {
  json p10 = json::array({json::array({1.0, 0.0}), json::array({0.0, 0.0})});
  json base{{"kind", "coupling"}, {"z", "i"}, {"eps_grid", "pow2:6:14"}, {"p", p10},
            {"window", {{"kind", "drop"}, {"count", 2}}}};
  json c2 = base;
  c2["profile"] = "zero";
  auto r2 = run_sweep(config_from_json(c2));
  auto fq = r2.fit("dev_q");
  auto fx = r2.fit("dev_xi");
  out.push_back({"Zero: " + slope_text("|q - (i/sqrt z) L0 p|", fq, 1.0, 0.15), slope_within(fq, 1.0, 0.15)});
  out.push_back({"Zero: " + slope_text("xi deviation with the stated eps term", fx, 2.0, 0.2),
                 slope_within(fx, 2.0, 0.2)});
  auto fc = r2.fit("dev_xi_corrected");
  if (fc.ok) info("xi deviation with the full first-order term: slope " + fmt("%.4f", fc.slope));

  json c1 = base;
  c1["profile"] = "bump:0.5";
  auto f1 = sweep_fit(c1, "q_norm");
  out.push_back({"Bump{0.5}: " + slope_text("|q|", f1, 1.0, 0.15), slope_within(f1, 1.0, 0.15)});
}

// 4 --------------------------------------------------------------------------
void residual_rates(std::vector<Check>& out) {
  json d{{"kind", "residual"}, {"profile", "bump:0.5"}, {"z", "1+1i"}, {"sweep", "delta"}, {"epsilon", 0.2},
         {"delta_grid", json::array({0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625})},
         {"window", {{"kind", "drop"}, {"count", 0}}}};
  auto fd = sweep_fit(d, "residual_Hnorm");
  out.push_back({"Bump{0.5}, eps=0.2: " + slope_text("residual_Hnorm in delta", fd, 1.0, 0.1),
                 slope_within(fd, 1.0, 0.1)});

  json e{{"kind", "residual"}, {"profile", "bump:0.5"}, {"z", "1+1i"}, {"eps_grid", "pow2:5:14"},
         {"delta_rule", "fixed-ratio:0.5"}, {"window", {{"kind", "drop"}, {"count", 2}}}};
  auto fe = sweep_fit(e, "residual_Hnorm");
  out.push_back({"Bump{0.5}, delta/eps=0.5: " + slope_text("residual_Hnorm in eps", fe, -0.5, 0.15),
                 slope_within(fe, -0.5, 0.15)});

  json t{{"kind", "residual"}, {"profile", json{{"kind", "tuned_bump"}, {"target_index", 2}}}, {"z", "1+1i"},
         {"eps_grid", "pow2:1:8"}, {"delta_rule", "power:2.5"}};
  auto rt = run_sweep(config_from_json(t));
  auto col = rt.column("bound_ratio");
  std::vector<double> finite;
  for (double v : col)
    if (std::isfinite(v) && v > 0.0) finite.push_back(v);
  bool ok = rt.resonant && finite.size() == col.size() && !finite.empty();
  double spread = ok ? *std::max_element(finite.begin(), finite.end()) / *std::min_element(finite.begin(), finite.end())
                     : std::nan("");
  out.push_back({"tuned resonant: bound ratio max/min " + fmt("%.3f", spread) + " <= 3", ok && spread <= 3.0});
}

// 5 --------------------------------------------------------------------------
json oracle_config(const char* profile, double eps, bool refine) {
  return json{{"kind", "oracle"}, {"profile", profile}, {"z", "i"}, {"epsilon", eps}, {"delta_rule", "power:3"},
              {"f1", {{"kind", "exponential"}, {"scale", 1.0}, {"rate", 1.0}}}, {"f2", {{"kind", "zero"}}},
              {"oracle", {{"h_s", 1.0 / 64.0}, {"u_cells", 32}, {"refine", refine}}}};
}

void oracle_end_to_end(std::vector<Check>& out) {
  auto zr = run_oracle(config_from_json(oracle_config("zero", 0.3, true)));
  out.push_back({"Zero, eps=0.3: |P psi_h - r_Kirchhoff f| / |f| = " + fmt("%.4f", zr.limit_mismatch) + " <= 0.10",
                 zr.limit_mismatch <= 0.10});
  out.push_back({"Zero, eps=0.3: refinement factor " + fmt("%.3f", zr.refinement_factor) + " in [3,5] (" +
                     fmt("%.2e -> %.2e", zr.approx_mismatch, zr.approx_mismatch_fine) + ")",
                 zr.refinement_factor >= 3.0 && zr.refinement_factor <= 5.0});
  info("Zero, eps=0.3: solver backward error " + fmt("%.1e", zr.solver_residual) + ", resolvent bound ratio " +
       fmt("%.3f", zr.resolvent_bound));

  auto br = run_oracle(config_from_json(oracle_config("bump:0.5", 0.3, false)));
  out.push_back({"Bump{0.5}, eps=0.3: |P psi_h - r_dec f| / |f| = " + fmt("%.4f", br.limit_mismatch) + " <= 0.10",
                 br.limit_mismatch <= 0.10});
  info("Bump{0.5}, eps=0.3: approximate-solution mismatch " + fmt("%.2e", br.approx_mismatch));

  for (double eps : {0.15, 0.1}) {
    auto z2 = run_oracle(config_from_json(oracle_config("zero", eps, false)));
    auto b2 = run_oracle(config_from_json(oracle_config("bump:0.5", eps, false)));
    info("eps=" + fmt("%g", eps) + ": Zero limit mismatch " + fmt("%.4f", z2.limit_mismatch) +
         ", Bump{0.5} limit mismatch " + fmt("%.4f", b2.limit_mismatch));
  }
}

// 6 --------------------------------------------------------------------------
void structural(std::vector<Check>& out) {
  auto grid = uniform_sample_grid(20);
  double pid = std::max(check_potential_identity(CurvatureProfile::bump(0.5), 0.3, grid),
                        check_potential_identity(CurvatureProfile::bump(0.9), 1.0, grid));
  out.push_back({"potential identity defect " + fmt("%.2e", pid) + " <= 1e-8", pid <= 1e-8});

  auto tuned = tune_to_resonance(CurvatureProfile::bump(0.5), 2);
  double wc = 0.0;
  for (const auto& p : {CurvatureProfile::zero(), CurvatureProfile::bump(0.5), tuned})
    for (cplx z : {cplx{1.0, 0.5}, cplx{1.0, 1.0}, cplx{-2.0, 0.1}}) wc = std::max(wc, shoot(p, z).wronskian_constancy());
  out.push_back({"wronskian s-constancy " + fmt("%.2e", wc) + " <= 1e-8 relative", wc <= 1e-8});

  double im = 0.0;
  for (const auto& p : {CurvatureProfile::zero(), CurvatureProfile::bump(0.5), tuned})
    for (double eps : {0.3, 0.1, 0.01}) {
      auto sol = assemble(p, 1, cplx{1.0, 1.0}, eps, eps * eps, SourceFunction::exponential(1.0, 1.0),
                          SourceFunction::gaussian(0.5, 1.0, 0.4));
      auto m = interface_matching(sol);
      im = std::max({im, m.max_value(), m.max_deriv()});
    }
  out.push_back({"interface matching " + fmt("%.2e", im) + " <= 1e-8", im <= 1e-8});

  double proj = 0.0, pit = 0.0;
  for (auto [a1, a2] : {std::pair{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}, std::pair{0.8, -0.3},
                        std::pair{1.0, 0.0}, std::pair{-0.2, 1.7}}) {
    auto P = kirchhoff_projector(a1, a2);
    proj = std::max({proj, max_abs(P.lambda0 * P.lambda0 - P.lambda0), max_abs(transpose(P.lambda0) - P.lambda0),
                     std::abs(trace(P.lambda0) - 1.0)});
    pit = std::max(pit, max_abs(pi_theta_projector({cplx{a1}, cplx{a2}}) - P.lambda0_perp));
  }
  out.push_back({"Lambda_0 idempotent/symmetric/trace 1: " + fmt("%.2e", proj) + " <= 1e-12", proj <= 1e-12});
  out.push_back({"general N=2 projector vs Lambda_0 complement " + fmt("%.2e", pit) + " <= 1e-12", pit <= 1e-12});
}

// 7 --------------------------------------------------------------------------
void eigen_oracle(std::vector<Check>& out) {
  auto tuned = tune_to_resonance(CurvatureProfile::bump(0.5), 2);
  for (const auto& [name, prof] : {std::pair{std::string("Zero"), CurvatureProfile::zero()},
                                   std::pair{std::string("Bump{0.5}"), CurvatureProfile::bump(0.5)},
                                   std::pair{std::string("tuned resonant"), tuned}}) {
    auto sp = eigenvalues(prof, 6);
    auto fd = fd_vertex_eigen(prof, 2000, 6);
    double worst = 0.0;
    for (int k = 0; k < 6; ++k) worst = std::max(worst, std::abs(sp.eigenvalues[k] - fd.pairs[k].lambda));
    out.push_back({name + ": shooting vs extrapolated FD " + fmt("%.2e", worst) + " <= 1e-6", worst <= 1e-6});
  }
  auto sp = eigenvalues(tuned, 3);
  auto info_case = classify_case(sp);
  double lam = info_case.resonant ? sp.eigenvalues[static_cast<std::size_t>(info_case.n_star - 1)] : std::nan("");
  out.push_back({"tuned lambda_{n*} = " + fmt("%.2e", lam) + ", |.| <= 1e-10", info_case.resonant && std::abs(lam) <= 1e-10});
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "zero-curvature closed forms", 5.0, zero_profile_suite},
      {2, "kernel dual representation", 10.0, kernel_dual},
      {3, "coupling coefficient rates", 30.0, coupling_rates},
      {4, "residual rate shapes", 120.0, residual_rates},
      {5, "finite-difference oracle end to end", 600.0, oracle_end_to_end},
      {6, "structural identities", 10.0, structural},
      {7, "eigenvalue oracle agreement", 30.0, eigen_oracle},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    std::vector<Check> checks;
    auto t0 = std::chrono::steady_clock::now();
    std::string error;
    try {
      c.body(checks);
    } catch (const std::exception& e) {
      error = e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = error.empty() && secs <= c.time_limit;
    for (const auto& ch : checks) ok = ok && ch.ok;
    std::printf("criterion %d %s: %s (%.2f s, limit %.0f s)\n", c.id, c.title.c_str(), ok ? "PASS" : "FAIL", secs,
                c.time_limit);
    for (const auto& ch : checks) std::printf("    [%s] %s\n", ch.ok ? "ok" : "FAIL", ch.what.c_str());
    if (!error.empty()) std::printf("    [FAIL] exception: %s\n", error.c_str());
    if (secs > c.time_limit) std::printf("    [FAIL] over the time limit\n");
    for (const auto& line : pending_info) std::printf("    info: %s\n", line.c_str());
    pending_info.clear();
    std::fflush(stdout);
    if (!ok) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
