#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "wgl/approx_residual.hpp"
#include "wgl/errors.hpp"
#include "wgl/fd_oracle.hpp"
#include "wgl/vertex_spectrum.hpp"

using namespace wgl;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using std::numbers::pi;

namespace {

const cplx I{0.0, 1.0};
const auto kExp = SourceFunction::exponential(1.0, 1.0);

std::vector<cplx> smooth_field(const FdSystem& sys, unsigned seed) {
  auto c = oracle::uniform_points(4, -1.0, 1.0, seed);
  std::vector<cplx> v(sys.mass.size());
  for (int ch = 0; ch < sys.grid.chain_size(); ++ch)
    for (int k = 1; k < sys.grid.u_cells; ++k) {
      double s = sys.chain_s[static_cast<std::size_t>(ch)], u = sys.u(k);
      v[static_cast<std::size_t>(sys.index(ch, k))] =
          cplx(std::cos(c[0] * s + c[1]), c[2] * s) * std::sin(pi * u) * std::exp(-0.1 * std::abs(s)) + c[3] * u;
    }
  return v;
}

}  // namespace

TEST_CASE("tridiagonal bisection", "[fd][eigen]") {
  const int n = 50;
  std::vector<double> d(n, 2.0), e(n - 1, -1.0);
  auto ev = tridiagonal_eigenvalues(d, e, 5);
  for (int k = 0; k < 5; ++k) CHECK_THAT(ev[k], WithinAbs(2.0 - 2.0 * std::cos((k + 1) * pi / (n + 1)), 1e-13));
  CHECK(sign_changes({1.0, 0.0, -2.0, 3.0, 0.0, 0.0, 1.0}) == 2);
  CHECK(sign_changes({}) == 0);
}

TEST_CASE("finite-difference eigenvalues", "[fd][eigen]") {
  auto zero = fd_vertex_eigen(CurvatureProfile::zero(), 2000, 4);
  CHECK_THAT(zero.pairs[1].lambda, WithinAbs(pi * pi / 4.0, 1e-5));
  CHECK_THAT(zero.pairs[0].lambda, WithinAbs(0.0, 1e-8));
  CHECK(zero.grid.points.size() == 2001);
  CHECK_THROWS_AS(fd_vertex_eigen(CurvatureProfile::zero(), 100, 4), ValidationError);

  auto bump = CurvatureProfile::bump(0.5);
  auto fd = fd_vertex_eigen(bump, 2000, 6);
  auto sp = eigenvalues(bump, 6);
  for (int k = 0; k < 6; ++k) {
    CHECK_THAT(fd.pairs[k].lambda, WithinAbs(sp.eigenvalues[k], 1e-6));
    // extrapolation beats the fine mesh unless both sit at the rounding floor
    double fine_err = std::abs(fd.pairs[k].lambda_fine - sp.eigenvalues[k]);
    if (fine_err > 1e-8) CHECK(std::abs(fd.pairs[k].lambda - sp.eigenvalues[k]) < fine_err);
    CHECK(sign_changes(fd.pairs[k].vector) == k);
  }

  auto tuned = tune_to_resonance(CurvatureProfile::bump(0.5), 2);
  auto ft = fd_vertex_eigen(tuned, 2000, 3);
  CHECK(std::abs(ft.pairs[1].lambda) < 1e-6);
  CHECK(sign_changes(ft.pairs[1].vector) == 1);
}

TEST_CASE("waveguide grid geometry", "[fd][grid]") {
  CHECK_THAT(truncation_length(I), WithinRel(std::log(1e8) / std::sin(pi / 4.0), 1e-14));
  auto g = make_grid(0.3, 0.027, I, 1.0 / 16.0, 8);
  CHECK(g.edge_length >= truncation_length(I));
  CHECK(g.h_vertex() <= 1.0 / 16.0 + 1e-15);
  CHECK(g.h_edge() <= 1.0 / 16.0 + 1e-15);
  auto r = refine_s(g);
  CHECK(r.edge_cells == 2 * g.edge_cells);
  CHECK(r.vertex_cells == 2 * g.vertex_cells);
  CHECK(r.u_cells == g.u_cells);
  CHECK(g.unknowns() == g.chain_size() * 7);
}

TEST_CASE("assembled operator is symmetric", "[fd][assemble]") {
  for (const auto& p : {CurvatureProfile::zero(), CurvatureProfile::bump(0.5)}) {
    auto g = make_grid(0.3, 0.027, I, 1.0 / 16.0, 8);
    auto sys = assemble_fd_system(g, p, 1);
    CHECK(symmetry_defect(sys) <= 1e-12);
    CHECK(sys.mass.size() == static_cast<std::size_t>(g.unknowns()));
    CHECK_THAT(sys.threshold, WithinRel(4.0 * 64.0 * std::pow(std::sin(pi / 16.0), 2) / (0.027 * 0.027), 1e-12));
  }
}

TEST_CASE("resolvent solve basics", "[fd][resolvent]") {
  auto g = make_grid(0.3, 0.027, I, 1.0 / 16.0, 8);
  auto zero = fd_resolvent(g, CurvatureProfile::zero(), 1, I, SourceFunction::zero(), SourceFunction::zero());
  for (auto v : zero.values) CHECK(v == cplx{0.0});

  CHECK_THROWS_AS(fd_resolvent(g, CurvatureProfile::zero(), 1, cplx{1.0, 0.0}, kExp, kExp), ValidationError);
  auto short_grid = make_grid(0.3, 0.027, I, 1.0 / 16.0, 8, 5.0);
  CHECK_THROWS_AS(fd_resolvent(short_grid, CurvatureProfile::zero(), 1, I, kExp, kExp), ValidationError);

  auto f = fd_resolvent(g, CurvatureProfile::bump(0.5), 1, I, kExp, SourceFunction::zero());
  CHECK(f.solver_residual <= 1e-10);
  CHECK(f.field_norm <= f.source_norm / std::abs(I.imag()) * 1.05);
  CHECK(f.edge_projection[0].size() == static_cast<std::size_t>(g.edge_cells + 1));
  CHECK(f.vertex_projection.size() == static_cast<std::size_t>(g.vertex_cells + 1));
}

TEST_CASE("resolvent bound at other spectral parameters", "[fd][resolvent]") {
  for (cplx z : {cplx{2.0, 0.5}, cplx{-1.0, 1.5}}) {
    auto g = make_grid(0.3, 0.027, z, 1.0 / 16.0, 8);
    auto f = fd_resolvent(g, CurvatureProfile::bump(0.5), 1, z, kExp, SourceFunction::gaussian(1.0, 1.0, 0.5));
    CHECK(f.field_norm <= f.source_norm / std::abs(z.imag()) * 1.05);
  }
}

TEST_CASE("zero profile discrete field matches the exact continuum solution", "[fd][resolvent]") {
  double eps = 0.3, delta = eps * eps * eps;
  auto g = make_grid(eps, delta, I, 1.0 / 64.0, 32);
  auto field = fd_resolvent(g, CurvatureProfile::zero(), 1, I, kExp, SourceFunction::zero());
  auto sol = assemble(CurvatureProfile::zero(), 1, I, eps, delta, kExp, SourceFunction::zero());
  double mismatch = edge_mismatch(field, [&](int e, double s) { return sol.edge_value(e, s); });
  double ref = edge_mismatch(field, [](int, double) { return cplx{0.0}; });
  CHECK(mismatch <= 0.02 * ref);
  double vm = vertex_mismatch(field, [&](double s) { return sol.phi(s); });
  CHECK(vm <= 0.02 * ref);
}

TEST_CASE("unitary map", "[fd][unitary]") {
  auto g = make_grid(0.3, 0.027, I, 1.0 / 16.0, 8);
  auto sz = assemble_fd_system(g, CurvatureProfile::zero(), 1);
  auto fz = unitary_map_check(sz, CurvatureProfile::zero(), smooth_field(sz, 3));
  CHECK(fz.roundtrip <= 1e-15);
  CHECK(fz.norm_defect <= 1e-12);

  auto bump = CurvatureProfile::bump(0.5);
  auto sb = assemble_fd_system(g, bump, 1);
  auto fb = unitary_map_check(sb, bump, smooth_field(sb, 4));
  CHECK(fb.roundtrip <= 1e-12);
  CHECK(fb.norm_defect <= 1e-8);

  auto f0 = unitary_map_check(sb, bump, std::vector<cplx>(sb.mass.size()));
  CHECK(f0.roundtrip == 0.0);
  CHECK(f0.norm_defect == 0.0);
}
