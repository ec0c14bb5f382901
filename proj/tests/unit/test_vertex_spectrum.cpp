#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include "oracles.hpp"
#include "wgl/errors.hpp"
#include "wgl/fd_oracle.hpp"
#include "wgl/profile.hpp"
#include "wgl/vertex_spectrum.hpp"

using namespace wgl;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using std::numbers::pi;

TEST_CASE("shooting closed forms for the zero profile", "[shoot]") {
  auto zero = CurvatureProfile::zero();
  double z = pi * pi / 16.0;
  auto sol = shoot(zero, z);
  CHECK_THAT(std::abs(sol.zeta.value(1.0)), WithinAbs(0.0, 1e-9));
  CHECK_THAT(sol.wronskian.real(), WithinAbs(-pi / 4.0, 1e-9));
  CHECK_THAT(sol.wronskian.imag(), WithinAbs(0.0, 1e-12));
  for (double s : {-0.5, 0.0, 0.7})
    CHECK_THAT(std::abs(sol.zeta.value(s) - std::cos(std::sqrt(z) * (s + 1.0))), WithinAbs(0.0, 1e-9));

  auto at0 = shoot(zero, 0.0);
  CHECK(std::abs(at0.wronskian) < 1e-14);
  CHECK_THAT(std::abs(at0.zeta.value(0.3) - 1.0), WithinAbs(0.0, 1e-14));
  CHECK_THAT(std::abs(at0.eta.value(-0.3) - 1.0), WithinAbs(0.0, 1e-14));
}

TEST_CASE("shooting initial conditions and wronskian constancy", "[shoot]") {
  auto bump = CurvatureProfile::bump(0.5);
  auto sol = shoot(bump, cplx{1.0, 0.5});
  CHECK(sol.zeta.derivative(-1.0) == cplx{0.0, 0.0});
  CHECK(sol.eta.derivative(1.0) == cplx{0.0, 0.0});
  CHECK(sol.wronskian_constancy() <= 1e-8);

  OdeOptions tight;
  tight.rtol = 1e-12;
  tight.atol = 1e-15;
  auto ref = shoot(bump, cplx{1.0, 0.5}, tight);
  CHECK(std::abs(sol.wronskian - ref.wronskian) <= 1e-8 * std::abs(ref.wronskian));
}

TEST_CASE("zero profile spectrum", "[spectrum]") {
  auto sp = eigenvalues(CurvatureProfile::zero(), 4);
  REQUIRE(sp.eigenvalues.size() == 4);
  double expect[] = {0.0, pi * pi / 4.0, pi * pi, 9.0 * pi * pi / 4.0};
  for (int k = 0; k < 4; ++k) CHECK_THAT(sp.eigenvalues[k], WithinAbs(expect[k], 1e-9));
  CHECK(sp.vertex_case == VertexCase::Resonant);
  CHECK(sp.n_star == 1);
  CHECK_THAT(sp.alpha1, WithinAbs(1.0 / std::sqrt(2.0), 1e-9));
  CHECK_THAT(sp.alpha2, WithinAbs(1.0 / std::sqrt(2.0), 1e-9));
  CHECK_THAT(sp.resonant_function().value(0.2), WithinAbs(1.0 / std::sqrt(2.0), 1e-9));

  auto info = classify_case(sp);
  CHECK(info.resonant);
  CHECK(info.n_star == 1);
}

TEST_CASE("bump spectrum against the finite-difference eigensolver", "[spectrum]") {
  auto bump = CurvatureProfile::bump(0.5);
  auto sp = eigenvalues(bump, 4);
  CHECK(sp.eigenvalues[0] < 0.0);
  CHECK(sp.vertex_case == VertexCase::Generic);
  CHECK_FALSE(classify_case(sp).resonant);
  auto fd = fd_vertex_eigen(bump, 2000, 4);
  for (int k = 0; k < 4; ++k) CHECK_THAT(sp.eigenvalues[k], WithinAbs(fd.pairs[k].lambda, 1e-6));
}

TEST_CASE("tuned bump has a one-node resonant eigenfunction", "[spectrum]") {
  auto tuned = tune_to_resonance(CurvatureProfile::bump(0.5), 2);
  auto sp = eigenvalues(tuned, 4);
  CHECK(sp.vertex_case == VertexCase::Resonant);
  CHECK(sp.n_star == 2);
  CHECK(sp.alpha1 * sp.alpha2 < 0.0);
  auto fd = fd_vertex_eigen(tuned, 2000, 4);
  CHECK(sign_changes(fd.pairs[1].vector) == 1);
}

TEST_CASE("eigenfunction normalisation, orthogonality and boundary slope", "[spectrum]") {
  auto bump = CurvatureProfile::bump(0.5);
  auto sp = eigenvalues(bump, 8);
  for (std::size_t n = 0; n < 8; ++n) {
    const auto& y = sp.eigenfunctions[n];
    CHECK_THAT(record_inner(y, y), WithinAbs(1.0, 1e-8));
    CHECK(std::abs(y.derivative(-1.0)) <= 1e-8);
    CHECK(std::abs(y.derivative(1.0)) <= 1e-8);
    CHECK(y.value(-1.0) > 0.0);
    for (std::size_t m = 0; m < n; ++m) CHECK(std::abs(record_inner(y, sp.eigenfunctions[m])) <= 1e-7);
    if (n > 0) CHECK(sp.eigenvalues[n] > sp.eigenvalues[n - 1]);
  }
}

TEST_CASE("eigenfunction residual of the ODE", "[spectrum]") {
  auto bump = CurvatureProfile::bump(0.5);
  auto sp = eigenvalues(bump, 5);
  for (std::size_t n = 0; n < 5; ++n) {
    const auto& y = sp.eigenfunctions[n];
    double lam = sp.eigenvalues[n];
    auto res = [&](double s) -> cplx {
      double g = eval_gamma(bump, s, 0);
      double ypp = oracle::diff4([&](double x) { return y.derivative(x); }, s, 1e-3);
      double r = -ypp - 0.25 * g * g * y.value(s) - lam * y.value(s);
      return r * r;
    };
    double l2 = std::sqrt(oracle::simpson(res, -0.99, 0.99, 800).real());
    CHECK(l2 <= 1e-7);
  }
}

TEST_CASE("wronskian vanishes at eigenvalues", "[spectrum]") {
  auto bump = CurvatureProfile::bump(0.5);
  auto sp = eigenvalues(bump, 5);
  for (double lam : sp.eigenvalues) {
    double scale = std::max(1.0, std::sqrt(std::abs(lam)));
    CHECK(std::abs(real_wronskian(bump, lam)) <= 1e-10 * scale);
  }
}

TEST_CASE("large-index enclosure", "[spectrum]") {
  auto sp = eigenvalues(CurvatureProfile::bump(0.5), 20);
  for (int n = 6; n <= 20; ++n) {
    double m = n - 1;  // zero-based index
    double lam = sp.eigenvalues[static_cast<std::size_t>(n - 1)];
    CHECK(lam > (m - 0.5) * (m - 0.5) * pi * pi / 4.0);
    CHECK(lam < (m + 0.5) * (m + 0.5) * pi * pi / 4.0);
  }
}

TEST_CASE("eigenvalues move continuously with the amplitude", "[spectrum]") {
  for (double a : {0.2, 0.5, 0.8}) {
    auto s1 = eigenvalues(CurvatureProfile::bump(a), 6);
    auto s2 = eigenvalues(CurvatureProfile::bump(a + 1e-4), 6);
    for (int k = 0; k < 6; ++k) CHECK(std::abs(s1.eigenvalues[k] - s2.eigenvalues[k]) <= 1e-2);
  }
}

TEST_CASE("eigenfunctions stay uniformly bounded", "[spectrum]") {
  auto sp = eigenvalues(CurvatureProfile::bump(0.5), 50);
  double worst = 0.0;
  for (const auto& y : sp.eigenfunctions)
    for (double v : y.y) worst = std::max(worst, std::abs(v));
  CHECK(worst < 1.2);
}

TEST_CASE("resonance threshold is strict", "[spectrum]") {
  auto sp = eigenvalues(CurvatureProfile::bump(0.5), 3);
  double lam1 = std::abs(sp.eigenvalues[0]);
  auto below = eigenvalues(CurvatureProfile::bump(0.5), 3, lam1 / 2.0);
  CHECK(below.vertex_case == VertexCase::Generic);
  auto above = eigenvalues(CurvatureProfile::bump(0.5), 3, lam1 * 1.01);
  CHECK(above.vertex_case == VertexCase::Resonant);
  CHECK(above.n_star == 1);
}

TEST_CASE("spectrum csv columns", "[spectrum]") {
  std::ostringstream os;
  write_spectrum_csv(os, eigenvalues(CurvatureProfile::zero(), 2));
  CHECK(os.str().find("n,lambda,y_at_minus1,y_at_plus1") != std::string::npos);
  CHECK_THROWS_AS(eigenvalues(CurvatureProfile::zero(), 0), ValidationError);
}
