#include "wgl/fd_oracle.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "wgl/errors.hpp"
#include "wgl/linalg2.hpp"

namespace wgl {

namespace {

double chi_n(int n, double u) { return std::numbers::sqrt2 * std::sin(n * std::numbers::pi * u); }

/// Eigenvalues of T below x.
int sturm_count(const std::vector<double>& d, const std::vector<double>& e, double x) {
  int count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    double off = i == 0 ? 0.0 : e[i - 1] * e[i - 1];
    q = (d[i] - x) - (i == 0 ? 0.0 : off / q);
    if (q == 0.0) q = -std::numeric_limits<double>::epsilon() * (std::abs(d[i]) + std::abs(x) + 1.0);
    if (q < 0.0) ++count;
  }
  return count;
}

/// Solves (T - shift) x = b by the Thomas algorithm with partial pivoting skipped;
/// shift is kept slightly off the eigenvalue so the pivots stay nonzero.
std::vector<double> tridiagonal_solve(const std::vector<double>& d, const std::vector<double>& e,
                                      double shift, std::vector<double> b) {
  std::size_t n = d.size();
  std::vector<double> c(n, 0.0), dd(n);
  for (std::size_t i = 0; i < n; ++i) dd[i] = d[i] - shift;
  for (std::size_t i = 1; i < n; ++i) {
    double piv = dd[i - 1];
    if (piv == 0.0) piv = 1e-300;
    double m = e[i - 1] / piv;
    dd[i] -= m * e[i - 1];
    b[i] -= m * b[i - 1];
  }
  std::vector<double> x(n);
  for (std::size_t k = n; k-- > 0;) {
    double rhs = b[k] - (k + 1 < n ? e[k] * x[k + 1] : 0.0);
    double piv = dd[k] == 0.0 ? 1e-300 : dd[k];
    x[k] = rhs / piv;
  }
  return x;
}

struct MeshEigen {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;
};

MeshEigen solve_mesh(const CurvatureProfile& profile, int cells, int count, bool vectors) {
  Grid1D grid = make_grid1d(cells);
  double h2 = grid.h * grid.h;
  std::size_t np = grid.points.size();
  std::vector<double> d(np), e(np - 1, -1.0 / h2);
  for (std::size_t i = 0; i < np; ++i) {
    double g = eval_gamma(profile, grid.points[i], 0);
    d[i] = 2.0 / h2 - 0.25 * g * g;
  }
  // Mirrored ghosts give -2/h^2 in the end rows; the similarity diag(1/sqrt2, 1, ..., 1, 1/sqrt2)
  // makes the matrix symmetric.
  e.front() = -std::numbers::sqrt2 / h2;
  e.back() = -std::numbers::sqrt2 / h2;
  MeshEigen out;
  out.values = tridiagonal_eigenvalues(d, e, count);
  if (!vectors) return out;
  for (double lam : out.values) {
    double shift = lam - 1e-10 * std::max(1.0, std::abs(lam));
    std::vector<double> x(np, 1.0);
    for (std::size_t i = 0; i < np; ++i) x[i] = 1.0 + 0.1 * std::sin(3.7 * static_cast<double>(i));
    for (int it = 0; it < 4; ++it) {
      x = tridiagonal_solve(d, e, shift, x);
      double nrm = 0.0;
      for (double v : x) nrm += v * v;
      nrm = std::sqrt(nrm);
      for (double& v : x) v /= nrm;
    }
    // Back to y and unit trapezoid norm: sum h x^2 = 1.
    std::vector<double> y(x);
    y.front() *= std::numbers::sqrt2;
    y.back() *= std::numbers::sqrt2;
    double scale = 1.0 / std::sqrt(grid.h);
    double sign = y.front() < 0.0 ? -1.0 : 1.0;
    for (double& v : y) v *= sign * scale;
    out.vectors.push_back(std::move(y));
  }
  return out;
}

}  // namespace

Grid1D make_grid1d(int cells) {
  if (cells < 2) throw ValidationError("Grid1D needs at least 2 cells");
  Grid1D g;
  g.cells = cells;
  g.h = 2.0 / cells;
  g.points.resize(static_cast<std::size_t>(cells) + 1);
  for (int i = 0; i <= cells; ++i) g.points[static_cast<std::size_t>(i)] = -1.0 + i * g.h;
  g.points.back() = 1.0;
  return g;
}

std::vector<double> tridiagonal_eigenvalues(const std::vector<double>& d,
                                            const std::vector<double>& e, int count) {
  if (d.empty() || e.size() + 1 != d.size()) throw ValidationError("tridiagonal shape mismatch");
  if (count < 1 || static_cast<std::size_t>(count) > d.size())
    throw ValidationError("eigenvalue count out of range");
  double lo = std::numeric_limits<double>::max(), hi = -lo;
  for (std::size_t i = 0; i < d.size(); ++i) {
    double r = (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i < e.size() ? std::abs(e[i]) : 0.0);
    lo = std::min(lo, d[i] - r);
    hi = std::max(hi, d[i] + r);
  }
  std::vector<double> out;
  for (int k = 0; k < count; ++k) {
    double a = lo, b = hi;
    for (int it = 0; it < 200; ++it) {
      double m = 0.5 * (a + b);
      if (m <= a || m >= b) break;
      if (sturm_count(d, e, m) > k)
        b = m;
      else
        a = m;
      if (b - a < 1e-15 * std::max(1.0, std::abs(m))) break;
    }
    out.push_back(0.5 * (a + b));
  }
  return out;
}

int sign_changes(const std::vector<double>& v) {
  int changes = 0;
  double last = 0.0;
  for (double x : v) {
    if (x == 0.0) continue;
    if (last != 0.0 && (x > 0.0) != (last > 0.0)) ++changes;
    last = x;
  }
  return changes;
}

FdEigenResult fd_vertex_eigen(const CurvatureProfile& profile, int cells, int count) {
  if (cells < 200) throw ValidationError("fd_vertex_eigen needs at least 200 cells");
  if (count < 1 || count > cells / 4) throw ValidationError("eigenvalue count out of range");
  auto coarse = solve_mesh(profile, cells, count, true);
  auto fine = solve_mesh(profile, 2 * cells, count, false);
  FdEigenResult r;
  r.grid = make_grid1d(cells);
  for (int k = 0; k < count; ++k) {
    auto ku = static_cast<std::size_t>(k);
    FdEigenpair p;
    p.lambda_coarse = coarse.values[ku];
    p.lambda_fine = fine.values[ku];
    p.lambda = (4.0 * p.lambda_fine - p.lambda_coarse) / 3.0;
    p.vector = std::move(coarse.vectors[ku]);
    r.pairs.push_back(std::move(p));
  }
  return r;
}

double truncation_length(cplx z) {
  double im = sqrt_upper(z).imag();
  if (!(im > 0.0)) throw ValidationError("z must lie off [0, inf)");
  return std::log(1e8) / im;
}

WaveguideGrid make_grid(double epsilon, double delta, cplx z, double h_s, int u_cells,
                        double edge_length) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ValidationError("epsilon must lie in (0, 1]");
  if (!(delta > 0.0 && delta <= epsilon)) throw ValidationError("delta must lie in (0, epsilon]");
  if (!(h_s > 0.0 && h_s <= 0.5)) throw ValidationError("h_s must lie in (0, 0.5]");
  if (u_cells < 2) throw ValidationError("u_cells must be >= 2");
  WaveguideGrid g;
  g.epsilon = epsilon;
  g.delta = delta;
  g.edge_length = edge_length > 0.0 ? edge_length : truncation_length(z);
  g.edge_cells = std::max(2, static_cast<int>(std::ceil(g.edge_length / h_s - 1e-9)));
  g.vertex_cells = std::max(2, static_cast<int>(std::lround(2.0 / h_s)));
  g.u_cells = u_cells;
  return g;
}

WaveguideGrid refine_s(const WaveguideGrid& grid) {
  WaveguideGrid g = grid;
  g.edge_cells *= 2;
  g.vertex_cells *= 2;
  return g;
}

FdSystem assemble_fd_system(const WaveguideGrid& grid, const CurvatureProfile& profile, int n) {
  if (n < 1 || n >= grid.u_cells) throw ValidationError("mode n must satisfy 1 <= n < u_cells");
  FdSystem sys;
  sys.grid = grid;
  sys.n = n;
  const int M = grid.edge_cells, Nv = grid.vertex_cells, K = grid.u_cells;
  const double he = grid.h_edge(), hv = grid.h_vertex(), hu = grid.h_u();
  const double eps = grid.epsilon, inv_d2 = 1.0 / (grid.delta * grid.delta);
  const double ratio = grid.delta / grid.epsilon;
  double sn = std::sin(n * std::numbers::pi * hu / 2.0);
  sys.threshold = 4.0 / (hu * hu) * sn * sn * inv_d2;

  const int nc = grid.chain_size();
  const int j1 = M - 1, j2 = M - 1 + Nv;
  sys.edge_mass.resize(static_cast<std::size_t>(nc));
  sys.vertex_mass.resize(static_cast<std::size_t>(nc));
  sys.chain_edge.resize(static_cast<std::size_t>(nc));
  sys.chain_s.resize(static_cast<std::size_t>(nc));
  for (int c = 0; c < nc; ++c) {
    auto cu = static_cast<std::size_t>(c);
    if (c < j1) {
      sys.chain_edge[cu] = 1;
      sys.chain_s[cu] = (M - 1 - c) * he;
      sys.edge_mass[cu] = he;
    } else if (c == j1) {
      sys.chain_edge[cu] = -1;
      sys.chain_s[cu] = -1.0;
      sys.edge_mass[cu] = 0.5 * he;
      sys.vertex_mass[cu] = 0.5 * hv;
    } else if (c < j2) {
      sys.chain_edge[cu] = 0;
      sys.chain_s[cu] = -1.0 + (c - j1) * hv;
      sys.vertex_mass[cu] = hv;
    } else if (c == j2) {
      sys.chain_edge[cu] = -2;
      sys.chain_s[cu] = 1.0;
      sys.edge_mass[cu] = 0.5 * he;
      sys.vertex_mass[cu] = 0.5 * hv;
    } else {
      sys.chain_edge[cu] = 2;
      sys.chain_s[cu] = (c - j2) * he;
      sys.edge_mass[cu] = he;
    }
  }

  sys.mass.resize(static_cast<std::size_t>(grid.unknowns()));
  sys.stiffness.reserve(static_cast<std::size_t>(grid.unknowns()) * 5);
  auto add = [&](int r, int c, double v) { sys.stiffness.push_back({r, c, v}); };
  for (int c = 0; c < nc; ++c) {
    auto cu = static_cast<std::size_t>(c);
    double m = sys.edge_mass[cu] + eps * sys.vertex_mass[cu];
    bool on_vertex = sys.vertex_mass[cu] > 0.0;
    for (int k = 1; k < K; ++k) {
      int r = sys.index(c, k);
      sys.mass[static_cast<std::size_t>(r)] = m;
      double diag = 2.0 * m * inv_d2 / (hu * hu);
      if (on_vertex) diag += sys.vertex_mass[cu] * eval_geometry(profile, sys.chain_s[cu], sys.u(k), ratio).W / eps;
      add(r, r, diag);
      if (k > 1) add(r, sys.index(c, k - 1), -m * inv_d2 / (hu * hu));
      if (k < K - 1) add(r, sys.index(c, k + 1), -m * inv_d2 / (hu * hu));
    }
  }
  // s links; the outer edge nodes also link to the Dirichlet truncation node.
  for (int c = 0; c + 1 < nc; ++c) {
    bool vertex_link = c >= j1 && c + 1 <= j2;
    for (int k = 1; k < K; ++k) {
      double cond;
      if (vertex_link) {
        double smid = sys.chain_s[static_cast<std::size_t>(c)] + 0.5 * hv;
        cond = eval_geometry(profile, smid, sys.u(k), ratio).inv_g / (eps * hv);
      } else {
        cond = 1.0 / he;
      }
      int a = sys.index(c, k), b = sys.index(c + 1, k);
      add(a, a, cond);
      add(b, b, cond);
      add(a, b, -cond);
      add(b, a, -cond);
    }
  }
  for (int k = 1; k < K; ++k) {
    add(sys.index(0, k), sys.index(0, k), 1.0 / he);
    add(sys.index(nc - 1, k), sys.index(nc - 1, k), 1.0 / he);
  }
  return sys;
}

namespace {

Eigen::SparseMatrix<double> stiffness_matrix(const FdSystem& sys) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(sys.stiffness.size());
  for (const auto& e : sys.stiffness) t.emplace_back(e.row, e.col, e.value);
  int n = sys.grid.unknowns();
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

}  // namespace

double symmetry_defect(const FdSystem& sys) {
  Eigen::SparseMatrix<double> a = stiffness_matrix(sys);
  Eigen::SparseMatrix<double> d = a - Eigen::SparseMatrix<double>(a.transpose());
  double m = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(d, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

FdField fd_resolvent(const WaveguideGrid& grid, const CurvatureProfile& profile, int n, cplx z,
                     const SourceFunction& f1, const SourceFunction& f2) {
  if (z.imag() == 0.0) throw ValidationError("fd_resolvent needs Im z != 0");
  double need = truncation_length(z);
  if (grid.edge_length < need * (1.0 - 1e-12))
    throw ValidationError("edge length " + std::to_string(grid.edge_length) +
                          " violates the truncation bound " + std::to_string(need));
  FdSystem sys = assemble_fd_system(grid, profile, n);
  const int N = grid.unknowns(), K = grid.u_cells, nc = grid.chain_size();
  const double hu = grid.h_u();

  FdField out;
  out.grid = grid;
  out.n = n;
  out.z = z;

  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(N);
  double src2 = 0.0;
  for (int c = 0; c < nc; ++c) {
    auto cu = static_cast<std::size_t>(c);
    if (sys.edge_mass[cu] == 0.0) continue;
    int e = sys.chain_edge[cu];
    double s = e < 0 ? 0.0 : sys.chain_s[cu];
    double fv = (e == 1 || e == -1) ? f1(s) : f2(s);
    for (int k = 1; k < K; ++k) {
      double xv = fv * chi_n(n, sys.u(k));
      b[sys.index(c, k)] = sys.edge_mass[cu] * xv;
      src2 += sys.edge_mass[cu] * hu * xv * xv;
    }
  }
  out.source_norm = std::sqrt(src2);
  out.values.assign(static_cast<std::size_t>(N), 0.0);

  if (b.squaredNorm() > 0.0) {
    Eigen::SparseMatrix<double> a = stiffness_matrix(sys);
    Eigen::SparseMatrix<cplx> kmat = a.cast<cplx>();
    cplx shift = sys.threshold + z;
    for (int r = 0; r < N; ++r) kmat.coeffRef(r, r) -= shift * sys.mass[static_cast<std::size_t>(r)];
    kmat.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<cplx>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(kmat);
    if (lu.info() != Eigen::Success) throw SingularSystem("sparse LU factorisation failed");
    Eigen::VectorXcd x = lu.solve(b);
    if (lu.info() != Eigen::Success) throw NumericalError("sparse LU solve failed");
    // A few refinement sweeps recover the digits lost to the large transverse diagonal.
    Eigen::VectorXcd r = b - kmat * x;
    for (int it = 0; it < 4 && r.norm() > 1e-12 * b.norm(); ++it) {
      x += lu.solve(r);
      r = b - kmat * x;
    }
    double knorm = 0.0;  // infinity norm of K
    {
      Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(N);
      for (int col = 0; col < kmat.outerSize(); ++col)
        for (Eigen::SparseMatrix<cplx>::InnerIterator it(kmat, col); it; ++it) rowsum[it.row()] += std::abs(it.value());
      knorm = rowsum.maxCoeff();
    }
    out.solver_residual =
        r.cwiseAbs().maxCoeff() / (knorm * x.cwiseAbs().maxCoeff() + b.cwiseAbs().maxCoeff());
    if (!(out.solver_residual <= 1e-10))
    {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3e", out.solver_residual);
      throw NumericalError(std::string("sparse solve residual ") + buf + " above 1e-10");
    }
    for (int r = 0; r < N; ++r) out.values[static_cast<std::size_t>(r)] = x[r];
  }

  double nrm2 = 0.0;
  for (int r = 0; r < N; ++r) nrm2 += sys.mass[static_cast<std::size_t>(r)] * hu * std::norm(out.values[static_cast<std::size_t>(r)]);
  out.field_norm = std::sqrt(nrm2);

  auto project = [&](int c) {
    cplx acc = 0.0;
    for (int k = 1; k < K; ++k) acc += hu * chi_n(n, sys.u(k)) * out.values[static_cast<std::size_t>(sys.index(c, k))];
    return acc;
  };
  const int M = grid.edge_cells, Nv = grid.vertex_cells;
  const int j1 = M - 1, j2 = M - 1 + Nv;
  for (auto& v : out.edge_projection) v.assign(static_cast<std::size_t>(M) + 1, 0.0);
  out.vertex_projection.assign(static_cast<std::size_t>(Nv) + 1, 0.0);
  for (int i = 0; i < M; ++i) {
    out.edge_projection[0][static_cast<std::size_t>(i)] = project(j1 - i);
    out.edge_projection[1][static_cast<std::size_t>(i)] = project(j2 + i);
  }
  for (int v = 0; v <= Nv; ++v) out.vertex_projection[static_cast<std::size_t>(v)] = project(j1 + v);
  return out;
}

double edge_mismatch(const FdField& field, const std::function<cplx(int, double)>& reference) {
  const int M = field.grid.edge_cells;
  const double he = field.grid.h_edge();
  double acc = 0.0;
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i <= M; ++i) {
      double w = (i == 0 || i == M) ? 0.5 * he : he;
      acc += w * std::norm(field.edge_projection[j][static_cast<std::size_t>(i)] - reference(j + 1, i * he));
    }
  return std::sqrt(acc);
}

double vertex_mismatch(const FdField& field, const std::function<cplx(double)>& reference) {
  const int Nv = field.grid.vertex_cells;
  const double hv = field.grid.h_vertex();
  double acc = 0.0;
  for (int v = 0; v <= Nv; ++v) {
    double w = (v == 0 || v == Nv) ? 0.5 * hv : hv;
    double s = v == Nv ? 1.0 : -1.0 + v * hv;
    acc += w * std::norm(field.vertex_projection[static_cast<std::size_t>(v)] - reference(s));
  }
  return std::sqrt(field.grid.epsilon * acc);
}

UnitaryCheck unitary_map_check(const FdSystem& sys, const CurvatureProfile& profile,
                               const std::vector<cplx>& field) {
  if (field.size() != sys.mass.size()) throw ValidationError("field size does not match the grid");
  const auto& grid = sys.grid;
  const int K = grid.u_cells, nc = grid.chain_size();
  const double hu = grid.h_u(), eps = grid.epsilon, sd = std::sqrt(grid.delta);
  const double ratio = grid.delta / grid.epsilon;
  UnitaryCheck out;
  double orig2 = 0.0, mapped2 = 0.0;
  for (int c = 0; c < nc; ++c) {
    auto cu = static_cast<std::size_t>(c);
    double me = sys.edge_mass[cu], mv = sys.vertex_mass[cu];
    for (int k = 1; k < K; ++k) {
      cplx psi = field[static_cast<std::size_t>(sys.index(c, k))];
      double g = mv > 0.0 ? eval_geometry(profile, sys.chain_s[cu], sys.u(k), ratio).g : 1.0;
      double factor = mv > 0.0 && me == 0.0 ? sd * std::pow(g, 0.25) : sd;
      cplx mapped = factor * psi;
      out.roundtrip = std::max(out.roundtrip, std::abs(mapped / factor - psi));
      orig2 += hu * (me * grid.delta + mv * grid.delta * eps * std::sqrt(g)) * std::norm(psi);
      mapped2 += hu * (me + eps * mv) * std::norm(mapped);
    }
  }
  out.norm_defect = std::abs(std::sqrt(mapped2) - std::sqrt(orig2));
  return out;
}

}  // namespace wgl
