#pragma once

// Brute-force finite-difference oracles: a 1D eigensolver for h_v and a 2D
// resolvent of the transformed waveguide operator on truncated edges.

#include <complex>
#include <functional>
#include <vector>

#include "wgl/profile.hpp"
#include "wgl/source.hpp"

namespace wgl {

using cplx = std::complex<double>;

/// Uniform mesh on [-1,1] with `cells` intervals.
struct Grid1D {
  int cells = 0;
  double h = 0.0;
  std::vector<double> points;
};

Grid1D make_grid1d(int cells);

struct FdEigenpair {
  double lambda = 0.0;      // Richardson value from meshes N and 2N
  double lambda_coarse = 0.0;
  double lambda_fine = 0.0;
  std::vector<double> vector;  // on the N mesh, unit trapezoid L2 norm
};

struct FdEigenResult {
  Grid1D grid;
  std::vector<FdEigenpair> pairs;
};

/// Central differences with mirrored ghost points at +-1, symmetrised and
/// solved by Sturm bisection. Requires cells >= 200.
FdEigenResult fd_vertex_eigen(const CurvatureProfile& profile, int cells, int count);

/// Eigenvalues k = 0..count-1 of a symmetric tridiagonal matrix by bisection.
std::vector<double> tridiagonal_eigenvalues(const std::vector<double>& diag,
                                            const std::vector<double>& off, int count);

/// Number of strict sign changes, ignoring exact zeros.
int sign_changes(const std::vector<double>& v);

/// Truncated waveguide: edges s in [0, edge_length], vertex s in [-1,1], u in [0,1].
struct WaveguideGrid {
  double epsilon = 0.0;
  double delta = 0.0;
  double edge_length = 0.0;
  int edge_cells = 0;
  int vertex_cells = 0;
  int u_cells = 0;

  double h_edge() const { return edge_length / edge_cells; }
  double h_vertex() const { return 2.0 / vertex_cells; }
  double h_u() const { return 1.0 / u_cells; }
  /// Chain nodes in s: edge 1 (reversed), vertex, edge 2; Dirichlet ends excluded.
  int chain_size() const { return 2 * (edge_cells - 1) + vertex_cells + 1; }
  int unknowns() const { return chain_size() * (u_cells - 1); }
};

/// log(1e8) / Im sqrt z: the edge length where e^{i sqrt z s} has decayed to 1e-8.
double truncation_length(cplx z);

/// Spacing h_s on edges and vertex, `u_cells` transverse cells; the edge length
/// defaults to truncation_length(z).
WaveguideGrid make_grid(double epsilon, double delta, cplx z, double h_s, int u_cells,
                        double edge_length = 0.0);

/// Halves the s spacing on edges and vertex; the u mesh is kept.
WaveguideGrid refine_s(const WaveguideGrid& grid);

/// Real symmetric stiffness A and diagonal mass M of the lumped finite-volume
/// scheme; the discrete problem is (A - (threshold + z) M) psi = M xi.
struct FdSystem {
  WaveguideGrid grid;
  int n = 1;
  double threshold = 0.0;  // discrete transverse eigenvalue of mode n
  std::vector<double> mass;          // per unknown
  std::vector<double> edge_mass;     // edge part of the chain-node mass
  std::vector<double> vertex_mass;   // vertex part, without the eps weight
  std::vector<int> chain_edge;       // 0 vertex, 1 or 2 edge, -1 / -2 junction with edge 1 / 2
  std::vector<double> chain_s;       // edge coordinate or vertex coordinate
  struct Entry {
    int row, col;
    double value;
  };
  std::vector<Entry> stiffness;  // assembled triplets, duplicates summed

  int index(int chain, int k) const { return chain * (grid.u_cells - 1) + (k - 1); }
  double u(int k) const { return k * grid.h_u(); }
};

FdSystem assemble_fd_system(const WaveguideGrid& grid, const CurvatureProfile& profile, int n);

/// max |A_ij - A_ji| over the assembled stiffness.
double symmetry_defect(const FdSystem& sys);

struct FdField {
  WaveguideGrid grid;
  int n = 1;
  cplx z;
  std::vector<cplx> values;  // per unknown, FdSystem::index order
  std::vector<cplx> edge_projection[2];  // (chi_n, psi_j(s_i, .)) for s_i = i h_edge, i = 0..M
  std::vector<cplx> vertex_projection;   // at s = -1 + i h_vertex, i = 0..N_v
  double solver_residual = 0.0;          // |K psi - b| / (|K| |psi| + |b|), max norms
  double field_norm = 0.0;               // H~_eps norm
  double source_norm = 0.0;              // discrete ||xi||
};

/// Solves the discrete resolvent problem with Eigen SparseLU.
/// Throws ValidationError when the edges are shorter than truncation_length(z)
/// and NumericalError when the backward error of the solve exceeds 1e-10.
FdField fd_resolvent(const WaveguideGrid& grid, const CurvatureProfile& profile, int n, cplx z,
                     const SourceFunction& f1, const SourceFunction& f2);

/// Trapezoid L2 norm over both edges of P_n psi - reference(edge, s).
double edge_mismatch(const FdField& field,
                     const std::function<cplx(int, double)>& reference);

/// eps-weighted trapezoid L2 norm over the vertex of P_n psi_v - reference(s).
double vertex_mismatch(const FdField& field, const std::function<cplx(double)>& reference);

struct UnitaryCheck {
  double roundtrip = 0.0;  // max |U^{-1} U psi - psi|
  double norm_defect = 0.0;  // | ||U psi||_{H~_eps} - ||psi||_{H_delta,eps} |
};

/// Applies U (delta^{1/2} on edges, delta^{1/2} g^{1/4} on the vertex) to a
/// field given in the original coordinates.
UnitaryCheck unitary_map_check(const FdSystem& sys, const CurvatureProfile& profile,
                               const std::vector<cplx>& field);

}  // namespace wgl
