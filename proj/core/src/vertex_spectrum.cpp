#include "wgl/vertex_spectrum.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "wgl/errors.hpp"
#include "wgl/gauss_legendre.hpp"

namespace wgl {

cplx ShootingSolution::wronskian_at(double s) const {
  return eta.value(s) * zeta.derivative(s) - zeta.value(s) * eta.derivative(s);
}

double ShootingSolution::wronskian_constancy() const {
  double scale = std::abs(wronskian);
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (double s : zeta.s) worst = std::max(worst, std::abs(wronskian_at(s) - wronskian));
  for (double s : eta.s) worst = std::max(worst, std::abs(wronskian_at(s) - wronskian));
  return worst / scale;
}

ShootingSolution shoot(const CurvatureProfile& profile, cplx z, const OdeOptions& opt) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw ValidationError("shoot: spectral parameter must be finite");
  ShootingSolution out;
  out.z = z;
  auto [zy, zd] = integrate_vertex_ode<cplx>(profile, z, -1.0, 1.0, 1.0, 0.0, opt, &out.zeta);
  (void)zy;
  integrate_vertex_ode<cplx>(profile, z, 1.0, -1.0, 1.0, 0.0, opt, &out.eta);
  out.eta.reverse();
  out.wronskian = zd;
  return out;
}

double real_wronskian(const CurvatureProfile& profile, double lambda, const OdeOptions& opt) {
  return integrate_vertex_ode<double>(profile, lambda, -1.0, 1.0, 1.0, 0.0, opt, nullptr).second;
}

double neumann_eigenvalue(int n) {
  double k = (n - 1) * std::numbers::pi / 2.0;
  return k * k;
}

const HermiteRecord<double>& VertexSpectrum::resonant_function() const {
  if (vertex_case != VertexCase::Resonant) throw ValidationError("spectrum is not resonant");
  return eigenfunctions.at(static_cast<std::size_t>(n_star - 1));
}

double record_inner(const HermiteRecord<double>& f, const HermiteRecord<double>& g) {
  const auto& rule = gauss_legendre(5);
  if (f.s == g.s) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
      double part = 0.0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        double t = 0.5 * (1.0 + rule.nodes[q]);
        part += rule.weights[q] * f.value_on(i, t) * g.value_on(i, t);
      }
      total += 0.5 * (f.s[i + 1] - f.s[i]) * part;
    }
    return total;
  }
  // union of both meshes keeps every interpolation piece polynomial on a sub-interval
  std::vector<double> mesh;
  mesh.reserve(f.size() + g.size());
  std::merge(f.s.begin(), f.s.end(), g.s.begin(), g.s.end(), std::back_inserter(mesh));
  mesh.erase(std::unique(mesh.begin(), mesh.end()), mesh.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < mesh.size(); ++i) {
    double a = mesh[i], b = mesh[i + 1];
    double c = 0.5 * (a + b), r = 0.5 * (b - a);
    double part = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      double x = c + r * rule.nodes[q];
      part += rule.weights[q] * f.value(x) * g.value(x);
    }
    total += r * part;
  }
  return total;
}

namespace {

struct Bracket {
  double lo, hi;
  int members;  // number of enclosed eigenvalues
};

double refine_root(const CurvatureProfile& profile, double lo, double hi, double flo, double fhi,
                   const OdeOptions& opt) {
  auto f = [&](double x) { return real_wronskian(profile, x, opt); };
  auto tol = [](double a, double b) {
    return std::abs(b - a) <= 1e-12 * std::max(1.0, std::abs(a));
  };
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  return 0.5 * (r.first + r.second);
}

/// (1/2) * integral of gamma^2/4: the first-order shift of the large eigenvalues.
double mean_potential(const CurvatureProfile& profile) {
  auto rule = composite_gauss(-1.0, 1.0, 16, 16);
  double acc = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    double g = profile.jet(rule.nodes[q]).g0;
    acc += rule.weights[q] * 0.25 * g * g;
  }
  return 0.5 * acc;
}

std::vector<double> roots_in(const CurvatureProfile& profile, const Bracket& br, double guess,
                             const OdeOptions& opt) {
  if (br.members == 1) {
    // try a narrow bracket around the first-order estimate before the full enclosure
    double w = 0.02 * (br.hi - br.lo);
    double a = std::max(br.lo, guess - w), b = std::min(br.hi, guess + w);
    double fa = real_wronskian(profile, a, opt);
    double fb = real_wronskian(profile, b, opt);
    if (fa * fb < 0.0) return {refine_root(profile, a, b, fa, fb, opt)};
    if (fa * fb > 0.0) {
      double flo = real_wronskian(profile, br.lo, opt);
      if (flo * fa < 0.0) return {refine_root(profile, br.lo, a, flo, fa, opt)};
      double fhi = real_wronskian(profile, br.hi, opt);
      if (fb * fhi < 0.0) return {refine_root(profile, b, br.hi, fb, fhi, opt)};
    }
  }
  double flo = real_wronskian(profile, br.lo, opt);
  double fhi = real_wronskian(profile, br.hi, opt);
  for (int pass = 0; pass < 3; ++pass) {
    int points = 400 * br.members << pass;
    std::vector<double> roots;
    double x0 = br.lo, f0 = flo;
    for (int i = 1; i <= points; ++i) {
      double x1 = br.lo + (br.hi - br.lo) * i / points;
      double f1 = i == points ? fhi : real_wronskian(profile, x1, opt);
      if (f1 == 0.0) {
        roots.push_back(x1);
      } else if (f0 != 0.0 && f0 * f1 < 0.0) {
        roots.push_back(refine_root(profile, x0, x1, f0, f1, opt));
      }
      x0 = x1;
      f0 = f1;
    }
    if (static_cast<int>(roots.size()) >= br.members) return roots;
  }
  std::ostringstream os;
  os << "eigenvalue scan found too few roots in [" << br.lo << ", " << br.hi << "] for "
     << profile.describe();
  throw BracketFailure(os.str());
}

HermiteRecord<double> eigenfunction(const CurvatureProfile& profile, double lambda,
                                    const OdeOptions& opt) {
  HermiteRecord<double> rec;
  integrate_vertex_ode<double>(profile, lambda, -1.0, 1.0, 1.0, 0.0, opt, &rec);
  double nrm = std::sqrt(record_inner(rec, rec));
  double sup = 0.0;
  for (double v : rec.y) sup = std::max(sup, std::abs(v));
  double sign = 1.0;
  double thresh = 1e-8 * sup;
  if (std::abs(rec.y.front()) > thresh) {
    sign = rec.y.front() > 0 ? 1.0 : -1.0;
  } else {
    for (double v : rec.y)
      if (std::abs(v) > thresh) {
        sign = v > 0 ? 1.0 : -1.0;
        break;
      }
  }
  rec.scale(sign / nrm);
  return rec;
}

int sign_changes(const HermiteRecord<double>& rec) {
  double sup = 0.0;
  for (double v : rec.y) sup = std::max(sup, std::abs(v));
  int changes = 0;
  double last = 0.0;
  for (double v : rec.y) {
    if (std::abs(v) <= 1e-10 * sup) continue;
    if (last != 0.0 && (v > 0) != (last > 0)) ++changes;
    last = v;
  }
  return changes;
}

}  // namespace

VertexSpectrum eigenvalues(const CurvatureProfile& profile, int count, double zero_tolerance,
                           const OdeOptions& opt) {
  if (count < 1) throw ValidationError("eigenvalue count must be >= 1");
  if (!(zero_tolerance > 0.0)) throw ValidationError("zero_tolerance must be positive");
  double V = profile.potential_bound();

  std::vector<Bracket> brackets;
  for (int n = 1; n <= count; ++n) {
    double mu = neumann_eigenvalue(n);
    double margin = 1e-6 * std::max(1.0, mu);
    Bracket b{mu - V - margin, mu + margin, 1};
    if (!brackets.empty() && b.lo <= brackets.back().hi) {
      brackets.back().hi = b.hi;
      brackets.back().members += 1;
    } else {
      brackets.push_back(b);
    }
  }

  VertexSpectrum out;
  out.zero_tolerance = zero_tolerance;
  double vbar = mean_potential(profile);
  int first = 1;
  for (const auto& br : brackets) {
    auto r = roots_in(profile, br, neumann_eigenvalue(first) - vbar, opt);
    first += br.members;
    out.eigenvalues.insert(out.eigenvalues.end(), r.begin(), r.end());
  }
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  if (static_cast<int>(out.eigenvalues.size()) < count) throw BracketFailure("too few eigenvalues found");
  out.eigenvalues.resize(static_cast<std::size_t>(count));

  out.eigenfunctions.reserve(out.eigenvalues.size());
  for (std::size_t i = 0; i < out.eigenvalues.size(); ++i) {
    out.eigenfunctions.push_back(eigenfunction(profile, out.eigenvalues[i], opt));
    if (sign_changes(out.eigenfunctions.back()) != static_cast<int>(i)) {
      std::ostringstream os;
      os << "eigenfunction " << i + 1 << " of " << profile.describe()
         << " has the wrong number of nodes";
      throw BracketFailure(os.str());
    }
  }

  double best = zero_tolerance;
  for (std::size_t i = 0; i < out.eigenvalues.size(); ++i) {
    if (std::abs(out.eigenvalues[i]) <= best) {
      best = std::abs(out.eigenvalues[i]);
      out.vertex_case = VertexCase::Resonant;
      out.n_star = static_cast<int>(i) + 1;
    }
  }
  if (out.vertex_case == VertexCase::Resonant) {
    const auto& y = out.eigenfunctions[static_cast<std::size_t>(out.n_star - 1)];
    out.alpha1 = y.value(-1.0);
    out.alpha2 = y.value(1.0);
  }
  return out;
}

int classification_count(const CurvatureProfile& profile) {
  double V = profile.potential_bound();
  int n = 1;
  while (neumann_eigenvalue(n) - V <= 1.0) ++n;
  return n;
}

CaseInfo classify_case(const VertexSpectrum& spectrum) {
  CaseInfo info;
  double best = spectrum.zero_tolerance;
  for (std::size_t i = 0; i < spectrum.eigenvalues.size(); ++i) {
    if (std::abs(spectrum.eigenvalues[i]) <= best) {
      best = std::abs(spectrum.eigenvalues[i]);
      info.resonant = true;
      info.n_star = static_cast<int>(i) + 1;
    }
  }
  if (info.resonant) {
    const auto& y = spectrum.eigenfunctions.at(static_cast<std::size_t>(info.n_star - 1));
    info.alpha1 = y.value(-1.0);
    info.alpha2 = y.value(1.0);
  }
  return info;
}

void write_spectrum_csv(std::ostream& os, const VertexSpectrum& spectrum) {
  os << "n,lambda,y_at_minus1,y_at_plus1\n";
  char buf[128];
  for (std::size_t i = 0; i < spectrum.eigenvalues.size(); ++i) {
    const auto& y = spectrum.eigenfunctions[i];
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", i + 1, spectrum.eigenvalues[i],
                  y.value(-1.0), y.value(1.0));
    os << buf;
  }
}

}  // namespace wgl
