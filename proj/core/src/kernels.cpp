#include "wgl/kernels.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>

#include "wgl/errors.hpp"
#include "wgl/linalg2.hpp"
#include "wgl/gauss_legendre.hpp"

namespace wgl {

namespace {

constexpr cplx I{0.0, 1.0};

double mean_shift_of(const CurvatureProfile& profile) {
  auto rule = composite_gauss(-1.0, 1.0, 16, 16);
  double acc = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    double g = profile.jet(rule.nodes[q]).g0;
    acc += rule.weights[q] * 0.25 * g * g;
  }
  return 0.5 * acc;
}

void check_unit_interval(double s, const char* what) {
  if (!(s >= -1.0 && s <= 1.0))
    throw ValidationError(std::string(what) + " must lie in [-1, 1]");
}

void check_wronskian(const VertexKernel& k) {
  double w = std::abs(k.shooting->wronskian);
  if (w < kNearEigenvalueThreshold) throw NearEigenvalue(k.z, w);
}

}  // namespace

VertexKernel make_vertex_kernel(const CurvatureProfile& profile, cplx z, KernelMode mode,
                                int n_terms, SeriesTail tail) {
  VertexKernel k;
  k.profile = profile;
  k.z = z;
  k.mode = mode;
  k.tail = tail;
  if (mode == KernelMode::Wronskian) {
    k.shooting = std::make_shared<const ShootingSolution>(shoot(profile, z));
    check_wronskian(k);
  } else {
    if (n_terms < 1) throw ValidationError("series kernel needs n_terms >= 1");
    k.n_terms = n_terms;
    k.spectrum = std::make_shared<const VertexSpectrum>(eigenvalues(profile, n_terms));
    k.mean_shift = mean_shift_of(profile);
  }
  return k;
}

VertexKernel make_series_kernel(const CurvatureProfile& profile,
                                std::shared_ptr<const VertexSpectrum> spectrum, cplx z,
                                SeriesTail tail) {
  if (!spectrum || spectrum->eigenvalues.empty()) throw ValidationError("series kernel needs a spectrum");
  VertexKernel k;
  k.profile = profile;
  k.z = z;
  k.mode = KernelMode::Series;
  k.tail = tail;
  k.n_terms = static_cast<int>(spectrum->eigenvalues.size());
  k.spectrum = std::move(spectrum);
  k.mean_shift = mean_shift_of(profile);
  return k;
}

double neumann_mode(int n, double s) {
  if (n == 1) return std::numbers::sqrt2 / 2.0;
  return std::cos((n - 1) * std::numbers::pi * (s + 1.0) / 2.0);
}

double neumann_mode_ds(int n, double s) {
  if (n == 1) return 0.0;
  double k = (n - 1) * std::numbers::pi / 2.0;
  return -k * std::sin(k * (s + 1.0));
}

cplx neumann_free_kernel(cplx z, double s, double sp) {
  cplx k = std::sqrt(z);
  cplx den = k * std::sin(2.0 * k);
  if (std::abs(den) < kNearEigenvalueThreshold) throw NearEigenvalue(z, std::abs(den));
  double a = std::min(s, sp), b = std::max(s, sp);
  return -std::cos(k * (a + 1.0)) * std::cos(k * (b - 1.0)) / den;
}

cplx neumann_free_kernel_ds(cplx z, double s, int endpoint) {
  cplx k = std::sqrt(z);
  cplx den = std::sin(2.0 * k);
  if (std::abs(k * den) < kNearEigenvalueThreshold) throw NearEigenvalue(z, std::abs(k * den));
  if (endpoint == 1) return std::sin(k * (s + 1.0)) / den;
  if (endpoint == -1) return std::sin(k * (s - 1.0)) / den;
  throw ValidationError("endpoint must be -1 or +1");
}

cplx vertex_kernel(const VertexKernel& kernel, double s, double sp) {
  check_unit_interval(s, "s");
  check_unit_interval(sp, "s'");
  if (kernel.mode == KernelMode::Wronskian) {
    check_wronskian(kernel);
    const auto& sh = *kernel.shooting;
    double a = std::min(s, sp), b = std::max(s, sp);
    return sh.zeta.value(a) * sh.eta.value(b) / sh.wronskian;
  }
  const auto& sp_ = *kernel.spectrum;
  cplx sum = 0.0;
  for (std::size_t n = 0; n < sp_.eigenvalues.size(); ++n) {
    const auto& y = sp_.eigenfunctions[n];
    sum += y.value(s) * y.value(sp) / (sp_.eigenvalues[n] - kernel.z);
  }
  if (kernel.tail == SeriesTail::ShiftedFree) {
    cplx w = kernel.z + kernel.mean_shift;
    cplx head = 0.0;
    for (int n = 1; n <= kernel.n_terms; ++n)
      head += neumann_mode(n, s) * neumann_mode(n, sp) / (neumann_eigenvalue(n) - w);
    sum += neumann_free_kernel(w, s, sp) - head;
  }
  return sum;
}

cplx kernel_s_derivative(const VertexKernel& kernel, double s, int endpoint) {
  check_unit_interval(s, "s");
  if (endpoint != 1 && endpoint != -1) throw ValidationError("endpoint must be -1 or +1");
  if (kernel.mode == KernelMode::Wronskian) {
    check_wronskian(kernel);
    const auto& sh = *kernel.shooting;
    // r(s, 1) = zeta(s) eta(1) / W with eta(1) = 1; r(s, -1) = eta(s) zeta(-1) / W with zeta(-1) = 1
    if (endpoint == 1) return sh.zeta.derivative(s) / sh.wronskian;
    return sh.eta.derivative(s) / sh.wronskian;
  }
  const auto& sp_ = *kernel.spectrum;
  double e = static_cast<double>(endpoint);
  cplx sum = 0.0;
  for (std::size_t n = 0; n < sp_.eigenvalues.size(); ++n) {
    const auto& y = sp_.eigenfunctions[n];
    sum += y.derivative(s) * y.value(e) / (sp_.eigenvalues[n] - kernel.z);
  }
  if (kernel.tail == SeriesTail::ShiftedFree) {
    cplx w = kernel.z + kernel.mean_shift;
    cplx head = 0.0;
    for (int n = 1; n <= kernel.n_terms; ++n)
      head += neumann_mode_ds(n, s) * neumann_mode(n, e) / (neumann_eigenvalue(n) - w);
    sum += neumann_free_kernel_ds(w, s, endpoint) - head;
  }
  return sum;
}

HalfLineResolvent make_half_line_resolvent(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw ValidationError("spectral parameter must be finite");
  cplx k = sqrt_upper(z);
  if (!(k.imag() > 0.0)) {
    std::ostringstream os;
    os << "z = " << z << " lies on [0, inf): the half-line resolvent needs Im sqrt z > 0";
    throw ValidationError(os.str());
  }
  return {z, k};
}

cplx integrate_complex(const std::function<cplx(double)>& f, double a, double b,
                       const std::vector<double>& splits, double rel_tol) {
  if (!(b > a)) return 0.0;
  std::vector<double> pts{a};
  for (double x : splits)
    if (x > a && x < b) pts.push_back(x);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());

  // Global adaptive bisection over single GK31 panels. Boost's own recursion
  // reports the error on the reference interval [-1,1], unscaled, so the
  // subdivision is driven here with the scaled estimate.
  struct Panel {
    double a, b;
    cplx value;
    double err, l1;
    bool operator<(const Panel& o) const { return err < o.err; }
  };
  auto eval = [&](double lo, double hi) {
    double err = 0.0, l1 = 0.0;
    cplx v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 0, 0.0, &err, &l1);
    double half = 0.5 * (hi - lo);
    return Panel{lo, hi, v, err * half, l1};
  };
  std::priority_queue<Panel> queue;
  cplx total = 0.0;
  double total_err = 0.0, total_l1 = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i + 1] <= pts[i]) continue;
    auto p = eval(pts[i], pts[i + 1]);
    total += p.value;
    total_err += p.err;
    total_l1 += p.l1;
    queue.push(p);
  }
  auto target = [&](double tol) { return tol * std::max(std::abs(total), 1e-3 * total_l1); };
  for (int it = 0; it < 4000 && total_err > target(1e-13) && total_err > 1e-15 * total_l1; ++it) {
    Panel worst = queue.top();
    double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    queue.pop();
    auto left = eval(worst.a, mid), right = eval(mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.err + right.err - worst.err;
    total_l1 += left.l1 + right.l1 - worst.l1;
    queue.push(left);
    queue.push(right);
  }
  if (total_err > target(rel_tol) && total_err > 1e-15 * total_l1) {
    std::ostringstream os;
    os << "adaptive quadrature did not converge on [" << a << ", " << b << "]: error " << total_err;
    throw QuadratureFailure(os.str(), total_err);
  }
  return total;
}

EdgeProfile::EdgeProfile(HalfLineResolvent res, SourceFunction f, cplx q)
    : res_(res), f_(std::move(f)), q_(q) {
  p_ = boundary_derivative(res_, f_);
}

void EdgeProfile::pieces(double s, cplx& left, cplx& right) const {
  const cplx k = res_.sqrt_z;
  double end = f_.effective_end();
  auto bps = f_.breakpoints();
  left = integrate_complex([&](double t) { return std::exp(I * k * (s - t)) * f_(t); }, 0.0,
                           std::min(s, end), bps);
  right = s < end ? integrate_complex([&](double t) { return std::exp(I * k * (t - s)) * f_(t); },
                                      s, end, bps)
                  : cplx{0.0};
}

cplx EdgeProfile::value(double s) const {
  if (s < 0.0) throw ValidationError("edge coordinate must be >= 0");
  const cplx k = res_.sqrt_z;
  cplx e = std::exp(I * k * s);
  if (s == 0.0) return q_;
  cplx r0 = 0.0;
  if (!f_.is_zero()) {
    cplx left, right;
    pieces(s, left, right);
    // kernel (i/2k)(e^{ik|s-t|} - e^{ik(s+t)}); the second term integrates to e^{iks} p
    r0 = I / (2.0 * k) * (left + right - e * p_);
  }
  return r0 + q_ * e;
}

cplx EdgeProfile::derivative(double s) const {
  if (s < 0.0) throw ValidationError("edge coordinate must be >= 0");
  const cplx k = res_.sqrt_z;
  cplx e = std::exp(I * k * s);
  cplx d = 0.0;
  if (s == 0.0) {
    d = p_;
  } else if (!f_.is_zero()) {
    cplx left, right;
    pieces(s, left, right);
    d = -0.5 * (left - right - e * p_);
  }
  return d + I * k * q_ * e;
}

cplx half_line_apply(const HalfLineResolvent& res, const SourceFunction& f, double s) {
  return EdgeProfile(res, f).value(s);
}

cplx half_line_derivative(const HalfLineResolvent& res, const SourceFunction& f, double s) {
  return EdgeProfile(res, f).derivative(s);
}

cplx boundary_derivative(const HalfLineResolvent& res, const SourceFunction& f) {
  if (f.is_zero()) return 0.0;
  const cplx k = res.sqrt_z;
  return integrate_complex([&](double t) { return std::exp(I * k * t) * f(t); }, 0.0,
                            f.effective_end(), f.breakpoints());
}

}  // namespace wgl
