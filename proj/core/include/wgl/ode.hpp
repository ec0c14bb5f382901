#pragma once

// Adaptive Dormand-Prince 5(4) for y'' = -(V(s) + z) y with V = gamma^2/4,
// recording a dense quintic Hermite representation of y and y'.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>
#include <vector>

#include "wgl/errors.hpp"
#include "wgl/profile.hpp"

namespace wgl {

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-13;
  double h_min = 1e-12;
  std::size_t max_steps = 2'000'000;
};

/// Values y, y', y'', y''' at increasing mesh points. Interpolation is quintic
/// Hermite for y (data y, y', y'') and for y' (data y', y'', y''').
template <class T>
class HermiteRecord {
 public:
  std::vector<double> s;
  std::vector<T> y, dy, d2y, d3y;

  std::size_t size() const { return s.size(); }
  bool empty() const { return s.empty(); }
  double front() const { return s.front(); }
  double back() const { return s.back(); }

  T value(double x) const { return interp(x, y, dy, d2y); }
  T derivative(double x) const { return interp(x, dy, d2y, d3y); }
  /// Value at s[i] + t (s[i+1] - s[i]), t in [0,1], without a search.
  T value_on(std::size_t i, double t) const { return piece(i, t, y, dy, d2y); }

  void reverse() {
    std::reverse(s.begin(), s.end());
    std::reverse(y.begin(), y.end());
    std::reverse(dy.begin(), dy.end());
    std::reverse(d2y.begin(), d2y.end());
    std::reverse(d3y.begin(), d3y.end());
  }

  void scale(double c) {
    for (auto* v : {&y, &dy, &d2y, &d3y})
      for (auto& x : *v) x *= c;
  }

 private:
  T interp(double x, const std::vector<T>& f0, const std::vector<T>& f1,
           const std::vector<T>& f2) const {
    if (x <= s.front()) return f0.front() + (x - s.front()) * f1.front();
    if (x >= s.back()) return f0.back() + (x - s.back()) * f1.back();
    auto it = std::upper_bound(s.begin(), s.end(), x);
    std::size_t i = static_cast<std::size_t>(it - s.begin()) - 1;
    return piece(i, (x - s[i]) / (s[i + 1] - s[i]), f0, f1, f2);
  }

  T piece(std::size_t i, double t, const std::vector<T>& f0, const std::vector<T>& f1,
          const std::vector<T>& f2) const {
    if (t == 0.0) return f0[i];
    double h = s[i + 1] - s[i];
    double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    double H0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    double H1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    double H2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
    double H3 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    double H4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    double H5 = 0.5 * (t3 - 2.0 * t4 + t5);
    return H0 * f0[i] + (h * H1) * f1[i] + (h * h * H2) * f2[i] + H3 * f0[i + 1] +
           (h * H4) * f1[i + 1] + (h * h * H5) * f2[i + 1];
  }
};

namespace detail {

inline double abs_val(double x) { return std::abs(x); }
inline double abs_val(std::complex<double> x) { return std::abs(x); }

}  // namespace detail

/// Integrates y'' = -(gamma(s)^2/4 + z) y from s0 to s1 (either direction).
/// Returns the final (y, y'); fills `record` in integration order when given.
template <class T>
std::pair<T, T> integrate_vertex_ode(const CurvatureProfile& profile, T z, double s0, double s1,
                                     T y0, T dy0, const OdeOptions& opt,
                                     HermiteRecord<T>* record) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  auto coef = [&](double s) {
    auto j = profile.jet(s);
    return std::pair<T, double>{T(0.25 * j.g0 * j.g0) + z, 0.5 * j.g0 * j.g1};
  };
  // state (y, y'); derivative (y', -q y)
  struct State {
    T y, d;
  };
  auto rhs = [&](double s, const State& x) {
    T q = coef(s).first;
    return State{x.d, -q * x.y};
  };
  auto push = [&](double s, const State& x) {
    if (!record) return;
    auto [q, qp] = coef(s);
    record->s.push_back(s);
    record->y.push_back(x.y);
    record->dy.push_back(x.d);
    record->d2y.push_back(-q * x.y);
    record->d3y.push_back(-qp * x.y - q * x.d);
  };

  double span = s1 - s0;
  double dir = span >= 0 ? 1.0 : -1.0;
  double length = std::abs(span);
  State x{y0, dy0};
  push(s0, x);
  if (length == 0.0) return {x.y, x.d};

  double kscale = std::sqrt(std::max(1.0, detail::abs_val(z) + profile.potential_bound()));
  double h = std::min(length, 0.05 / kscale);
  double s = s0;
  State k1 = rhs(s, x);
  std::size_t steps = 0;
  while (dir * (s1 - s) > 0.0) {
    if (++steps > opt.max_steps) {
      std::ostringstream os;
      os << "integrator exceeded " << opt.max_steps << " steps at z=" << z;
      throw IntegratorFailure(os.str());
    }
    bool last = false;
    if (h >= dir * (s1 - s)) {
      h = dir * (s1 - s);
      last = true;
    }
    double hs = dir * h;
    auto add = [](const State& a, std::initializer_list<std::pair<double, const State*>> terms,
                  double hh) {
      State r = a;
      for (auto& [c, k] : terms) {
        r.y += (hh * c) * k->y;
        r.d += (hh * c) * k->d;
      }
      return r;
    };
    State k2 = rhs(s + c2 * hs, add(x, {{a21, &k1}}, hs));
    State k3 = rhs(s + c3 * hs, add(x, {{a31, &k1}, {a32, &k2}}, hs));
    State k4 = rhs(s + c4 * hs, add(x, {{a41, &k1}, {a42, &k2}, {a43, &k3}}, hs));
    State k5 = rhs(s + c5 * hs, add(x, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, hs));
    State k6 = rhs(s + hs,
                   add(x, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}, hs));
    State xn = add(x, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}}, hs);
    double s_next = last ? s1 : s + hs;
    State k7 = rhs(s_next, xn);
    T ey = hs * (e1 * k1.y + e3 * k3.y + e4 * k4.y + e5 * k5.y + e6 * k6.y + e7 * k7.y);
    T ed = hs * (e1 * k1.d + e3 * k3.d + e4 * k4.d + e5 * k5.d + e6 * k6.d + e7 * k7.d);
    double sy = opt.atol + opt.rtol * std::max(detail::abs_val(x.y), detail::abs_val(xn.y));
    double sd = opt.atol + opt.rtol * std::max(detail::abs_val(x.d), detail::abs_val(xn.d));
    double err = std::max(detail::abs_val(ey) / sy, detail::abs_val(ed) / sd);
    if (err <= 1.0) {
      s = s_next;
      x = xn;
      k1 = k7;
      push(s, x);
      if (last) break;
    }
    double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= factor;
    if (h < opt.h_min) {
      std::ostringstream os;
      os << "integrator step underflow at s=" << s << ", z=" << z;
      throw IntegratorFailure(os.str());
    }
  }
  return {x.y, x.d};
}

}  // namespace wgl
