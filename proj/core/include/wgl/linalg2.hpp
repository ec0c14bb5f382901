#pragma once

// Fixed-size 2-vectors and 2x2 matrices with explicit formulas.

#include <array>
#include <cmath>
#include <complex>

namespace wgl {

using cplx = std::complex<double>;

struct Vec2 {
  cplx v[2]{};

  cplx& operator[](int i) { return v[i]; }
  const cplx& operator[](int i) const { return v[i]; }
};

struct Mat2 {
  cplx m[2][2]{};

  static Mat2 identity() {
    Mat2 r;
    r.m[0][0] = r.m[1][1] = 1.0;
    return r;
  }
  cplx& operator()(int i, int j) { return m[i][j]; }
  const cplx& operator()(int i, int j) const { return m[i][j]; }
};

inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {{a[0] + b[0], a[1] + b[1]}}; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {{a[0] - b[0], a[1] - b[1]}}; }
inline Vec2 operator*(cplx c, const Vec2& a) { return {{c * a[0], c * a[1]}}; }

inline Mat2 operator+(const Mat2& a, const Mat2& b) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.m[i][j] = a.m[i][j] + b.m[i][j];
  return r;
}
inline Mat2 operator-(const Mat2& a, const Mat2& b) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.m[i][j] = a.m[i][j] - b.m[i][j];
  return r;
}
inline Mat2 operator*(cplx c, const Mat2& a) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.m[i][j] = c * a.m[i][j];
  return r;
}
inline Mat2 operator*(const Mat2& a, const Mat2& b) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.m[i][j] = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j];
  return r;
}
inline Vec2 operator*(const Mat2& a, const Vec2& x) {
  return {{a.m[0][0] * x[0] + a.m[0][1] * x[1], a.m[1][0] * x[0] + a.m[1][1] * x[1]}};
}

inline cplx det(const Mat2& a) { return a.m[0][0] * a.m[1][1] - a.m[0][1] * a.m[1][0]; }
inline cplx trace(const Mat2& a) { return a.m[0][0] + a.m[1][1]; }

inline Mat2 transpose(const Mat2& a) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.m[i][j] = a.m[j][i];
  return r;
}

/// Euclidean norm.
inline double norm(const Vec2& a) { return std::hypot(std::abs(a[0]), std::abs(a[1])); }

/// Largest singular value, from the closed-form eigenvalues of A^H A.
inline double norm(const Mat2& a) {
  double fro2 = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) fro2 += std::norm(a.m[i][j]);
  double d = std::norm(det(a));
  double disc = std::max(0.0, fro2 * fro2 - 4.0 * d);
  return std::sqrt(0.5 * (fro2 + std::sqrt(disc)));
}

inline double max_abs(const Mat2& a) {
  double r = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r = std::max(r, std::abs(a.m[i][j]));
  return r;
}

/// Square root with Im >= 0 (the branch used for the half-line resolvent).
inline cplx sqrt_upper(cplx z) {
  cplx r = std::sqrt(z);
  if (r.imag() < 0.0 || (r.imag() == 0.0 && r.real() < 0.0)) r = -r;
  return r;
}

}  // namespace wgl
