#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

namespace hvbk {

using Complex = std::complex<double>;

/// Real 3-vector (grid values, mean velocities, momenta).
struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double& operator[](int c) { return c == 0 ? x : (c == 1 ? y : z); }
  double operator[](int c) const { return c == 0 ? x : (c == 1 ? y : z); }

  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double a) { x *= a; y *= a; z *= a; return *this; }

  friend Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend Vec3 operator*(double a, Vec3 v) { return v *= a; }
  friend Vec3 operator*(Vec3 v, double a) { return v *= a; }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm_sq() const { return dot(*this); }
  double norm() const { return std::sqrt(norm_sq()); }
};

/// Complex 3-vector: one Fourier coefficient of a vector field.
using CVec3 = std::array<Complex, 3>;

/// Integer wavenumber on the truncated lattice, components in [-N, N].
struct WaveIndex {
  int k1 = 0, k2 = 0, k3 = 0;

  int operator[](int c) const { return c == 0 ? k1 : (c == 1 ? k2 : k3); }
  int norm_sq() const { return k1 * k1 + k2 * k2 + k3 * k3; }
  bool is_zero() const { return k1 == 0 && k2 == 0 && k3 == 0; }
  WaveIndex operator-() const { return {-k1, -k2, -k3}; }
  bool operator==(const WaveIndex&) const = default;
};

/// Node index on the uniform M^3 grid over [0, 2pi)^3.
struct GridIndex {
  int i1 = 0, i2 = 0, i3 = 0;
  bool operator==(const GridIndex&) const = default;
};

}  // namespace hvbk
