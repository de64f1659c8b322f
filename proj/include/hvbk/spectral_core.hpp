#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hvbk/errors.hpp"
#include "hvbk/types.hpp"

namespace hvbk {

/// Truncated Fourier representation of a real 3-vector field on [0,2pi]^3.
/// Stores the dense (2N+1)^3 coefficient cube per component, component-major,
/// with flat index ((k1+N)*E + (k2+N))*E + (k3+N), E = 2N+1. Hermitian
/// symmetry coeff(-k) = conj(coeff(k)) is stored redundantly and checked,
/// not exploited.
class SpectralField {
 public:
  explicit SpectralField(int truncation);

  int truncation() const noexcept { return n_; }
  int extent() const noexcept { return 2 * n_ + 1; }
  std::size_t cube_size() const noexcept { return cube_; }

  Complex& coeff(int c, int k1, int k2, int k3) {
    return data_[c * cube_ + flat(k1, k2, k3)];
  }
  const Complex& coeff(int c, int k1, int k2, int k3) const {
    return data_[c * cube_ + flat(k1, k2, k3)];
  }
  Complex& coeff(int c, const WaveIndex& k) { return coeff(c, k.k1, k.k2, k.k3); }
  const Complex& coeff(int c, const WaveIndex& k) const {
    return coeff(c, k.k1, k.k2, k.k3);
  }

  CVec3 vec(const WaveIndex& k) const {
    return {coeff(0, k), coeff(1, k), coeff(2, k)};
  }
  void set_vec(const WaveIndex& k, const CVec3& v) {
    for (int c = 0; c < 3; ++c) coeff(c, k) = v[c];
  }

  Complex* component(int c) { return data_.data() + c * cube_; }
  const Complex* component(int c) const { return data_.data() + c * cube_; }

  bool divergence_free() const noexcept { return div_free_; }
  void set_divergence_free(bool f) noexcept { div_free_ = f; }

  /// Visit every mode; F is called as f(WaveIndex, flat_index).
  template <class F>
  void for_each_mode(F&& f) const {
    const int n = n_;
    std::size_t i = 0;
    for (int k1 = -n; k1 <= n; ++k1)
      for (int k2 = -n; k2 <= n; ++k2)
        for (int k3 = -n; k3 <= n; ++k3, ++i) f(WaveIndex{k1, k2, k3}, i);
  }

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double a);
  /// this += a * o
  SpectralField& axpy(double a, const SpectralField& o);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double a, SpectralField f) { return f *= a; }

  /// max over modes of the coefficient 3-vector magnitude.
  double max_abs_coeff() const;
  /// sum over modes of |coeff|^2 (all components).
  double sum_sq() const;

  /// Enforce coeff(-k) = conj(coeff(k)) exactly by pairwise averaging.
  void hermitian_symmetrize();
  /// max_k |coeff(-k) - conj(coeff(k))|.
  double hermitian_defect() const;
  /// max_k |k . coeff(k)| (spectral divergence).
  double max_divergence() const;

 private:
  std::size_t flat(int k1, int k2, int k3) const {
    const int e = extent();
    return (static_cast<std::size_t>(k1 + n_) * e + (k2 + n_)) * e + (k3 + n_);
  }

  int n_;
  std::size_t cube_;
  bool div_free_ = false;
  std::vector<Complex> data_;
};

/// Real 3-vector samples on the uniform M^3 grid over [0,2pi)^3,
/// component-major, node index (i1*M + i2)*M + i3.
class PhysicalField {
 public:
  explicit PhysicalField(int grid_size);

  int grid_size() const noexcept { return m_; }
  std::size_t node_count() const noexcept { return nodes_; }

  double& value(int c, int i1, int i2, int i3) {
    return data_[c * nodes_ + flat(i1, i2, i3)];
  }
  double value(int c, int i1, int i2, int i3) const {
    return data_[c * nodes_ + flat(i1, i2, i3)];
  }
  Vec3 vec(int i1, int i2, int i3) const {
    const std::size_t i = flat(i1, i2, i3);
    return {data_[i], data_[nodes_ + i], data_[2 * nodes_ + i]};
  }

  double* component(int c) { return data_.data() + c * nodes_; }
  const double* component(int c) const { return data_.data() + c * nodes_; }

  GridIndex unflatten(std::size_t i) const {
    const int m = m_;
    return {static_cast<int>(i / (static_cast<std::size_t>(m) * m)),
            static_cast<int>((i / m) % m), static_cast<int>(i % m)};
  }

 private:
  std::size_t flat(int i1, int i2, int i3) const {
    return (static_cast<std::size_t>(i1) * m_ + i2) * m_ + i3;
  }

  int m_;
  std::size_t nodes_;
  std::vector<double> data_;
};

/// Smallest grid on which products of two radius-N fields are alias-free.
inline int dealias_grid_size(int n) { return 3 * n + 1; }
/// Grid used for the non-polynomial friction factor and floor scans.
inline int oversample_grid_size(int n, int oversample) {
  return oversample * (2 * n + 1);
}

/// Inverse Fourier synthesis on the M^3 grid; requires M >= 2N+1.
PhysicalField to_physical(const SpectralField& f, int grid_size);
/// Exact coefficients of the trigonometric interpolant, truncated to |k_i|<=N;
/// requires M >= 2N+1.
SpectralField to_spectral(const PhysicalField& g, int truncation);

/// Galerkin projection P^N': zero every coefficient with any |k_i| > N'.
/// The result keeps the input's cube dimensions.
SpectralField truncate(const SpectralField& f, int n_prime);

/// Leray projection: coeff(k) -= k (k.coeff)/|k|^2 for k != 0; the mean mode
/// is untouched (the projector is the identity there by convention).
SpectralField leray_project(const SpectralField& f);

/// Spectral curl i k x coeff(k); the mean mode is hard-zeroed.
SpectralField curl(const SpectralField& f);

/// Invert the curl: coeff(k) = (i k/|k|^2) x omega(k) for k != 0, mean mode
/// set to mean_u. Requires a zero mean-mode, divergence-free vorticity.
SpectralField velocity_from_vorticity(const SpectralField& omega, const Vec3& mean_u);

/// d/dx_axis as the multiplier i k_axis.
SpectralField derivative(const SpectralField& f, int axis);

/// Pointwise algebraic rule applied on a grid: value in, value out.
using CombineFn = std::function<Vec3(std::span<const Vec3>)>;

/// Synthesize the inputs on the M^3 grid, apply `combine` nodewise, analyze
/// back and truncate to `truncation`. Exact for polynomial rules of degree d
/// when M >= (d+1)*N + 1. Throws SingularityError if the rule produces a
/// non-finite value, carrying the offending node.
SpectralField pointwise_product_projected(std::span<const SpectralField* const> fs,
                                          const CombineFn& combine, int truncation,
                                          int grid_size);

// Scalar-component transform kernels shared across the library. `cube` holds
// extent^3 coefficients for one component; outputs are in grid/cube layouts
// matching SpectralField/PhysicalField.
std::vector<double> synthesize_scalar(const Complex* cube, int truncation, int grid_size);
void analyze_scalar(const double* grid, int grid_size, int truncation, Complex* cube_out);

/// Snapshot I/O, format HVBK1: {magic "HVBK1", u32 N, u32 M, u32 field count,
/// per-field u32 name length + bytes} then per field little-endian f64 (re,im)
/// pairs in row-major k-order (k1 slowest), components interleaved.
void write_snapshot(const std::string& path,
                    std::span<const std::pair<std::string, const SpectralField*>> fields,
                    int grid_size_metadata);
struct Snapshot {
  int truncation = 0;
  int grid_size = 0;
  std::vector<std::pair<std::string, SpectralField>> fields;
};
Snapshot read_snapshot(const std::string& path);

}  // namespace hvbk
