#pragma once

#include <cstdint>

#include "hvbk/spectral_core.hpp"

namespace hvbk {

/// Parameters of the analytic class G^{p/2}_sigma built on A = I - Laplacian:
/// Fourier weight (1+|k|^2)^{(p+r)/2} exp(sigma (1+|k|^2)^{1/2}). r is an
/// extra A-power (r = 1/2 gives the A^{1/4} multiplier).
struct GevreyParams {
  double p = 0.0;
  double sigma = 0.0;
  double r = 0.0;

  GevreyParams with_r(double rr) const { return {p, sigma, rr}; }
  GevreyParams with_sigma(double s) const { return {p, s, r}; }
  /// p >= 0, sigma >= 0 always; p > 5/2 additionally when strict is set.
  void validate(bool strict = false) const;
};

/// Floor parameters of the vorticity magnitude: initial floor m_i, evolution
/// floor m_f, Poincare constant C0, analyticity radius sigma0. The theorem
/// hypothesis 0 < 2 C0 sigma0 < m_f < m_i must hold.
struct VorticityFloorParams {
  double m_i = 1.0;
  double m_f = 0.5;
  double C0 = 1.0;
  double sigma0 = 0.1;

  void validate() const;
  double torque_budget() const { return 0.5 * (m_i - m_f); }
};

/// Squared Gevrey weight (1+|k|^2)^{p+r} e^{2 sigma (1+|k|^2)^{1/2}}.
/// Throws NumericalError when the exponent exceeds 700 (overflow), naming k.
double gevrey_weight_sq(const WaveIndex& k, const GevreyParams& gp);

/// Apply the Fourier multiplier (1+|k|^2)^{(p+r)/2} e^{sigma(1+|k|^2)^{1/2}}.
SpectralField apply_multiplier(const SpectralField& f, const GevreyParams& gp);

/// sqrt( sum_k |coeff(k)|^2 (1+|k|^2)^{p+r} e^{2 sigma (1+|k|^2)^{1/2}} ).
double gevrey_norm(const SpectralField& f, const GevreyParams& gp);

/// Real part of the weighted Hermitian pairing; gevrey_inner(f,f) = norm^2.
double gevrey_inner(const SpectralField& f, const SpectralField& g,
                    const GevreyParams& gp);

/// sum_k |coeff(k)| (Euclidean magnitude of the 3-vector per mode).
double wiener_norm(const SpectralField& f);

/// Exact integer factorial, n <= 20; NumericalError beyond.
std::int64_t exact_factorial(int n);

/// Ceiling with a snap-to-integer guard for integers stored as reals.
int ceil_index(double x);

/// Closed-form bound on ||A^{r/2} (1/|omega|)||_{G^{p/2}_sigma}:
///   e^{sigma0} + (ceil(p)+ceil(r))! / (m_f/2 - C0 sigma0)^{ceil(p)+ceil(r)+1}.
/// Requires beta = 2 C0 sigma0 / m_f < 1, else the series diverges.
double inv_mag_bound(double p, double r, const VorticityFloorParams& vf);

/// Nodewise 1/|omega(x)|, stored in the first component of the result.
/// Throws SingularityError with the offending node when min |omega| <= floor.
PhysicalField inv_mag_field(const PhysicalField& omega, double floor);

/// Truncated reciprocal norm: sample 1/|omega| on the oversample*(2N+1) grid,
/// analyze, truncate to N, take the Gevrey norm. An under-estimate of the
/// infinite-series norm (the exact norm is not finitely computable).
double truncated_reciprocal_norm(const SpectralField& omega, int oversample,
                                 double floor, const GevreyParams& gp);

}  // namespace hvbk
