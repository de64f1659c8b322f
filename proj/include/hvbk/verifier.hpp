#pragma once

#include <cstdint>
#include <functional>
#include <limits>

#include "hvbk/gevrey.hpp"
#include "hvbk/rng.hpp"

namespace hvbk {

/// Fourier multiplier operator T: (Tf)^(k) = m(k) f^(k), with the growth
/// bound |m(k)| <= c |k| (which forces m(0) = 0).
struct MultiplierOp {
  std::function<Complex(const WaveIndex&)> symbol;
  double growth_bound = 1.0;

  /// Check |m(k)| <= growth_bound*|k| over the radius-N lattice.
  void validate(int truncation) const;
};

/// m(k) = |k|.
MultiplierOp gradient_magnitude_multiplier();

/// Apply a multiplier op spectrally.
SpectralField apply_multiplier_op(const SpectralField& f, const MultiplierOp& op);

/// Exact <prod_i f_i, Tg>_{G^{p/2}_sigma} by direct summation over all index
/// tuples with sum h_i + k = 0 (grouped as iterated exact convolutions; no
/// grids, no truncation of intermediates). The product is componentwise.
/// Cost guard: N <= 4.
double convolution_inner_product_oracle(std::span<const SpectralField* const> fs,
                                        const SpectralField& g, const MultiplierOp& op,
                                        const GevreyParams& gp);

enum class SpectrumModulus { gaussian, unit };

/// Random band-limited analytic field: per-mode amplitude
/// e^{-sigma_draw (1+|k|^2)^{1/2}} times a gaussian or unit-modulus complex
/// 3-vector, Hermitian by construction, optionally exactly divergence-free
/// (amplitudes drawn in the plane orthogonal to k).
SpectralField random_analytic_field(int truncation, double sigma_draw, RandomStream& rng,
                                    SpectrumModulus modulus, bool divergence_free);

struct LemmaReport {
  int K = 0;
  double p = 0.0;
  double sigma = 0.0;
  int trials = 0;
  double max_ratio = 0.0;
  double mean_ratio = 0.0;
  double frozen_bound = std::numeric_limits<double>::infinity();
  bool pass = true;
};

/// Draw `trials` random tuples (f_1..f_K, g), evaluate the multiplier inner
/// product by the oracle and the product-of-norms right side, and report the
/// worst LHS/RHS ratio. RHS = 0 with LHS != 0 throws (must never fire).
LemmaReport verify_nonlinear_estimate(int K, int trials, const GevreyParams& gp,
                                      std::uint64_t seed, int truncation = 3,
                                      double frozen_bound =
                                          std::numeric_limits<double>::infinity());

struct AppendixReport {
  int trials = 0;
  double p = 0.0;
  // worst bound/norm ratios (>= 1 means the bound holds) for r = 0 and r = 1/2
  double min_margin_r0 = std::numeric_limits<double>::infinity();
  double min_margin_r_half = std::numeric_limits<double>::infinity();
  // worst observed |FD^n(1/|omega|)| / (2^n n!/m^n) over n = 1..4
  double max_derivative_ratio = 0.0;
  double min_measured_floor = std::numeric_limits<double>::infinity();
  bool pass = true;
};

/// Draw nowhere-vanishing band-limited vorticities with measured floor
/// m >= vf.m_f (bounded redraws), check the truncated reciprocal Gevrey norm
/// against the closed-form bound for r in {0, 1/2}, and check n-th
/// finite-difference magnitudes of 1/|omega| along grid lines against
/// 2^n n!/m^n (10% tolerance) for n <= 4.
AppendixReport verify_inv_mag_bound(int trials, const VorticityFloorParams& vf,
                                    const GevreyParams& gp, std::uint64_t seed,
                                    int truncation = 4, int oversample = 2);

}  // namespace hvbk
