#pragma once

#include <span>
#include <vector>

#include "hvbk/dynamics.hpp"

namespace hvbk {

/// Per-step ledger row. The CSV schema serializes exactly the columns
/// t .. sigma_fit; the trailing fields are in-memory diagnostics only.
struct DiagnosticsRecord {
  double t = 0.0;
  double energy_s = 0.0;
  double energy_n = 0.0;
  double dissipation_rate = 0.0;
  Vec3 momentum;
  double X = 1.0;
  double Y = 0.0;
  double sigma = 0.0;
  double min_vort = 0.0;
  Vec3 mean_u_s;
  Vec3 mean_u_n;
  double torque_budget_used = 0.0;
  double sigma_fit = 0.0;

  // not serialized
  double recip_norm = 0.0;           // truncated reciprocal norm of 1/|omega_s|
  double gevrey_rhs_inner = 0.0;     // <omega_s,domega_s>_G + <omega_n,domega_n>_G
  double balance_dissipation = 0.0;  // RK4-quadrature of the dissipation over
                                     // the step ending at this row
};

struct EnergyBalance {
  double energy_s;          // 0.5 rho_s ||u_s||_L2^2
  double energy_n;          // 0.5 rho_n ||u_n||_L2^2
  double dissipation_rate;  // rho_s rho_n * integral of the friction integrand
};

/// Energies by Parseval, dissipation by oversampled-grid quadrature (the
/// equal-weight grid sum is spectrally accurate on the torus).
EnergyBalance energy_balance(const FluidState& state, const Densities& d,
                             int oversample = 2);

/// (2pi)^3 (rho_s mean_u_s + rho_n mean_u_n); constant along exact dynamics.
Vec3 total_momentum(const FluidState& state, const Densities& d);

/// X = 1 + ||omega_s||^2 + ||omega_n||^2 in G^{p/2}_sigma; Y the same sums
/// with the extra A^{1/4} weight.
std::pair<double, double> gevrey_ledger(const FluidState& state, const GevreyParams& gp);

struct MeanBoundReport {
  bool holds = true;
  double max_slack = 0.0;  // worst-case RHS - LHS (positive = bound satisfied)
  double min_slack = 0.0;
  double c_mean = 0.0;
};

/// Check |mean_u(t)| <= |mean_u(0)| + C_mean * sup_t ||omega_s||_G * t along a
/// completed run, with C_mean from the Cauchy-Schwarz chain on the mean
/// equation (using recorded energies to bound ||v||).
MeanBoundReport mean_velocity_bound_check(std::span<const DiagnosticsRecord> series,
                                          double horizon, const Densities& d);

/// Least-squares decay-rate fit: log(shell-max |coeff|) against
/// -(1+|k|^2)^{1/2}, shells by floor(|k|), max-magnitude statistic, one
/// MAD-based outlier-trim pass. Needs at least 4 populated shells.
double sigma_fit(const SpectralField& f);

}  // namespace hvbk
