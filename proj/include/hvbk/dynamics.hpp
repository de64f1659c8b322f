#pragma once

#include "hvbk/gevrey.hpp"
#include "hvbk/spectral_core.hpp"

namespace hvbk {

/// Constant density fractions of the two fluids, rho_s + rho_n = 1.
struct Densities {
  double rho_s;
  double rho_n;

  explicit Densities(double rho_superfluid)
      : rho_s(rho_superfluid), rho_n(1.0 - rho_superfluid) {
    if (!(rho_s > 0.0 && rho_s < 1.0))
      throw PreconditionError("Densities: rho_s must lie in (0,1)");
  }
};

/// Reformulated unknowns: both spectral vorticities (zero-mean, div-free)
/// plus the mean velocities of the two fluids.
struct FluidState {
  SpectralField omega_s;
  SpectralField omega_n;
  Vec3 mean_u_s;
  Vec3 mean_u_n;
  double t = 0.0;

  explicit FluidState(int truncation)
      : omega_s(truncation), omega_n(truncation) {}

  int truncation() const { return omega_s.truncation(); }
};

/// Knobs shared by every friction evaluation.
struct FrictionSettings {
  double floor = 0.0;  // stage guard on min |omega_s|
  int oversample = 2;  // friction grid = oversample * (2N+1)
};

/// One friction evaluation plus the grid statistics that fall out of it.
struct FrictionResult {
  SpectralField force;          // truncated (omega_s/|omega_s|) x (omega_s x v)
  double dissipation_integral;  // integral of |omega||v|^2 - (omega.v)^2/|omega|
  double min_abs_omega;
  GridIndex argmin;
};

FrictionResult mutual_friction_detailed(const SpectralField& omega_s,
                                        const SpectralField& v,
                                        const FrictionSettings& fs);

/// The mutual friction term, truncated to N. Pointwise F is orthogonal to
/// omega_s; that identity is checked on the grid to 1e-12.
SpectralField mutual_friction(const SpectralField& omega_s, const SpectralField& v,
                              double floor, int oversample);

struct VelocityRhs {
  SpectralField du_s;
  SpectralField du_n;
  double dissipation_rate;  // rho_s rho_n * friction dissipation integral
  double min_abs_omega;
  GridIndex argmin;
};

struct VorticityRhs {
  SpectralField domega_s;
  SpectralField domega_n;
  Vec3 dmean_s;
  Vec3 dmean_n;
  double dissipation_rate;
  double min_abs_omega;
  GridIndex argmin;
};

/// du = -P^N(u.grad u) -/+ rho P^N F. Friction is evaluated once and shared by
/// both equations, so rho_s du_s + rho_n du_n has an exactly zero mean mode.
VelocityRhs rhs_velocity_form(const FluidState& state, const Densities& d,
                              const FrictionSettings& fs);

/// domega = -P^N(u.grad omega) + P^N(omega.grad u) -/+ rho curl P^N F, and
/// dmean = -/+ rho * (k=0 coefficient of the projected friction).
VorticityRhs rhs_vorticity_form(const FluidState& state, const Densities& d,
                                const FrictionSettings& fs);

/// Minimum of |omega(x)| over the oversampled grid with its argmin. An upper
/// bound proxy for the true infimum.
std::pair<double, GridIndex> min_vorticity_magnitude(const SpectralField& omega,
                                                     int oversample);

/// ||T_s^N|| in G^{(p-1)/2}_sigma where T_s^N is the superfluid vorticity
/// tendency; feeds the integrator's running torque budget.
double torque_gevrey_norm(const FluidState& state, const Densities& d,
                          const GevreyParams& gp, const FrictionSettings& fs);

/// Velocity of one fluid reconstructed from its vorticity and mean.
SpectralField velocity_of(const FluidState& state, bool superfluid);
/// Counterflow v = u_n - u_s (mean difference lives in the k=0 mode).
SpectralField counterflow_velocity(const FluidState& state);

/// (a . grad) b, dealiased on the 3N+1 grid, truncated to N, mean mode zeroed
/// (its exact integral vanishes for div-free transporters).
SpectralField advection_term(const SpectralField& transporter,
                             const SpectralField& transported);

/// The shear vorticity (cos z, sin z, 0): |omega| == 1, curl of the steady
/// Beltrami-shear velocity (-cos z, -sin z, 0).
SpectralField beltrami_shear_vorticity(int truncation);

}  // namespace hvbk
