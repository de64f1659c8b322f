#include "hvbk/dynamics.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace hvbk {

namespace {

Vec3 real_mean_mode(const SpectralField& f) {
  const CVec3 m = f.vec(WaveIndex{});
  return {m[0].real(), m[1].real(), m[2].real()};
}

}  // namespace

SpectralField velocity_of(const FluidState& state, bool superfluid) {
  return velocity_from_vorticity(superfluid ? state.omega_s : state.omega_n,
                                 superfluid ? state.mean_u_s : state.mean_u_n);
}

SpectralField counterflow_velocity(const FluidState& state) {
  SpectralField v = velocity_of(state, false);
  v -= velocity_of(state, true);
  return v;
}

SpectralField advection_term(const SpectralField& transporter,
                             const SpectralField& transported) {
  const int n = transporter.truncation();
  const int m = dealias_grid_size(n);

  // u_j and d_j b_i on the dealiasing grid
  std::vector<std::vector<double>> u(3), grad(9);
  for (int j = 0; j < 3; ++j)
    u[j] = synthesize_scalar(transporter.component(j), n, m);
  for (int i = 0; i < 3; ++i) {
    const SpectralField db = derivative(transported, i);
    for (int c = 0; c < 3; ++c)
      grad[3 * c + i] = synthesize_scalar(db.component(c), n, m);
  }

  const std::size_t nodes = u[0].size();
  std::vector<double> out[3];
  for (int c = 0; c < 3; ++c) {
    out[c].resize(nodes);
    const double* g0 = grad[3 * c + 0].data();
    const double* g1 = grad[3 * c + 1].data();
    const double* g2 = grad[3 * c + 2].data();
    for (std::size_t i = 0; i < nodes; ++i)
      out[c][i] = u[0][i] * g0[i] + u[1][i] * g1[i] + u[2][i] * g2[i];
  }

  SpectralField result(n);
  for (int c = 0; c < 3; ++c)
    analyze_scalar(out[c].data(), m, n, result.component(c));
  result.set_vec(WaveIndex{}, CVec3{});
  return result;
}

FrictionResult mutual_friction_detailed(const SpectralField& omega_s,
                                        const SpectralField& v,
                                        const FrictionSettings& fs) {
  const int n = omega_s.truncation();
  if (v.truncation() != n)
    throw PreconditionError("mutual_friction: omega_s and v must share N");
  const int m = oversample_grid_size(n, fs.oversample);

  const PhysicalField wg = to_physical(omega_s, m);
  const PhysicalField vg = to_physical(v, m);

  const std::size_t nodes = wg.node_count();
  std::vector<double> f0(nodes), f1(nodes), f2(nodes);
  double dissipation = 0.0;
  double min_mag = std::numeric_limits<double>::infinity();
  std::size_t argmin_flat = 0;

  const double* w[3] = {wg.component(0), wg.component(1), wg.component(2)};
  const double* vv[3] = {vg.component(0), vg.component(1), vg.component(2)};

  for (std::size_t i = 0; i < nodes; ++i) {
    const Vec3 omega{w[0][i], w[1][i], w[2][i]};
    const Vec3 vel{vv[0][i], vv[1][i], vv[2][i]};
    const double mag = omega.norm();
    if (mag < min_mag) {
      min_mag = mag;
      argmin_flat = i;
    }
    if (!(mag > fs.floor))
      throw SingularityError("mutual_friction: vorticity floor breached, |omega| = " +
                                 std::to_string(mag) + " <= " + std::to_string(fs.floor),
                             wg.unflatten(i), mag);
    const Vec3 cross = omega.cross(vel);
    const Vec3 force = (1.0 / mag) * omega.cross(cross);
    f0[i] = force.x;
    f1[i] = force.y;
    f2[i] = force.z;

    // triple product identity F . omega = 0, checked nodewise
    const double ortho = std::abs(force.dot(omega));
    if (ortho > 1e-12 * std::max(1.0, force.norm() * mag))
      throw NumericalError("mutual_friction: F.omega orthogonality defect " +
                           std::to_string(ortho));

    const double integrand = mag * vel.norm_sq() - (omega.dot(vel) / mag) * omega.dot(vel);
    if (integrand < -1e-12 * std::max(1.0, mag * vel.norm_sq()))
      throw NumericalError("mutual_friction: dissipation integrand negative: " +
                           std::to_string(integrand));
    dissipation += integrand;
  }

  const double cell = 2.0 * M_PI / m;
  dissipation *= cell * cell * cell;

  FrictionResult result{SpectralField(n), dissipation, min_mag, wg.unflatten(argmin_flat)};
  analyze_scalar(f0.data(), m, n, result.force.component(0));
  analyze_scalar(f1.data(), m, n, result.force.component(1));
  analyze_scalar(f2.data(), m, n, result.force.component(2));
  return result;
}

SpectralField mutual_friction(const SpectralField& omega_s, const SpectralField& v,
                              double floor, int oversample) {
  return mutual_friction_detailed(omega_s, v, FrictionSettings{floor, oversample}).force;
}

VelocityRhs rhs_velocity_form(const FluidState& state, const Densities& d,
                              const FrictionSettings& fs) {
  const SpectralField u_s = velocity_of(state, true);
  const SpectralField u_n = velocity_of(state, false);
  SpectralField v = u_n;
  v -= u_s;

  FrictionResult fr = mutual_friction_detailed(state.omega_s, v, fs);

  SpectralField rhs_s = advection_term(u_s, u_s);
  rhs_s *= -1.0;
  rhs_s.axpy(-d.rho_n, fr.force);
  SpectralField rhs_n = advection_term(u_n, u_n);
  rhs_n *= -1.0;
  rhs_n.axpy(d.rho_s, fr.force);

  VelocityRhs out{leray_project(rhs_s), leray_project(rhs_n),
                  d.rho_s * d.rho_n * fr.dissipation_integral, fr.min_abs_omega,
                  fr.argmin};
  return out;
}

VorticityRhs rhs_vorticity_form(const FluidState& state, const Densities& d,
                                const FrictionSettings& fs) {
  const SpectralField u_s = velocity_of(state, true);
  const SpectralField u_n = velocity_of(state, false);
  SpectralField v = u_n;
  v -= u_s;

  FrictionResult fr = mutual_friction_detailed(state.omega_s, v, fs);
  const SpectralField curl_f = curl(fr.force);
  const Vec3 f0 = real_mean_mode(fr.force);

  // convective + stretching split, exactly as the reformulated system writes it
  SpectralField d_s = advection_term(state.omega_s, u_s);   // (omega.grad) u
  d_s -= advection_term(u_s, state.omega_s);                // -(u.grad) omega
  d_s.axpy(-d.rho_n, curl_f);
  SpectralField d_n = advection_term(state.omega_n, u_n);
  d_n -= advection_term(u_n, state.omega_n);
  d_n.axpy(d.rho_s, curl_f);

  VorticityRhs out{leray_project(d_s), leray_project(d_n),
                   (-d.rho_n) * f0, d.rho_s * f0,
                   d.rho_s * d.rho_n * fr.dissipation_integral,
                   fr.min_abs_omega, fr.argmin};
  out.domega_s.set_vec(WaveIndex{}, CVec3{});
  out.domega_n.set_vec(WaveIndex{}, CVec3{});
  return out;
}

std::pair<double, GridIndex> min_vorticity_magnitude(const SpectralField& omega,
                                                     int oversample) {
  const int m = oversample_grid_size(omega.truncation(), oversample);
  const PhysicalField grid = to_physical(omega, m);
  const double* w[3] = {grid.component(0), grid.component(1), grid.component(2)};
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t i = 0; i < grid.node_count(); ++i) {
    const double mag_sq = w[0][i] * w[0][i] + w[1][i] * w[1][i] + w[2][i] * w[2][i];
    if (mag_sq < best) {
      best = mag_sq;
      arg = i;
    }
  }
  return {std::sqrt(best), grid.unflatten(arg)};
}

SpectralField beltrami_shear_vorticity(int truncation) {
  if (truncation < 1)
    throw PreconditionError("beltrami_shear_vorticity: needs N >= 1");
  SpectralField omega(truncation);
  // cos z = (e^{iz} + e^{-iz})/2, sin z = (e^{iz} - e^{-iz})/(2i)
  omega.set_vec({0, 0, 1}, {Complex{0.5, 0.0}, Complex{0.0, -0.5}, Complex{0.0, 0.0}});
  omega.set_vec({0, 0, -1}, {Complex{0.5, 0.0}, Complex{0.0, 0.5}, Complex{0.0, 0.0}});
  omega.set_divergence_free(true);
  return omega;
}

double torque_gevrey_norm(const FluidState& state, const Densities& d,
                          const GevreyParams& gp, const FrictionSettings& fs) {
  if (gp.p < 1.0)
    throw PreconditionError("torque_gevrey_norm: needs p >= 1 for the G^{(p-1)/2} norm");
  const VorticityRhs rhs = rhs_vorticity_form(state, d, fs);
  return gevrey_norm(rhs.domega_s, GevreyParams{gp.p - 1.0, gp.sigma, 0.0});
}

}  // namespace hvbk
