#include "hvbk/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>

namespace hvbk {

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::t1: return "T1";
    case StopReason::t_max: return "TMAX";
    case StopReason::floor: return "T2";
    case StopReason::torque_budget: return "TORQUE_BUDGET";
  }
  return "?";
}

std::string to_string(Formulation f) {
  return f == Formulation::velocity ? "velocity" : "vorticity";
}

Formulation formulation_from_string(const std::string& s) {
  if (s == "velocity") return Formulation::velocity;
  if (s == "vorticity") return Formulation::vorticity;
  throw PreconditionError("unknown formulation '" + s + "' (velocity|vorticity)");
}

LedgerConstants compute_ledger_constants(const FluidState& state0,
                                         const GevreyParams& gp, double c_ledger) {
  if (!(c_ledger > 0.0))
    throw PreconditionError("compute_ledger_constants: C_ledger > 0 required");
  const GevreyParams base{gp.p, gp.sigma, 0.0};
  const double ns = gevrey_norm(state0.omega_s, base);
  const double nn = gevrey_norm(state0.omega_n, base);
  const double x0 = 1.0 + ns * ns + nn * nn;
  if (!std::isfinite(x0))
    throw NumericalError("compute_ledger_constants: non-finite initial Gevrey norm");
  const double ubar = state0.mean_u_s.norm() + state0.mean_u_n.norm();

  const double sigma0 = gp.sigma;
  const double a = 2.0 * c_ledger * x0;
  const double b = a * (1.0 + ubar);
  // positive root of a T^2 + b T - sigma0 = 0, cancellation-free form
  const double t1 = sigma0 > 0.0 ? 2.0 * sigma0 / (b + std::sqrt(b * b + 4.0 * a * sigma0))
                                 : 0.0;
  const double delta = 2.0 * c_ledger * x0 * (1.0 + ubar + t1);
  return {c_ledger, x0, ubar, delta, t1};
}

namespace {

FluidState state_from_velocities(const SpectralField& u_s, const SpectralField& u_n,
                                 double t) {
  FluidState s(u_s.truncation());
  s.omega_s = curl(u_s);
  s.omega_n = curl(u_n);
  const CVec3 ms = u_s.vec(WaveIndex{});
  const CVec3 mn = u_n.vec(WaveIndex{});
  s.mean_u_s = {ms[0].real(), ms[1].real(), ms[2].real()};
  s.mean_u_n = {mn[0].real(), mn[1].real(), mn[2].real()};
  s.t = t;
  return s;
}

void clean_vorticity(SpectralField& omega) {
  omega.set_vec(WaveIndex{}, CVec3{});
  omega = leray_project(omega);
  omega.hermitian_symmetrize();
}

FluidState advance_vorticity(const FluidState& base, double h, const VorticityRhs& k) {
  FluidState s = base;
  s.omega_s.axpy(h, k.domega_s);
  s.omega_n.axpy(h, k.domega_n);
  s.mean_u_s += h * k.dmean_s;
  s.mean_u_n += h * k.dmean_n;
  s.t = base.t + h;
  return s;
}

StepResult rk4_step_vorticity(const FluidState& state, double dt, const Densities& d,
                              const FrictionSettings& fs, const VorticityRhs* k1_opt) {
  std::optional<VorticityRhs> k1_own;
  if (!k1_opt) k1_own = rhs_vorticity_form(state, d, fs);
  const VorticityRhs& k1 = k1_opt ? *k1_opt : *k1_own;

  const VorticityRhs k2 = rhs_vorticity_form(advance_vorticity(state, 0.5 * dt, k1), d, fs);
  const VorticityRhs k3 = rhs_vorticity_form(advance_vorticity(state, 0.5 * dt, k2), d, fs);
  const VorticityRhs k4 = rhs_vorticity_form(advance_vorticity(state, dt, k3), d, fs);

  FluidState next = state;
  const double w = dt / 6.0;
  next.omega_s.axpy(w, k1.domega_s).axpy(2.0 * w, k2.domega_s)
      .axpy(2.0 * w, k3.domega_s).axpy(w, k4.domega_s);
  next.omega_n.axpy(w, k1.domega_n).axpy(2.0 * w, k2.domega_n)
      .axpy(2.0 * w, k3.domega_n).axpy(w, k4.domega_n);
  next.mean_u_s += w * k1.dmean_s + (2.0 * w) * k2.dmean_s + (2.0 * w) * k3.dmean_s +
                   w * k4.dmean_s;
  next.mean_u_n += w * k1.dmean_n + (2.0 * w) * k2.dmean_n + (2.0 * w) * k3.dmean_n +
                   w * k4.dmean_n;
  next.t = state.t + dt;
  clean_vorticity(next.omega_s);
  clean_vorticity(next.omega_n);

  const double diss = w * (k1.dissipation_rate + 2.0 * k2.dissipation_rate +
                           2.0 * k3.dissipation_rate + k4.dissipation_rate);
  return {std::move(next), diss};
}

StepResult rk4_step_velocity(const FluidState& state, double dt, const Densities& d,
                             const FrictionSettings& fs) {
  const SpectralField u_s0 = velocity_of(state, true);
  const SpectralField u_n0 = velocity_of(state, false);

  auto rhs_at = [&](const SpectralField& us, const SpectralField& un, double t) {
    return rhs_velocity_form(state_from_velocities(us, un, t), d, fs);
  };
  auto advanced = [&](const SpectralField& base, double h, const SpectralField& k) {
    SpectralField out = base;
    out.axpy(h, k);
    return out;
  };

  const double t = state.t;
  const VelocityRhs k1 = rhs_at(u_s0, u_n0, t);
  const VelocityRhs k2 = rhs_at(advanced(u_s0, 0.5 * dt, k1.du_s),
                                advanced(u_n0, 0.5 * dt, k1.du_n), t + 0.5 * dt);
  const VelocityRhs k3 = rhs_at(advanced(u_s0, 0.5 * dt, k2.du_s),
                                advanced(u_n0, 0.5 * dt, k2.du_n), t + 0.5 * dt);
  const VelocityRhs k4 = rhs_at(advanced(u_s0, dt, k3.du_s),
                                advanced(u_n0, dt, k3.du_n), t + dt);

  const double w = dt / 6.0;
  SpectralField u_s = u_s0;
  u_s.axpy(w, k1.du_s).axpy(2.0 * w, k2.du_s).axpy(2.0 * w, k3.du_s).axpy(w, k4.du_s);
  SpectralField u_n = u_n0;
  u_n.axpy(w, k1.du_n).axpy(2.0 * w, k2.du_n).axpy(2.0 * w, k3.du_n).axpy(w, k4.du_n);

  u_s = leray_project(u_s);
  u_n = leray_project(u_n);
  u_s.hermitian_symmetrize();
  u_n.hermitian_symmetrize();

  FluidState next = state_from_velocities(u_s, u_n, t + dt);
  clean_vorticity(next.omega_s);
  clean_vorticity(next.omega_n);

  const double diss = w * (k1.dissipation_rate + 2.0 * k2.dissipation_rate +
                           2.0 * k3.dissipation_rate + k4.dissipation_rate);
  return {std::move(next), diss};
}

}  // namespace

StepResult rk4_step(const FluidState& state, double dt, const Densities& d,
                    const RunControls& rc, double floor, const VorticityRhs* k1) {
  if (!(dt > 0.0)) throw PreconditionError("rk4_step: dt > 0 required");
  const FrictionSettings fs{floor, rc.oversample};
  if (rc.formulation == Formulation::vorticity)
    return rk4_step_vorticity(state, dt, d, fs, k1);
  return rk4_step_velocity(state, dt, d, fs);
}

namespace {

double auto_dt(const FluidState& state, int oversample, double t_max) {
  const int n = state.truncation();
  const int m = oversample_grid_size(n, oversample);
  double speed = 0.0;
  for (bool super : {true, false}) {
    const PhysicalField g = to_physical(velocity_of(state, super), m);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      const double s = g.component(0)[i] * g.component(0)[i] +
                       g.component(1)[i] * g.component(1)[i] +
                       g.component(2)[i] * g.component(2)[i];
      speed = std::max(speed, s);
    }
  }
  speed = std::sqrt(speed);
  const double h = 2.0 * M_PI / (2 * n + 1);
  if (speed < 1e-12) return std::min(0.1, t_max / 10.0);
  return 0.5 * h / speed;
}

}  // namespace

RunResult run(const FluidState& state0, const Densities& d, const GevreyParams& gp,
              const VorticityFloorParams& vf, const RunControls& rc_in,
              const LedgerConstants& lc) {
  vf.validate();
  RunControls rc = rc_in;
  if (rc.dt <= 0.0) rc.dt = auto_dt(state0, rc.oversample, rc.t_max);
  if (!(rc.t_max > 0.0)) throw PreconditionError("run: t_max > 0 required");

  const auto [min0, arg0] = min_vorticity_magnitude(state0.omega_s, rc.oversample);
  if (min0 + 1e-9 * std::max(1.0, vf.m_i) < vf.m_i)
    throw PreconditionError("run: inf |omega_s^0| = " + std::to_string(min0) +
                            " < m_i = " + std::to_string(vf.m_i) +
                            " (initial floor hypothesis violated)");
  if (!(vf.sigma0 < vf.m_i / (2.0 * vf.C0)))
    throw PreconditionError("run: 0 < sigma0 < m_i/(2 C0) required");

  const double sigma0 = vf.sigma0;
  const double stop_t = std::min(lc.T1, rc.t_max);
  const double budget = vf.torque_budget();
  const double stage_floor = rc.stop_on_floor ? vf.m_f : 1e-10;
  const FrictionSettings fs{stage_floor, rc.oversample};
  const double tol = 1e-9 * std::max(rc.dt, 1.0);

  RunResult result{FluidState(state0.truncation()), {}, StopReason::t_max, 0.0,
                   std::nan(""), std::nan(""), lc, false, false, std::nan("")};

  FluidState state = state0;
  double budget_used = 0.0;
  double prev_torque = 0.0;
  double last_step_diss = 0.0;
  double last_step_h = 0.0;
  std::size_t step_index = 0;

  auto record_state = [&](const FluidState& s, const VorticityRhs& bundle,
                          double torque) {
    const double sigma = std::max(sigma0 - lc.delta * s.t, 0.0);
    if (sigma == 0.0 && sigma0 > 0.0) result.sigma_floored = true;
    const GevreyParams gp_t{gp.p, sigma, 0.0};

    DiagnosticsRecord r;
    r.t = s.t;
    const SpectralField u_s = velocity_of(s, true);
    const SpectralField u_n = velocity_of(s, false);
    const double two_pi_cubed = 8.0 * M_PI * M_PI * M_PI;
    r.energy_s = 0.5 * d.rho_s * two_pi_cubed * u_s.sum_sq();
    r.energy_n = 0.5 * d.rho_n * two_pi_cubed * u_n.sum_sq();
    r.dissipation_rate = bundle.dissipation_rate;
    r.momentum = total_momentum(s, d);
    std::tie(r.X, r.Y) = gevrey_ledger(s, gp_t);
    r.sigma = sigma;
    r.min_vort = bundle.min_abs_omega;
    r.mean_u_s = s.mean_u_s;
    r.mean_u_n = s.mean_u_n;
    r.torque_budget_used = budget_used;
    try {
      r.sigma_fit = sigma_fit(s.omega_s);
    } catch (const FitError&) {
      r.sigma_fit = std::nan("");
    }
    try {
      r.recip_norm = truncated_reciprocal_norm(s.omega_s, rc.oversample, 1e-12, gp_t);
    } catch (const Error&) {
      r.recip_norm = std::nan("");
    }
    r.gevrey_rhs_inner = gevrey_inner(s.omega_s, bundle.domega_s, gp_t) +
                         gevrey_inner(s.omega_n, bundle.domega_n, gp_t);
    r.balance_dissipation = last_step_diss;
    result.series.push_back(r);
  };

  auto maybe_snapshot = [&](const FluidState& s) {
    if (rc.snapshot_every <= 0 || rc.out_dir.empty()) return;
    if (step_index % static_cast<std::size_t>(rc.snapshot_every) != 0) return;
    char name[32];
    std::snprintf(name, sizeof name, "snap_%06zu.hvbk", step_index);
    const SpectralField u_s = velocity_of(s, true);
    const SpectralField u_n = velocity_of(s, false);
    const std::pair<std::string, const SpectralField*> fields[] = {{"u_s", &u_s},
                                                                   {"u_n", &u_n}};
    std::filesystem::create_directories(rc.out_dir);
    write_snapshot(rc.out_dir + "/" + name, fields,
                   oversample_grid_size(s.truncation(), rc.oversample));
  };

  while (true) {
    VorticityRhs bundle = rhs_vorticity_form(state, d, fs);
    const double torque =
        gevrey_norm(bundle.domega_s,
                    GevreyParams{gp.p - 1.0,
                                 std::max(sigma0 - lc.delta * state.t, 0.0), 0.0});
    if (step_index > 0) budget_used += 0.5 * last_step_h * (prev_torque + torque);
    if (!result.torque_budget_fired && budget_used > budget) {
      result.torque_budget_fired = true;
      result.torque_budget_fire_time = state.t;
    }

    record_state(state, bundle, torque);
    maybe_snapshot(state);

    if (rc.stop_on_torque_budget && budget_used > budget) {
      result.reason = StopReason::torque_budget;
      break;
    }
    if (state.t >= stop_t - tol) {
      result.reason = lc.T1 <= rc.t_max ? StopReason::t1 : StopReason::t_max;
      break;
    }

    // advance one step; a floor breach in any stage rejects the step
    std::optional<StepResult> next;
    bool crossed = false;
    try {
      next = rk4_step(state, rc.dt, d, rc, stage_floor, &bundle);
      if (rc.stop_on_floor) {
        const auto [mv, mv_arg] = min_vorticity_magnitude(next->state.omega_s,
                                                          rc.oversample);
        crossed = mv < vf.m_f;
      }
    } catch (const SingularityError&) {
      crossed = true;
    }

    if (crossed && rc.stop_on_floor) {
      // bisect the crossing time to dt/100 within [t, t+dt]
      double h_lo = 0.0, h_hi = rc.dt;
      std::optional<StepResult> at_lo;
      auto trial = [&](double h) -> std::optional<StepResult> {
        try {
          StepResult sr = rk4_step(state, h, d, rc, stage_floor, &bundle);
          const auto [mv, mv_arg] =
              min_vorticity_magnitude(sr.state.omega_s, rc.oversample);
          if (mv < vf.m_f) return std::nullopt;
          return sr;
        } catch (const SingularityError&) {
          return std::nullopt;
        }
      };
      int iter = 0;
      while (h_hi - h_lo > rc.dt / 100.0 && iter++ < 64) {
        const double h = 0.5 * (h_lo + h_hi);
        if (auto sr = trial(h)) {
          h_lo = h;
          at_lo = std::move(sr);
        } else {
          h_hi = h;
        }
      }
      result.t2_lower = state.t + h_lo;
      result.t2_upper = state.t + h_hi;
      if (at_lo) {
        last_step_diss = at_lo->dissipation_increment;
        last_step_h = h_lo;
        state = std::move(at_lo->state);
        bundle = rhs_vorticity_form(state, d, fs);
        const double torque_end =
            gevrey_norm(bundle.domega_s,
                        GevreyParams{gp.p - 1.0,
                                     std::max(sigma0 - lc.delta * state.t, 0.0), 0.0});
        budget_used += 0.5 * h_lo * (torque + torque_end);
        if (!result.torque_budget_fired && budget_used > budget) {
          result.torque_budget_fired = true;
          result.torque_budget_fire_time = state.t;
        }
        record_state(state, bundle, torque_end);
      }
      result.reason = StopReason::floor;
      break;
    }

    prev_torque = torque;
    last_step_diss = next->dissipation_increment;
    last_step_h = rc.dt;
    state = std::move(next->state);
    ++step_index;
  }

  result.final_state = std::move(state);
  result.t_stop = result.final_state.t;
  return result;
}

}  // namespace hvbk
