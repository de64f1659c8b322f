#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "hvbk/diagnostics.hpp"

namespace hvbk {

enum class Formulation { velocity, vorticity };

enum class StopReason { t1, t_max, floor, torque_budget };

std::string to_string(StopReason r);       // "T1", "TMAX", "T2", "TORQUE_BUDGET"
std::string to_string(Formulation f);
Formulation formulation_from_string(const std::string& s);

/// Fixed-step integrator controls.
struct RunControls {
  double dt = 0.0;     // 0 = auto (advective CFL heuristic)
  double t_max = 1.0;
  Formulation formulation = Formulation::vorticity;
  int oversample = 2;
  bool stop_on_floor = true;          // T2 stops the run
  bool stop_on_torque_budget = true;  // exhausted budget stops the run
  int snapshot_every = 0;             // steps; 0 = never
  std::string out_dir;                // where periodic snapshots land
};

/// The explicit existence-time constants: delta = 2 C X0 (1 + Ubar + T1) and
/// T1 = sigma0 / delta hold simultaneously (fixed point).
struct LedgerConstants {
  double C_ledger = 1.0;
  double X0 = 1.0;
  double Ubar = 0.0;
  double delta = 0.0;
  double T1 = 0.0;
};

/// Solve the fixed point: T1 is the positive root of
/// 2 C X0 T^2 + 2 C X0 (1+Ubar) T - sigma0 = 0 (stable quadratic formula).
LedgerConstants compute_ledger_constants(const FluidState& state0,
                                         const GevreyParams& gp, double c_ledger);

struct StepResult {
  FluidState state;
  double dissipation_increment;  // RK4-stage quadrature of the dissipation rate
};

/// Classical RK4 step of the selected formulation. The output is re-projected
/// (zero-mean, divergence-free, Hermitian). A floor breach in any stage throws
/// SingularityError and the step is rejected. Pass the RHS at the entry state
/// as k1 to avoid recomputing it (vorticity form only).
StepResult rk4_step(const FluidState& state, double dt, const Densities& d,
                    const RunControls& rc, double floor,
                    const VorticityRhs* k1 = nullptr);

struct RunResult {
  FluidState final_state;
  std::vector<DiagnosticsRecord> series;
  StopReason reason = StopReason::t_max;
  double t_stop = 0.0;
  // floor-crossing bracket (valid when reason == floor); width <= dt/100
  double t2_lower = std::nan("");
  double t2_upper = std::nan("");
  LedgerConstants ledger;
  bool sigma_floored = false;        // sigma(t) hit 0 during the run
  bool torque_budget_fired = false;  // monitor crossed (m_i - m_f)/2
  double torque_budget_fire_time = std::nan("");
};

/// March the Galerkin system with sigma(t) = max(sigma0 - delta t, 0),
/// recording one DiagnosticsRecord per accepted state, until the first of:
/// t >= min(T1, t_max); min |omega_s| < m_f (crossing time refined by
/// bisection to dt/100); the trapezoidal torque budget exceeding
/// (m_i - m_f)/2.
RunResult run(const FluidState& state0, const Densities& d, const GevreyParams& gp,
              const VorticityFloorParams& vf, const RunControls& rc,
              const LedgerConstants& lc);

}  // namespace hvbk
