#include "hvbk/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hvbk {

namespace {

constexpr double kTwoPiCubed = 8.0 * M_PI * M_PI * M_PI;

double l2_norm_sq_spectral(const SpectralField& f) { return f.sum_sq(); }

}  // namespace

EnergyBalance energy_balance(const FluidState& state, const Densities& d,
                             int oversample) {
  const SpectralField u_s = velocity_of(state, true);
  const SpectralField u_n = velocity_of(state, false);
  SpectralField v = u_n;
  v -= u_s;
  const FrictionResult fr =
      mutual_friction_detailed(state.omega_s, v, FrictionSettings{0.0, oversample});
  return {0.5 * d.rho_s * kTwoPiCubed * l2_norm_sq_spectral(u_s),
          0.5 * d.rho_n * kTwoPiCubed * l2_norm_sq_spectral(u_n),
          d.rho_s * d.rho_n * fr.dissipation_integral};
}

Vec3 total_momentum(const FluidState& state, const Densities& d) {
  return kTwoPiCubed * (d.rho_s * state.mean_u_s + d.rho_n * state.mean_u_n);
}

std::pair<double, double> gevrey_ledger(const FluidState& state, const GevreyParams& gp) {
  const double ns = gevrey_norm(state.omega_s, gp);
  const double nn = gevrey_norm(state.omega_n, gp);
  const GevreyParams quarter = gp.with_r(gp.r + 0.5);
  const double ys = gevrey_norm(state.omega_s, quarter);
  const double yn = gevrey_norm(state.omega_n, quarter);
  return {1.0 + ns * ns + nn * nn, ys * ys + yn * yn};
}

MeanBoundReport mean_velocity_bound_check(std::span<const DiagnosticsRecord> series,
                                          double horizon, const Densities& d) {
  if (series.empty()) throw PreconditionError("mean_velocity_bound_check: empty series");

  // sup_t ||v||_{l^2_k} from the recorded energies, sup ||omega_s||_G <= sqrt(X-1)
  double sup_v = 0.0, sup_omega = 0.0;
  for (const auto& r : series) {
    const double us = std::sqrt(2.0 * r.energy_s / (d.rho_s * kTwoPiCubed));
    const double un = std::sqrt(2.0 * r.energy_n / (d.rho_n * kTwoPiCubed));
    sup_v = std::max(sup_v, us + un);
    sup_omega = std::max(sup_omega, std::sqrt(std::max(0.0, r.X - 1.0)));
  }
  const double c_mean = std::max(d.rho_s, d.rho_n) * sup_v;

  MeanBoundReport report;
  report.c_mean = c_mean;
  report.min_slack = std::numeric_limits<double>::infinity();
  const Vec3 m_s0 = series.front().mean_u_s;
  const Vec3 m_n0 = series.front().mean_u_n;
  for (const auto& r : series) {
    if (r.t > horizon) break;
    for (int fluid = 0; fluid < 2; ++fluid) {
      const double lhs = fluid == 0 ? r.mean_u_s.norm() : r.mean_u_n.norm();
      const double base = fluid == 0 ? m_s0.norm() : m_n0.norm();
      const double rhs = base + c_mean * sup_omega * r.t;
      const double slack = rhs - lhs;
      report.max_slack = std::max(report.max_slack, slack);
      report.min_slack = std::min(report.min_slack, slack);
      if (slack < -1e-10) report.holds = false;
    }
  }
  return report;
}

double sigma_fit(const SpectralField& f) {
  const int n = f.truncation();
  const int max_shell = static_cast<int>(std::floor(std::sqrt(3.0) * n)) + 1;
  std::vector<double> best_mag(max_shell + 1, 0.0);
  std::vector<double> best_x(max_shell + 1, 0.0);

  f.for_each_mode([&](const WaveIndex& k, std::size_t) {
    if (k.is_zero()) return;
    const int ksq = k.norm_sq();
    const int shell = static_cast<int>(std::floor(std::sqrt(static_cast<double>(ksq))));
    const CVec3 v = f.vec(k);
    const double mag =
        std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
    if (mag > best_mag[shell]) {
      best_mag[shell] = mag;
      best_x[shell] = std::sqrt(1.0 + static_cast<double>(ksq));
    }
  });

  std::vector<double> xs, ys;
  for (int s = 0; s <= max_shell; ++s)
    if (best_mag[s] > 0.0) {
      xs.push_back(best_x[s]);
      ys.push_back(std::log(best_mag[s]));
    }
  if (xs.size() < 4)
    throw FitError("sigma_fit: needs at least 4 populated shells, found " +
                   std::to_string(xs.size()));

  const auto ols = [](const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sx += x[i];
      sy += y[i];
      sxx += x[i] * x[i];
      sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    return std::pair<double, double>{slope, intercept};
  };

  auto [slope, intercept] = ols(xs, ys);

  // One outlier-trim pass: low shells carried by O(1) coherent structures sit
  // far off the decay line and would bias the slope.
  std::vector<double> resid(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    resid[i] = ys[i] - (intercept + slope * xs[i]);
  std::vector<double> sorted = resid;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double med = sorted[sorted.size() / 2];
  for (auto& v : sorted) v = std::abs(v - med);
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double scale = 1.4826 * sorted[sorted.size() / 2];
  const double cut = std::max(5.0 * scale, 1e-6);

  std::vector<double> xs2, ys2;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (std::abs(resid[i] - med) <= cut) {
      xs2.push_back(xs[i]);
      ys2.push_back(ys[i]);
    }
  if (xs2.size() >= 3 && xs2.size() < xs.size())
    slope = ols(xs2, ys2).first;

  return -slope;
}

}  // namespace hvbk
