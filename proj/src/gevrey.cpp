#include "hvbk/gevrey.hpp"

#include <array>
#include <cmath>
#include <string>

namespace hvbk {

namespace {

constexpr double kOverflowExponent = 700.0;

double weight_sq(int ksq, const GevreyParams& gp, const WaveIndex& k) {
  const double one_ksq = 1.0 + static_cast<double>(ksq);
  const double arg = gp.sigma * std::sqrt(one_ksq);
  if (arg > kOverflowExponent)
    throw NumericalError("gevrey weight overflow at k=(" + std::to_string(k.k1) + "," +
                         std::to_string(k.k2) + "," + std::to_string(k.k3) +
                         "): sigma*(1+|k|^2)^(1/2) = " + std::to_string(arg) + " > 700");
  return std::pow(one_ksq, gp.p + gp.r) * std::exp(2.0 * arg);
}

}  // namespace

double gevrey_weight_sq(const WaveIndex& k, const GevreyParams& gp) {
  return weight_sq(k.norm_sq(), gp, k);
}

void GevreyParams::validate(bool strict) const {
  if (p < 0.0 || sigma < 0.0 || r < 0.0)
    throw PreconditionError("GevreyParams: p, sigma, r must be non-negative");
  if (strict && !(p > 2.5))
    throw PreconditionError("GevreyParams: strict mode requires p > 5/2");
}

void VorticityFloorParams::validate() const {
  if (!(C0 > 0.0)) throw PreconditionError("VorticityFloorParams: C0 > 0 required");
  if (!(sigma0 > 0.0))
    throw PreconditionError("VorticityFloorParams: sigma0 > 0 required");
  if (!(2.0 * C0 * sigma0 < m_f))
    throw PreconditionError("VorticityFloorParams: 2*C0*sigma0 < m_f required");
  if (!(m_f < m_i)) throw PreconditionError("VorticityFloorParams: m_f < m_i required");
}

SpectralField apply_multiplier(const SpectralField& f, const GevreyParams& gp) {
  SpectralField out = f;
  out.for_each_mode([&](const WaveIndex& k, std::size_t) {
    const double w = std::sqrt(weight_sq(k.norm_sq(), gp, k));
    CVec3 v = out.vec(k);
    for (int c = 0; c < 3; ++c) v[c] *= w;
    out.set_vec(k, v);
  });
  return out;
}

double gevrey_norm(const SpectralField& f, const GevreyParams& gp) {
  double s = 0.0;
  f.for_each_mode([&](const WaveIndex& k, std::size_t) {
    const CVec3 v = f.vec(k);
    const double mag_sq = std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]);
    if (mag_sq != 0.0) s += mag_sq * weight_sq(k.norm_sq(), gp, k);
  });
  return std::sqrt(s);
}

double gevrey_inner(const SpectralField& f, const SpectralField& g,
                    const GevreyParams& gp) {
  if (f.truncation() != g.truncation())
    throw PreconditionError("gevrey_inner: fields must share N");
  double s = 0.0;
  f.for_each_mode([&](const WaveIndex& k, std::size_t) {
    const CVec3 a = f.vec(k), b = g.vec(k);
    Complex dot{0.0, 0.0};
    for (int c = 0; c < 3; ++c) dot += a[c] * std::conj(b[c]);
    if (dot != Complex{0.0, 0.0}) s += dot.real() * weight_sq(k.norm_sq(), gp, k);
  });
  return s;
}

double wiener_norm(const SpectralField& f) {
  double s = 0.0;
  f.for_each_mode([&](const WaveIndex& k, std::size_t) {
    const CVec3 v = f.vec(k);
    s += std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
  });
  return s;
}

std::int64_t exact_factorial(int n) {
  if (n < 0) throw PreconditionError("exact_factorial: negative argument");
  if (n > 20)
    throw NumericalError("exact_factorial: " + std::to_string(n) +
                         "! exceeds exact 64-bit integer range (max 20!)");
  std::int64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

int ceil_index(double x) {
  if (x < 0.0) throw PreconditionError("ceil_index: negative argument");
  const double r = std::round(x);
  if (std::abs(x - r) < 1e-9) return static_cast<int>(r);
  return static_cast<int>(std::ceil(x));
}

double inv_mag_bound(double p, double r, const VorticityFloorParams& vf) {
  if (!(vf.m_f > 0.0)) throw PreconditionError("inv_mag_bound: m_f > 0 required");
  const double beta = 2.0 * vf.C0 * vf.sigma0 / vf.m_f;
  if (beta >= 1.0)
    throw NumericalError("inv_mag_bound: series diverges (2*C0*sigma0/m_f = " +
                         std::to_string(beta) + " >= 1)");
  const int idx = ceil_index(p) + ceil_index(r);
  const double denom = 0.5 * vf.m_f - vf.C0 * vf.sigma0;
  const double fact = static_cast<double>(exact_factorial(idx));
  return std::exp(vf.sigma0) + fact / std::pow(denom, idx + 1);
}

PhysicalField inv_mag_field(const PhysicalField& omega, double floor) {
  const int m = omega.grid_size();
  PhysicalField out(m);
  const double* w0 = omega.component(0);
  const double* w1 = omega.component(1);
  const double* w2 = omega.component(2);
  double* r = out.component(0);
  for (std::size_t i = 0; i < omega.node_count(); ++i) {
    const double mag = std::sqrt(w0[i] * w0[i] + w1[i] * w1[i] + w2[i] * w2[i]);
    if (!(mag > floor)) {
      const GridIndex where = omega.unflatten(i);
      throw SingularityError("inv_mag_field: |omega| = " + std::to_string(mag) +
                                 " at node (" + std::to_string(where.i1) + "," +
                                 std::to_string(where.i2) + "," + std::to_string(where.i3) +
                                 ") is at or below the floor " + std::to_string(floor),
                             where, mag);
    }
    r[i] = 1.0 / mag;
  }
  return out;
}

double truncated_reciprocal_norm(const SpectralField& omega, int oversample,
                                 double floor, const GevreyParams& gp) {
  const int n = omega.truncation();
  const int m = oversample_grid_size(n, oversample);
  const PhysicalField grid = to_physical(omega, m);
  const PhysicalField recip = inv_mag_field(grid, floor);
  SpectralField scalar(n);
  analyze_scalar(recip.component(0), m, n, scalar.component(0));
  return gevrey_norm(scalar, gp);
}

}  // namespace hvbk
