#include "hvbk/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hvbk/dynamics.hpp"

namespace hvbk {

void MultiplierOp::validate(int truncation) const {
  for (int k1 = -truncation; k1 <= truncation; ++k1)
    for (int k2 = -truncation; k2 <= truncation; ++k2)
      for (int k3 = -truncation; k3 <= truncation; ++k3) {
        const WaveIndex k{k1, k2, k3};
        const double mag = std::abs(symbol(k));
        const double cap = growth_bound * std::sqrt(static_cast<double>(k.norm_sq()));
        if (mag > cap * (1.0 + 1e-12))
          throw PreconditionError("MultiplierOp: |m(k)| exceeds growth bound at k=(" +
                                  std::to_string(k1) + "," + std::to_string(k2) + "," +
                                  std::to_string(k3) + ")");
      }
}

MultiplierOp gradient_magnitude_multiplier() {
  return {[](const WaveIndex& k) {
            return Complex{std::sqrt(static_cast<double>(k.norm_sq())), 0.0};
          },
          1.0};
}

SpectralField apply_multiplier_op(const SpectralField& f, const MultiplierOp& op) {
  SpectralField out = f;
  out.for_each_mode([&](const WaveIndex& k, std::size_t) {
    const Complex m = op.symbol(k);
    CVec3 v = out.vec(k);
    for (int c = 0; c < 3; ++c) v[c] *= m;
    out.set_vec(k, v);
  });
  return out;
}

namespace {

// Dense scalar coefficient cube of radius R, flat index like SpectralField.
struct ScalarCube {
  int radius;
  std::vector<Complex> v;

  explicit ScalarCube(int r)
      : radius(r), v(static_cast<std::size_t>(2 * r + 1) * (2 * r + 1) * (2 * r + 1)) {}

  std::size_t flat(int k1, int k2, int k3) const {
    const int e = 2 * radius + 1;
    return (static_cast<std::size_t>(k1 + radius) * e + (k2 + radius)) * e + (k3 + radius);
  }
  Complex& at(int k1, int k2, int k3) { return v[flat(k1, k2, k3)]; }
  const Complex& at(int k1, int k2, int k3) const { return v[flat(k1, k2, k3)]; }
};

// Exact convolution, output restricted to radius r_out.
ScalarCube convolve(const ScalarCube& a, const ScalarCube& b, int r_out) {
  ScalarCube out(r_out);
  const int ra = a.radius, rb = b.radius;
  for (int a1 = -ra; a1 <= ra; ++a1)
    for (int a2 = -ra; a2 <= ra; ++a2)
      for (int a3 = -ra; a3 <= ra; ++a3) {
        const Complex av = a.at(a1, a2, a3);
        if (av == Complex{0.0, 0.0}) continue;
        const int lo1 = std::max(-rb, -r_out - a1), hi1 = std::min(rb, r_out - a1);
        const int lo2 = std::max(-rb, -r_out - a2), hi2 = std::min(rb, r_out - a2);
        const int lo3 = std::max(-rb, -r_out - a3), hi3 = std::min(rb, r_out - a3);
        for (int b1 = lo1; b1 <= hi1; ++b1)
          for (int b2 = lo2; b2 <= hi2; ++b2)
            for (int b3 = lo3; b3 <= hi3; ++b3)
              out.at(a1 + b1, a2 + b2, a3 + b3) += av * b.at(b1, b2, b3);
      }
  return out;
}

ScalarCube cube_of_component(const SpectralField& f, int c) {
  ScalarCube out(f.truncation());
  std::copy(f.component(c), f.component(c) + f.cube_size(), out.v.begin());
  return out;
}

}  // namespace

double convolution_inner_product_oracle(std::span<const SpectralField* const> fs,
                                        const SpectralField& g, const MultiplierOp& op,
                                        const GevreyParams& gp) {
  if (fs.empty()) throw PreconditionError("oracle: needs K >= 1 fields");
  const int n = g.truncation();
  for (const auto* f : fs)
    if (f->truncation() != n) throw PreconditionError("oracle: fields must share N");
  if (n > 4)
    throw CostGuardError("oracle: N = " + std::to_string(n) +
                         " exceeds the N <= 4 cost guard (O(N^{3K}) summation)");

  Complex total{0.0, 0.0};
  for (int c = 0; c < 3; ++c) {
    ScalarCube prod = cube_of_component(*fs[0], c);
    for (std::size_t i = 1; i < fs.size(); ++i) {
      const ScalarCube next = cube_of_component(*fs[i], c);
      const bool last = i + 1 == fs.size();
      // intermediates keep full support; only the final product is paired
      // against g, whose coefficients vanish outside the radius-N box
      prod = convolve(prod, next, last ? n : prod.radius + next.radius);
    }
    for (int k1 = -n; k1 <= n; ++k1)
      for (int k2 = -n; k2 <= n; ++k2)
        for (int k3 = -n; k3 <= n; ++k3) {
          const WaveIndex k{k1, k2, k3};
          const Complex gv = g.coeff(c, k);
          if (gv == Complex{0.0, 0.0}) continue;
          const Complex tg = op.symbol(k) * gv;
          const Complex pv =
              prod.radius >= n ? prod.at(k1, k2, k3) : Complex{0.0, 0.0};
          if (pv == Complex{0.0, 0.0}) continue;
          total += pv * std::conj(tg) * gevrey_weight_sq(k, gp);
        }
  }
  return total.real();
}

SpectralField random_analytic_field(int truncation, double sigma_draw, RandomStream& rng,
                                    SpectrumModulus modulus, bool divergence_free) {
  SpectralField f(truncation);
  const int n = truncation;

  auto tangent_pair = [](const WaveIndex& k, Vec3& t1, Vec3& t2) {
    const Vec3 kv{static_cast<double>(k.k1), static_cast<double>(k.k2),
                  static_cast<double>(k.k3)};
    // seed axis with the smallest |k| component to avoid degeneracy
    int axis = 0;
    if (std::abs(k.k2) < std::abs(k[axis])) axis = 1;
    if (std::abs(k.k3) < std::abs(k[axis])) axis = 2;
    Vec3 e{};
    e[axis] = 1.0;
    t1 = kv.cross(e);
    t1 *= 1.0 / t1.norm();
    t2 = kv.cross(t1);
    t2 *= 1.0 / t2.norm();
  };

  for (int k1 = -n; k1 <= n; ++k1)
    for (int k2 = -n; k2 <= n; ++k2)
      for (int k3 = -n; k3 <= n; ++k3) {
        const WaveIndex k{k1, k2, k3};
        // fill the lexicographic upper half; mirror by conjugation
        if (!(k1 > 0 || (k1 == 0 && (k2 > 0 || (k2 == 0 && k3 > 0))))) continue;
        const double env =
            std::exp(-sigma_draw * std::sqrt(1.0 + static_cast<double>(k.norm_sq())));
        CVec3 a{};
        if (divergence_free) {
          Vec3 t1, t2;
          tangent_pair(k, t1, t2);
          if (modulus == SpectrumModulus::unit) {
            const double phi = 2.0 * M_PI * rng.uniform();
            const Complex phase = std::polar(env, 2.0 * M_PI * rng.uniform());
            const Vec3 dir = std::cos(phi) * t1 + std::sin(phi) * t2;
            a = {phase * dir.x, phase * dir.y, phase * dir.z};
          } else {
            const Complex c1{rng.normal(), rng.normal()};
            const Complex c2{rng.normal(), rng.normal()};
            for (int c = 0; c < 3; ++c) a[c] = env * (c1 * t1[c] + c2 * t2[c]);
          }
        } else {
          if (modulus == SpectrumModulus::unit) {
            Vec3 dir{rng.normal(), rng.normal(), rng.normal()};
            const double mag = std::max(dir.norm(), 1e-300);
            dir *= 1.0 / mag;
            const Complex phase = std::polar(env, 2.0 * M_PI * rng.uniform());
            a = {phase * dir.x, phase * dir.y, phase * dir.z};
          } else {
            for (int c = 0; c < 3; ++c)
              a[c] = env * Complex{rng.normal(), rng.normal()};
          }
        }
        f.set_vec(k, a);
        f.set_vec(-k, {std::conj(a[0]), std::conj(a[1]), std::conj(a[2])});
      }

  if (!divergence_free) {
    const double env0 = std::exp(-sigma_draw);
    f.set_vec(WaveIndex{}, {Complex{env0 * rng.normal(), 0.0},
                            Complex{env0 * rng.normal(), 0.0},
                            Complex{env0 * rng.normal(), 0.0}});
  } else {
    f.set_divergence_free(true);
  }
  return f;
}

LemmaReport verify_nonlinear_estimate(int K, int trials, const GevreyParams& gp,
                                      std::uint64_t seed, int truncation,
                                      double frozen_bound) {
  if (K < 1) throw PreconditionError("verify_nonlinear_estimate: K >= 1 required");
  if (!(gp.p > 2.0))
    throw PreconditionError("verify_nonlinear_estimate: the estimate needs p > 2");
  const MultiplierOp op = gradient_magnitude_multiplier();
  RandomStream rng(seed);
  const double sigma_draw = gp.sigma + 0.4;

  LemmaReport report;
  report.K = K;
  report.p = gp.p;
  report.sigma = gp.sigma;
  report.trials = trials;
  report.frozen_bound = frozen_bound;

  const GevreyParams quarter = gp.with_r(gp.r + 0.5);
  double sum_ratio = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<SpectralField> fields;
    fields.reserve(K);
    for (int i = 0; i < K; ++i)
      fields.push_back(random_analytic_field(truncation, sigma_draw, rng,
                                             SpectrumModulus::gaussian, false));
    const SpectralField g = random_analytic_field(truncation, sigma_draw, rng,
                                                  SpectrumModulus::gaussian, false);

    std::vector<const SpectralField*> ptrs;
    for (const auto& f : fields) ptrs.push_back(&f);
    const double lhs = std::abs(convolution_inner_product_oracle(ptrs, g, op, gp));

    double rhs = 0.0;
    std::vector<double> base(K), quarter_norm(K);
    for (int i = 0; i < K; ++i) {
      base[i] = gevrey_norm(fields[i], gp);
      quarter_norm[i] = gevrey_norm(fields[i], quarter);
    }
    const double g_quarter = gevrey_norm(g, quarter);
    for (int j = 0; j < K; ++j) {
      double prod = quarter_norm[j];
      for (int i = 0; i < K; ++i)
        if (i != j) prod *= base[i];
      rhs += prod;
    }
    rhs *= g_quarter;

    if (rhs == 0.0) {
      if (lhs > 1e-14)
        throw NumericalError("verify_nonlinear_estimate: RHS = 0 with LHS = " +
                             std::to_string(lhs));
      continue;
    }
    const double ratio = lhs / rhs;
    report.max_ratio = std::max(report.max_ratio, ratio);
    sum_ratio += ratio;
  }
  report.mean_ratio = trials > 0 ? sum_ratio / trials : 0.0;
  report.pass = report.max_ratio <= frozen_bound;
  return report;
}

AppendixReport verify_inv_mag_bound(int trials, const VorticityFloorParams& vf,
                                    const GevreyParams& gp, std::uint64_t seed,
                                    int truncation, int oversample) {
  const double beta = 2.0 * vf.C0 * vf.sigma0 / vf.m_f;
  if (beta >= 1.0)
    throw PreconditionError("verify_inv_mag_bound: needs 2 C0 sigma0 / m_f < 1");
  RandomStream rng(seed);

  AppendixReport report;
  report.trials = trials;
  report.p = gp.p;

  const int n = truncation;
  const int m = oversample_grid_size(n, oversample);
  const double h = 2.0 * M_PI / m;
  const SpectralField core = beltrami_shear_vorticity(n);
  const double binom[5][5] = {{1, 0, 0, 0, 0},
                              {1, 1, 0, 0, 0},
                              {1, 2, 1, 0, 0},
                              {1, 3, 3, 1, 0},
                              {1, 4, 6, 4, 1}};

  for (int trial = 0; trial < trials; ++trial) {
    SpectralField omega(n);
    double floor_measured = 0.0;
    bool ok = false;
    for (int attempt = 0; attempt < 50 && !ok; ++attempt) {
      SpectralField pert = random_analytic_field(n, 0.5, rng,
                                                 SpectrumModulus::gaussian, true);
      const double w = wiener_norm(pert);
      if (w > 0.0) pert *= 0.3 / w;  // sup-norm of the perturbation <= 0.3
      omega = core;
      omega += pert;
      const auto [mn, arg] = min_vorticity_magnitude(omega, oversample);
      if (mn >= vf.m_f) {
        floor_measured = mn;
        ok = true;
      }
    }
    if (!ok)
      throw NumericalError("verify_inv_mag_bound: could not certify a floor >= m_f "
                           "after bounded retries");
    report.min_measured_floor = std::min(report.min_measured_floor, floor_measured);

    VorticityFloorParams measured = vf;
    measured.m_f = floor_measured;
    for (const double r : {0.0, 0.5}) {
      const GevreyParams norm_params{gp.p, vf.sigma0, r};
      const double norm = truncated_reciprocal_norm(omega, oversample,
                                                    0.999 * vf.m_f, norm_params);
      const double bound = inv_mag_bound(gp.p, r, measured);
      const double margin = bound / norm;
      if (r == 0.0)
        report.min_margin_r0 = std::min(report.min_margin_r0, margin);
      else
        report.min_margin_r_half = std::min(report.min_margin_r_half, margin);
    }

    // n-th finite differences of 1/|omega| along grid lines vs 2^n n!/m^n
    const PhysicalField grid = to_physical(omega, m);
    const PhysicalField recip = inv_mag_field(grid, 0.999 * vf.m_f);
    const double* rv = recip.component(0);
    auto at = [&](int i1, int i2, int i3) {
      auto wrap = [&](int i) { return ((i % m) + m) % m; };
      return rv[(static_cast<std::size_t>(wrap(i1)) * m + wrap(i2)) * m + wrap(i3)];
    };
    for (int order = 1; order <= 4; ++order) {
      const double cap =
          std::pow(2.0, order) * static_cast<double>(exact_factorial(order)) /
          std::pow(floor_measured, order);
      double worst = 0.0;
      for (int i1 = 0; i1 < m; ++i1)
        for (int i2 = 0; i2 < m; ++i2)
          for (int i3 = 0; i3 < m; ++i3)
            for (int axis = 0; axis < 3; ++axis) {
              double acc = 0.0;
              for (int rr = 0; rr <= order; ++rr) {
                const double c = binom[order][rr] * ((order - rr) % 2 == 0 ? 1.0 : -1.0);
                const int s1 = i1 + (axis == 0 ? rr : 0);
                const int s2 = i2 + (axis == 1 ? rr : 0);
                const int s3 = i3 + (axis == 2 ? rr : 0);
                acc += c * at(s1, s2, s3);
              }
              worst = std::max(worst, std::abs(acc) / std::pow(h, order));
            }
      report.max_derivative_ratio = std::max(report.max_derivative_ratio, worst / cap);
    }
  }

  report.pass = report.min_margin_r0 >= 1.0 && report.min_margin_r_half >= 1.0 &&
                report.max_derivative_ratio <= 1.1;
  return report;
}

}  // namespace hvbk
