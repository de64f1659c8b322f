#include "hvbk/spectral_core.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <cstring>
#include <fstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hvbk {

static_assert(std::endian::native == std::endian::little,
              "HVBK1 snapshots are little-endian; big-endian hosts are unsupported");

namespace {

int thread_count() {
#ifdef _OPENMP
  static const int n = [] {
    int hw = omp_get_max_threads();
    if (const char* env = std::getenv("HVBK_THREADS")) {
      const int cap = std::atoi(env);
      if (cap > 0) hw = std::min(hw, cap);
    }
    return std::max(1, hw);
  }();
  return n;
#else
  return 1;
#endif
}

// out[p][o][q] = sum_i T[o*nin+i] * in[p][i][q]. Each (p,o) row is written by
// exactly one thread, so the result is bit-identical for any thread count.
void contract_axis(const Complex* in, std::size_t pre, std::size_t nin,
                   std::size_t post, const Complex* T, std::size_t nout,
                   Complex* out) {
  const std::ptrdiff_t total = static_cast<std::ptrdiff_t>(pre * nout);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(thread_count())
#endif
  for (std::ptrdiff_t po = 0; po < total; ++po) {
    const std::size_t p = static_cast<std::size_t>(po) / nout;
    const std::size_t o = static_cast<std::size_t>(po) % nout;
    const Complex* slab = in + p * nin * post;
    Complex* row = out + (p * nout + o) * post;
    std::fill(row, row + post, Complex{0.0, 0.0});
    const Complex* trow = T + o * nin;
    for (std::size_t i = 0; i < nin; ++i) {
      const Complex c = trow[i];
      const Complex* src = slab + i * post;
      for (std::size_t q = 0; q < post; ++q) row[q] += c * src[q];
    }
  }
}

// Synthesis phase matrix: T[j][k+N] = exp(+2*pi*i*j*k/M), arguments reduced
// with exact integer arithmetic mod M.
std::vector<Complex> synthesis_matrix(int n, int m) {
  const int e = 2 * n + 1;
  std::vector<Complex> t(static_cast<std::size_t>(m) * e);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < e; ++i) {
      long long r = (static_cast<long long>(j) * (i - n)) % m;
      if (r < 0) r += m;
      t[static_cast<std::size_t>(j) * e + i] =
          std::polar(1.0, 2.0 * M_PI * static_cast<double>(r) / m);
    }
  return t;
}

// Analysis matrix: A[k+N][j] = exp(-2*pi*i*j*k/M) / M.
std::vector<Complex> analysis_matrix(int n, int m) {
  const int e = 2 * n + 1;
  std::vector<Complex> t(static_cast<std::size_t>(e) * m);
  const double inv_m = 1.0 / m;
  for (int i = 0; i < e; ++i)
    for (int j = 0; j < m; ++j) {
      long long r = (static_cast<long long>(j) * (i - n)) % m;
      if (r < 0) r += m;
      t[static_cast<std::size_t>(i) * m + j] =
          inv_m * std::polar(1.0, -2.0 * M_PI * static_cast<double>(r) / m);
    }
  return t;
}

void require_resolution(int n, int m, const char* who) {
  if (m < 2 * n + 1)
    throw PreconditionError(std::string(who) + ": grid size " + std::to_string(m) +
                            " cannot resolve truncation N=" + std::to_string(n) +
                            " (need M >= 2N+1)");
}

}  // namespace

SpectralField::SpectralField(int truncation) : n_(truncation) {
  if (truncation < 0) throw PreconditionError("SpectralField: negative truncation");
  const std::size_t e = static_cast<std::size_t>(extent());
  cube_ = e * e * e;
  data_.assign(3 * cube_, Complex{0.0, 0.0});
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double a) {
  for (auto& v : data_) v *= a;
  return *this;
}

SpectralField& SpectralField::axpy(double a, const SpectralField& o) {
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += a * o.data_[i];
  return *this;
}

double SpectralField::max_abs_coeff() const {
  double best = 0.0;
  for (std::size_t i = 0; i < cube_; ++i) {
    const double m = std::norm(data_[i]) + std::norm(data_[cube_ + i]) +
                     std::norm(data_[2 * cube_ + i]);
    best = std::max(best, m);
  }
  return std::sqrt(best);
}

double SpectralField::sum_sq() const {
  double s = 0.0;
  for (const auto& v : data_) s += std::norm(v);
  return s;
}

void SpectralField::hermitian_symmetrize() {
  for (int c = 0; c < 3; ++c) {
    Complex* comp = component(c);
    for_each_mode([&](const WaveIndex& k, std::size_t i) {
      if (k.k1 > 0 || (k.k1 == 0 && (k.k2 > 0 || (k.k2 == 0 && k.k3 > 0)))) {
        const std::size_t j = flat(-k.k1, -k.k2, -k.k3);
        const Complex a = comp[i], b = comp[j];
        const Complex avg = 0.5 * (a + std::conj(b));
        comp[i] = avg;
        comp[j] = std::conj(avg);
      } else if (k.is_zero()) {
        comp[i] = Complex{comp[i].real(), 0.0};
      }
    });
  }
}

double SpectralField::hermitian_defect() const {
  double worst = 0.0;
  for (int c = 0; c < 3; ++c) {
    const Complex* comp = component(c);
    for_each_mode([&](const WaveIndex& k, std::size_t i) {
      const std::size_t j = flat(-k.k1, -k.k2, -k.k3);
      worst = std::max(worst, std::abs(comp[i] - std::conj(comp[j])));
    });
  }
  return worst;
}

double SpectralField::max_divergence() const {
  double worst = 0.0;
  for_each_mode([&](const WaveIndex& k, std::size_t i) {
    const Complex d = static_cast<double>(k.k1) * data_[i] +
                      static_cast<double>(k.k2) * data_[cube_ + i] +
                      static_cast<double>(k.k3) * data_[2 * cube_ + i];
    worst = std::max(worst, std::abs(d));
  });
  return worst;
}

PhysicalField::PhysicalField(int grid_size) : m_(grid_size) {
  if (grid_size < 1) throw PreconditionError("PhysicalField: grid size must be positive");
  const std::size_t m = static_cast<std::size_t>(grid_size);
  nodes_ = m * m * m;
  data_.assign(3 * nodes_, 0.0);
}

std::vector<double> synthesize_scalar(const Complex* cube, int truncation, int grid_size) {
  const int n = truncation, m = grid_size;
  require_resolution(n, m, "to_physical");
  const std::size_t e = static_cast<std::size_t>(2 * n + 1);
  const std::size_t mm = static_cast<std::size_t>(m);
  const auto t = synthesis_matrix(n, m);

  std::vector<Complex> a(mm * e * e), b(mm * mm * e);
  contract_axis(cube, 1, e, e * e, t.data(), mm, a.data());
  contract_axis(a.data(), mm, e, e, t.data(), mm, b.data());
  std::vector<Complex> c(mm * mm * mm);
  contract_axis(b.data(), mm * mm, e, 1, t.data(), mm, c.data());

  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
  return out;
}

void analyze_scalar(const double* grid, int grid_size, int truncation, Complex* cube_out) {
  const int n = truncation, m = grid_size;
  require_resolution(n, m, "to_spectral");
  const std::size_t e = static_cast<std::size_t>(2 * n + 1);
  const std::size_t mm = static_cast<std::size_t>(m);
  const auto t = analysis_matrix(n, m);

  std::vector<Complex> g(mm * mm * mm);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = Complex{grid[i], 0.0};

  std::vector<Complex> a(e * mm * mm), b(e * e * mm);
  contract_axis(g.data(), 1, mm, mm * mm, t.data(), e, a.data());
  contract_axis(a.data(), e, mm, mm, t.data(), e, b.data());
  contract_axis(b.data(), e * e, mm, 1, t.data(), e, cube_out);
}

PhysicalField to_physical(const SpectralField& f, int grid_size) {
  require_resolution(f.truncation(), grid_size, "to_physical");
  PhysicalField g(grid_size);
  for (int c = 0; c < 3; ++c) {
    const auto vals = synthesize_scalar(f.component(c), f.truncation(), grid_size);
    std::copy(vals.begin(), vals.end(), g.component(c));
  }
  return g;
}

SpectralField to_spectral(const PhysicalField& g, int truncation) {
  require_resolution(truncation, g.grid_size(), "to_spectral");
  SpectralField f(truncation);
  for (int c = 0; c < 3; ++c)
    analyze_scalar(g.component(c), g.grid_size(), truncation, f.component(c));
  return f;
}

SpectralField truncate(const SpectralField& f, int n_prime) {
  if (n_prime > f.truncation())
    throw PreconditionError("truncate: target truncation exceeds the field's");
  SpectralField out = f;
  out.for_each_mode([&](const WaveIndex& k, std::size_t) {
    if (std::abs(k.k1) > n_prime || std::abs(k.k2) > n_prime || std::abs(k.k3) > n_prime)
      out.set_vec(k, CVec3{});
  });
  return out;
}

SpectralField leray_project(const SpectralField& f) {
  SpectralField out = f;
  out.for_each_mode([&](const WaveIndex& k, std::size_t) {
    if (k.is_zero()) return;
    const CVec3 v = out.vec(k);
    const double ksq = static_cast<double>(k.norm_sq());
    const Complex kdotv = static_cast<double>(k.k1) * v[0] +
                          static_cast<double>(k.k2) * v[1] +
                          static_cast<double>(k.k3) * v[2];
    const Complex s = kdotv / ksq;
    out.set_vec(k, {v[0] - static_cast<double>(k.k1) * s,
                    v[1] - static_cast<double>(k.k2) * s,
                    v[2] - static_cast<double>(k.k3) * s});
  });
  out.set_divergence_free(true);
  return out;
}

SpectralField curl(const SpectralField& f) {
  SpectralField out(f.truncation());
  const Complex i_unit{0.0, 1.0};
  out.for_each_mode([&](const WaveIndex& k, std::size_t) {
    if (k.is_zero()) return;  // periodic box: the average vorticity vanishes
    const CVec3 v = f.vec(k);
    const double k1 = k.k1, k2 = k.k2, k3 = k.k3;
    out.set_vec(k, {i_unit * (k2 * v[2] - k3 * v[1]),
                    i_unit * (k3 * v[0] - k1 * v[2]),
                    i_unit * (k1 * v[1] - k2 * v[0])});
  });
  out.set_divergence_free(true);
  return out;
}

SpectralField velocity_from_vorticity(const SpectralField& omega, const Vec3& mean_u) {
  const CVec3 mean = omega.vec(WaveIndex{});
  const double mean_mag =
      std::sqrt(std::norm(mean[0]) + std::norm(mean[1]) + std::norm(mean[2]));
  if (mean_mag > 1e-12 * std::max(1.0, omega.max_abs_coeff()))
    throw PreconditionError(
        "velocity_from_vorticity: vorticity has a nonzero mean mode");

  SpectralField u(omega.truncation());
  const Complex i_unit{0.0, 1.0};
  u.for_each_mode([&](const WaveIndex& k, std::size_t) {
    if (k.is_zero()) {
      u.set_vec(k, {Complex{mean_u.x, 0.0}, Complex{mean_u.y, 0.0}, Complex{mean_u.z, 0.0}});
      return;
    }
    const CVec3 w = omega.vec(k);
    const double inv_ksq = 1.0 / static_cast<double>(k.norm_sq());
    const Complex a1 = i_unit * (k.k1 * inv_ksq), a2 = i_unit * (k.k2 * inv_ksq),
                  a3 = i_unit * (k.k3 * inv_ksq);
    u.set_vec(k, {a2 * w[2] - a3 * w[1], a3 * w[0] - a1 * w[2], a1 * w[1] - a2 * w[0]});
  });
  u.set_divergence_free(true);
  return u;
}

SpectralField derivative(const SpectralField& f, int axis) {
  if (axis < 0 || axis > 2) throw PreconditionError("derivative: axis out of range");
  SpectralField out = f;
  const Complex i_unit{0.0, 1.0};
  out.for_each_mode([&](const WaveIndex& k, std::size_t) {
    const Complex s = i_unit * static_cast<double>(k[axis]);
    CVec3 v = out.vec(k);
    for (int c = 0; c < 3; ++c) v[c] *= s;
    out.set_vec(k, v);
  });
  return out;
}

SpectralField pointwise_product_projected(std::span<const SpectralField* const> fs,
                                          const CombineFn& combine, int truncation,
                                          int grid_size) {
  if (fs.empty()) throw PreconditionError("pointwise_product_projected: no inputs");
  const int n_in = fs.front()->truncation();
  for (const auto* f : fs)
    if (f->truncation() != n_in)
      throw PreconditionError("pointwise_product_projected: inputs must share N");
  require_resolution(n_in, grid_size, "pointwise_product_projected");
  require_resolution(truncation, grid_size, "pointwise_product_projected");

  std::vector<PhysicalField> grids;
  grids.reserve(fs.size());
  for (const auto* f : fs) grids.push_back(to_physical(*f, grid_size));

  const std::size_t nodes = grids.front().node_count();
  std::vector<double> out0(nodes), out1(nodes), out2(nodes);
  std::vector<Vec3> at_node(fs.size());
  for (std::size_t i = 0; i < nodes; ++i) {
    for (std::size_t q = 0; q < fs.size(); ++q) {
      const PhysicalField& g = grids[q];
      at_node[q] = {g.component(0)[i], g.component(1)[i], g.component(2)[i]};
    }
    const Vec3 v = combine(std::span<const Vec3>(at_node));
    if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z)) {
      const GridIndex where = grids.front().unflatten(i);
      throw SingularityError("pointwise_product_projected: combine produced a "
                             "non-finite value",
                             where, v.x);
    }
    out0[i] = v.x;
    out1[i] = v.y;
    out2[i] = v.z;
  }

  SpectralField result(truncation);
  analyze_scalar(out0.data(), grid_size, truncation, result.component(0));
  analyze_scalar(out1.data(), grid_size, truncation, result.component(1));
  analyze_scalar(out2.data(), grid_size, truncation, result.component(2));
  return result;
}

namespace {

template <class T>
void write_pod(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

void write_snapshot(const std::string& path,
                    std::span<const std::pair<std::string, const SpectralField*>> fields,
                    int grid_size_metadata) {
  if (fields.empty()) throw PreconditionError("write_snapshot: no fields");
  const int n = fields.front().second->truncation();
  for (const auto& [name, f] : fields)
    if (f->truncation() != n)
      throw PreconditionError("write_snapshot: fields must share N");

  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("write_snapshot: cannot open " + path);
  os.write("HVBK1", 5);
  write_pod(os, static_cast<std::uint32_t>(n));
  write_pod(os, static_cast<std::uint32_t>(grid_size_metadata));
  write_pod(os, static_cast<std::uint32_t>(fields.size()));
  for (const auto& [name, f] : fields) {
    write_pod(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
  }
  for (const auto& [name, f] : fields) {
    f->for_each_mode([&](const WaveIndex& k, std::size_t) {
      for (int c = 0; c < 3; ++c) {
        const Complex v = f->coeff(c, k);
        write_pod(os, v.real());
        write_pod(os, v.imag());
      }
    });
  }
  if (!os) throw Error("write_snapshot: write failed for " + path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("read_snapshot: cannot open " + path);
  char magic[5];
  is.read(magic, 5);
  if (!is || std::memcmp(magic, "HVBK1", 5) != 0)
    throw Error("read_snapshot: bad magic in " + path);

  Snapshot snap;
  snap.truncation = static_cast<int>(read_pod<std::uint32_t>(is));
  snap.grid_size = static_cast<int>(read_pod<std::uint32_t>(is));
  const auto count = read_pod<std::uint32_t>(is);
  std::vector<std::string> names(count);
  for (auto& name : names) {
    const auto len = read_pod<std::uint32_t>(is);
    name.resize(len);
    is.read(name.data(), len);
  }
  for (const auto& name : names) {
    SpectralField f(snap.truncation);
    f.for_each_mode([&](const WaveIndex& k, std::size_t) {
      for (int c = 0; c < 3; ++c) {
        const double re = read_pod<double>(is);
        const double im = read_pod<double>(is);
        f.coeff(c, k) = Complex{re, im};
      }
    });
    snap.fields.emplace_back(name, std::move(f));
  }
  if (!is) throw Error("read_snapshot: truncated file " + path);
  return snap;
}

}  // namespace hvbk
