#ifndef RFIM_QA_TESTS_ORACLES_HPP
#define RFIM_QA_TESTS_ORACLES_HPP

// Reference implementations written directly from the model definitions,
// sharing no code with the library beyond the instance container.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "rfim_qa/model.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

inline Matrix zeros(std::size_t n) { return Matrix(n, std::vector<double>(n, 0.0)); }

// Site coordinates, independent of RfimInstance::neighbors.
inline std::vector<int> neighbors(int w, int h, int site) {
  const int x = site % w, y = site / w;
  std::vector<int> out;
  if (x > 0) out.push_back(site - 1);
  if (x + 1 < w) out.push_back(site + 1);
  if (y > 0) out.push_back(site - w);
  if (y + 1 < h) out.push_back(site + w);
  return out;
}

inline double energy(const rfim_qa::RfimInstance& inst, const std::vector<int>& s) {
  const int w = inst.width(), h = inst.height();
  double e = 0.0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int i = y * w + x;
      if (x + 1 < w) e -= inst.coupling() * s[i] * s[i + 1];
      if (y + 1 < h) e -= inst.coupling() * s[i] * s[i + w];
      e -= inst.field(i) * s[i];
    }
  return e;
}

inline std::vector<int> spins_of(std::uint64_t state, int n) {
  std::vector<int> s(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) s[i] = (state >> i) & 1 ? -1 : 1;
  return s;
}

struct BruteResult {
  double energy = std::numeric_limits<double>::infinity();
  int minimizers = 0;
};

inline BruteResult brute_force(const rfim_qa::RfimInstance& inst) {
  const int n = inst.site_count();
  std::vector<double> energies(std::size_t{1} << n);
  BruteResult r;
  for (std::uint64_t st = 0; st < energies.size(); ++st) {
    energies[st] = energy(inst, spins_of(st, n));
    r.energy = std::min(r.energy, energies[st]);
  }
  for (double e : energies)
    if (std::abs(e - r.energy) < 1e-9) ++r.minimizers;
  return r;
}

// ---- Pauli strings ------------------------------------------------------------
// Basis state bit a set means spin a down; sz|up> = |up>, sx swaps.

enum class Pauli { I, X, Z };

inline double pauli_element(Pauli p, int row_bit, int col_bit) {
  switch (p) {
    case Pauli::I: return row_bit == col_bit ? 1.0 : 0.0;
    case Pauli::X: return row_bit != col_bit ? 1.0 : 0.0;
    case Pauli::Z: return row_bit == col_bit ? (row_bit ? -1.0 : 1.0) : 0.0;
  }
  return 0.0;
}

// coeff * (tensor product of ops), added into m.
inline void add_string(Matrix& m, int n, const std::vector<std::pair<int, Pauli>>& ops, double coeff) {
  std::vector<Pauli> per_site(static_cast<std::size_t>(n), Pauli::I);
  for (auto [site, p] : ops) per_site[static_cast<std::size_t>(site)] = p;
  const std::size_t dim = std::size_t{1} << n;
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) {
      double v = coeff;
      for (int a = 0; a < n && v != 0.0; ++a) v *= pauli_element(per_site[a], (r >> a) & 1, (c >> a) & 1);
      m[r][c] += v;
    }
}

inline Matrix dense_hamiltonian(const rfim_qa::RfimInstance& inst, rfim_qa::KineticKind kind, double s) {
  const int n = inst.site_count();
  Matrix m = zeros(std::size_t{1} << n);
  for (int i = 0; i < n; ++i) {
    add_string(m, n, {{i, Pauli::Z}}, -s * inst.field(i));
    add_string(m, n, {{i, Pauli::X}}, -(1.0 - s));
    for (int j : neighbors(inst.width(), inst.height(), i)) {
      if (j < i) continue;
      add_string(m, n, {{i, Pauli::Z}, {j, Pauli::Z}}, -s * inst.coupling());
      if (kind == rfim_qa::KineticKind::FI) add_string(m, n, {{i, Pauli::X}, {j, Pauli::X}}, -(1.0 - s));
    }
  }
  return m;
}

// ---- cyclic Jacobi eigensolver ---------------------------------------------------

struct EigenSystem {
  std::vector<double> values;  // ascending
  Matrix vectors;              // vectors[k] is the k-th eigenvector
};

inline EigenSystem jacobi(Matrix a) {
  const std::size_t n = a.size();
  Matrix v = zeros(n);
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
  }
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return a[x][x] < a[y][y]; });
  EigenSystem out;
  for (std::size_t k : idx) {
    out.values.push_back(a[k][k]);
    std::vector<double> vec(n);
    for (std::size_t i = 0; i < n; ++i) vec[i] = v[i][k];
    out.vectors.push_back(std::move(vec));
  }
  return out;
}

// ---- Bethe cluster ----------------------------------------------------------------

struct ClusterResult {
  std::vector<int> sites;  // center first, then neighbors left, right, up, down
  std::vector<double> mz, mx;
};

// Ground-state expectations of the five-spin (or smaller) cluster around
// `center`, computed from the effective fields h_j + J sum mz, 1 + sum mx.
inline ClusterResult cluster(const rfim_qa::RfimInstance& inst, const std::vector<double>& mz,
                             const std::vector<double>& mx, int center, double s, bool fi, double degeneracy = 1e-9) {
  const int w = inst.width(), h = inst.height();
  ClusterResult r;
  r.sites.push_back(center);
  for (int j : neighbors(w, h, center)) r.sites.push_back(j);
  const int n = static_cast<int>(r.sites.size());
  Matrix m = zeros(std::size_t{1} << n);
  add_string(m, n, {{0, Pauli::Z}}, -s * inst.field(center));
  add_string(m, n, {{0, Pauli::X}}, -(1.0 - s));
  for (int a = 1; a < n; ++a) {
    const int j = r.sites[a];
    double hz = inst.field(j), hx = 1.0;
    for (int k : neighbors(w, h, j)) {
      if (k == center) continue;
      hz += inst.coupling() * mz[k];
      if (fi) hx += mx[k];
    }
    add_string(m, n, {{0, Pauli::Z}, {a, Pauli::Z}}, -s * inst.coupling());
    add_string(m, n, {{a, Pauli::Z}}, -s * hz);
    add_string(m, n, {{a, Pauli::X}}, -(1.0 - s) * hx);
    if (fi) add_string(m, n, {{0, Pauli::X}, {a, Pauli::X}}, -(1.0 - s));
  }
  const auto eig = jacobi(m);
  int deg = 1;
  while (deg < static_cast<int>(eig.values.size()) && eig.values[deg] - eig.values[0] < degeneracy) ++deg;
  r.mz.assign(n, 0.0);
  r.mx.assign(n, 0.0);
  for (int k = 0; k < deg; ++k) {
    const auto& psi = eig.vectors[k];
    for (int a = 0; a < n; ++a) {
      Matrix z = zeros(psi.size()), x = zeros(psi.size());
      add_string(z, n, {{a, Pauli::Z}}, 1.0);
      add_string(x, n, {{a, Pauli::X}}, 1.0);
      for (std::size_t i = 0; i < psi.size(); ++i)
        for (std::size_t j = 0; j < psi.size(); ++j) {
          r.mz[a] += psi[i] * z[i][j] * psi[j] / deg;
          r.mx[a] += psi[i] * x[i][j] * psi[j] / deg;
        }
    }
  }
  return r;
}

// Raster Gauss-Seidel sweep writing back every cluster site.
inline void sweep(const rfim_qa::RfimInstance& inst, std::vector<double>& mz, std::vector<double>& mx, double s,
                  bool fi) {
  for (int c = 0; c < inst.site_count(); ++c) {
    const auto r = cluster(inst, mz, mx, c, s, fi);
    for (std::size_t a = 0; a < r.sites.size(); ++a) {
      mz[r.sites[a]] = r.mz[a];
      mx[r.sites[a]] = r.mx[a];
    }
  }
}

// ---- generators ---------------------------------------------------------------------

class Gen {
public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }
  std::uint64_t seed() { return rng_(); }
  template <class T>
  const T& pick(const std::vector<T>& xs) {
    return xs[static_cast<std::size_t>(integer(0, static_cast<int>(xs.size()) - 1))];
  }

  double coupling() { return pick(std::vector<double>{0.6, 1.0, 1.5, 2.0}); }

  // Random lattice with width*height <= max_sites and +-1 fields.
  rfim_qa::RfimInstance instance(int max_sites, int min_sites = 1) {
    for (;;) {
      const int w = integer(1, max_sites), h = integer(1, max_sites);
      if (w * h > max_sites || w * h < min_sites) continue;
      return rfim_qa::generate_instance(w, h, coupling(), seed());
    }
  }

  // Continuous fields and coupling, for operator-level properties.
  rfim_qa::RfimInstance real_instance(int max_sites, int min_sites = 1) {
    for (;;) {
      const int w = integer(1, max_sites), h = integer(1, max_sites);
      if (w * h > max_sites || w * h < min_sites) continue;
      std::vector<double> f(static_cast<std::size_t>(w * h));
      for (double& x : f) x = real(-2.0, 2.0);
      return rfim_qa::RfimInstance(w, h, real(0.1, 3.0), std::move(f));
    }
  }

  std::vector<double> vector(std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = real(-1.0, 1.0);
    return v;
  }

  std::mt19937_64& engine() { return rng_; }

private:
  std::mt19937_64 rng_;
};

}  // namespace oracle

#endif  // RFIM_QA_TESTS_ORACLES_HPP
