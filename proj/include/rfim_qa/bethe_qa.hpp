#ifndef RFIM_QA_BETHE_QA_HPP
#define RFIM_QA_BETHE_QA_HPP

// Bethe-type mean-field quantum annealing.
//
// Each site i is treated together with its neighbors S(i) as a cluster of at
// most five spins. Spins outside the cluster enter only through their current
// magnetizations:
//
//   H_pot^(i) = -J s^z_i sum_j s^z_j - h_i s^z_i
//               - sum_j (h_j + J sum_{k in S(j)\i} m^z_k) s^z_j
//   H_kin^(i) = -g s^x_i sum_j s^x_j - s^x_i
//               - sum_j (1 + g sum_{k in S(j)\i} m^x_k) s^x_j
//
// with g = 1 for the FI driver and g = 0 for the TF driver. The cluster
// Hamiltonian (1-s) H_kin^(i) + s H_pot^(i) is solved for its ground state and
// the resulting <s^z>, <s^x> are written back.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rfim_qa/error.hpp"
#include "rfim_qa/model.hpp"

namespace rfim_qa {

struct MagnetizationField {
  std::vector<double> mz;
  std::vector<double> mx;

  /// Product state along +x: (mz, mx) = (0, 1) everywhere.
  static MagnetizationField x_polarized(int sites) {
    const auto n = static_cast<std::size_t>(sites);
    return {std::vector<double>(n, 0.0), std::vector<double>(n, 1.0)};
  }

  int size() const noexcept { return static_cast<int>(mz.size()); }
  friend bool operator==(const MagnetizationField&, const MagnetizationField&) = default;
};

inline constexpr int max_cluster_sites = 1 + RfimInstance::max_degree;
inline constexpr int max_cluster_dimension = 1 << max_cluster_sites;

struct ClusterProblem {
  int center = 0;
  int neighbor_count = 0;
  std::array<int, RfimInstance::max_degree> neighbor_sites{};
  std::array<double, RfimInstance::max_degree> effective_z_fields{};
  std::array<double, RfimInstance::max_degree> effective_x_fields{};
  double s = 0.0;
  double coupling = 0.0;
  double h_center = 0.0;
  KineticKind kind = KineticKind::TF;
  /// Strength of the s^x_i s^x_j term and of the m^x feedback. 1 for FI, 0 for TF.
  double x_coupling = 0.0;

  std::span<const int> neighbors() const {
    return {neighbor_sites.data(), static_cast<std::size_t>(neighbor_count)};
  }
  int site_count() const noexcept { return 1 + neighbor_count; }
  int dimension() const noexcept { return 1 << site_count(); }
};

/// Expectations for the cluster sites; index 0 is the center, 1.. follow neighbor order.
struct ClusterExpectations {
  int size = 0;
  std::array<double, max_cluster_sites> mz{};
  std::array<double, max_cluster_sites> mx{};
};

inline ClusterProblem build_cluster(const RfimInstance& instance, const MagnetizationField& mags, int center,
                                    double s, KineticKind kind, double fi_coupling = 1.0) {
  if (center < 0 || center >= instance.site_count()) throw argument_error("cluster center out of range");
  if (!(s >= 0.0 && s <= 1.0)) throw argument_error("reduced time s must lie in [0, 1]");
  if (mags.size() != instance.site_count()) throw argument_error("magnetization field size mismatch");

  ClusterProblem c;
  c.center = center;
  c.s = s;
  c.coupling = instance.coupling();
  c.h_center = instance.field(center);
  c.kind = kind;
  c.x_coupling = kind == KineticKind::FI ? fi_coupling : 0.0;

  const auto nb = instance.neighbors(center);
  c.neighbor_count = static_cast<int>(nb.size());
  for (int a = 0; a < c.neighbor_count; ++a) {
    const int j = nb[static_cast<std::size_t>(a)];
    c.neighbor_sites[static_cast<std::size_t>(a)] = j;
    double outer_z = 0.0;
    double outer_x = 0.0;
    for (int k : instance.neighbors(j)) {
      if (k == center) continue;
      outer_z += mags.mz[static_cast<std::size_t>(k)];
      outer_x += mags.mx[static_cast<std::size_t>(k)];
    }
    c.effective_z_fields[static_cast<std::size_t>(a)] = instance.field(j) + c.coupling * outer_z;
    c.effective_x_fields[static_cast<std::size_t>(a)] = 1.0 + c.x_coupling * outer_x;
  }
  return c;
}

namespace detail {

// Spin value of cluster site `a` in basis state `state`: bit set means down.
constexpr int cluster_spin(unsigned state, int a) { return (state >> a) & 1U ? -1 : 1; }

/// Classical cluster potential H_pot^(i) for every basis state.
inline void cluster_potential(const ClusterProblem& c, std::span<double> out) {
  const int n = c.site_count();
  const unsigned dim = 1U << n;
  for (unsigned state = 0; state < dim; ++state) {
    const int s0 = cluster_spin(state, 0);
    double e = -c.h_center * s0;
    for (int a = 1; a < n; ++a) {
      const int sa = cluster_spin(state, a);
      e -= c.coupling * s0 * sa;
      e -= c.effective_z_fields[static_cast<std::size_t>(a - 1)] * sa;
    }
    out[state] = e;
  }
}

/// Cluster Hamiltonian in the s^z product basis: diagonal plus a list of
/// s^x-string terms (coefficient times the bit-flip of `mask`).
struct ClusterOperator {
  int sites = 0;
  unsigned dim = 0;
  std::array<double, max_cluster_dimension> diag{};
  int flip_count = 0;
  std::array<unsigned, 2 * max_cluster_sites> flip_mask{};
  std::array<double, 2 * max_cluster_sites> flip_coeff{};

  void apply(const double* v, double* w) const {
    for (unsigned c = 0; c < dim; ++c) {
      double acc = diag[c] * v[c];
      for (int t = 0; t < flip_count; ++t) acc += flip_coeff[static_cast<std::size_t>(t)] * v[c ^ flip_mask[static_cast<std::size_t>(t)]];
      w[c] = acc;
    }
  }

  double norm_bound() const {
    double m = 0.0;
    for (unsigned c = 0; c < dim; ++c) m = std::max(m, std::abs(diag[c]));
    for (int t = 0; t < flip_count; ++t) m += std::abs(flip_coeff[static_cast<std::size_t>(t)]);
    return m;
  }
};

inline ClusterOperator cluster_operator(const ClusterProblem& c) {
  ClusterOperator op;
  op.sites = c.site_count();
  op.dim = 1U << op.sites;
  cluster_potential(c, std::span<double>(op.diag.data(), op.dim));
  for (unsigned st = 0; st < op.dim; ++st) op.diag[st] *= c.s;
  const double kin = 1.0 - c.s;
  auto add = [&](unsigned mask, double coeff) {
    op.flip_mask[static_cast<std::size_t>(op.flip_count)] = mask;
    op.flip_coeff[static_cast<std::size_t>(op.flip_count)] = coeff;
    ++op.flip_count;
  };
  if (kin == 0.0) return op;
  add(1U, -kin);
  for (int a = 1; a < op.sites; ++a)
    add(1U << a, -kin * c.effective_x_fields[static_cast<std::size_t>(a - 1)]);
  if (c.x_coupling != 0.0)
    for (int a = 1; a < op.sites; ++a) add(1U | (1U << a), -kin * c.x_coupling);
  return op;
}

inline void accumulate_expectations(const ClusterOperator& op, const double* psi, double weight,
                                    ClusterExpectations& out) {
  for (int a = 0; a < op.sites; ++a) {
    double z = 0.0;
    double x = 0.0;
    for (unsigned c = 0; c < op.dim; ++c) {
      z += psi[c] * psi[c] * cluster_spin(c, a);
      x += psi[c] * psi[c ^ (1U << a)];
    }
    out.mz[static_cast<std::size_t>(a)] += weight * z;
    out.mx[static_cast<std::size_t>(a)] += weight * x;
  }
}

inline constexpr double degeneracy_tolerance = 1e-12;

/// Diagonal (s == 1) branch: average over all minimal-energy basis states.
inline ClusterExpectations classical_ground_expectations(const ClusterOperator& op) {
  ClusterExpectations out;
  out.size = op.sites;
  double emin = op.diag[0];
  for (unsigned c = 1; c < op.dim; ++c) emin = std::min(emin, op.diag[c]);
  const double tol = degeneracy_tolerance * std::max(1.0, std::abs(emin));
  int count = 0;
  for (unsigned c = 0; c < op.dim; ++c) {
    if (op.diag[c] > emin + tol) continue;
    ++count;
    for (int a = 0; a < op.sites; ++a) out.mz[static_cast<std::size_t>(a)] += cluster_spin(c, a);
  }
  for (int a = 0; a < op.sites; ++a) out.mz[static_cast<std::size_t>(a)] /= count;
  return out;
}

/// Full dense diagonalization; averages over a degenerate ground space.
inline ClusterExpectations dense_ground_expectations(const ClusterOperator& op) {
  using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, max_cluster_dimension, max_cluster_dimension>;
  const auto dim = static_cast<Eigen::Index>(op.dim);
  Mat h = Mat::Zero(dim, dim);
  for (unsigned c = 0; c < op.dim; ++c) {
    h(c, c) += op.diag[c];
    for (int t = 0; t < op.flip_count; ++t)
      h(c, c ^ op.flip_mask[static_cast<std::size_t>(t)]) += op.flip_coeff[static_cast<std::size_t>(t)];
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  const auto& ev = es.eigenvalues();
  const double tol = degeneracy_tolerance * std::max(1.0, std::abs(ev(0)));
  int deg = 1;
  while (deg < dim && ev(deg) - ev(0) < tol) ++deg;

  ClusterExpectations out;
  out.size = op.sites;
  std::array<double, max_cluster_dimension> psi{};
  for (int k = 0; k < deg; ++k) {
    for (unsigned c = 0; c < op.dim; ++c) psi[c] = es.eigenvectors()(c, k);
    accumulate_expectations(op, psi.data(), 1.0 / deg, out);
  }
  return out;
}

/// Lower bound within 1e-8 relative of the lowest eigenvalue of the symmetric
/// tridiagonal matrix (d, e), by Sturm bisection.
inline double tridiagonal_lowest_eigenvalue(const double* d, const double* e, int m) {
  double lo = d[0], hi = d[0];
  for (int i = 0; i < m; ++i) {
    const double r = (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i + 1 < m ? std::abs(e[i]) : 0.0);
    lo = std::min(lo, d[i] - r);
    hi = std::max(hi, d[i] + r);
  }
  // Number of eigenvalues below x.
  auto count_below = [&](double x) {
    int count = 0;
    double q = d[0] - x;
    if (q < 0.0) ++count;
    for (int i = 1; i < m; ++i) {
      if (q == 0.0) q = std::numeric_limits<double>::epsilon() * (std::abs(e[i - 1]) + 1.0);
      q = d[i] - x - e[i - 1] * e[i - 1] / q;
      if (q < 0.0) ++count;
    }
    return count;
  };
  // A coarse bracket suffices: the caller refines by inverse iteration.
  const double stop = 1e-8 * std::max(1.0, hi - lo);
  while (hi - lo > stop) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(mid) >= 1) hi = mid; else lo = mid;
  }
  return lo;
}

/// Unit eigenvector of the tridiagonal matrix for an accurate eigenvalue
/// estimate `theta`, by two steps of inverse iteration.
inline void tridiagonal_eigenvector(const double* d, const double* e, int m, double theta, double* y) {
  constexpr int cap = max_cluster_dimension;
  std::array<double, cap> c{}, rhs{};
  double scale = 0.0;
  for (int i = 0; i < m; ++i) scale = std::max(scale, std::abs(d[i]) + (i > 0 ? std::abs(e[i - 1]) : 0.0));
  const double shift = theta - 1e-10 * std::max(1.0, scale);
  for (int i = 0; i < m; ++i) y[i] = 1.0;
  for (int pass = 0; pass < 3; ++pass) {
    // Thomas algorithm on (T - shift) x = y.
    double diag = d[0] - shift;
    c[0] = m > 1 ? e[0] / diag : 0.0;
    rhs[0] = y[0] / diag;
    for (int i = 1; i < m; ++i) {
      diag = d[i] - shift - e[i - 1] * c[static_cast<std::size_t>(i - 1)];
      if (diag == 0.0) diag = 1e-300;
      c[static_cast<std::size_t>(i)] = i + 1 < m ? e[i] / diag : 0.0;
      rhs[static_cast<std::size_t>(i)] = (y[i] - e[i - 1] * rhs[static_cast<std::size_t>(i - 1)]) / diag;
    }
    y[m - 1] = rhs[static_cast<std::size_t>(m - 1)];
    for (int i = m - 2; i >= 0; --i) y[i] = rhs[static_cast<std::size_t>(i)] - c[static_cast<std::size_t>(i)] * y[i + 1];
    double nrm = 0.0;
    for (int i = 0; i < m; ++i) nrm += y[i] * y[i];
    nrm = 1.0 / std::sqrt(nrm);
    for (int i = 0; i < m; ++i) y[i] *= nrm;
  }
}

/// Lanczos with full reorthogonalization started from the uniform vector.
/// For s < 1 the kinetic part is a sum of s^x strings with negative
/// coefficients connecting every basis state, so the ground state is unique
/// and has positive amplitudes; the uniform start vector therefore always
/// overlaps it. Returns false if the Ritz pair did not converge.
///
/// `warm` (optional, `dim` entries) supplies a start vector and receives the
/// converged ground state.
inline bool lanczos_ground_expectations(const ClusterOperator& op, ClusterExpectations& out,
                                        double* warm = nullptr) {
  constexpr int cap = max_cluster_dimension;
  const int dim = static_cast<int>(op.dim);
  std::array<std::array<double, cap>, cap> basis;
  std::array<double, cap> alpha{};
  std::array<double, cap> beta{};
  std::array<double, cap> w{};
  std::array<double, cap> ritz{};

  const double scale = std::max(1.0, op.norm_bound());
  const double tol = 1e-10 * scale;
  const double inv = 1.0 / std::sqrt(static_cast<double>(dim));
  for (int c = 0; c < dim; ++c) basis[0][static_cast<std::size_t>(c)] = inv;
  if (warm != nullptr && warm[0] > 0.0) {
    // The stored vector is a previous Perron vector; blend in the uniform
    // vector so that no component is missing.
    double nrm = 0.0;
    for (int c = 0; c < dim; ++c) {
      auto& b = basis[0][static_cast<std::size_t>(c)];
      b = warm[c] + 1e-3 * b;
      nrm += b * b;
    }
    nrm = 1.0 / std::sqrt(nrm);
    for (int c = 0; c < dim; ++c) basis[0][static_cast<std::size_t>(c)] *= nrm;
  }

  int m = 0;
  bool converged = false;
  for (int j = 0; j < dim; ++j) {
    auto& vj = basis[static_cast<std::size_t>(j)];
    op.apply(vj.data(), w.data());
    double a = 0.0;
    for (int c = 0; c < dim; ++c) a += vj[static_cast<std::size_t>(c)] * w[static_cast<std::size_t>(c)];
    alpha[static_cast<std::size_t>(j)] = a;
    for (int i = 0; i <= j; ++i) {
      const auto& vi = basis[static_cast<std::size_t>(i)];
      double proj = 0.0;
      for (int c = 0; c < dim; ++c) proj += vi[static_cast<std::size_t>(c)] * w[static_cast<std::size_t>(c)];
      for (int c = 0; c < dim; ++c) w[static_cast<std::size_t>(c)] -= proj * vi[static_cast<std::size_t>(c)];
    }
    double b = 0.0;
    for (int c = 0; c < dim; ++c) b += w[static_cast<std::size_t>(c)] * w[static_cast<std::size_t>(c)];
    b = std::sqrt(b);
    beta[static_cast<std::size_t>(j)] = b;
    m = j + 1;

    const bool exhausted = b < 1e-14 * scale || m == dim;
    if (exhausted || m >= 4) {
      const double theta = tridiagonal_lowest_eigenvalue(alpha.data(), beta.data(), m);
      tridiagonal_eigenvector(alpha.data(), beta.data(), m, theta, ritz.data());
      const double residual = b * std::abs(ritz[static_cast<std::size_t>(m - 1)]);
      if (exhausted || residual < tol) {
        converged = true;
        break;
      }
    }
    auto& next = basis[static_cast<std::size_t>(j + 1)];
    for (int c = 0; c < dim; ++c) next[static_cast<std::size_t>(c)] = w[static_cast<std::size_t>(c)] / b;
  }
  if (!converged) return false;

  std::array<double, cap> psi{};
  for (int i = 0; i < m; ++i) {
    const double y = ritz[static_cast<std::size_t>(i)];
    const auto& vi = basis[static_cast<std::size_t>(i)];
    for (int c = 0; c < dim; ++c) psi[static_cast<std::size_t>(c)] += y * vi[static_cast<std::size_t>(c)];
  }
  double nrm = 0.0;
  for (int c = 0; c < dim; ++c) nrm += psi[static_cast<std::size_t>(c)] * psi[static_cast<std::size_t>(c)];
  nrm = 1.0 / std::sqrt(nrm);
  for (int c = 0; c < dim; ++c) psi[static_cast<std::size_t>(c)] *= nrm;

  // Residual and gap checks on the assembled vector; either failing sends the
  // caller to the dense path.
  op.apply(psi.data(), w.data());
  double rq = 0.0;
  for (int c = 0; c < dim; ++c) rq += psi[static_cast<std::size_t>(c)] * w[static_cast<std::size_t>(c)];
  double res = 0.0;
  for (int c = 0; c < dim; ++c) {
    const double r = w[static_cast<std::size_t>(c)] - rq * psi[static_cast<std::size_t>(c)];
    res += r * r;
  }
  if (std::sqrt(res) > 1e3 * tol) return false;
  // A sign change means the Ritz vector is not the Perron vector.
  bool positive = true, negative = true;
  for (int c = 0; c < dim; ++c) {
    positive = positive && psi[static_cast<std::size_t>(c)] > 0.0;
    negative = negative && psi[static_cast<std::size_t>(c)] < 0.0;
  }
  if (!positive && !negative) return false;

  out = ClusterExpectations{};
  out.size = op.sites;
  accumulate_expectations(op, psi.data(), 1.0, out);
  if (warm != nullptr) {
    const double sign = positive ? 1.0 : -1.0;
    for (int c = 0; c < dim; ++c) warm[c] = sign * psi[static_cast<std::size_t>(c)];
  }
  return true;
}

inline void check_pauli_bounds(const ClusterExpectations& ex) {
  for (int a = 0; a < ex.size; ++a)
    if (std::abs(ex.mz[static_cast<std::size_t>(a)]) > 1.0 + 1e-12 ||
        std::abs(ex.mx[static_cast<std::size_t>(a)]) > 1.0 + 1e-12)
      throw std::logic_error("cluster expectation outside [-1, 1]");
}

}  // namespace detail

namespace detail {

inline ClusterExpectations solve_cluster(const ClusterProblem& cluster, double* warm) {
  const auto op = cluster_operator(cluster);
  ClusterExpectations out;
  if (cluster.s == 1.0) {
    out = classical_ground_expectations(op);
  } else if (!lanczos_ground_expectations(op, out, warm)) {
    out = dense_ground_expectations(op);
    if (warm != nullptr) warm[0] = 0.0;
  }
  check_pauli_bounds(out);
  return out;
}

}  // namespace detail

/// Ground-state <s^z>, <s^x> of every cluster site.
inline ClusterExpectations cluster_ground_expectations(const ClusterProblem& cluster) {
  return detail::solve_cluster(cluster, nullptr);
}

/// Per-site store of the last cluster ground state, used only as the start
/// vector of the next solve for the same center.
class ClusterWarmStart {
public:
  explicit ClusterWarmStart(int sites) : data_(static_cast<std::size_t>(sites) * max_cluster_dimension, 0.0) {}
  double* slot(int center) { return data_.data() + static_cast<std::size_t>(center) * max_cluster_dimension; }

private:
  std::vector<double> data_;
};

enum class SweepOrder { Raster, Random };
enum class UpdateScope { Cluster, Center };

struct BetheOptions {
  SweepOrder order = SweepOrder::Raster;
  UpdateScope scope = UpdateScope::Cluster;
  /// Seeds the permutation stream when order == Random.
  std::uint64_t order_seed = 0;
  /// Weight of the transverse interaction for the FI driver. Held at 1 in all
  /// experiments; 0 reduces FI to TF exactly.
  double fi_coupling = 1.0;
};

inline SweepOrder parse_sweep_order(std::string_view text) {
  if (text == "raster") return SweepOrder::Raster;
  if (text == "random") return SweepOrder::Random;
  throw argument_error("unknown sweep order '" + std::string(text) + "' (expected raster|random)");
}

inline UpdateScope parse_update_scope(std::string_view text) {
  if (text == "cluster") return UpdateScope::Cluster;
  if (text == "center") return UpdateScope::Center;
  throw argument_error("unknown update scope '" + std::string(text) + "' (expected cluster|center)");
}

namespace detail {

template <class Solve>
void sweep_sites(const RfimInstance& instance, MagnetizationField& mags, std::span<const int> order,
                 UpdateScope scope, Solve&& solve) {
  for (int center : order) {
    const ClusterExpectations ex = solve(center);
    mags.mz[static_cast<std::size_t>(center)] = ex.mz[0];
    mags.mx[static_cast<std::size_t>(center)] = ex.mx[0];
    if (scope == UpdateScope::Center) continue;
    const auto nb = instance.neighbors(center);
    for (std::size_t a = 0; a < nb.size(); ++a) {
      mags.mz[static_cast<std::size_t>(nb[a])] = ex.mz[a + 1];
      mags.mx[static_cast<std::size_t>(nb[a])] = ex.mx[a + 1];
    }
  }
}

inline std::vector<int> raster_order(int n) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  return order;
}

}  // namespace detail

/// One Gauss-Seidel pass visiting centers in `order`.
inline MagnetizationField sweep_in_order(const RfimInstance& instance, MagnetizationField mags, double s,
                                         KineticKind kind, std::span<const int> order,
                                         const BetheOptions& options = {}, ClusterWarmStart* warm = nullptr) {
  if (!(s >= 0.0 && s <= 1.0)) throw argument_error("reduced time s must lie in [0, 1]");
  if (mags.size() != instance.site_count()) throw argument_error("magnetization field size mismatch");
  detail::sweep_sites(instance, mags, order, options.scope, [&](int center) {
    return detail::solve_cluster(build_cluster(instance, mags, center, s, kind, options.fi_coupling),
                                 warm != nullptr ? warm->slot(center) : nullptr);
  });
  return mags;
}

/// One raster-order sweep.
inline MagnetizationField sweep(const RfimInstance& instance, MagnetizationField mags, double s, KineticKind kind,
                                const BetheOptions& options = {}) {
  const auto order = detail::raster_order(instance.site_count());
  return sweep_in_order(instance, std::move(mags), s, kind, order, options);
}

enum class Scheme { QA_TF, QA_FI, SA };

inline std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::QA_TF: return "qa-tf";
    case Scheme::QA_FI: return "qa-fi";
    case Scheme::SA: return "sa";
  }
  return "?";
}

inline Scheme parse_scheme(std::string_view text) {
  if (text == "qa-tf" || text == "QA_TF") return Scheme::QA_TF;
  if (text == "qa-fi" || text == "QA_FI") return Scheme::QA_FI;
  if (text == "sa" || text == "SA") return Scheme::SA;
  throw argument_error("unknown scheme '" + std::string(text) + "' (expected qa-tf|qa-fi|sa)");
}

struct AnnealResult {
  MagnetizationField final_magnetization;
  SpinConfiguration rounded_config;
  double final_energy = 0.0;
  Scheme scheme = Scheme::QA_TF;
  double tau = 0.0;
};

/// sign(mz) with mz == 0 sent to +1.
inline SpinConfiguration round_magnetization(std::span<const double> mz) {
  std::vector<int> spins(mz.size());
  std::transform(mz.begin(), mz.end(), spins.begin(), [](double m) { return m < 0.0 ? -1 : 1; });
  return SpinConfiguration(std::move(spins));
}

namespace detail {

class SiteOrder {
public:
  SiteOrder(int sites, SweepOrder kind, std::uint64_t seed)
      : kind_(kind), order_(raster_order(sites)), rng_(seed) {}

  std::span<const int> next() {
    if (kind_ == SweepOrder::Random) std::shuffle(order_.begin(), order_.end(), rng_);
    return order_;
  }

private:
  SweepOrder kind_;
  std::vector<int> order_;
  std::mt19937_64 rng_;
};

}  // namespace detail

/// Mean-field quantum annealing: start from the +x product state and perform
/// one sweep at each s_k = k / steps, k = 1..steps.
inline AnnealResult anneal(const RfimInstance& instance, KineticKind kind, const Schedule& schedule,
                           const BetheOptions& options = {}) {
  auto mags = MagnetizationField::x_polarized(instance.site_count());
  detail::SiteOrder order(instance.site_count(), options.order, options.order_seed);
  ClusterWarmStart warm(instance.site_count());
  for (int k = 1; k <= schedule.steps; ++k)
    mags = sweep_in_order(instance, std::move(mags), schedule.reduced_time(k), kind, order.next(), options, &warm);

  AnnealResult result;
  result.rounded_config = round_magnetization(mags.mz);
  result.final_energy = classical_energy(instance, result.rounded_config);
  result.final_magnetization = std::move(mags);
  result.scheme = kind == KineticKind::TF ? Scheme::QA_TF : Scheme::QA_FI;
  result.tau = schedule.tau;
  return result;
}

}  // namespace rfim_qa

#endif  // RFIM_QA_BETHE_QA_HPP
