#ifndef RFIM_QA_LANCZOS_HPP
#define RFIM_QA_LANCZOS_HPP

// Thick-restart Lanczos with explicit locking for the few lowest eigenpairs of
// a real symmetric operator given only by its action.
//
// Eigenpairs are found one at a time. Each pass runs on the orthogonal
// complement of the vectors locked so far, so exact degeneracies are resolved
// even though a single Krylov sequence can only see one vector per eigenspace.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rfim_qa/error.hpp"

namespace rfim_qa {

struct Eigenpair {
  double energy = 0.0;
  std::vector<double> vector;
};

struct LanczosOptions {
  /// Krylov basis size before a restart.
  int basis_size = 40;
  /// Ritz vectors carried over a restart.
  int keep = 12;
  /// Convergence: ||H v - theta v|| <= tolerance * norm_bound.
  double tolerance = 1e-11;
  int max_matvecs_per_pair = 20000;
  std::uint64_t seed = 0x5eed;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline void scale(std::span<double> a, double f) {
  for (double& x : a) x *= f;
}

/// Two rounds of classical Gram-Schmidt against `against`; returns the
/// first-round coefficients plus corrections.
inline void orthogonalize(std::span<double> w, const std::vector<std::vector<double>>& against, std::size_t count,
                          std::vector<double>* coeffs = nullptr) {
  if (coeffs) coeffs->assign(count, 0.0);
  for (int round = 0; round < 2; ++round)
    for (std::size_t i = 0; i < count; ++i) {
      const double h = dot(against[i], w);
      axpy(-h, against[i], w);
      if (coeffs) (*coeffs)[i] += h;
    }
}

}  // namespace detail

using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

/// `k` lowest eigenpairs of the symmetric operator `apply` on R^dim, energies
/// nondecreasing. `guesses` (possibly empty) seed the start vector of each pass.
inline std::vector<Eigenpair> lanczos_lowest(const LinearOperator& apply, std::size_t dim, int k, double norm_bound,
                                             const std::vector<std::vector<double>>& guesses = {},
                                             const LanczosOptions& options = {}) {
  if (k < 1 || static_cast<std::size_t>(k) > dim) throw argument_error("requested eigenpair count out of range");
  const double tol = options.tolerance * std::max(1.0, norm_bound);

  std::vector<std::vector<double>> locked;
  std::vector<double> locked_energy;
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;

  for (int pair = 0; pair < k; ++pair) {
    const std::size_t remaining = dim - locked.size();
    const int m_max = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(options.basis_size), remaining));
    const int keep = std::max(1, std::min(options.keep, m_max - 1));

    std::vector<std::vector<double>> basis(static_cast<std::size_t>(m_max) + 1, std::vector<double>(dim));
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m_max, m_max);

    // Start vector: the guess for this pass if any, mixed with a little noise
    // so that no component is missing.
    auto& v0 = basis[0];
    for (double& x : v0) x = gauss(rng);
    if (static_cast<std::size_t>(pair) < guesses.size() && guesses[static_cast<std::size_t>(pair)].size() == dim) {
      const double noise = 1e-3 / std::max(1.0, detail::norm(v0));
      detail::scale(v0, noise);
      detail::axpy(1.0, guesses[static_cast<std::size_t>(pair)], v0);
    }
    detail::orthogonalize(v0, locked, locked.size());
    double n0 = detail::norm(v0);
    if (n0 == 0.0) throw solver_error("lanczos: degenerate start vector", 0.0);
    detail::scale(v0, 1.0 / n0);

    std::vector<double> w(dim);
    std::vector<double> coeffs;
    int active = 0;  // vectors 0..active-1 already have their T column
    int matvecs = 0;
    double residual = std::numeric_limits<double>::infinity();
    bool done = false;
    Eigenpair found;

    while (!done) {
      int m = active;
      double beta = 0.0;
      for (int j = active; j < m_max; ++j) {
        apply(basis[static_cast<std::size_t>(j)], w);
        ++matvecs;
        detail::orthogonalize(w, locked, locked.size());
        detail::orthogonalize(w, basis, static_cast<std::size_t>(j) + 1, &coeffs);
        for (int i = 0; i <= j; ++i) t(i, j) = t(j, i) = coeffs[static_cast<std::size_t>(i)];
        beta = detail::norm(w);
        m = j + 1;
        if (beta <= 1e-14 * std::max(1.0, norm_bound)) {
          beta = 0.0;
          break;
        }
        auto& next = basis[static_cast<std::size_t>(j) + 1];
        for (std::size_t c = 0; c < dim; ++c) next[c] = w[c] / beta;
      }

      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.topLeftCorner(m, m));
      const auto& s = es.eigenvectors();
      residual = beta * std::abs(s(m - 1, 0));

      if (residual <= tol || beta == 0.0 || m == static_cast<int>(remaining)) {
        found.vector.assign(dim, 0.0);
        for (int i = 0; i < m; ++i) detail::axpy(s(i, 0), basis[static_cast<std::size_t>(i)], found.vector);
        detail::orthogonalize(found.vector, locked, locked.size());
        detail::scale(found.vector, 1.0 / detail::norm(found.vector));
        apply(found.vector, w);
        found.energy = detail::dot(found.vector, w);
        done = true;
        break;
      }
      if (matvecs >= options.max_matvecs_per_pair)
        throw solver_error("lanczos: no convergence after " + std::to_string(matvecs) + " operator applications",
                           residual);

      // Thick restart: keep the lowest Ritz vectors, continue from the residual.
      const int p = std::min(keep, m - 1);
      std::vector<std::vector<double>> ritz(static_cast<std::size_t>(p), std::vector<double>(dim, 0.0));
      for (int r = 0; r < p; ++r)
        for (int i = 0; i < m; ++i) detail::axpy(s(i, r), basis[static_cast<std::size_t>(i)], ritz[static_cast<std::size_t>(r)]);
      for (int r = 0; r < p; ++r) basis[static_cast<std::size_t>(r)] = std::move(ritz[static_cast<std::size_t>(r)]);
      basis[static_cast<std::size_t>(p)] = basis[static_cast<std::size_t>(m)];
      t.setZero();
      for (int r = 0; r < p; ++r) {
        t(r, r) = es.eigenvalues()(r);
        t(p, r) = t(r, p) = beta * s(m - 1, r);
      }
      active = p;
    }
    locked.push_back(std::move(found.vector));
    locked_energy.push_back(found.energy);
  }

  // Rayleigh-Ritz on the locked space fixes the ordering and mixes any
  // near-degenerate pairs consistently.
  const auto kk = static_cast<Eigen::Index>(locked.size());
  Eigen::MatrixXd proj(kk, kk);
  std::vector<std::vector<double>> hq(locked.size(), std::vector<double>(dim));
  for (std::size_t a = 0; a < locked.size(); ++a) apply(locked[a], hq[a]);
  for (Eigen::Index a = 0; a < kk; ++a)
    for (Eigen::Index b = 0; b < kk; ++b)
      proj(a, b) = detail::dot(locked[static_cast<std::size_t>(a)], hq[static_cast<std::size_t>(b)]);
  proj = 0.5 * (proj + proj.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rr(proj);
  std::vector<Eigenpair> out(locked.size());
  for (Eigen::Index r = 0; r < kk; ++r) {
    auto& e = out[static_cast<std::size_t>(r)];
    e.energy = rr.eigenvalues()(r);
    e.vector.assign(dim, 0.0);
    for (Eigen::Index a = 0; a < kk; ++a) detail::axpy(rr.eigenvectors()(a, r), locked[static_cast<std::size_t>(a)], e.vector);
    detail::scale(e.vector, 1.0 / detail::norm(e.vector));
  }
  return out;
}

}  // namespace rfim_qa

#endif  // RFIM_QA_LANCZOS_HPP
