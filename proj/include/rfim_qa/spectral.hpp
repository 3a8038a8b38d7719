#ifndef RFIM_QA_SPECTRAL_HPP
#define RFIM_QA_SPECTRAL_HPP

// Instantaneous spectrum of H(s) = (1 - s) H_kin + s H_pot for small lattices.
//
//   H_kin^TF = -sum_i X_i
//   H_kin^FI = -sum_i X_i - sum_<ij> X_i X_j
//
// Basis: s^z product states, bit i set <=> spin i is down. All matrix
// elements are real. dH/ds = H_pot - H_kin for the linear schedule.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rfim_qa/error.hpp"
#include "rfim_qa/lanczos.hpp"
#include "rfim_qa/model.hpp"

namespace rfim_qa {

inline constexpr int spectral_max_sites = 24;
/// Largest dimension diagonalized densely; Lanczos above.
inline constexpr std::size_t dense_max_dimension = 256;

/// Instance-level data shared by H(s) at every s: the classical energy of each
/// basis state and the bit masks of the kinetic X strings.
struct SpectralTerms {
  int sites = 0;
  KineticKind kind = KineticKind::TF;
  std::vector<double> potential;
  std::vector<std::uint32_t> flips;  // single-site masks first, then bond pairs (FI)
  int bond_count = 0;

  static std::shared_ptr<const SpectralTerms> build(const RfimInstance& instance, KineticKind kind) {
    const int n = instance.site_count();
    if (n > spectral_max_sites)
      throw capacity_error("spectral analysis limited to " + std::to_string(spectral_max_sites) + " sites");
    auto terms = std::make_shared<SpectralTerms>();
    terms->sites = n;
    terms->kind = kind;
    terms->bond_count = instance.bond_count();
    const std::size_t dim = std::size_t{1} << n;
    terms->potential.resize(dim);
    const auto bonds = instance.bonds();
    const double j = instance.coupling();
    for (std::size_t state = 0; state < dim; ++state) {
      auto spin = [state](int i) { return (state >> i) & 1U ? -1 : 1; };
      long align = 0;
      for (auto [a, b] : bonds) align += spin(a) * spin(b);
      double field = 0.0;
      for (int i = 0; i < n; ++i) field += instance.field(i) * spin(i);
      terms->potential[state] = -j * static_cast<double>(align) - field;
    }
    for (int i = 0; i < n; ++i) terms->flips.push_back(std::uint32_t{1} << i);
    if (kind == KineticKind::FI)
      for (auto [a, b] : bonds) terms->flips.push_back((std::uint32_t{1} << a) | (std::uint32_t{1} << b));
    return terms;
  }
};

class HamiltonianOperator {
public:
  HamiltonianOperator(std::shared_ptr<const SpectralTerms> terms, double s) : terms_(std::move(terms)), s_(s) {
    if (!(s >= 0.0 && s <= 1.0)) throw argument_error("reduced time s must lie in [0, 1]");
  }

  int sites() const noexcept { return terms_->sites; }
  std::size_t dimension() const noexcept { return terms_->potential.size(); }
  double s() const noexcept { return s_; }
  KineticKind kind() const noexcept { return terms_->kind; }
  bool hermitian() const noexcept { return true; }
  const SpectralTerms& terms() const noexcept { return *terms_; }

  /// H(s) v.
  void apply(std::span<const double> v, std::span<double> out) const { combine(s_, -(1.0 - s_), v, out); }

  /// dH/ds v = (H_pot - H_kin) v.
  void apply_derivative(std::span<const double> v, std::span<double> out) const { combine(1.0, 1.0, v, out); }

  /// Upper bound on the spectral norm (max row sum).
  double norm_bound() const {
    double pmax = 0.0;
    for (double p : terms_->potential) pmax = std::max(pmax, std::abs(p));
    return s_ * pmax + (1.0 - s_) * static_cast<double>(terms_->flips.size());
  }

  Eigen::MatrixXd dense() const {
    const std::size_t dim = dimension();
    if (dim > (std::size_t{1} << 14)) throw capacity_error("dense Hamiltonian limited to 14 sites");
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t c = 0; c < dim; ++c) {
      const auto i = static_cast<Eigen::Index>(c);
      h(i, i) = s_ * terms_->potential[c];
      for (auto mask : terms_->flips) h(i, static_cast<Eigen::Index>(c ^ mask)) += -(1.0 - s_);
    }
    return h;
  }

private:
  void combine(double diag_factor, double flip_factor, std::span<const double> v, std::span<double> out) const {
    const std::size_t dim = dimension();
    if (v.size() != dim || out.size() != dim) throw argument_error("vector dimension mismatch");
    const auto& pot = terms_->potential;
    const auto& flips = terms_->flips;
    for (std::size_t c = 0; c < dim; ++c) {
      double acc = 0.0;
      for (auto mask : flips) acc += v[c ^ mask];
      out[c] = diag_factor * pot[c] * v[c] + flip_factor * acc;
    }
  }

  std::shared_ptr<const SpectralTerms> terms_;
  double s_;
};

inline HamiltonianOperator build_hamiltonian(const RfimInstance& instance, KineticKind kind, double s) {
  return HamiltonianOperator(SpectralTerms::build(instance, kind), s);
}

/// The `k` lowest eigenpairs in nondecreasing order with orthonormal vectors.
/// `guesses` optionally warm-start the iterative path.
inline std::vector<Eigenpair> lowest_eigenpairs(const HamiltonianOperator& h, int k,
                                                const std::vector<std::vector<double>>& guesses = {}) {
  const std::size_t dim = h.dimension();
  if (k < 1 || static_cast<std::size_t>(k) > dim) throw argument_error("eigenpair count must lie in [1, dimension]");

  // s == 1: diagonal, eigenvectors are basis states (stable sort keeps index order on ties).
  if (h.s() == 1.0) {
    const auto& pot = h.terms().potential;
    std::vector<std::size_t> idx(dim);
    for (std::size_t i = 0; i < dim; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return pot[a] < pot[b]; });
    std::vector<Eigenpair> out(static_cast<std::size_t>(k));
    for (int r = 0; r < k; ++r) {
      out[static_cast<std::size_t>(r)].energy = pot[idx[static_cast<std::size_t>(r)]];
      out[static_cast<std::size_t>(r)].vector.assign(dim, 0.0);
      out[static_cast<std::size_t>(r)].vector[idx[static_cast<std::size_t>(r)]] = 1.0;
    }
    return out;
  }

  if (dim <= dense_max_dimension) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.dense());
    if (es.info() != Eigen::Success) throw solver_error("dense eigensolver failed", 0.0);
    std::vector<Eigenpair> out(static_cast<std::size_t>(k));
    for (int r = 0; r < k; ++r) {
      out[static_cast<std::size_t>(r)].energy = es.eigenvalues()(r);
      const auto col = es.eigenvectors().col(r);
      out[static_cast<std::size_t>(r)].vector.assign(col.data(), col.data() + dim);
    }
    return out;
  }

  LanczosOptions opts;
  // Cap Krylov storage near 2^27 doubles for the largest lattices.
  const auto budget = static_cast<int>(std::max<std::size_t>(std::size_t{1} << 27 >> std::min(h.sites(), 27), 1));
  opts.basis_size = std::clamp(budget, k + 8, opts.basis_size);
  opts.keep = std::min(opts.keep, opts.basis_size / 2);
  return lanczos_lowest([&h](std::span<const double> v, std::span<double> w) { h.apply(v, w); }, dim, k,
                        h.norm_bound(), guesses, opts);
}

/// |<psi1| (H_pot - H_kin) |psi0>| for the instance and driver of `h`.
inline double transition_matrix_element(const HamiltonianOperator& h, std::span<const double> psi0,
                                        std::span<const double> psi1) {
  if (psi0.size() != h.dimension() || psi1.size() != h.dimension())
    throw argument_error("state dimension does not match the Hamiltonian");
  std::vector<double> w(h.dimension());
  h.apply_derivative(psi0, w);
  return std::abs(detail::dot(psi1, w));
}

inline double transition_matrix_element(const RfimInstance& instance, KineticKind kind, std::span<const double> psi0,
                                        std::span<const double> psi1) {
  const auto terms = SpectralTerms::build(instance, kind);
  return transition_matrix_element(HamiltonianOperator(terms, 0.0), psi0, psi1);
}

/// Gaps below this at s = 1 mark a degenerate classical ground state.
inline constexpr double degenerate_gap_tolerance = 1e-9;

struct SpectralTrace {
  std::vector<double> s_values;
  std::vector<double> gap01;
  /// E2 - E0; empty when only two levels were requested.
  std::vector<double> gap02;
  std::vector<double> matrix_element;

  std::size_t size() const noexcept { return s_values.size(); }
};

struct TraceOptions {
  bool with_gap02 = true;
  /// Bisect around the gap minimum until the bracket is below `refine_width`.
  bool refine = false;
  double refine_width = 1e-3;
};

inline std::vector<double> uniform_grid(int points) {
  if (points < 2) throw argument_error("grid needs at least two points");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = static_cast<double>(i) / (points - 1);
  grid.back() = 1.0;
  return grid;
}

namespace detail {

struct TracePoint {
  double s;
  double gap01;
  double gap02;
  double element;
};

class TraceEvaluator {
public:
  TraceEvaluator(const RfimInstance& instance, KineticKind kind, int levels)
      : terms_(SpectralTerms::build(instance, kind)), levels_(levels) {}

  TracePoint at(double s) {
    const HamiltonianOperator h(terms_, s);
    std::vector<Eigenpair> pairs;
    try {
      pairs = lowest_eigenpairs(h, levels_, previous_);
    } catch (const solver_error& e) {
      throw solver_error(std::string(e.what()) + " at s=" + std::to_string(s), e.residual());
    }
    // Keep eigenvector signs continuous along the grid.
    for (std::size_t r = 0; r < pairs.size() && r < previous_.size(); ++r)
      if (dot(pairs[r].vector, previous_[r]) < 0.0) scale(pairs[r].vector, -1.0);
    TracePoint p{s, pairs[1].energy - pairs[0].energy,
                 levels_ > 2 ? pairs[2].energy - pairs[0].energy : std::numeric_limits<double>::quiet_NaN(),
                 transition_matrix_element(h, pairs[0].vector, pairs[1].vector)};
    previous_.clear();
    for (auto& e : pairs) previous_.push_back(std::move(e.vector));
    return p;
  }

private:
  std::shared_ptr<const SpectralTerms> terms_;
  int levels_;
  std::vector<std::vector<double>> previous_;
};

}  // namespace detail

inline SpectralTrace spectral_trace(const RfimInstance& instance, KineticKind kind, std::span<const double> grid,
                                    const TraceOptions& options = {}) {
  if (grid.empty()) throw argument_error("empty s grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0)) throw argument_error("grid values must lie in [0, 1]");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw argument_error("grid must be strictly increasing");
  }
  const int levels = options.with_gap02 && (std::size_t{1} << instance.site_count()) >= 3 ? 3 : 2;
  detail::TraceEvaluator eval(instance, kind, levels);
  std::vector<detail::TracePoint> points;
  points.reserve(grid.size());
  for (double s : grid) points.push_back(eval.at(s));

  if (options.refine && points.size() >= 3) {
    // Bracket the minimum and insert midpoints until narrow enough.
    for (;;) {
      // Ignore a degenerate tail at s = 1; its gap is not an avoided crossing.
      auto end = points.end();
      while (end != points.begin() && std::prev(end)->gap01 < degenerate_gap_tolerance) --end;
      if (end == points.begin()) break;
      const auto it = std::min_element(points.begin(), end,
                                        [](const auto& a, const auto& b) { return a.gap01 < b.gap01; });
      const auto i = static_cast<std::size_t>(it - points.begin());
      const double lo = points[i > 0 ? i - 1 : i].s;
      const double hi = points[i + 1 < points.size() ? i + 1 : i].s;
      if (hi - lo < options.refine_width) break;
      std::vector<double> fresh;
      if (i > 0) fresh.push_back(0.5 * (points[i - 1].s + points[i].s));
      if (i + 1 < points.size()) fresh.push_back(0.5 * (points[i].s + points[i + 1].s));
      for (double s : fresh) points.push_back(eval.at(s));
      std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.s < b.s; });
    }
  }

  SpectralTrace trace;
  for (const auto& p : points) {
    trace.s_values.push_back(p.s);
    trace.gap01.push_back(p.gap01);
    if (levels > 2) trace.gap02.push_back(p.gap02);
    trace.matrix_element.push_back(p.element);
  }
  return trace;
}

inline SpectralTrace spectral_trace(const RfimInstance& instance, KineticKind kind, int grid_points,
                                    const TraceOptions& options = {}) {
  const auto grid = uniform_grid(grid_points);
  return spectral_trace(instance, kind, grid, options);
}

struct CharTimeReport {
  double eps_min = 0.0;
  double s_at_eps_min = 0.0;
  double m_max = 0.0;
  double s_at_m_max = 0.0;
  /// m_max / eps_min^2 with the extrema taken separately.
  double tau_c = 0.0;
  /// max_s m(s) / gap(s)^2.
  double tau_c_pointwise = 0.0;
  /// Trailing grid points dropped because the final Hamiltonian is degenerate.
  int excluded_points = 0;
  bool endpoint_excluded = false;
};

/// Both conventions for the adiabatic time scale. When the gap at the last
/// grid point is below 1e-9 (degenerate classical ground state) that point and
/// any directly preceding points that are also below the tolerance are left
/// out, since the eigenvectors there are not determined.
inline CharTimeReport characteristic_time(const SpectralTrace& trace) {
  const std::size_t n = trace.size();
  if (n == 0) throw argument_error("empty spectral trace");
  if (trace.gap01.size() != n || trace.matrix_element.size() != n) throw argument_error("ragged spectral trace");

  std::size_t end = n;
  CharTimeReport r;
  if (trace.gap01[n - 1] < degenerate_gap_tolerance) {
    r.endpoint_excluded = true;
    while (end > 0 && trace.gap01[end - 1] < degenerate_gap_tolerance) --end;
    r.excluded_points = static_cast<int>(n - end);
  }
  if (end == 0) throw std::domain_error("spectral trace is degenerate at every grid point");

  r.eps_min = std::numeric_limits<double>::infinity();
  r.m_max = -1.0;
  r.tau_c_pointwise = 0.0;
  for (std::size_t i = 0; i < end; ++i) {
    const double g = trace.gap01[i];
    const double m = trace.matrix_element[i];
    if (g < r.eps_min) {
      r.eps_min = g;
      r.s_at_eps_min = trace.s_values[i];
    }
    if (m > r.m_max) {
      r.m_max = m;
      r.s_at_m_max = trace.s_values[i];
    }
    if (g > 0.0) r.tau_c_pointwise = std::max(r.tau_c_pointwise, m / (g * g));
  }
  if (!(r.eps_min > 0.0)) throw std::domain_error("minimum gap is zero inside the trace");
  r.tau_c = r.m_max / (r.eps_min * r.eps_min);
  return r;
}

}  // namespace rfim_qa

#endif  // RFIM_QA_SPECTRAL_HPP
