#ifndef RFIM_QA_BETHE_SA_HPP
#define RFIM_QA_BETHE_SA_HPP

// Thermal counterpart of the Bethe iteration: the kinetic term is dropped and
// each cluster is averaged over its classical Boltzmann distribution at the
// current temperature T = t0 * (1 - k / steps).

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "rfim_qa/bethe_qa.hpp"
#include "rfim_qa/error.hpp"
#include "rfim_qa/model.hpp"

namespace rfim_qa {

struct ThermalSchedule {
  double t0;
  double tau;
  int steps;

  ThermalSchedule(double t0_in, double tau_in) : ThermalSchedule(t0_in, tau_in, static_cast<int>(std::lround(tau_in))) {}

  ThermalSchedule(double t0_in, double tau_in, int steps_in) : t0(t0_in), tau(tau_in), steps(std::max(steps_in, 1)) {
    if (!(t0 > 0.0) || !std::isfinite(t0)) throw argument_error("initial temperature must be positive");
    if (!(tau > 0.0) || !std::isfinite(tau)) throw argument_error("schedule tau must be positive");
  }

  /// Exactly 0 at k == steps.
  double temperature(int k) const {
    if (k >= steps) return 0.0;
    return t0 * (1.0 - static_cast<double>(k) / static_cast<double>(steps));
  }
};

/// 2 * (4J + max|h_i|).
inline double default_initial_temperature(const RfimInstance& instance) {
  double hmax = 0.0;
  for (double h : instance.fields()) hmax = std::max(hmax, std::abs(h));
  return 2.0 * (4.0 * instance.coupling() + hmax);
}

namespace detail {

inline ClusterProblem thermal_cluster(const RfimInstance& instance, std::span<const double> mz, int center) {
  ClusterProblem c;
  c.center = center;
  c.s = 1.0;
  c.coupling = instance.coupling();
  c.h_center = instance.field(center);
  const auto nb = instance.neighbors(center);
  c.neighbor_count = static_cast<int>(nb.size());
  for (int a = 0; a < c.neighbor_count; ++a) {
    const int j = nb[static_cast<std::size_t>(a)];
    c.neighbor_sites[static_cast<std::size_t>(a)] = j;
    double outer = 0.0;
    for (int k : instance.neighbors(j))
      if (k != center) outer += mz[static_cast<std::size_t>(k)];
    c.effective_z_fields[static_cast<std::size_t>(a)] = instance.field(j) + c.coupling * outer;
    c.effective_x_fields[static_cast<std::size_t>(a)] = 0.0;
  }
  return c;
}

inline ClusterExpectations thermal_expectations(const ClusterProblem& c, double temperature) {
  std::array<double, max_cluster_dimension> energy{};
  const unsigned dim = 1U << c.site_count();
  cluster_potential(c, std::span<double>(energy.data(), dim));
  const double emin = *std::min_element(energy.begin(), energy.begin() + dim);

  ClusterExpectations out;
  out.size = c.site_count();
  double z = 0.0;
  const double tol = degeneracy_tolerance * std::max(1.0, std::abs(emin));
  for (unsigned st = 0; st < dim; ++st) {
    double w;
    if (temperature == 0.0) {
      w = energy[st] <= emin + tol ? 1.0 : 0.0;
    } else {
      w = std::exp(-(energy[st] - emin) / temperature);
    }
    if (w == 0.0) continue;
    z += w;
    for (int a = 0; a < out.size; ++a) out.mz[static_cast<std::size_t>(a)] += w * cluster_spin(st, a);
  }
  for (int a = 0; a < out.size; ++a) out.mz[static_cast<std::size_t>(a)] /= z;
  return out;
}

}  // namespace detail

/// Boltzmann <s^z> of each cluster site around `center` (index 0 = center).
inline std::vector<double> thermal_cluster_mz(const RfimInstance& instance, std::span<const double> mz_field,
                                              int center, double temperature) {
  if (center < 0 || center >= instance.site_count()) throw argument_error("cluster center out of range");
  if (static_cast<int>(mz_field.size()) != instance.site_count())
    throw argument_error("magnetization field size mismatch");
  if (!(temperature >= 0.0)) throw argument_error("temperature must be nonnegative");
  const auto ex = detail::thermal_expectations(detail::thermal_cluster(instance, mz_field, center), temperature);
  return {ex.mz.begin(), ex.mz.begin() + ex.size};
}

/// One Gauss-Seidel thermal sweep. mx is left at zero.
inline MagnetizationField thermal_sweep_in_order(const RfimInstance& instance, MagnetizationField mags,
                                                 double temperature, std::span<const int> order,
                                                 UpdateScope scope = UpdateScope::Cluster) {
  if (!(temperature >= 0.0)) throw argument_error("temperature must be nonnegative");
  if (mags.size() != instance.site_count()) throw argument_error("magnetization field size mismatch");
  detail::sweep_sites(instance, mags, order, scope, [&](int center) {
    auto ex = detail::thermal_expectations(detail::thermal_cluster(instance, mags.mz, center), temperature);
    detail::check_pauli_bounds(ex);
    return ex;
  });
  return mags;
}

inline MagnetizationField thermal_sweep(const RfimInstance& instance, MagnetizationField mags, double temperature,
                                        UpdateScope scope = UpdateScope::Cluster) {
  const auto order = detail::raster_order(instance.site_count());
  return thermal_sweep_in_order(instance, std::move(mags), temperature, order, scope);
}

/// Starts from mz = 0 and performs one sweep per temperature step k = 1..steps.
inline AnnealResult anneal_thermal(const RfimInstance& instance, const ThermalSchedule& schedule,
                                   const BetheOptions& options = {}) {
  const auto n = static_cast<std::size_t>(instance.site_count());
  MagnetizationField mags{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  detail::SiteOrder order(instance.site_count(), options.order, options.order_seed);
  for (int k = 1; k <= schedule.steps; ++k)
    mags = thermal_sweep_in_order(instance, std::move(mags), schedule.temperature(k), order.next(), options.scope);

  AnnealResult result;
  result.rounded_config = round_magnetization(mags.mz);
  result.final_energy = classical_energy(instance, result.rounded_config);
  result.final_magnetization = std::move(mags);
  result.scheme = Scheme::SA;
  result.tau = schedule.tau;
  return result;
}

}  // namespace rfim_qa

#endif  // RFIM_QA_BETHE_SA_HPP
