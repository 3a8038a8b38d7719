// Anneal one 12x12 instance with each scheme and compare to the exact ground state.

#include <iostream>

#include "rfim_qa/rfim_qa.hpp"

int main() {
  using namespace rfim_qa;
  const auto instance = generate_instance(12, 12, 2.0, 7);
  const auto exact = min_cut_ground_state(instance);
  std::cout << "exact ground state energy " << exact.energy << '\n';

  for (Scheme scheme : {Scheme::QA_TF, Scheme::QA_FI, Scheme::SA}) {
    const auto result = run_scheme(instance, scheme, 100.0, std::nullopt);
    std::cout << to_string(scheme) << "  E=" << result.final_energy
              << "  residual/site=" << (result.final_energy - exact.energy) / instance.site_count() << '\n';
  }

  // Characteristic times of the two drivers on a 3x3 instance.
  const auto small = generate_instance(3, 3, 2.0, 1);
  for (KineticKind kind : {KineticKind::TF, KineticKind::FI}) {
    const auto report = characteristic_time(spectral_trace(small, kind, 201));
    std::cout << to_string(kind) << "  eps_min=" << report.eps_min << "  m_max=" << report.m_max
              << "  tau_c=" << report.tau_c << '\n';
  }
}
