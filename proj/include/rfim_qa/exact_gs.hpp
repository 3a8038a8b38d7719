#ifndef RFIM_QA_EXACT_GS_HPP
#define RFIM_QA_EXACT_GS_HPP

// Exact classical ground states of the ferromagnetic RFIM.
//
// Min-cut mapping (spin +1 <-> source side, -1 <-> sink side), with J and h_i
// rescaled by an integer factor q so all capacities are integers:
//
//   source -> i   capacity 2 q max(h_i, 0)
//   i -> sink     capacity 2 q max(-h_i, 0)
//   i <-> j       capacity 2 q J each way
//
//   q E(config) = cut(config) - q J (bond count) - q sum_i |h_i|
//
// The brute-force enumerator is the small-lattice oracle for the same energy.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <string_view>
#include <vector>

#include "rfim_qa/error.hpp"
#include "rfim_qa/model.hpp"

namespace rfim_qa {

enum class GroundStateMethod { BruteForce, MinCut };

inline std::string_view to_string(GroundStateMethod m) {
  return m == GroundStateMethod::BruteForce ? "brute" : "mincut";
}

struct GroundStateResult {
  double energy = 0.0;
  SpinConfiguration config;
  GroundStateMethod method = GroundStateMethod::BruteForce;
  /// Brute force only: more than one configuration attains the minimum.
  bool degenerate = false;
  /// Energy times `scale`, exact when `exact_scale` is set.
  std::int64_t scaled_energy = 0;
  std::int64_t scale = 1;
  bool exact_scale = true;
};

namespace detail {

// Degenerate minimizers can differ in the last bit when summed in floating point, so
// both solvers report the correctly rounded exact value whenever one exists.
inline double reported_energy(const GroundStateResult& r) {
  if (!r.exact_scale) return r.energy;
  return static_cast<double>(r.scaled_energy) / static_cast<double>(r.scale);
}

}  // namespace detail

/// Integer-rescaled couplings: J and h_i multiplied by a power of ten.
struct ScaledInstance {
  std::int64_t scale = 1;
  bool exact = true;
  std::int64_t coupling = 0;
  std::vector<std::int64_t> fields;
};

inline ScaledInstance scale_to_integers(const RfimInstance& instance) {
  constexpr std::int64_t max_scale = 1'000'000;
  auto integral = [](double v, std::int64_t q) {
    const double x = v * static_cast<double>(q);
    return std::abs(x - std::round(x)) <= 1e-9 * std::max(1.0, std::abs(x));
  };
  ScaledInstance out;
  std::int64_t q = 1;
  for (;; q *= 10) {
    bool ok = integral(instance.coupling(), q);
    for (double h : instance.fields()) ok = ok && integral(h, q);
    if (ok) break;
    if (q == max_scale) {
      out.exact = false;
      break;
    }
  }
  out.scale = q;
  out.coupling = std::llround(instance.coupling() * static_cast<double>(q));
  out.fields.reserve(instance.fields().size());
  for (double h : instance.fields()) out.fields.push_back(std::llround(h * static_cast<double>(q)));
  return out;
}

/// Energy times q for integer-rescaled couplings.
inline std::int64_t scaled_energy(const RfimInstance& instance, const ScaledInstance& scaled,
                                  const SpinConfiguration& config) {
  const auto spins = config.spins();
  std::int64_t field_term = 0;
  for (int i = 0; i < instance.site_count(); ++i)
    field_term += scaled.fields[static_cast<std::size_t>(i)] * spins[static_cast<std::size_t>(i)];
  return -scaled.coupling * bond_alignment(instance, spins) - field_term;
}

inline constexpr int brute_force_max_sites = 24;

inline GroundStateResult brute_force_ground_state(const RfimInstance& instance) {
  const int n = instance.site_count();
  if (n > brute_force_max_sites)
    throw capacity_error("brute force limited to " + std::to_string(brute_force_max_sites) + " sites");
  const auto scaled = scale_to_integers(instance);
  const std::int64_t jq = scaled.coupling;

  // Gray-code walk; bit i of `mask` set means spin i is -1.
  std::vector<int> spins(static_cast<std::size_t>(n), 1);
  std::int64_t energy = scaled_energy(instance, scaled, SpinConfiguration(spins));

  // Row-major lexicographic order with +1 < -1: site 0 is the most significant digit.
  auto lex_key = [n](std::uint64_t mask) {
    std::uint64_t key = 0;
    for (int i = 0; i < n; ++i)
      if ((mask >> i) & 1U) key |= std::uint64_t{1} << (n - 1 - i);
    return key;
  };

  std::uint64_t mask = 0;
  std::int64_t best = energy;
  std::uint64_t best_mask = 0;
  std::uint64_t best_key = 0;
  bool degenerate = false;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t g = 1; g < total; ++g) {
    const int i = std::countr_zero(g);
    const auto ui = static_cast<std::size_t>(i);
    std::int64_t local = scaled.fields[ui];
    for (int j : instance.neighbors(i)) local += jq * spins[static_cast<std::size_t>(j)];
    energy += 2 * spins[ui] * local;
    spins[ui] = -spins[ui];
    mask ^= std::uint64_t{1} << i;

    if (energy < best) {
      best = energy;
      best_mask = mask;
      best_key = lex_key(mask);
      degenerate = false;
    } else if (energy == best) {
      degenerate = true;
      const auto key = lex_key(mask);
      if (key < best_key) {
        best_key = key;
        best_mask = mask;
      }
    }
  }

  std::vector<int> best_spins(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) best_spins[static_cast<std::size_t>(i)] = ((best_mask >> i) & 1U) ? -1 : 1;
  GroundStateResult r;
  r.config = SpinConfiguration(std::move(best_spins));
  r.energy = classical_energy(instance, r.config);
  r.method = GroundStateMethod::BruteForce;
  r.degenerate = degenerate;
  r.scaled_energy = best;
  r.scale = scaled.scale;
  r.exact_scale = scaled.exact;
  r.energy = detail::reported_energy(r);
  return r;
}

/// s-t network with integer capacities, solved by Dinic's blocking-flow algorithm.
class FlowNetwork {
public:
  struct Arc {
    int to;
    int reverse;  // index of the paired arc in adjacency_[to]
    std::int64_t capacity;
    std::int64_t original;
  };

  explicit FlowNetwork(int nodes) : adjacency_(static_cast<std::size_t>(nodes)) {}

  int node_count() const noexcept { return static_cast<int>(adjacency_.size()); }

  void add_arc(int from, int to, std::int64_t capacity) { add_pair(from, to, capacity, 0); }

  /// Two opposite arcs of equal capacity sharing one residual pair.
  void add_edge(int a, int b, std::int64_t capacity) { add_pair(a, b, capacity, capacity); }

  const std::vector<Arc>& arcs(int node) const { return adjacency_[static_cast<std::size_t>(node)]; }

  std::int64_t max_flow(int source, int sink) {
    std::int64_t total = 0;
    while (build_levels(source, sink)) {
      cursor_.assign(adjacency_.size(), 0);
      while (std::int64_t pushed = augment(source, sink, std::numeric_limits<std::int64_t>::max())) total += pushed;
    }
    return total;
  }

  /// Nodes reachable from `source` in the residual network.
  std::vector<bool> source_side(int source) const {
    std::vector<bool> seen(adjacency_.size(), false);
    std::vector<int> stack{source};
    seen[static_cast<std::size_t>(source)] = true;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (const Arc& a : adjacency_[static_cast<std::size_t>(u)])
        if (a.capacity > 0 && !seen[static_cast<std::size_t>(a.to)]) {
          seen[static_cast<std::size_t>(a.to)] = true;
          stack.push_back(a.to);
        }
    }
    return seen;
  }

  /// Flow carried by an arc: original capacity minus residual.
  static std::int64_t flow(const Arc& a) { return a.original - a.capacity; }

private:
  void add_pair(int a, int b, std::int64_t cap_ab, std::int64_t cap_ba) {
    if (cap_ab < 0 || cap_ba < 0) throw argument_error("negative arc capacity");
    auto& from = adjacency_[static_cast<std::size_t>(a)];
    auto& to = adjacency_[static_cast<std::size_t>(b)];
    from.push_back({b, static_cast<int>(to.size()), cap_ab, cap_ab});
    to.push_back({a, static_cast<int>(from.size()) - 1, cap_ba, cap_ba});
  }

  bool build_levels(int source, int sink) {
    level_.assign(adjacency_.size(), -1);
    std::queue<int> q;
    level_[static_cast<std::size_t>(source)] = 0;
    q.push(source);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (const Arc& a : adjacency_[static_cast<std::size_t>(u)])
        if (a.capacity > 0 && level_[static_cast<std::size_t>(a.to)] < 0) {
          level_[static_cast<std::size_t>(a.to)] = level_[static_cast<std::size_t>(u)] + 1;
          q.push(a.to);
        }
    }
    return level_[static_cast<std::size_t>(sink)] >= 0;
  }

  std::int64_t augment(int u, int sink, std::int64_t limit) {
    if (u == sink) return limit;
    auto& arcs = adjacency_[static_cast<std::size_t>(u)];
    for (auto& i = cursor_[static_cast<std::size_t>(u)]; i < arcs.size(); ++i) {
      Arc& a = arcs[i];
      if (a.capacity <= 0 || level_[static_cast<std::size_t>(a.to)] != level_[static_cast<std::size_t>(u)] + 1)
        continue;
      const std::int64_t pushed = augment(a.to, sink, std::min(limit, a.capacity));
      if (pushed > 0) {
        a.capacity -= pushed;
        adjacency_[static_cast<std::size_t>(a.to)][static_cast<std::size_t>(a.reverse)].capacity += pushed;
        return pushed;
      }
    }
    return 0;
  }

  std::vector<std::vector<Arc>> adjacency_;
  std::vector<int> level_;
  std::vector<std::size_t> cursor_;
};

/// Network for `instance`; source = site_count, sink = site_count + 1.
inline FlowNetwork build_flow_network(const RfimInstance& instance, const ScaledInstance& scaled) {
  const int n = instance.site_count();
  FlowNetwork net(n + 2);
  const int source = n;
  const int sink = n + 1;
  for (int i = 0; i < n; ++i) {
    const std::int64_t h = scaled.fields[static_cast<std::size_t>(i)];
    if (h > 0) net.add_arc(source, i, 2 * h);
    if (h < 0) net.add_arc(i, sink, -2 * h);
  }
  for (auto [i, j] : instance.bonds()) net.add_edge(i, j, 2 * scaled.coupling);
  return net;
}

/// Constant c such that q E = cut + c.
inline std::int64_t cut_energy_offset(const RfimInstance& instance, const ScaledInstance& scaled) {
  std::int64_t abs_fields = 0;
  for (auto h : scaled.fields) abs_fields += h < 0 ? -h : h;
  return -scaled.coupling * instance.bond_count() - abs_fields;
}

inline GroundStateResult min_cut_ground_state(const RfimInstance& instance) {
  const int n = instance.site_count();
  const auto scaled = scale_to_integers(instance);
  auto net = build_flow_network(instance, scaled);
  const std::int64_t cut = net.max_flow(n, n + 1);
  const auto side = net.source_side(n);

  std::vector<int> spins(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) spins[static_cast<std::size_t>(i)] = side[static_cast<std::size_t>(i)] ? 1 : -1;

  GroundStateResult r;
  r.config = SpinConfiguration(std::move(spins));
  r.energy = classical_energy(instance, r.config);
  r.method = GroundStateMethod::MinCut;
  r.scaled_energy = cut + cut_energy_offset(instance, scaled);
  r.scale = scaled.scale;
  r.exact_scale = scaled.exact;
  r.energy = detail::reported_energy(r);
  return r;
}

}  // namespace rfim_qa

#endif  // RFIM_QA_EXACT_GS_HPP
