#ifndef RFIM_QA_MODEL_HPP
#define RFIM_QA_MODEL_HPP

// Random-field Ising model on an open-boundary square lattice.
//
//   H = -J sum_<ij> s_i s_j - sum_i h_i s_i
//
// Sites are indexed row-major, index = y * width + x. Disorder is drawn from
// std::mt19937_64 seeded with the instance seed: h_i = +1 if the top bit of
// the i-th 64-bit draw is set, -1 otherwise.

#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rfim_qa/error.hpp"

namespace rfim_qa {

enum class Boundary { Open };

enum class KineticKind { TF, FI };

inline std::string_view to_string(KineticKind kind) {
  return kind == KineticKind::TF ? "tf" : "fi";
}

inline KineticKind parse_kinetic_kind(std::string_view text) {
  if (text == "tf" || text == "TF") return KineticKind::TF;
  if (text == "fi" || text == "FI") return KineticKind::FI;
  throw argument_error("unknown kinetic kind '" + std::string(text) + "' (expected tf|fi)");
}

class RfimInstance {
public:
  static constexpr int max_degree = 4;

  RfimInstance(int width, int height, double coupling, std::vector<double> fields,
               std::uint64_t seed = 0)
      : width_(width), height_(height), coupling_(coupling), fields_(std::move(fields)), seed_(seed) {
    if (width < 1 || height < 1)
      throw argument_error("lattice dimensions must be positive");
    if (!(coupling > 0.0) || !std::isfinite(coupling))
      throw argument_error("coupling J must be positive and finite");
    if (fields_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
      throw argument_error("field count does not match width*height");
    for (double h : fields_)
      if (!std::isfinite(h)) throw argument_error("fields must be finite");
    build_neighbors();
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int site_count() const noexcept { return width_ * height_; }
  double coupling() const noexcept { return coupling_; }
  std::span<const double> fields() const noexcept { return fields_; }
  double field(int site) const { return fields_[static_cast<std::size_t>(site)]; }
  Boundary boundary() const noexcept { return Boundary::Open; }
  std::uint64_t seed() const noexcept { return seed_; }

  int bond_count() const noexcept { return width_ * (height_ - 1) + height_ * (width_ - 1); }

  int degree(int site) const { return degree_[static_cast<std::size_t>(site)]; }

  /// Neighbors in the order left, right, up (y-1), down (y+1); absent ones omitted.
  std::span<const int> neighbors(int site) const {
    const auto i = static_cast<std::size_t>(site);
    return {neighbors_[i].data(), static_cast<std::size_t>(degree_[i])};
  }

  /// Each bond once, as (i, j) with i < j.
  std::vector<std::pair<int, int>> bonds() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<std::size_t>(bond_count()));
    for (int y = 0; y < height_; ++y)
      for (int x = 0; x < width_; ++x) {
        const int i = y * width_ + x;
        if (x + 1 < width_) out.emplace_back(i, i + 1);
        if (y + 1 < height_) out.emplace_back(i, i + width_);
      }
    return out;
  }

private:
  void build_neighbors() {
    const auto n = static_cast<std::size_t>(site_count());
    neighbors_.assign(n, {-1, -1, -1, -1});
    degree_.assign(n, 0);
    for (int y = 0; y < height_; ++y)
      for (int x = 0; x < width_; ++x) {
        const auto i = static_cast<std::size_t>(y * width_ + x);
        auto& nb = neighbors_[i];
        int& d = degree_[i];
        if (x > 0) nb[d++] = static_cast<int>(i) - 1;
        if (x + 1 < width_) nb[d++] = static_cast<int>(i) + 1;
        if (y > 0) nb[d++] = static_cast<int>(i) - width_;
        if (y + 1 < height_) nb[d++] = static_cast<int>(i) + width_;
      }
  }

  int width_;
  int height_;
  double coupling_;
  std::vector<double> fields_;
  std::uint64_t seed_;
  std::vector<std::array<int, max_degree>> neighbors_;
  std::vector<int> degree_;
};

class SpinConfiguration {
public:
  SpinConfiguration() = default;

  explicit SpinConfiguration(std::vector<int> spins) : spins_(std::move(spins)) {
    for (int s : spins_)
      if (s != 1 && s != -1) throw argument_error("spin values must be +1 or -1");
  }

  static SpinConfiguration all_up(int n) { return SpinConfiguration(std::vector<int>(static_cast<std::size_t>(n), 1)); }

  int size() const noexcept { return static_cast<int>(spins_.size()); }
  int operator[](int site) const { return spins_[static_cast<std::size_t>(site)]; }
  std::span<const int> spins() const noexcept { return spins_; }

  friend bool operator==(const SpinConfiguration&, const SpinConfiguration&) = default;

private:
  std::vector<int> spins_;
};

/// Linear schedule s_k = k / steps, k = 0..steps. steps defaults to round(tau).
struct Schedule {
  double tau;
  int steps;

  explicit Schedule(double tau_in) : Schedule(tau_in, static_cast<int>(std::lround(tau_in))) {}

  Schedule(double tau_in, int steps_in) : tau(tau_in), steps(steps_in) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw argument_error("schedule tau must be positive");
    if (steps < 1) steps = 1;
  }

  double reduced_time(int k) const { return static_cast<double>(k) / static_cast<double>(steps); }
};

inline RfimInstance generate_instance(int width, int height, double coupling, std::uint64_t seed) {
  if (width < 1 || height < 1) throw argument_error("lattice dimensions must be positive");
  if (!(coupling > 0.0)) throw argument_error("coupling J must be positive");
  std::mt19937_64 rng(seed);
  std::vector<double> fields(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  for (double& h : fields) h = (rng() >> 63) != 0 ? 1.0 : -1.0;
  return RfimInstance(width, height, coupling, std::move(fields), seed);
}

inline std::vector<int> neighbor_list(const RfimInstance& instance, int site) {
  if (site < 0 || site >= instance.site_count()) throw argument_error("site index out of range");
  auto nb = instance.neighbors(site);
  return {nb.begin(), nb.end()};
}

/// Bond term sum_<ij> s_i s_j as an exact integer.
inline long bond_alignment(const RfimInstance& instance, std::span<const int> spins) {
  long total = 0;
  for (int y = 0; y < instance.height(); ++y)
    for (int x = 0; x < instance.width(); ++x) {
      const int i = y * instance.width() + x;
      const int si = spins[static_cast<std::size_t>(i)];
      if (x + 1 < instance.width()) total += si * spins[static_cast<std::size_t>(i + 1)];
      if (y + 1 < instance.height()) total += si * spins[static_cast<std::size_t>(i + instance.width())];
    }
  return total;
}

inline double classical_energy(const RfimInstance& instance, const SpinConfiguration& config) {
  if (config.size() != instance.site_count())
    throw argument_error("configuration length does not match instance");
  const auto spins = config.spins();
  double field_term = 0.0;
  for (int i = 0; i < instance.site_count(); ++i) field_term += instance.field(i) * spins[static_cast<std::size_t>(i)];
  return -instance.coupling() * static_cast<double>(bond_alignment(instance, spins)) - field_term;
}

// ---- instance file format ------------------------------------------------
//
//   rfim v1
//   <width> <height> <J> <seed>
//   <h_0> <h_1> ... (row-major)

namespace detail {

inline std::string format_real(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    std::ostringstream os;
    os << static_cast<long long>(v);
    return os.str();
  }
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

}  // namespace detail

inline void write_instance(std::ostream& out, const RfimInstance& instance) {
  out << "rfim v1\n";
  out << instance.width() << ' ' << instance.height() << ' ' << detail::format_real(instance.coupling()) << ' '
      << instance.seed() << '\n';
  const auto fields = instance.fields();
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ' ';
    out << detail::format_real(fields[i]);
  }
  out << '\n';
}

inline RfimInstance read_instance(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw format_error("instance: missing header line");
  {
    std::istringstream hs(line);
    std::string magic, version, extra;
    hs >> magic >> version;
    if (magic != "rfim" || version != "v1" || (hs >> extra))
      throw format_error("instance: expected header 'rfim v1', got '" + line + "'");
  }
  if (!std::getline(in, line)) throw format_error("instance: missing dimensions line");
  int width = 0, height = 0;
  double coupling = 0.0;
  std::uint64_t seed = 0;
  {
    std::istringstream ds(line);
    std::string extra;
    if (!(ds >> width >> height >> coupling >> seed) || (ds >> extra))
      throw format_error("instance: expected 'width height J seed', got '" + line + "'");
  }
  if (width < 1 || height < 1) throw format_error("instance: non-positive dimensions");
  if (!std::getline(in, line)) throw format_error("instance: missing fields line");
  std::vector<double> fields;
  {
    std::istringstream fs(line);
    double h;
    while (fs >> h) fields.push_back(h);
    if (!fs.eof()) throw format_error("instance: malformed field value");
  }
  if (fields.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw format_error("instance: expected " + std::to_string(width * height) + " fields, got " +
                       std::to_string(fields.size()));
  try {
    return RfimInstance(width, height, coupling, std::move(fields), seed);
  } catch (const argument_error& e) {
    throw format_error(std::string("instance: ") + e.what());
  }
}

}  // namespace rfim_qa

#endif  // RFIM_QA_MODEL_HPP
