#ifndef RFIM_QA_HARNESS_HPP
#define RFIM_QA_HARNESS_HPP

// Disorder ensembles, residual-energy statistics and CSV persistence.
//
// Sample k of an experiment uses seed base_seed + k (k = 0..samples-1) for
// generate_instance, i.e. std::mt19937_64 seeded with that value.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "rfim_qa/bethe_qa.hpp"
#include "rfim_qa/bethe_sa.hpp"
#include "rfim_qa/error.hpp"
#include "rfim_qa/exact_gs.hpp"
#include "rfim_qa/model.hpp"
#include "rfim_qa/spectral.hpp"

namespace rfim_qa {

struct ExperimentConfig {
  std::string name = "experiment";
  int width = 20;
  int height = 20;
  std::vector<double> J_values{2.0};
  std::vector<double> tau_values{100.0};
  int samples = 40;
  std::uint64_t base_seed = 1;
  std::vector<Scheme> schemes{Scheme::QA_TF, Scheme::QA_FI, Scheme::SA};
  /// Initial SA temperature; default_initial_temperature() when unset.
  std::optional<double> t0;
  std::string output_dir;
  /// Worker threads; 0 means hardware concurrency.
  int threads = 0;
  BetheOptions bethe;
  /// Replaces generate_instance when set (tests, forced instances).
  std::function<RfimInstance(int width, int height, double J, std::uint64_t seed)> instance_factory;

  std::uint64_t sample_seed(int k) const { return base_seed + static_cast<std::uint64_t>(k); }

  void validate() const {
    if (width < 1 || height < 1) throw argument_error("experiment lattice must be at least 1x1");
    if (samples < 1) throw argument_error("experiment needs at least one sample");
    if (J_values.empty() || tau_values.empty() || schemes.empty())
      throw argument_error("experiment needs J values, tau values and schemes");
    for (double j : J_values)
      if (!(j > 0.0)) throw argument_error("J values must be positive");
    for (double t : tau_values)
      if (!(t > 0.0)) throw argument_error("tau values must be positive");
    if (t0 && !(*t0 > 0.0)) throw argument_error("t0 must be positive");
  }

  /// 100x100, 80 samples, J in {2.0, 1.5, 1.0, 0.6}.
  static ExperimentConfig full_scale() {
    ExperimentConfig c;
    c.name = "full-scale";
    c.width = c.height = 100;
    c.samples = 80;
    c.J_values = {2.0, 1.5, 1.0, 0.6};
    c.tau_values = {1, 3, 10, 30, 100};
    return c;
  }

  /// 20x20, 40 samples.
  static ExperimentConfig desk_scale() {
    ExperimentConfig c;
    c.name = "desk-scale";
    c.J_values = {2.0, 1.5, 1.0, 0.6};
    c.tau_values = {1, 3, 10, 30, 100};
    return c;
  }
};

struct RunRecord {
  Scheme scheme = Scheme::QA_TF;
  double J = 0.0;
  double tau = 0.0;
  std::uint64_t seed = 0;
  double final_energy = 0.0;
  double exact_energy = 0.0;
  double residual_total = 0.0;
  double residual_per_site = 0.0;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

inline constexpr double residual_floor = -1e-9;

/// One annealing run of `scheme` on `instance`.
inline AnnealResult run_scheme(const RfimInstance& instance, Scheme scheme, double tau, std::optional<double> t0,
                               const BetheOptions& options = {}) {
  switch (scheme) {
    case Scheme::QA_TF: return anneal(instance, KineticKind::TF, Schedule(tau), options);
    case Scheme::QA_FI: return anneal(instance, KineticKind::FI, Schedule(tau), options);
    case Scheme::SA:
      return anneal_thermal(instance, ThermalSchedule(t0.value_or(default_initial_temperature(instance)), tau), options);
  }
  throw argument_error("unknown scheme");
}

inline RunRecord make_record(Scheme scheme, const RfimInstance& instance, double tau, double final_energy,
                             double exact_energy) {
  RunRecord r;
  r.scheme = scheme;
  r.J = instance.coupling();
  r.tau = tau;
  r.seed = instance.seed();
  r.final_energy = final_energy;
  r.exact_energy = exact_energy;
  r.residual_total = final_energy - exact_energy;
  r.residual_per_site = r.residual_total / instance.site_count();
  if (r.residual_total < residual_floor)
    throw std::logic_error("annealed energy below the exact ground state (seed " + std::to_string(r.seed) + ")");
  return r;
}

// ---- CSV -----------------------------------------------------------------

inline constexpr const char* records_header =
    "scheme,J,tau,seed,final_energy,exact_energy,residual_total,residual_per_site";

namespace detail {

inline std::string exact_real(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw format_error("bad " + what + " value '" + text + "'");
  }
}

inline std::uint64_t parse_uint(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw format_error("bad " + what + " value '" + text + "'");
  }
}

}  // namespace detail

inline void write_records(std::ostream& out, const std::vector<RunRecord>& records) {
  out << records_header << '\n';
  for (const auto& r : records)
    out << to_string(r.scheme) << ',' << detail::exact_real(r.J) << ',' << detail::exact_real(r.tau) << ',' << r.seed
        << ',' << detail::exact_real(r.final_energy) << ',' << detail::exact_real(r.exact_energy) << ','
        << detail::exact_real(r.residual_total) << ',' << detail::exact_real(r.residual_per_site) << '\n';
}

inline std::vector<RunRecord> read_records(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != records_header)
    throw format_error("records: missing or unexpected header");
  std::vector<RunRecord> out;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split(detail::trim(line), ',');
    if (cells.size() != 8) throw format_error("records: expected 8 columns in '" + line + "'");
    RunRecord r;
    try {
      r.scheme = parse_scheme(cells[0]);
    } catch (const argument_error& e) {
      throw format_error(e.what());
    }
    r.J = detail::parse_real(cells[1], "J");
    r.tau = detail::parse_real(cells[2], "tau");
    r.seed = detail::parse_uint(cells[3], "seed");
    r.final_energy = detail::parse_real(cells[4], "final_energy");
    r.exact_energy = detail::parse_real(cells[5], "exact_energy");
    r.residual_total = detail::parse_real(cells[6], "residual_total");
    r.residual_per_site = detail::parse_real(cells[7], "residual_per_site");
    out.push_back(r);
  }
  return out;
}

// ---- ensembles -------------------------------------------------------------

struct EnsembleStats {
  int exact_solves = 0;
  int runs = 0;
};

/// Error from one ensemble run, tagged with where it happened.
class ensemble_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline auto record_key(const RunRecord& r, const ExperimentConfig& c) {
  const auto j_index = std::find(c.J_values.begin(), c.J_values.end(), r.J) - c.J_values.begin();
  const auto s_index = std::find(c.schemes.begin(), c.schemes.end(), r.scheme) - c.schemes.begin();
  const auto t_index = std::find(c.tau_values.begin(), c.tau_values.end(), r.tau) - c.tau_values.begin();
  return std::make_tuple(j_index, r.seed, s_index, t_index);
}

}  // namespace detail

/// For each (J, sample): build the instance, solve its exact ground state once
/// by min-cut, then run every (scheme, tau). Records come back sorted by
/// (J, seed, scheme, tau) in config order, independent of thread count.
inline std::vector<RunRecord> run_ensemble(const ExperimentConfig& config, EnsembleStats* stats = nullptr) {
  config.validate();
  struct Task {
    double J;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (double j : config.J_values)
    for (int k = 0; k < config.samples; ++k) tasks.push_back({j, config.sample_seed(k)});

  std::vector<RunRecord> records;
  std::mutex lock;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure;
  int exact_solves = 0;

  auto worker = [&] {
    for (;;) {
      if (failed) return;
      const std::size_t t = next++;
      if (t >= tasks.size()) return;
      const Task task = tasks[t];
      std::string where = "J=" + detail::exact_real(task.J) + " seed=" + std::to_string(task.seed);
      try {
        const RfimInstance instance = config.instance_factory
                                          ? config.instance_factory(config.width, config.height, task.J, task.seed)
                                          : generate_instance(config.width, config.height, task.J, task.seed);
        const auto gs = min_cut_ground_state(instance);
        std::vector<RunRecord> local;
        for (Scheme scheme : config.schemes)
          for (double tau : config.tau_values) {
            where = "J=" + detail::exact_real(task.J) + " seed=" + std::to_string(task.seed) +
                    " scheme=" + std::string(to_string(scheme)) + " tau=" + detail::exact_real(tau);
            const auto result = run_scheme(instance, scheme, tau, config.t0, config.bethe);
            local.push_back(make_record(scheme, instance, tau, result.final_energy, gs.energy));
          }
        std::lock_guard<std::mutex> guard(lock);
        ++exact_solves;
        records.insert(records.end(), local.begin(), local.end());
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> guard(lock);
        if (!failed) failure = where + ": " + e.what();
        failed = true;
        return;
      }
    }
  };

  int threads = config.threads > 0 ? config.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(tasks.size(), 1)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::sort(records.begin(), records.end(), [&](const RunRecord& a, const RunRecord& b) {
    return detail::record_key(a, config) < detail::record_key(b, config);
  });

  if (failed) {
    if (!config.output_dir.empty()) {
      std::filesystem::create_directories(config.output_dir);
      std::ofstream partial(std::filesystem::path(config.output_dir) / "records.partial.csv");
      write_records(partial, records);
    }
    throw ensemble_error(failure);
  }
  if (stats) {
    stats->exact_solves = exact_solves;
    stats->runs = static_cast<int>(records.size());
  }
  return records;
}

// ---- statistics ----------------------------------------------------------------

struct SampleSummary {
  int count = 0;
  double mean = 0.0;
  /// Standard error of the mean (sample standard deviation / sqrt(count)).
  double standard_error = 0.0;
};

inline SampleSummary summarize(const std::vector<double>& values) {
  SampleSummary s;
  s.count = static_cast<int>(values.size());
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= s.count;
  if (s.count > 1) {
    double var = 0.0;
    for (double v : values) var += (v - s.mean) * (v - s.mean);
    var /= (s.count - 1);
    s.standard_error = std::sqrt(var / s.count);
  }
  return s;
}

inline std::vector<double> select_residuals(const std::vector<RunRecord>& records, Scheme scheme, double J,
                                            double tau) {
  std::vector<double> out;
  for (const auto& r : records)
    if (r.scheme == scheme && r.J == J && r.tau == tau) out.push_back(r.residual_per_site);
  return out;
}

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
};

/// Uniform bins over [0, upper], right-closed: value v lands in bin
/// ceil(v / width) - 1 (clamped to the first bin), so the first bin is
/// [0, width] and the rest are (lo, hi]. `upper` defaults to the largest
/// observed residual_per_site.
inline std::vector<HistogramBin> histogram(const std::vector<RunRecord>& records, Scheme scheme, double J, double tau,
                                           int bins, std::optional<double> upper = std::nullopt) {
  if (bins < 1) throw argument_error("histogram needs at least one bin");
  const auto values = select_residuals(records, scheme, J, tau);
  if (values.empty()) return {};
  double hi = upper.value_or(*std::max_element(values.begin(), values.end()));
  if (!(hi > 0.0)) hi = 1.0;
  const double width = hi / bins;
  std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
  for (int b = 0; b < bins; ++b) {
    out[static_cast<std::size_t>(b)].lo = width * b;
    out[static_cast<std::size_t>(b)].hi = b + 1 == bins ? hi : width * (b + 1);
  }
  for (double v : values) {
    int b = static_cast<int>(std::ceil(v / width)) - 1;
    b = std::clamp(b, 0, bins - 1);
    ++out[static_cast<std::size_t>(b)].count;
  }
  return out;
}

inline void write_histogram(std::ostream& out, const std::vector<HistogramBin>& bins) {
  out << "bin_lo,bin_hi,count\n";
  for (const auto& b : bins) out << detail::exact_real(b.lo) << ',' << detail::exact_real(b.hi) << ',' << b.count << '\n';
}

// ---- spectral study --------------------------------------------------------------

struct SpectralComparison {
  std::uint64_t seed = 0;
  CharTimeReport tf;
  CharTimeReport fi;
  /// tau_c(FI) / tau_c(TF).
  double ratio = 0.0;
};

struct SpectralStudy {
  std::vector<SpectralComparison> instances;
  double median_ratio = 0.0;
  double lower_quartile = 0.0;
  double upper_quartile = 0.0;
};

/// Linearly interpolated quantile of unsorted data, q in [0, 1].
inline double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw argument_error("quantile of empty data");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

inline SpectralStudy spectral_study(const std::vector<RfimInstance>& instances, std::span<const double> grid,
                                    const TraceOptions& options = {}) {
  SpectralStudy study;
  std::vector<double> ratios;
  for (const auto& inst : instances) {
    SpectralComparison c;
    c.seed = inst.seed();
    c.tf = characteristic_time(spectral_trace(inst, KineticKind::TF, grid, options));
    c.fi = characteristic_time(spectral_trace(inst, KineticKind::FI, grid, options));
    c.ratio = c.fi.tau_c / c.tf.tau_c;
    ratios.push_back(c.ratio);
    study.instances.push_back(c);
  }
  if (!ratios.empty()) {
    study.median_ratio = quantile(ratios, 0.5);
    study.lower_quartile = quantile(ratios, 0.25);
    study.upper_quartile = quantile(ratios, 0.75);
  }
  return study;
}

inline void write_trace(std::ostream& out, const SpectralTrace& trace) {
  out << "s,gap01,gap02,matrix_element\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << detail::exact_real(trace.s_values[i]) << ',' << detail::exact_real(trace.gap01[i]) << ',';
    if (i < trace.gap02.size()) out << detail::exact_real(trace.gap02[i]);
    out << ',' << detail::exact_real(trace.matrix_element[i]) << '\n';
  }
}

/// `eps_min,s*,m_max,s*,tau_c,tau_c_pointwise`
inline std::string format_report(const CharTimeReport& r) {
  std::ostringstream os;
  os << detail::exact_real(r.eps_min) << ',' << detail::exact_real(r.s_at_eps_min) << ','
     << detail::exact_real(r.m_max) << ',' << detail::exact_real(r.s_at_m_max) << ','
     << detail::exact_real(r.tau_c) << ',' << detail::exact_real(r.tau_c_pointwise);
  return os.str();
}

// ---- config files ------------------------------------------------------------
//
//   # comment
//   [name]
//   width = 20
//   height = 20
//   J = 2.0, 1.5
//   tau = 1, 10, 100
//   samples = 40
//   base_seed = 1
//   schemes = qa-tf, qa-fi, sa
//   t0 = 18
//   output_dir = out/j20
//   threads = 4
//   sweep_order = raster
//   update_scope = cluster

inline std::vector<ExperimentConfig> parse_config(std::istream& in) {
  std::vector<ExperimentConfig> out;
  std::string line;
  int lineno = 0;
  auto reals = [](const std::string& v, const std::string& key) {
    std::vector<double> xs;
    for (const auto& cell : detail::split(v, ',')) xs.push_back(detail::parse_real(detail::trim(cell), key));
    return xs;
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw format_error("config line " + std::to_string(lineno) + ": unterminated section");
      ExperimentConfig c;
      c.name = detail::trim(line.substr(1, line.size() - 2));
      out.push_back(std::move(c));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw format_error("config line " + std::to_string(lineno) + ": expected key = value");
    if (out.empty()) out.emplace_back();
    auto& c = out.back();
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    try {
      if (key == "width") c.width = static_cast<int>(detail::parse_uint(value, key));
      else if (key == "height") c.height = static_cast<int>(detail::parse_uint(value, key));
      else if (key == "J") c.J_values = reals(value, key);
      else if (key == "tau") c.tau_values = reals(value, key);
      else if (key == "samples") c.samples = static_cast<int>(detail::parse_uint(value, key));
      else if (key == "base_seed") c.base_seed = detail::parse_uint(value, key);
      else if (key == "t0") c.t0 = detail::parse_real(value, key);
      else if (key == "output_dir") c.output_dir = value;
      else if (key == "threads") c.threads = static_cast<int>(detail::parse_uint(value, key));
      else if (key == "sweep_order") c.bethe.order = parse_sweep_order(value);
      else if (key == "update_scope") c.bethe.scope = parse_update_scope(value);
      else if (key == "schemes") {
        c.schemes.clear();
        for (const auto& cell : detail::split(value, ',')) c.schemes.push_back(parse_scheme(detail::trim(cell)));
      } else {
        throw format_error("unknown key '" + key + "'");
      }
    } catch (const format_error& e) {
      throw format_error("config line " + std::to_string(lineno) + ": " + e.what());
    } catch (const argument_error& e) {
      throw format_error("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  for (const auto& c : out) {
    try {
      c.validate();
    } catch (const argument_error& e) {
      throw format_error("config [" + c.name + "]: " + e.what());
    }
  }
  return out;
}

}  // namespace rfim_qa

#endif  // RFIM_QA_HARNESS_HPP
