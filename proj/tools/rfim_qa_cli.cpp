// rfim_qa command line: instance generation, spectra, annealing, exact ground
// states and ensemble experiments.
//
// On failure a single line `error,<kind>,<message>` goes to stderr and the
// exit code identifies the kind: 2 argument, 3 format, 4 capacity, 5 solver,
// 6 ensemble, 1 anything else.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rfim_qa/rfim_qa.hpp"

namespace fs = std::filesystem;
using namespace rfim_qa;

namespace {

RfimInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw format_error("cannot open instance file '" + path + "'");
  return read_instance(in);
}

// Writes to `path`, or stdout when it is empty or "-".
template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path);
  if (!out) throw format_error("cannot write '" + path + "'");
  fn(out);
}

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

int fail(const char* kind, const std::string& message, int code) {
  std::cerr << "error," << kind << ',' << one_line(message) << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-field Ising model: spectral analysis, mean-field annealing and exact ground states"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Write a random +-1 field instance");
  int gen_w = 4, gen_h = 4;
  double gen_j = 2.0;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--width", gen_w, "Lattice width")->required();
  gen->add_option("--height", gen_h, "Lattice height")->required();
  gen->add_option("--J", gen_j, "Ferromagnetic coupling")->required();
  gen->add_option("--seed", gen_seed, "mt19937_64 seed");
  gen->add_option("--out", gen_out, "Instance file (default stdout)");

  // spectrum
  auto* spec = app.add_subcommand("spectrum", "Gap and matrix-element trace along the anneal");
  std::string spec_instance, spec_kind = "tf", spec_out;
  int spec_grid = 201;
  bool spec_refine = false;
  spec->add_option("--instance", spec_instance, "Instance file")->required();
  spec->add_option("--kind", spec_kind, "Kinetic term: tf|fi");
  spec->add_option("--grid", spec_grid, "Uniform grid points on [0,1]");
  spec->add_flag("--refine", spec_refine, "Bisect around the gap minimum");
  spec->add_option("--out", spec_out, "trace.csv path (default: no trace file)");

  // anneal
  auto* ann = app.add_subcommand("anneal", "Bethe mean-field annealing (quantum or thermal)");
  std::string ann_instance, ann_scheme = "qa-fi", ann_order = "raster", ann_scope = "cluster";
  double ann_tau = 100.0;
  std::optional<double> ann_t0;
  std::uint64_t ann_order_seed = 0;
  bool ann_no_exact = false;
  ann->add_option("--instance", ann_instance, "Instance file")->required();
  ann->add_option("--scheme", ann_scheme, "qa-tf|qa-fi|sa");
  ann->add_option("--tau", ann_tau, "Annealing time (sweeps)");
  ann->add_option("--t0", ann_t0, "Initial temperature for sa (default 2(4J + max|h|))");
  ann->add_option("--sweep-order", ann_order, "raster|random");
  ann->add_option("--update-scope", ann_scope, "cluster|center");
  ann->add_option("--order-seed", ann_order_seed, "Seed for --sweep-order random");
  ann->add_flag("--no-exact", ann_no_exact, "Leave residual_energy empty instead of solving the ground state");

  // exact-gs
  auto* gs = app.add_subcommand("exact-gs", "Exact classical ground state");
  std::string gs_instance, gs_method = "mincut", gs_out;
  gs->add_option("--instance", gs_instance, "Instance file")->required();
  gs->add_option("--method", gs_method, "brute|mincut")->check(CLI::IsMember({"brute", "mincut"}));
  gs->add_option("--out", gs_out, "Output file (default stdout)");

  // ensemble
  auto* ens = app.add_subcommand("ensemble", "Run the experiments of a config file");
  std::string ens_config, ens_only, ens_output;
  int ens_threads = -1;
  ens->add_option("--config", ens_config, "Experiment config file")->required();
  ens->add_option("--experiment", ens_only, "Run only this [section]");
  ens->add_option("--output-dir", ens_output, "Override output_dir for every experiment");
  ens->add_option("--threads", ens_threads, "Worker threads (0 = all cores)");

  // histogram
  auto* hist = app.add_subcommand("histogram", "Bin residual_per_site of one (scheme, J, tau) selection");
  std::string hist_records, hist_scheme = "qa-fi", hist_out;
  double hist_j = 2.0, hist_tau = 100.0;
  int hist_bins = 20;
  std::optional<double> hist_max;
  hist->add_option("--records", hist_records, "records.csv")->required();
  hist->add_option("--scheme", hist_scheme, "qa-tf|qa-fi|sa");
  hist->add_option("--J", hist_j, "Coupling of the selection");
  hist->add_option("--tau", hist_tau, "Annealing time of the selection");
  hist->add_option("--bins", hist_bins, "Number of bins");
  hist->add_option("--max", hist_max, "Upper edge (default: largest residual)");
  hist->add_option("--out", hist_out, "histogram.csv path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  try {
    if (*gen) {
      const auto inst = generate_instance(gen_w, gen_h, gen_j, gen_seed);
      with_output(gen_out, [&](std::ostream& os) { write_instance(os, inst); });
    } else if (*spec) {
      const auto inst = load_instance(spec_instance);
      TraceOptions opts;
      opts.refine = spec_refine;
      const auto trace = spectral_trace(inst, parse_kinetic_kind(spec_kind), spec_grid, opts);
      if (!spec_out.empty()) with_output(spec_out, [&](std::ostream& os) { write_trace(os, trace); });
      std::cout << format_report(characteristic_time(trace)) << '\n';
    } else if (*ann) {
      const auto inst = load_instance(ann_instance);
      BetheOptions opts;
      opts.order = parse_sweep_order(ann_order);
      opts.scope = parse_update_scope(ann_scope);
      opts.order_seed = ann_order_seed;
      const Scheme scheme = parse_scheme(ann_scheme);
      const auto result = run_scheme(inst, scheme, ann_tau, ann_t0, opts);
      std::cout << to_string(scheme) << ',' << detail::format_real(ann_tau) << ','
                << detail::format_real(result.final_energy) << ',';
      if (!ann_no_exact) std::cout << detail::format_real(result.final_energy - min_cut_ground_state(inst).energy);
      std::cout << '\n';
    } else if (*gs) {
      const auto inst = load_instance(gs_instance);
      const auto result = gs_method == "brute" ? brute_force_ground_state(inst) : min_cut_ground_state(inst);
      with_output(gs_out, [&](std::ostream& os) {
        os << detail::format_real(result.energy) << '\n';
        const auto spins = result.config.spins();
        for (std::size_t i = 0; i < spins.size(); ++i) os << (i ? " " : "") << spins[i];
        os << '\n';
      });
    } else if (*ens) {
      std::ifstream in(ens_config);
      if (!in) throw format_error("cannot open config file '" + ens_config + "'");
      auto experiments = parse_config(in);
      bool ran = false;
      for (auto& cfg : experiments) {
        if (!ens_only.empty() && cfg.name != ens_only) continue;
        if (!ens_output.empty()) cfg.output_dir = (fs::path(ens_output) / cfg.name).string();
        if (cfg.output_dir.empty()) cfg.output_dir = cfg.name;
        if (ens_threads >= 0) cfg.threads = ens_threads;
        const auto records = run_ensemble(cfg);
        const auto path = fs::path(cfg.output_dir) / "records.csv";
        with_output(path.string(), [&](std::ostream& os) { write_records(os, records); });
        std::cout << cfg.name << ',' << records.size() << ',' << path.string() << '\n';
        ran = true;
      }
      if (!ran) throw argument_error("no experiment matched in '" + ens_config + "'");
    } else if (*hist) {
      std::ifstream in(hist_records);
      if (!in) throw format_error("cannot open records file '" + hist_records + "'");
      const auto records = read_records(in);
      const auto bins = histogram(records, parse_scheme(hist_scheme), hist_j, hist_tau, hist_bins, hist_max);
      with_output(hist_out, [&](std::ostream& os) { write_histogram(os, bins); });
    }
  } catch (const argument_error& e) {
    return fail("argument", e.what(), 2);
  } catch (const format_error& e) {
    return fail("format", e.what(), 3);
  } catch (const capacity_error& e) {
    return fail("capacity", e.what(), 4);
  } catch (const solver_error& e) {
    return fail("solver", e.what(), 5);
  } catch (const ensemble_error& e) {
    return fail("ensemble", e.what(), 6);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
  return 0;
}
