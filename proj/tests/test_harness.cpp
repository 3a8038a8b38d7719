#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rfim_qa/harness.hpp"

using namespace rfim_qa;
namespace fs = std::filesystem;

namespace {

RunRecord record(double residual, Scheme scheme = Scheme::QA_FI, double j = 2.0, double tau = 100.0) {
  RunRecord r;
  r.scheme = scheme;
  r.J = j;
  r.tau = tau;
  r.residual_per_site = residual;
  r.residual_total = residual;
  return r;
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.width = 4;
  c.height = 3;
  c.J_values = {2.0, 0.6};
  c.tau_values = {1.0, 5.0};
  c.samples = 3;
  c.base_seed = 10;
  c.threads = 1;
  return c;
}

}  // namespace

TEST(Histogram, SingleZeroResidual) {
  const auto bins = histogram({record(0.0)}, Scheme::QA_FI, 2.0, 100.0, 5);
  ASSERT_EQ(bins.size(), 5u);
  EXPECT_EQ(bins[0].count, 1);
  for (std::size_t b = 1; b < bins.size(); ++b) EXPECT_EQ(bins[b].count, 0);
}

TEST(Histogram, RightClosedBins) {
  const auto bins = histogram({record(0.0), record(0.5), record(1.0)}, Scheme::QA_FI, 2.0, 100.0, 2, 1.0);
  ASSERT_EQ(bins.size(), 2u);
  EXPECT_EQ(bins[0].count, 2);
  EXPECT_EQ(bins[1].count, 1);
  EXPECT_EQ(bins[0].lo, 0.0);
  EXPECT_EQ(bins[0].hi, 0.5);
  EXPECT_EQ(bins[1].hi, 1.0);
  // Default range is [0, max observed], which is the same here.
  const auto dflt = histogram({record(0.0), record(0.5), record(1.0)}, Scheme::QA_FI, 2.0, 100.0, 2);
  EXPECT_EQ(dflt[0].count, 2);
  EXPECT_EQ(dflt[1].count, 1);
}

TEST(Histogram, SelectionAndEdgeCases) {
  const std::vector<RunRecord> rs{record(0.1), record(0.2, Scheme::SA), record(0.3, Scheme::QA_FI, 1.0)};
  EXPECT_TRUE(histogram(rs, Scheme::QA_TF, 2.0, 100.0, 3).empty());
  const auto bins = histogram(rs, Scheme::QA_FI, 2.0, 100.0, 3);
  int total = 0;
  for (const auto& b : bins) total += b.count;
  EXPECT_EQ(total, 1);
  EXPECT_THROW(histogram(rs, Scheme::QA_FI, 2.0, 100.0, 0), argument_error);
  std::ostringstream os;
  write_histogram(os, histogram({record(0.0), record(1.0)}, Scheme::QA_FI, 2.0, 100.0, 1));
  EXPECT_EQ(os.str(), "bin_lo,bin_hi,count\n0,1,2\n");
}

TEST(Records, CsvRoundTrip) {
  const auto records = run_ensemble(small_config());
  std::stringstream ss;
  write_records(ss, records);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), records_header);
  EXPECT_EQ(read_records(ss), records);
}

TEST(Records, MalformedCsv) {
  for (const char* text : {"", "scheme,J\n", "scheme,J,tau,seed,final_energy,exact_energy,residual_total,residual_per_site\nqa-tf,1\n",
                           "scheme,J,tau,seed,final_energy,exact_energy,residual_total,residual_per_site\nqmc,1,1,1,1,1,0,0\n",
                           "scheme,J,tau,seed,final_energy,exact_energy,residual_total,residual_per_site\nsa,x,1,1,1,1,0,0\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(read_records(in), format_error) << text;
  }
}

TEST(Ensemble, OneRecordPerRunSortedByKey) {
  const auto c = small_config();
  EnsembleStats stats;
  const auto records = run_ensemble(c, &stats);
  ASSERT_EQ(records.size(), 2u * 3u * 3u * 2u);
  EXPECT_EQ(stats.exact_solves, 6);
  EXPECT_EQ(stats.runs, 36);
  EXPECT_EQ(records.front().J, 2.0);
  EXPECT_EQ(records.front().seed, 10u);
  EXPECT_EQ(records.front().scheme, Scheme::QA_TF);
  EXPECT_EQ(records.back().J, 0.6);
  EXPECT_EQ(records.back().seed, 12u);
  EXPECT_EQ(records.back().scheme, Scheme::SA);
  EXPECT_EQ(records.back().tau, 5.0);
  for (const auto& r : records) {
    EXPECT_GE(r.residual_total, residual_floor);
    EXPECT_DOUBLE_EQ(r.residual_per_site, r.residual_total / 12.0);
  }
}

TEST(Ensemble, ExactEnergySharedAcrossRunsOfAnInstance) {
  const auto records = run_ensemble(small_config());
  for (const auto& a : records)
    for (const auto& b : records)
      if (a.J == b.J && a.seed == b.seed) EXPECT_EQ(a.exact_energy, b.exact_energy);
}

TEST(Ensemble, DeterministicAcrossThreadCounts) {
  auto c = small_config();
  const auto a = run_ensemble(c);
  c.threads = 3;
  const auto b = run_ensemble(c);
  EXPECT_EQ(a, b);
}

TEST(Ensemble, ForcedUnfrustratedInstanceHasZeroResidual) {
  ExperimentConfig c;
  c.width = 5;
  c.height = 5;
  c.samples = 1;
  c.tau_values = {100.0};
  c.instance_factory = [](int w, int h, double j, std::uint64_t seed) {
    return RfimInstance(w, h, j, std::vector<double>(static_cast<std::size_t>(w * h), 1.0), seed);
  };
  for (const auto& r : run_ensemble(c)) EXPECT_EQ(r.residual_total, 0.0);
}

TEST(Ensemble, FailureIsTaggedAndLeavesPartialResults) {
  const auto dir = fs::temp_directory_path() / "rfim_qa_partial_test";
  fs::remove_all(dir);
  auto c = small_config();
  c.output_dir = dir.string();
  c.instance_factory = [](int w, int h, double j, std::uint64_t seed) {
    if (seed == 11 && j == 2.0) throw solver_error("injected", 0.5);
    return generate_instance(w, h, j, seed);
  };
  try {
    run_ensemble(c);
    FAIL() << "expected ensemble_error";
  } catch (const ensemble_error& e) {
    EXPECT_NE(std::string(e.what()).find("seed=11"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("injected"), std::string::npos);
  }
  std::ifstream partial(dir / "records.partial.csv");
  ASSERT_TRUE(partial.good());
  const auto records = read_records(partial);
  EXPECT_FALSE(records.empty());
  for (const auto& r : records) EXPECT_NE(r.seed, 11u);
  fs::remove_all(dir);
}

TEST(Ensemble, ValidatesConfig) {
  auto c = small_config();
  c.samples = 0;
  EXPECT_THROW(run_ensemble(c), argument_error);
  c = small_config();
  c.tau_values = {-1.0};
  EXPECT_THROW(run_ensemble(c), argument_error);
  EXPECT_EQ(small_config().sample_seed(2), 12u);
}

TEST(Ensemble, NegativeResidualIsABug) {
  const RfimInstance inst(1, 1, 1.0, {1.0}, 3);
  EXPECT_THROW(make_record(Scheme::SA, inst, 1.0, -2.0, -1.0), std::logic_error);
  EXPECT_NO_THROW(make_record(Scheme::SA, inst, 1.0, -1.0 - 1e-12, -1.0));
}

TEST(Statistics, SummaryAndQuantiles) {
  const auto s = summarize({1.0, 2.0, 3.0, 4.0});
  EXPECT_EQ(s.count, 4);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.standard_error, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
  EXPECT_DOUBLE_EQ(quantile({4.0, 1.0, 3.0, 2.0}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({4.0, 1.0, 3.0, 2.0}, 0.25), 1.75);
  EXPECT_THROW(quantile({}, 0.5), argument_error);
}

TEST(Config, ParsesSections) {
  std::istringstream in(R"(# two experiments
[first]
width = 8
height = 6
J = 2.0, 0.6
tau = 1, 10
samples = 4
base_seed = 100
schemes = qa-fi, sa
t0 = 12.5
output_dir = out/first

[second]
sweep_order = random
update_scope = center
threads = 2
)");
  const auto cs = parse_config(in);
  ASSERT_EQ(cs.size(), 2u);
  EXPECT_EQ(cs[0].name, "first");
  EXPECT_EQ(cs[0].width, 8);
  EXPECT_EQ(cs[0].height, 6);
  EXPECT_EQ(cs[0].J_values, (std::vector<double>{2.0, 0.6}));
  EXPECT_EQ(cs[0].tau_values, (std::vector<double>{1.0, 10.0}));
  EXPECT_EQ(cs[0].samples, 4);
  EXPECT_EQ(cs[0].base_seed, 100u);
  EXPECT_EQ(cs[0].schemes, (std::vector<Scheme>{Scheme::QA_FI, Scheme::SA}));
  EXPECT_EQ(cs[0].t0, 12.5);
  EXPECT_EQ(cs[0].output_dir, "out/first");
  EXPECT_EQ(cs[1].bethe.order, SweepOrder::Random);
  EXPECT_EQ(cs[1].bethe.scope, UpdateScope::Center);
  EXPECT_EQ(cs[1].threads, 2);
  EXPECT_EQ(cs[1].width, 20);
}

TEST(Config, RejectsBadInput) {
  for (const char* text : {"[x\n", "[x]\nwidth\n", "[x]\ncolour = red\n", "[x]\nsamples = 0\n", "[x]\nJ = 2, abc\n",
                           "[x]\nschemes = qmc\n", "[x]\ntau = -3\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(parse_config(in), format_error) << text;
  }
}

TEST(Config, Presets) {
  const auto full = ExperimentConfig::full_scale();
  EXPECT_EQ(full.width, 100);
  EXPECT_EQ(full.samples, 80);
  EXPECT_EQ(full.J_values.size(), 4u);
  const auto desk = ExperimentConfig::desk_scale();
  EXPECT_EQ(desk.width, 20);
  EXPECT_EQ(desk.samples, 40);
}
