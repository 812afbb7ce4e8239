#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "evidential/testbed.hpp"
#include "support/oracles.hpp"

using namespace evidential;

namespace {

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.gen.frame_size = 10;
  cfg.gen.focal_count = 5;
  cfg.gen.seed = 77;
  cfg.methods = default_method_suite();
  cfg.combinations = 3;
  cfg.trials = 40;
  return cfg;
}

}  // namespace

TEST(GenRandomBpa, ExactFocalCountAndUnitMass) {
  GenConfig g;
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const Bpa m = gen_random_bpa(g, rng);
    ASSERT_EQ(m.size(), 8u);
    EXPECT_NEAR(m.total_mass(), 1.0, 1e-15);
    for (const auto& e : m.entries()) {
      EXPECT_GT(e.mass, 0.0);
      EXPECT_TRUE(e.set.fits(32));
    }
  }
}

TEST(GenRandomBpa, SingleFocalElementCarriesAllMass) {
  GenConfig g;
  g.focal_count = 1;
  Rng rng(6);
  const Bpa m = gen_random_bpa(g, rng);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m.entries()[0].mass, 1.0);
}

TEST(GenRandomBpa, FillsSmallFrameCompletely) {
  GenConfig g;
  g.frame_size = 3;
  g.focal_count = 7;
  Rng rng(8);
  EXPECT_EQ(gen_random_bpa(g, rng).size(), 7u);
  g.focal_count = 8;
  EXPECT_THROW(gen_random_bpa(g, rng), InvalidParameter);
}

TEST(GenRandomBpa, DeterministicPerSeed) {
  GenConfig g;
  Rng a(1234), b(1234), c(1235);
  const Bpa ma = gen_random_bpa(g, a);
  EXPECT_EQ(ma, gen_random_bpa(g, b));
  EXPECT_FALSE(ma == gen_random_bpa(g, c));
}

TEST(GenRandomBpa, MassesAreFarFromUniformSticks) {
  // Compare the largest mass against bpas whose masses are uniform on the
  // simplex (normalized exponentials); the stick fraction 1 - exp(-X) is U(0, 1).
  constexpr std::size_t kSamples = 10000;
  GenConfig g;
  Rng rng(4711);
  Rng reference(4712);
  std::vector<double> largest, largest_uniform, first_stick;
  for (std::size_t i = 0; i < kSamples; ++i) {
    const Bpa m = gen_random_bpa(g, rng);
    double top = 0.0;
    for (const auto& e : m.entries()) top = std::max(top, e.mass);
    largest.push_back(top);

    std::vector<double> w(8);
    double total = 0.0;
    for (auto& v : w) total += v = reference.exponential(1.0);
    largest_uniform.push_back(*std::max_element(w.begin(), w.end()) / total);
  }
  // at alpha = 0.001 the two-sample critical value is 1.95 * sqrt(2 / n)
  EXPECT_GT(ks_statistic(largest, largest_uniform), 1.95 * std::sqrt(2.0 / kSamples));

  for (std::size_t i = 0; i < kSamples; ++i) {
    Rng r(99, i);
    const double x = r.exponential(1.0);
    first_stick.push_back(1.0 - std::exp(-x));
  }
  std::sort(first_stick.begin(), first_stick.end());
  double d = 0.0;
  for (std::size_t i = 0; i < kSamples; ++i) {
    const double f = first_stick[i];
    d = std::max({d, std::abs(f - static_cast<double>(i) / kSamples),
                  std::abs(f - static_cast<double>(i + 1) / kSamples)});
  }
  EXPECT_LT(d, 1.63 / std::sqrt(static_cast<double>(kSamples)));
}

TEST(MethodSuite, DefaultInstantiations) {
  const auto suite = default_method_suite();
  ASSERT_EQ(suite.size(), 7u);
  std::set<std::string> names;
  for (const auto& m : suite) names.insert(m.name);
  EXPECT_EQ(names, (std::set<std::string>{"D1_8", "D1_30", "Summ_8", "Summ_30", "Bayes", "klx_01", "klx_30"}));
  EXPECT_EQ(std::get<D1>(suite[0].method).k, 8u);
  EXPECT_EQ(std::get<D1>(suite[1].method).k, 30u);
  EXPECT_EQ(std::get<Summarize>(suite[2].method).k, 8u);
  const Klx klx01 = std::get<Klx>(suite[5].method);
  EXPECT_EQ(klx01.k, 1u);
  EXPECT_FALSE(klx01.l.has_value());
  EXPECT_EQ(klx01.x, 0.01);
  const Klx klx30 = std::get<Klx>(suite[6].method);
  EXPECT_EQ(klx30.l, 30u);
  EXPECT_EQ(klx30.x, 1.0);
}

TEST(MethodSuite, ParseNames) {
  EXPECT_EQ(parse_method_name("bayes").name, "Bayes");
  EXPECT_EQ(parse_method_name("D1_8").name, "D1_8");
  EXPECT_EQ(std::get<D1>(parse_method_name("d1_12").method).k, 12u);
  EXPECT_EQ(parse_method_name("SUMM_5").name, "Summ_5");
  const auto k = parse_method_name("klx_2_inf_0.05");
  EXPECT_EQ(std::get<Klx>(k.method), (Klx{2, std::nullopt, 0.05}));
  EXPECT_EQ(std::get<Klx>(parse_method_name("klx_1_30_0.01").method).l, 30u);
  EXPECT_THROW(parse_method_name("d1_1"), InvalidParameter);
  EXPECT_THROW(parse_method_name("simplex"), InvalidParameter);
  EXPECT_THROW(parse_method_name("klx_1_x_0.1"), InvalidParameter);
}

TEST(RunExperiment, SingleBayesTrial) {
  ExperimentConfig cfg;
  cfg.gen.seed = 7;
  cfg.methods = {parse_method_name("bayes")};
  cfg.trials = 1;
  cfg.combinations = 1;
  const auto result = run_experiment(cfg);
  ASSERT_EQ(result.records.size() + result.stats.trials_aborted, 1u);
  if (!result.records.empty()) {
    EXPECT_LE(result.records[0].focal_count_approx, 32u);
    EXPECT_EQ(result.records[0].step, 1u);
  }
}

TEST(RunExperiment, RecordsRespectBoundsAndInvariants) {
  const ExperimentConfig cfg = small_config();
  const auto result = run_experiment(cfg);
  EXPECT_EQ(result.stats.trials_completed + result.stats.trials_aborted, cfg.trials);
  EXPECT_EQ(result.records.size(), result.stats.trials_completed * cfg.combinations * cfg.methods.size());
  for (const auto& r : result.records) {
    EXPECT_GE(r.focal_count_approx, 1u);
    EXPECT_GE(r.step, 1u);
    EXPECT_LE(r.step, cfg.combinations);
    EXPECT_GE(r.errors.error1, 0.0);
    EXPECT_LE(r.errors.error1, 1.0);
    if (r.method == "Bayes") { EXPECT_LE(r.focal_count_approx, 10u); }
    if (r.method == "Summ_8") { EXPECT_LE(r.focal_count_approx, 8u); }
    if (r.method == "D1_8") { EXPECT_LE(r.focal_count_approx, 8u); }
    if (r.method == "klx_30") { EXPECT_LE(r.focal_count_approx, 30u); }
  }
  for (const auto& st : result.stats.steps) {
    for (const Summary* s : {&st.focal_original, &st.focal_approx, &st.error1, &st.error2, &st.error3}) {
      EXPECT_LE(s->min, s->mean());
      EXPECT_LE(s->mean(), s->max);
    }
  }
}

TEST(RunExperiment, DeterministicAndThreadIndependent) {
  ExperimentConfig cfg = small_config();
  const auto a = run_experiment(cfg);
  const auto b = run_experiment(cfg);
  cfg.threads = 4;
  const auto c = run_experiment(cfg);
  EXPECT_EQ(a.records, b.records);
  EXPECT_EQ(a.records, c.records);
  EXPECT_EQ(a.stats.trials_aborted, c.stats.trials_aborted);
}

TEST(RunExperiment, TrackModesShareOriginalCounts) {
  ExperimentConfig cfg = small_config();
  const auto cumulative = run_experiment(cfg);
  cfg.track = Track::from_exact;
  const auto from_exact = run_experiment(cfg);
  // the approximated track may hit total conflict on its own, so the
  // cumulative run can abort trials the other one completes
  EXPECT_GE(cumulative.stats.trials_aborted, from_exact.stats.trials_aborted);
  std::map<std::tuple<std::size_t, std::size_t, std::string>, TrialRecord> by_key;
  for (const auto& r : from_exact.records) by_key.emplace(std::tuple{r.trial, r.step, r.method}, r);
  bool errors_differ = false;
  for (const auto& r : cumulative.records) {
    const auto it = by_key.find({r.trial, r.step, r.method});
    ASSERT_NE(it, by_key.end());
    EXPECT_EQ(r.focal_count_original, it->second.focal_count_original);
    if (r.step == 1) {
      // nothing to compound yet
      EXPECT_EQ(r.errors, it->second.errors);
      EXPECT_EQ(r.focal_count_approx, it->second.focal_count_approx);
    }
    errors_differ |= !(r.errors == it->second.errors);
  }
  EXPECT_TRUE(errors_differ);
}

TEST(RunExperiment, OriginalCountsGrowOverFirstSteps) {
  ExperimentConfig cfg;
  cfg.methods = {parse_method_name("bayes")};
  cfg.combinations = 3;
  cfg.trials = 100;
  const auto result = run_experiment(cfg);
  for (std::size_t s = 2; s <= cfg.combinations; ++s) {
    EXPECT_GT(result.stats.at(0, s).focal_original.mean(), result.stats.at(0, s - 1).focal_original.mean());
  }
}

TEST(RunExperiment, OriginalCountsGrowAcrossAllFiveSteps) {
  ExperimentConfig cfg;
  cfg.methods = {parse_method_name("bayes")};
  cfg.combinations = 5;
  cfg.trials = 200;
  const auto result = run_experiment(cfg);
  for (std::size_t s = 2; s <= cfg.combinations; ++s) {
    EXPECT_GT(result.stats.at(0, s).focal_original.mean(), result.stats.at(0, s - 1).focal_original.mean())
        << "step " << s;
  }
}

TEST(RunExperiment, TotalConflictAbortsTrial) {
  // two focal elements on a two-element frame conflict often
  ExperimentConfig cfg;
  cfg.gen.frame_size = 2;
  cfg.gen.focal_count = 1;
  cfg.methods = {parse_method_name("bayes")};
  cfg.combinations = 2;
  cfg.trials = 50;
  const auto result = run_experiment(cfg);
  EXPECT_GT(result.stats.trials_aborted, 0u);
  EXPECT_EQ(result.records.size(), result.stats.trials_completed * 2);
}

TEST(RunExperiment, InvalidConfigurations) {
  ExperimentConfig cfg = small_config();
  cfg.trials = 0;
  EXPECT_THROW(run_experiment(cfg), InvalidParameter);
  cfg = small_config();
  cfg.combinations = 0;
  EXPECT_THROW(run_experiment(cfg), InvalidParameter);
  cfg = small_config();
  cfg.methods.clear();
  EXPECT_THROW(run_experiment(cfg), InvalidParameter);
}
