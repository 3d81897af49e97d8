#include <wio/sweep.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace wio;

TEST(GrowthFit, Examples) {
  const std::vector<std::pair<double, double>> sqrt_law{{1, 1}, {4, 2}, {16, 4}};
  EXPECT_NEAR(fit_growth_exponent(sqrt_law), 0.5, 1e-14);
  const std::vector<std::pair<double, double>> flat{{10, 3}, {40, 3}, {160, 3}};
  EXPECT_NEAR(fit_growth_exponent(flat), 0.0, 1e-14);
  const std::vector<std::pair<double, double>> two{{1, 1}, {10, 2}};
  EXPECT_NEAR(fit_growth_exponent(two), std::log10(2.0), 1e-14);
  const std::vector<std::pair<double, double>> one{{1, 1}};
  EXPECT_THROW(fit_growth_exponent(one), DomainError);
  const std::vector<std::pair<double, double>> bad{{1, 1}, {2, 0}};
  EXPECT_THROW(fit_growth_exponent(bad), DomainError);
}

TEST(GrowthFit, RecoversPowerLawsWithNoiseFreeData) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ug(-1, 3), uc(0.1, 10);
  for (int t = 0; t < 20; ++t) {
    const double g = ug(rng), c = uc(rng);
    std::vector<std::pair<double, double>> pts;
    for (double r : {3.0, 17.0, 90.0, 700.0}) pts.emplace_back(r, c * std::pow(r, g));
    EXPECT_NEAR(fit_growth_exponent(pts), g, 1e-10);
  }
}

TEST(GrowthFit, Classification) {
  EXPECT_EQ(classify_growth(0.01, 0.05, 0.1), Verdict::saturating);
  EXPECT_EQ(classify_growth(-0.04, 0.05, 0.1), Verdict::saturating);
  EXPECT_EQ(classify_growth(0.07, 0.05, 0.1), Verdict::inconclusive);
  EXPECT_EQ(classify_growth(-0.2, 0.05, 0.1), Verdict::inconclusive);
  EXPECT_EQ(classify_growth(0.5, 0.05, 0.1), Verdict::growing);
}

TEST(Sweep, EmptyPlanGivesEmptyResult) {
  const auto r = run_boundedness_sweep(SweepPlan{});
  EXPECT_TRUE(r.cells.empty());
  EXPECT_TRUE(r.summaries.empty());
}

TEST(Sweep, PlanValidation) {
  SweepPlan plan;
  plan.queries = {BoundednessQuery::h(-0.5, 0, 2)};
  plan.node_budget = 100;
  EXPECT_THROW(run_boundedness_sweep(plan), PlanError);
  plan.node_budget = 4000;
  plan.radii = {10, 5};
  EXPECT_THROW(run_boundedness_sweep(plan), PlanError);
  plan.radii = {};
  EXPECT_THROW(run_boundedness_sweep(plan), PlanError);
}

TEST(Sweep, SaturatingAndGrowingVerdicts) {
  SweepPlan plan;
  plan.queries = {BoundednessQuery::h(-0.5, 0, 2.0), BoundednessQuery::h(-1, 0, 0.0),
                  BoundednessQuery::hsp(-1, -1, 1.5, 3, 2.0)};
  const auto r = run_boundedness_sweep(plan);
  ASSERT_EQ(r.cells.size(), 12u);
  ASSERT_EQ(r.summaries.size(), 3u);
  for (const auto& c : r.cells) {
    EXPECT_TRUE(c.usable()) << c.error;
    EXPECT_FALSE(c.elapsed_ms.has_value());
  }
  EXPECT_EQ(r.summaries[0].verdict, Verdict::saturating);
  EXPECT_TRUE(r.summaries[0].condition.satisfied);
  EXPECT_EQ(r.summaries[1].verdict, Verdict::growing);
  EXPECT_FALSE(r.summaries[1].condition.satisfied);
  EXPECT_EQ(r.summaries[2].verdict, Verdict::saturating);
  // norms never decrease along nested truncations
  for (std::size_t q = 0; q < 3; ++q)
    for (std::size_t l = 1; l < 4; ++l) EXPECT_GE(r.cells[q * 4 + l].norm, r.cells[q * 4 + l - 1].norm * (1 - 1e-9));
}

TEST(Sweep, CsvIsDeterministicAndThreadIndependent) {
  SweepPlan plan;
  plan.queries = {BoundednessQuery::h(-0.25, -0.25, 1.5), BoundednessQuery::hps(-1, -1, 2, 3, 2.2)};
  plan.radii = {10, 40};
  std::ostringstream a, b, c;
  const std::vector<std::string> header{"tool wio"};
  write_sweep_csv(a, run_boundedness_sweep(plan), header);
  write_sweep_csv(b, run_boundedness_sweep(plan), header);
  plan.threads = 3;
  write_sweep_csv(c, run_boundedness_sweep(plan), header);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str(), c.str());
  std::istringstream in(a.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# tool wio");
  std::getline(in, line);
  EXPECT_EQ(line, sweep_csv_columns);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 16) << line;
  }
  EXPECT_EQ(rows, 4 + 2);
}

TEST(Sweep, TimingIsOptIn) {
  SweepPlan plan;
  plan.queries = {BoundednessQuery::h(-0.5, 0, 2)};
  plan.radii = {10};
  plan.timing = true;
  const auto r = run_boundedness_sweep(plan);
  ASSERT_TRUE(r.cells[0].elapsed_ms.has_value());
  EXPECT_GE(*r.cells[0].elapsed_ms, 0.0);
  EXPECT_FALSE(r.summaries[0].gamma.has_value());
  EXPECT_EQ(r.summaries[0].verdict, Verdict::inconclusive);
}

TEST(HolderStep, ZeroFunction) {
  const auto g = std::make_shared<const Grid>(build_grid(20, 6));
  const auto s = verify_holder_step(KernelSpec::envelope(2), SampledFunction::zeros(g), BoundednessQuery::h(-0.5, 0, 2), 1.0);
  EXPECT_EQ(s.lhs, 0.0);
  EXPECT_EQ(s.rhs, 0.0);
  EXPECT_TRUE(s.holds);
}

TEST(HolderStep, HoldsForAssortedFunctions) {
  const auto g = std::make_shared<const Grid>(build_grid(200, 12));
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> uc(-150, 150), uw(0.5, 20), ux(-300, 300);
  std::vector<BoundednessQuery> qs{BoundednessQuery::h(-0.5, 0, 2), BoundednessQuery::hsp(-1, 0, 3, 3, 2.5),
                                   BoundednessQuery::hps(-0.5, 0, 1.5, 2, 2.5)};
  for (const auto& q : qs) {
    std::vector<FunctionSpec> fs{PowerLaw{-q.s1}, PowerLaw{1.0}, Gaussian{5}};
    for (int t = 0; t < 10; ++t) fs.emplace_back(Bump{uc(rng), uw(rng)});
    for (const auto& f : fs)
      for (int t = 0; t < 5; ++t) {
        const double x = ux(rng);
        const auto s = verify_holder_step(KernelSpec::envelope(q.kappa), SampledFunction::sample(g, f), q, x);
        EXPECT_TRUE(s.holds) << f.to_string() << " x=" << x << " lhs=" << s.lhs << " rhs=" << s.rhs;
      }
  }
}

TEST(HolderStep, Preconditions) {
  const auto g = std::make_shared<const Grid>(build_grid(10, 4));
  const auto f = SampledFunction::sample(g, Gaussian{1});
  EXPECT_THROW(verify_holder_step(KernelSpec::cosine(2, 1), f, BoundednessQuery::h(-0.5, 0, 2), 0), DomainError);
  EXPECT_THROW(verify_holder_step(KernelSpec::envelope(2, 2), f, BoundednessQuery::h(-0.5, 0, 2), 0), DomainError);
  EXPECT_THROW(verify_holder_step(KernelSpec::envelope(2), f, BoundednessQuery::h(0.5, 0, 2), 0), DomainError);
  // kappa at or below the inner threshold: the majorant integral diverges
  EXPECT_THROW(verify_holder_step(KernelSpec::envelope(1), f, BoundednessQuery::h(-0.5, 0, 1), 0), DivergenceError);
}

TEST(SharpnessProbe, GrowsWhenDecayIsMissing) {
  const std::vector<double> radii{10, 40, 160, 640};
  const auto cells = sharpness_probe(BoundednessQuery::h(-1, 0, 0.0), KernelSpec::envelope(0.0), 0.0, radii);
  ASSERT_EQ(cells.size(), 4u);
  std::vector<std::pair<double, double>> pts;
  for (const auto& c : cells) {
    EXPECT_TRUE(c.error.empty()) << c.error;
    pts.emplace_back(c.R, c.ratio);
  }
  EXPECT_GT(fit_growth_exponent(pts), 0.1);
}

TEST(SharpnessProbe, SingleRadius) {
  const std::vector<double> radii{25};
  const auto cells = sharpness_probe(BoundednessQuery::h(-0.5, 0, 2.0), KernelSpec::envelope(1.0), 1.0, radii);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_EQ(cells[0].R, 25.0);
  EXPECT_GT(cells[0].ratio, 0.0);
  EXPECT_TRUE(std::isfinite(cells[0].ratio));
}
