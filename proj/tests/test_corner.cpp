#include <wio/corner.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace wio;

namespace {

std::shared_ptr<const Grid> grid_ptr(double R, int panels) {
  return std::make_shared<const Grid>(build_grid(R, panels, 1.3, 8));
}

}  // namespace

TEST(Corner, ZeroKernelsGiveIdentity) {
  const auto g1 = grid_ptr(10, 4), g2 = grid_ptr(15, 3);
  const Eigen::MatrixXd m = assemble_block(std::nullopt, std::nullopt, *g1, *g2);
  const auto n = static_cast<Eigen::Index>(g1->size() + g2->size());
  ASSERT_EQ(m.rows(), n);
  ASSERT_EQ(m.cols(), n);
  EXPECT_TRUE(m.isIdentity(0.0));

  CornerSystem sys{std::nullopt, std::nullopt, SampledFunction::sample(g2, Gaussian{2}),
                   SampledFunction::sample(g1, PowerLaw{1})};
  const auto sol = solve_corner(sys);
  for (std::size_t i = 0; i < g1->size(); ++i) EXPECT_EQ(sol.c.values()[i], sys.g.values()[i]);
  for (std::size_t i = 0; i < g2->size(); ++i) EXPECT_EQ(sol.d.values()[i], sys.f.values()[i]);
  EXPECT_EQ(sol.residual_1, 0.0);
  EXPECT_EQ(sol.residual_2, 0.0);
  EXPECT_NEAR(sol.condition_estimate, 1.0, 1e-12);
}

TEST(Corner, HomogeneousDataGivesZero) {
  const auto g1 = grid_ptr(20, 6), g2 = grid_ptr(20, 5);
  const CornerSystem sys{KernelSpec::envelope(2.0), KernelSpec::envelope(2.0), SampledFunction::zeros(g2),
                         SampledFunction::zeros(g1)};
  const auto sol = solve_corner(sys);
  for (double v : sol.c.values()) EXPECT_EQ(v, 0.0);
  for (double v : sol.d.values()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(sol.norm_c, 0.0);
}

TEST(Corner, CouplingEntries) {
  const auto g1 = grid_ptr(20, 6), g2 = grid_ptr(30, 4);
  const auto k1 = KernelSpec::envelope(2.0, 1.5), k2 = KernelSpec::cosine(1.5, 0.3);
  const Eigen::MatrixXd m = assemble_block(k1, k2, *g1, *g2);
  const auto n1 = g1->size(), n2 = g2->size();
  std::mt19937_64 rng(10);
  for (int t = 0; t < 10; ++t) {
    const std::size_t i = rng() % n2, j = rng() % n1;
    const double a1 = g1->weights()[j] * 1.5 * std::pow(1 + std::abs(g1->nodes()[j]) + std::abs(g2->nodes()[i]), -2.0);
    EXPECT_NEAR(m(static_cast<Eigen::Index>(n1 + i), static_cast<Eigen::Index>(j)), a1, 1e-15 * std::abs(a1));
    const std::size_t r = rng() % n1, c = rng() % n2;
    const double x = g1->nodes()[r], y = g2->nodes()[c];
    const double a2 = g2->weights()[c] * std::pow(1 + std::abs(x) + std::abs(y), -1.5) * std::cos(0.3 * x * y);
    EXPECT_NEAR(m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(n1 + c)), a2, 1e-14);
  }
}

TEST(Corner, ManufacturedSolutionRoundTrip) {
  const auto g1 = grid_ptr(20, 12), g2 = grid_ptr(20, 12);
  const auto c_star = SampledFunction::sample(g1, PowerLaw{1.5});
  const auto d_star = SampledFunction::sample(g2, Gaussian{1});
  const auto k = KernelSpec::envelope(2.0);
  const auto [f, g] = manufactured_case(c_star, d_star, k, k);
  CornerSystem sys{k, k, f, g};
  const auto sol = solve_corner(sys);
  const double ec = weighted_norm(SampledFunction(g1, [&] {
                                    std::vector<double> e(g1->size());
                                    for (std::size_t i = 0; i < e.size(); ++i) e[i] = sol.c.values()[i] - c_star.values()[i];
                                    return e;
                                  }()),
                                  sys.space);
  const double ed = weighted_norm(SampledFunction(g2, [&] {
                                    std::vector<double> e(g2->size());
                                    for (std::size_t i = 0; i < e.size(); ++i) e[i] = sol.d.values()[i] - d_star.values()[i];
                                    return e;
                                  }()),
                                  sys.space);
  EXPECT_LT(ec, 1e-8 * weighted_norm(c_star, sys.space));
  EXPECT_LT(ed, 1e-8 * weighted_norm(d_star, sys.space));
  EXPECT_LT(sol.residual_1, 1e-10);
  EXPECT_LT(sol.residual_2, 1e-10);
  EXPECT_GT(sol.condition_estimate, 1.0);
  EXPECT_LT(sol.condition_estimate, 1e3);
}

TEST(Corner, Superposition) {
  const auto g1 = grid_ptr(15, 6), g2 = grid_ptr(25, 6);
  const auto k1 = KernelSpec::envelope(2.0), k2 = KernelSpec::alternating(2.5);
  const auto f1 = SampledFunction::sample(g2, Gaussian{2}), f2 = SampledFunction::sample(g2, Bump{3, 4});
  const auto h1 = SampledFunction::sample(g1, PowerLaw{1}), h2 = SampledFunction::sample(g1, Indicator{-1, 2});
  const double a = 0.7, b = -2.5;
  auto combo = [&](const SampledFunction& u, const SampledFunction& v) {
    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * u.values()[i] + b * v.values()[i];
    return SampledFunction(u.grid_ptr(), out);
  };
  const auto s1 = solve_corner({k1, k2, f1, h1});
  const auto s2 = solve_corner({k1, k2, f2, h2});
  const auto s = solve_corner({k1, k2, combo(f1, f2), combo(h1, h2)});
  const auto c = combo(s1.c, s2.c), d = combo(s1.d, s2.d);
  for (std::size_t i = 0; i < g1->size(); ++i) EXPECT_NEAR(s.c.values()[i], c.values()[i], 1e-12);
  for (std::size_t i = 0; i < g2->size(); ++i) EXPECT_NEAR(s.d.values()[i], d.values()[i], 1e-12);
}

TEST(Corner, SmallCouplingIsAContraction) {
  // with ||A1||, ||A2|| <= e < 1 in the max-row-sum sense the solution obeys
  // max|C| <= (max|G| + e max|F|) / (1 - e^2)
  const auto g1 = grid_ptr(10, 6), g2 = grid_ptr(10, 6);
  const auto k = KernelSpec::envelope(2.0, 0.1);
  const Eigen::MatrixXd a1 = coupling_a1(k, *g1, *g2), a2 = coupling_a2(k, *g1, *g2);
  const double e = std::max(a1.cwiseAbs().rowwise().sum().maxCoeff(), a2.cwiseAbs().rowwise().sum().maxCoeff());
  ASSERT_LT(e, 1.0);
  const auto f = SampledFunction::sample(g2, Gaussian{1}), g = SampledFunction::sample(g1, Bump{2, 3});
  const auto sol = solve_corner({k, k, f, g});
  auto sup = [](const SampledFunction& u) {
    double m = 0;
    for (double v : u.values()) m = std::max(m, std::abs(v));
    return m;
  };
  EXPECT_LE(sup(sol.c), (sup(g) + e * sup(f)) / (1 - e * e) + 1e-12);
  EXPECT_LE(sup(sol.d), (sup(f) + e * sup(g)) / (1 - e * e) + 1e-12);
}

TEST(Corner, IllConditionedSystemIsRejected) {
  // c = -1, kappa = 0: every coupling entry is -w, so A1 A2 has eigenvalue (sum w)^2 = (2R)^2
  // and R = 0.5 makes the block singular
  const auto g1 = std::make_shared<const Grid>(build_grid(0.5, 2, 1.0, 4));
  const auto k = KernelSpec::envelope(0.0, -1.0);
  CornerSystem sys{k, k, SampledFunction::sample(g1, Gaussian{1}), SampledFunction::sample(g1, Gaussian{1})};
  try {
    solve_corner(sys);
    FAIL() << "expected IllConditionedError";
  } catch (const IllConditionedError& e) {
    EXPECT_GT(e.estimate(), 1e12);
  }
  EXPECT_NO_THROW(solve_corner({KernelSpec::envelope(0.0, -0.5), KernelSpec::envelope(0.0, -0.5), sys.f, sys.g}));
}
