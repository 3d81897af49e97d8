#pragma once

// Coupled pair of linear integral equations in unknowns C(ξ1), D(ξ2):
//
//   ∫ K1(ξ1, ξ2) C(ξ1) dξ1 + D(ξ2) = F(ξ2)
//   C(ξ1) + ∫ K2(ξ1, ξ2) D(ξ2) dξ2 = G(ξ1)
//
// discretized by Nyström quadrature and solved densely. The stacked unknown is
// (C; D) and the rows are ordered (second equation; first equation), so the
// system matrix is [[I, A2], [A1, I]] and reduces to the identity when both
// kernels vanish.

#include <wio/errors.hpp>
#include <wio/grid.hpp>
#include <wio/kernels.hpp>
#include <wio/spaces.hpp>

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <string>
#include <utility>

namespace wio {

struct CornerSystem {
  /// nullopt stands for the zero kernel.
  std::optional<KernelSpec> k1 = KernelSpec::envelope(2.0);
  std::optional<KernelSpec> k2 = KernelSpec::envelope(2.0);
  SampledFunction f;  ///< on the ξ2 grid
  SampledFunction g;  ///< on the ξ1 grid
  SpaceSpec space = SpaceSpec::h(-0.25);
};

struct CornerSolution {
  SampledFunction c;
  SampledFunction d;
  double residual_1 = 0.0;  ///< weighted norm of the first equation's residual
  double residual_2 = 0.0;
  double condition_estimate = 0.0;  ///< 1-norm condition number estimate
  double norm_c = 0.0;
  double norm_d = 0.0;
};

/// A1 (n2 x n1): (A1 C)(ξ2_i) = Σ_j w1_j K1(ξ1_j, ξ2_i) C_j.
inline Eigen::MatrixXd coupling_a1(const std::optional<KernelSpec>& k1, const Grid& grid1, const Grid& grid2) {
  const auto n1 = static_cast<Eigen::Index>(grid1.size()), n2 = static_cast<Eigen::Index>(grid2.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n2, n1);
  if (!k1) return a;
  const auto x1 = grid1.nodes(), w1 = grid1.weights(), x2 = grid2.nodes();
  for (Eigen::Index i = 0; i < n2; ++i)
    for (Eigen::Index j = 0; j < n1; ++j)
      a(i, j) = w1[static_cast<std::size_t>(j)] *
                kernel_eval(*k1, x1[static_cast<std::size_t>(j)], x2[static_cast<std::size_t>(i)]);
  return a;
}

/// A2 (n1 x n2): (A2 D)(ξ1_i) = Σ_j w2_j K2(ξ1_i, ξ2_j) D_j.
inline Eigen::MatrixXd coupling_a2(const std::optional<KernelSpec>& k2, const Grid& grid1, const Grid& grid2) {
  const auto n1 = static_cast<Eigen::Index>(grid1.size()), n2 = static_cast<Eigen::Index>(grid2.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n1, n2);
  if (!k2) return a;
  const auto x1 = grid1.nodes(), x2 = grid2.nodes(), w2 = grid2.weights();
  for (Eigen::Index i = 0; i < n1; ++i)
    for (Eigen::Index j = 0; j < n2; ++j)
      a(i, j) = w2[static_cast<std::size_t>(j)] *
                kernel_eval(*k2, x1[static_cast<std::size_t>(i)], x2[static_cast<std::size_t>(j)]);
  return a;
}

inline Eigen::MatrixXd assemble_block(const std::optional<KernelSpec>& k1, const std::optional<KernelSpec>& k2,
                                      const Grid& grid1, const Grid& grid2) {
  const auto n1 = static_cast<Eigen::Index>(grid1.size()), n2 = static_cast<Eigen::Index>(grid2.size());
  Eigen::MatrixXd m(n1 + n2, n1 + n2);
  m.topLeftCorner(n1, n1).setIdentity();
  m.topRightCorner(n1, n2) = coupling_a2(k2, grid1, grid2);
  m.bottomLeftCorner(n2, n1) = coupling_a1(k1, grid1, grid2);
  m.bottomRightCorner(n2, n2).setIdentity();
  if (!m.allFinite()) throw NumericalError("assemble_block: non-finite entry");
  return m;
}

inline Eigen::MatrixXd assemble_block(const CornerSystem& sys, const Grid& grid1, const Grid& grid2) {
  if (sys.g.size() != grid1.size() || sys.f.size() != grid2.size())
    throw StructuralError("assemble_block: F must live on grid2 and G on grid1");
  return assemble_block(sys.k1, sys.k2, grid1, grid2);
}

namespace detail {

inline Eigen::VectorXd to_eigen(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline SampledFunction from_eigen(std::shared_ptr<const Grid> grid, const Eigen::VectorXd& v) {
  return {std::move(grid), std::vector<double>(v.data(), v.data() + v.size())};
}

}  // namespace detail

inline CornerSolution solve_corner(const CornerSystem& sys, double max_condition = 1e12) {
  const auto grid1 = sys.g.grid_ptr();
  const auto grid2 = sys.f.grid_ptr();
  const Eigen::MatrixXd m = assemble_block(sys, *grid1, *grid2);
  const auto n1 = static_cast<Eigen::Index>(grid1->size()), n2 = static_cast<Eigen::Index>(grid2->size());

  Eigen::VectorXd rhs(n1 + n2);
  rhs.head(n1) = detail::to_eigen(sys.g.values());
  rhs.tail(n2) = detail::to_eigen(sys.f.values());

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const double rcond = lu.rcond();
  const double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(cond < max_condition))
    throw IllConditionedError("solve_corner: condition estimate " + format_number(cond) + " exceeds " +
                                  format_number(max_condition),
                              cond);
  const Eigen::VectorXd x = lu.solve(rhs);
  if (!x.allFinite()) throw NumericalError("solve_corner: non-finite solution");

  const Eigen::VectorXd r = m * x - rhs;
  CornerSolution out{detail::from_eigen(grid1, x.head(n1)), detail::from_eigen(grid2, x.tail(n2))};
  out.residual_2 = weighted_norm(detail::from_eigen(grid1, r.head(n1)), sys.space);
  out.residual_1 = weighted_norm(detail::from_eigen(grid2, r.tail(n2)), sys.space);
  out.condition_estimate = cond;
  out.norm_c = weighted_norm(out.c, sys.space);
  out.norm_d = weighted_norm(out.d, sys.space);
  return out;
}

/// Right-hand data (F, G) for which (C*, D*) solves the discrete system:
/// F = A1 C* + D*, G = C* + A2 D*.
inline std::pair<SampledFunction, SampledFunction> manufactured_case(const SampledFunction& c_star,
                                                                     const SampledFunction& d_star,
                                                                     const std::optional<KernelSpec>& k1,
                                                                     const std::optional<KernelSpec>& k2) {
  const auto& grid1 = c_star.grid();
  const auto& grid2 = d_star.grid();
  const Eigen::VectorXd c = detail::to_eigen(c_star.values());
  const Eigen::VectorXd d = detail::to_eigen(d_star.values());
  const Eigen::VectorXd f = coupling_a1(k1, grid1, grid2) * c + d;
  const Eigen::VectorXd g = c + coupling_a2(k2, grid1, grid2) * d;
  return {detail::from_eigen(d_star.grid_ptr(), f), detail::from_eigen(c_star.grid_ptr(), g)};
}

}  // namespace wio
