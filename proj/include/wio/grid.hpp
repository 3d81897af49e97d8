#pragma once

// Truncated composite Gauss-Legendre meshes on [-R, R].
//
// Panels on the positive half-line are graded geometrically toward large |x|
// and mirrored onto the negative half-line, so x = 0 is always a breakpoint.

#include <wio/errors.hpp>

#include <cmath>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wio {

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int order) {
  if (order < 1) throw DomainError("gauss_legendre: order must be >= 1");
  const auto n = static_cast<std::size_t>(order);
  std::vector<double> x(n), w(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (std::size_t k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / static_cast<double>(k);
      }
      dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged root
    {
      double p0 = 1.0, p1 = 0.0;
      for (std::size_t k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / static_cast<double>(k);
      }
      dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
  return {std::move(x), std::move(w)};
}

/// Immutable symmetric quadrature mesh on [-R, R].
class Grid {
public:
  /// Builds the mesh from positive-side breakpoints 0 = b_0 < b_1 < ... < b_m = R.
  static Grid from_breakpoints(std::vector<double> breaks, int panel_order, double grading = 1.0) {
    if (breaks.size() < 2 || breaks.front() != 0.0)
      throw DomainError("Grid: breakpoints must start at 0 and contain at least one panel");
    for (std::size_t i = 1; i < breaks.size(); ++i) {
      if (!(breaks[i] > breaks[i - 1]) || !std::isfinite(breaks[i]))
        throw DomainError("Grid: breakpoints must be finite and strictly increasing");
    }
    if (panel_order < 2) throw DomainError("Grid: panel_order must be >= 2");

    Grid g;
    g.breaks_ = std::move(breaks);
    g.order_ = panel_order;
    g.grading_ = grading;

    const auto [ref_x, ref_w] = gauss_legendre(panel_order);
    std::vector<double> pos_x, pos_w;
    pos_x.reserve((g.breaks_.size() - 1) * ref_x.size());
    pos_w.reserve(pos_x.capacity());
    for (std::size_t p = 0; p + 1 < g.breaks_.size(); ++p) {
      const double a = g.breaks_[p], b = g.breaks_[p + 1];
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      for (std::size_t k = 0; k < ref_x.size(); ++k) {
        pos_x.push_back(mid + half * ref_x[k]);
        pos_w.push_back(half * ref_w[k]);
      }
    }
    const std::size_t half_n = pos_x.size();
    g.nodes_.resize(2 * half_n);
    g.weights_.resize(2 * half_n);
    for (std::size_t i = 0; i < half_n; ++i) {
      g.nodes_[half_n - 1 - i] = -pos_x[i];
      g.weights_[half_n - 1 - i] = pos_w[i];
      g.nodes_[half_n + i] = pos_x[i];
      g.weights_[half_n + i] = pos_w[i];
    }
    return g;
  }

  double R() const noexcept { return breaks_.back(); }
  int panel_order() const noexcept { return order_; }
  double grading() const noexcept { return grading_; }
  std::size_t panels_per_side() const noexcept { return breaks_.size() - 1; }
  std::size_t size() const noexcept { return nodes_.size(); }

  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }
  /// Positive-side panel breakpoints, including 0 and R.
  std::span<const double> breakpoints() const noexcept { return breaks_; }

  /// Sub-grid made of the panels inside [-r, r]; r must coincide with a breakpoint.
  Grid restrict_to(double r) const {
    for (std::size_t i = 1; i < breaks_.size(); ++i) {
      if (std::abs(breaks_[i] - r) <= 1e-12 * r) {
        return from_breakpoints({breaks_.begin(), breaks_.begin() + static_cast<std::ptrdiff_t>(i) + 1},
                                order_, grading_);
      }
    }
    throw DomainError("Grid::restrict_to: radius is not a panel breakpoint");
  }

private:
  Grid() = default;

  std::vector<double> breaks_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  int order_ = 0;
  double grading_ = 1.0;
};

/// Geometric panel breakpoints on [0, R]: the first panel has width
/// R (g - 1) / (g^m - 1) and each following panel is g times wider.
inline std::vector<double> graded_breakpoints(double R, int panels, double grading) {
  if (!(R > 0.0) || !std::isfinite(R)) throw DomainError("build_grid: R must be positive and finite");
  if (panels < 1) throw DomainError("build_grid: panels_per_side must be >= 1");
  if (!(grading >= 1.0) || !std::isfinite(grading)) throw DomainError("build_grid: grading must be >= 1");

  std::vector<double> b(static_cast<std::size_t>(panels) + 1, 0.0);
  if (grading == 1.0) {
    for (int i = 1; i < panels; ++i) b[static_cast<std::size_t>(i)] = R * i / panels;
  } else {
    const double h0 = R * (grading - 1.0) / (std::pow(grading, panels) - 1.0);
    for (int i = 1; i < panels; ++i)
      b[static_cast<std::size_t>(i)] = h0 * (std::pow(grading, i) - 1.0) / (grading - 1.0);
  }
  b.back() = R;
  return b;
}

inline Grid build_grid(double R, int panels_per_side, double grading = 1.3, int panel_order = 8) {
  if (panel_order < 2) throw DomainError("build_grid: panel_order must be >= 2");
  return Grid::from_breakpoints(graded_breakpoints(R, panels_per_side, grading), panel_order, grading);
}

/// Layout of a family of nested grids, one per truncation radius.
struct NestedGridParams {
  int inner_panels = 10;      ///< panels on [0, R_0]
  double inner_grading = 1.0; ///< grading on [0, R_0]
  int annulus_panels = 6;     ///< panels on each [R_{l-1}, R_l]
  int panel_order = 8;

  bool operator==(const NestedGridParams&) const = default;
};

/// Grids for an increasing radius schedule such that grid l is exactly the
/// restriction of grid l+1 to [-R_l, R_l]. Beyond R_0 each annulus carries
/// `annulus_panels` panels with constant width ratio.
inline std::vector<Grid> build_nested_grids(std::span<const double> radii, const NestedGridParams& params = {}) {
  if (radii.empty()) return {};
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) throw DomainError("build_nested_grids: radii must be strictly increasing");
  if (params.annulus_panels < 1) throw DomainError("build_nested_grids: annulus_panels must be >= 1");

  std::vector<double> breaks = graded_breakpoints(radii[0], params.inner_panels, params.inner_grading);
  std::vector<Grid> out;
  out.push_back(Grid::from_breakpoints(breaks, params.panel_order, params.inner_grading));
  for (std::size_t l = 1; l < radii.size(); ++l) {
    const double r0 = radii[l - 1], r1 = radii[l];
    const double ratio = std::pow(r1 / r0, 1.0 / params.annulus_panels);
    for (int i = 1; i < params.annulus_panels; ++i) breaks.push_back(r0 * std::pow(ratio, i));
    breaks.push_back(r1);
    out.push_back(Grid::from_breakpoints(breaks, params.panel_order, params.inner_grading));
  }
  return out;
}

/// Sum of weights times values, in node order.
inline double integrate(const Grid& grid, std::span<const double> values) {
  if (values.size() != grid.size()) throw StructuralError("integrate: value count differs from grid size");
  const auto w = grid.weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]))
      throw NumericalError("integrate: non-finite integrand at node " + std::to_string(i));
    acc += w[i] * values[i];
  }
  return acc;
}

template <class F>
  requires std::invocable<F, double>
double integrate(const Grid& grid, F&& g) {
  std::vector<double> v(grid.size());
  const auto x = grid.nodes();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(g(x[i]));
  return integrate(grid, std::span<const double>(v));
}

}  // namespace wio
