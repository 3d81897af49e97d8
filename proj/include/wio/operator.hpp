#pragma once

// Nyström discretization of (Kf)(x) = ∫ K(x,y) f(y) dy between weighted spaces,
// and estimation of the resulting l^{p1} -> l^{p2} matrix norms.
//
// With source weights folded into the kernel (flatten_weights) and quadrature
// weights folded into the matrix,
//
//   B_ij = (w_i^out)^{1/p2} K~(x_i, y_j) (w_j^in)^{1/q1},
//
// the discretized weighted operator norm is exactly the matrix norm
// max ||B u||_{p2} / ||u||_{p1}.

#include <wio/errors.hpp>
#include <wio/grid.hpp>
#include <wio/kernels.hpp>
#include <wio/spaces.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace wio {

class DiscretizedOperator {
public:
  DiscretizedOperator(Eigen::MatrixXd matrix, SpaceSpec source, SpaceSpec target,
                      std::shared_ptr<const Grid> source_grid, std::shared_ptr<const Grid> target_grid)
      : matrix_(std::move(matrix)),
        source_(source),
        target_(target),
        source_grid_(std::move(source_grid)),
        target_grid_(std::move(target_grid)) {
    if (static_cast<std::size_t>(matrix_.rows()) != target_grid_->size() ||
        static_cast<std::size_t>(matrix_.cols()) != source_grid_->size())
      throw StructuralError("DiscretizedOperator: matrix shape does not match the grids");
  }

  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  const SpaceSpec& source_space() const noexcept { return source_; }
  const SpaceSpec& target_space() const noexcept { return target_; }
  const Grid& source_grid() const noexcept { return *source_grid_; }
  const Grid& target_grid() const noexcept { return *target_grid_; }
  const std::shared_ptr<const Grid>& source_grid_ptr() const noexcept { return source_grid_; }
  const std::shared_ptr<const Grid>& target_grid_ptr() const noexcept { return target_grid_; }
  double p1() const noexcept { return source_.p(); }
  double p2() const noexcept { return target_.p(); }

  bool nonnegative() const { return (matrix_.array() >= 0.0).all(); }

private:
  Eigen::MatrixXd matrix_;
  SpaceSpec source_;
  SpaceSpec target_;
  std::shared_ptr<const Grid> source_grid_;
  std::shared_ptr<const Grid> target_grid_;
};

/// B_ij = wx_i^{out_exp} kernel(x_i, y_j) wy_j^{in_exp}
template <class Kernel>
Eigen::MatrixXd assemble_matrix(const Kernel& kernel, std::span<const double> xs, std::span<const double> wx,
                                std::span<const double> ys, std::span<const double> wy, double out_exp,
                                double in_exp) {
  std::vector<double> col_scale(ys.size());
  for (std::size_t j = 0; j < ys.size(); ++j) col_scale[j] = std::pow(wy[j], in_exp);

  Eigen::MatrixXd b(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(ys.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double row_scale = std::pow(wx[i], out_exp);
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const double v = row_scale * kernel(xs[i], ys[j]) * col_scale[j];
      if (!std::isfinite(v))
        throw NumericalError("assemble: non-finite entry at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return b;
}

inline DiscretizedOperator assemble(const KernelSpec& k, const SpaceSpec& source, const SpaceSpec& target,
                                    std::shared_ptr<const Grid> source_grid,
                                    std::shared_ptr<const Grid> target_grid) {
  Eigen::MatrixXd b = assemble_matrix(flatten_weights(k, source, target), target_grid->nodes(),
                                      target_grid->weights(), source_grid->nodes(), source_grid->weights(),
                                      1.0 / target.p(), 1.0 / source.q());
  return {std::move(b), source, target, std::move(source_grid), std::move(target_grid)};
}

/// Quadrature value of (Kf)(x) over the grid f is sampled on.
inline double apply_operator(const KernelSpec& k, const SampledFunction& f, double x) {
  const auto y = f.grid().nodes();
  const auto w = f.grid().weights();
  const auto v = f.values();
  double acc = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (v[j] == 0.0) continue;
    acc += w[j] * kernel_eval(k, x, y[j]) * v[j];
  }
  if (!std::isfinite(acc)) throw NumericalError("apply_operator: non-finite result at x = " + format_number(x));
  return acc;
}

/// (Kf) sampled at every node of `target_grid`.
inline SampledFunction apply_operator(const KernelSpec& k, const SampledFunction& f,
                                      std::shared_ptr<const Grid> target_grid) {
  std::vector<double> out(target_grid->size());
  const auto x = target_grid->nodes();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = apply_operator(k, f, x[i]);
  return {std::move(target_grid), std::move(out)};
}

// ---------------------------------------------------------------------------
// Norm estimation

struct IterationControl {
  double tolerance = 1e-10;  ///< relative change of successive estimates
  int max_iterations = 10000;
  /// Largest matrix dimension for which a dense SVD replaces a stalled power iteration.
  Eigen::Index dense_fallback_limit = 500;
};

enum class NormMethod { power_iteration, dense_svd, closed_form };

inline const char* to_string(NormMethod m) noexcept {
  switch (m) {
    case NormMethod::power_iteration: return "power_iteration";
    case NormMethod::dense_svd: return "dense_svd";
    case NormMethod::closed_form: return "closed_form";
  }
  return "?";
}

struct NormEstimate {
  double value = 0.0;
  /// The value is the matrix norm (to tolerance), not merely a lower bound.
  bool certified = false;
  bool converged = false;
  int iterations = 0;
  NormMethod method = NormMethod::power_iteration;
  /// Right vector attaining the value, normalized in l^{p1}.
  Eigen::VectorXd maximizer;
};

/// Largest singular value of `b` by power iteration on b^T b from the
/// all-ones vector, with a dense SVD fallback for small stalled cases.
inline NormEstimate spectral_norm(const Eigen::MatrixXd& b, const IterationControl& ctl = {}) {
  NormEstimate est;
  if (b.size() == 0) {
    est.certified = est.converged = true;
    est.method = NormMethod::closed_form;
    return est;
  }
  Eigen::VectorXd v = Eigen::VectorXd::Ones(b.cols()).normalized();
  double prev = 0.0;
  Eigen::VectorXd bv, g;
  for (int it = 1; it <= ctl.max_iterations; ++it) {
    bv.noalias() = b * v;
    g.noalias() = b.transpose() * bv;
    const double lambda = v.dot(g);  // Rayleigh quotient of b^T b
    const double gn = g.norm();
    est.iterations = it;
    if (gn == 0.0) {
      // v lies in the null space; restart is pointless from a fixed start, defer to SVD
      break;
    }
    v = g / gn;
    const double value = std::sqrt(std::max(lambda, 0.0));
    if (it > 1 && std::abs(value - prev) <= ctl.tolerance * value) {
      // one more Rayleigh quotient at the updated vector
      const double final_value = (b * v).norm();
      est.value = std::max(value, final_value);
      est.converged = est.certified = true;
      est.maximizer = v;
      return est;
    }
    prev = value;
  }
  if (std::max(b.rows(), b.cols()) <= ctl.dense_fallback_limit) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinV);
    est.value = svd.singularValues()(0);
    est.maximizer = svd.matrixV().col(0);
    est.converged = est.certified = true;
    est.method = NormMethod::dense_svd;
    return est;
  }
  throw NumericalError("spectral_norm: no convergence after " + std::to_string(est.iterations) +
                       " iterations (last estimate " + format_number(prev) + ")");
}

/// Operator norm for p1 = p2 = 2.
inline NormEstimate operator_norm_22(const DiscretizedOperator& op, const IterationControl& ctl = {}) {
  if (op.p1() != 2.0 || op.p2() != 2.0) throw DomainError("operator_norm_22: both spaces must have p = 2");
  return spectral_norm(op.matrix(), ctl);
}

namespace detail {

/// sign(u) |u|^{r-1}, computed on u / max|u| so large exponents stay finite.
inline Eigen::VectorXd duality_map(const Eigen::VectorXd& u, double r) {
  const double m = u.cwiseAbs().maxCoeff();
  Eigen::VectorXd out(u.size());
  if (m == 0.0) return Eigen::VectorXd::Zero(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double a = std::abs(u(i)) / m;
    out(i) = a == 0.0 ? 0.0 : std::copysign(std::pow(a, r - 1.0), u(i));
  }
  return out;
}

inline double lp(const Eigen::VectorXd& u, double p) {
  const double m = u.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) acc += std::pow(std::abs(u(i)) / m, p);
  return m * std::pow(acc, 1.0 / p);
}

}  // namespace detail

/// max ||b u||_{p2} / ||u||_{p1} by the nonlinear power method
///   u <- J_{q1}( b^T J_{p2}(b u) ),   J_r(v) = sign(v)|v|^{r-1} (normalized),
/// started from the all-ones vector. For entrywise nonnegative b with
/// p1 <= p2 the fixed point is the global maximizer and the value is
/// certified; otherwise it is a lower bound.
inline NormEstimate matrix_norm_pq(const Eigen::MatrixXd& b, double p1, double p2, const IterationControl& ctl = {}) {
  if (!(p1 > 1.0) || !(p2 > 1.0) || !std::isfinite(p1) || !std::isfinite(p2))
    throw DomainError("operator_norm_pq: p1, p2 must lie in (1, inf)");
  const double q1 = conjugate_exponent(p1);
  NormEstimate est;
  const bool nonneg = (b.array() >= 0.0).all();
  if (b.size() == 0 || b.cwiseAbs().maxCoeff() == 0.0) {
    est.certified = est.converged = true;
    est.method = NormMethod::closed_form;
    est.maximizer = Eigen::VectorXd::Ones(b.cols());
    if (b.cols() > 0) est.maximizer /= detail::lp(est.maximizer, p1);
    return est;
  }

  Eigen::VectorXd u = Eigen::VectorXd::Ones(b.cols());
  u /= detail::lp(u, p1);
  double value = detail::lp(b * u, p2);
  double best = value;
  Eigen::VectorXd best_u = u;
  for (int it = 1; it <= ctl.max_iterations; ++it) {
    const Eigen::VectorXd bu = b * u;
    const Eigen::VectorXd z = b.transpose() * detail::duality_map(bu, p2);
    if (z.cwiseAbs().maxCoeff() == 0.0) break;
    Eigen::VectorXd next = detail::duality_map(z, q1);
    next /= detail::lp(next, p1);
    const double next_value = detail::lp(b * next, p2);
    est.iterations = it;
    const bool settled = std::abs(next_value - value) <= ctl.tolerance * std::max(next_value, value);
    u = std::move(next);
    value = next_value;
    if (value > best) {
      best = value;
      best_u = u;
    }
    if (settled) {
      est.converged = true;
      break;
    }
  }
  est.value = best;
  est.maximizer = best_u;
  est.certified = est.converged && nonneg && p1 <= p2;
  return est;
}

inline NormEstimate operator_norm_pq(const DiscretizedOperator& op, const IterationControl& ctl = {}) {
  return matrix_norm_pq(op.matrix(), op.p1(), op.p2(), ctl);
}

/// Dispatches to the spectral estimator when both exponents equal 2.
inline NormEstimate operator_norm(const DiscretizedOperator& op, const IterationControl& ctl = {}) {
  if (op.p1() == 2.0 && op.p2() == 2.0) return operator_norm_22(op, ctl);
  return operator_norm_pq(op, ctl);
}

/// ||Kf||_target / ||f||_source with Kf sampled on `target_grid`.
inline double empirical_ratio(const KernelSpec& k, const SampledFunction& f, const SpaceSpec& source,
                              const SpaceSpec& target, std::shared_ptr<const Grid> target_grid) {
  const double denom = weighted_norm(f, source);
  if (!(denom > 0.0)) throw DomainError("empirical_ratio: source norm of f is zero");
  const auto kf = apply_operator(k, f, std::move(target_grid));
  return weighted_norm(kf, target) / denom;
}

/// Source-space function whose discrete image under the assembled matrix is
/// B u; inverse of the column scaling used by assemble().
inline SampledFunction function_from_matrix_vector(const DiscretizedOperator& op, const Eigen::VectorXd& u) {
  const auto& space = op.source_space();
  auto source_grid = op.source_grid_ptr();
  const auto y = source_grid->nodes();
  const auto w = source_grid->weights();
  std::vector<double> f(y.size());
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double scale = std::pow(w[j], 1.0 / space.p()) *
                         std::pow(1.0 + std::abs(y[j]), space.weight_exponent() / space.p());
    f[j] = u(static_cast<Eigen::Index>(j)) / scale;
  }
  return {std::move(source_grid), std::move(f)};
}

}  // namespace wio
