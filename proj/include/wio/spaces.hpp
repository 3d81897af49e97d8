#pragma once

// Power-weighted integrability spaces on the real line and weighted norms of
// functions sampled on a Grid.
//
//   H(s)      ||f|| = ( ∫ |f|^2 (1+|x|)^{2s} dx )^{1/2}
//   Hsp(s,p)  ||f|| = ( ∫ |f|^p (1+|x|)^{p s} dx )^{1/p}
//   Hps(p,s)  ||f|| = ( ∫ |f|^p (1+|x|)^{2 s} dx )^{1/p}
//
// All three reduce to H(s) at p = 2.

#include <wio/errors.hpp>
#include <wio/grid.hpp>
#include <wio/parse.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace wio {

/// q with 1/p + 1/q = 1.
inline double conjugate_exponent(double p) {
  if (!std::isfinite(p) || !(p > 1.0)) throw DomainError("conjugate_exponent: p must be finite and > 1");
  return p / (p - 1.0);
}

/// Hölder pair (p, q); p = 2 is self-conjugate.
struct ExponentPair {
  double p;
  double q;

  explicit ExponentPair(double p_) : p(p_), q(conjugate_exponent(p_)) {}
};

enum class SpaceFamily { classic, weight_ps, weight_2s };

class SpaceSpec {
public:
  static SpaceSpec h(double s) { return {SpaceFamily::classic, s, 2.0}; }
  static SpaceSpec hsp(double s, double p) { return {SpaceFamily::weight_ps, s, checked_p(p)}; }
  static SpaceSpec hps(double p, double s) { return {SpaceFamily::weight_2s, s, checked_p(p)}; }

  /// `H(s)`, `Hsp(s,p)` or `Hps(p,s)`.
  static SpaceSpec parse(std::string_view text) {
    const auto c = parse_call(text);
    if (c.name == "H") {
      expect_arity(c, 1, 1);
      return h(c.args[0]);
    }
    if (c.name == "Hsp") {
      expect_arity(c, 2, 2);
      return hsp(c.args[0], c.args[1]);
    }
    if (c.name == "Hps") {
      expect_arity(c, 2, 2);
      return hps(c.args[0], c.args[1]);
    }
    throw ParseError("unknown space '" + c.name + "' (expected H, Hsp, Hps)");
  }

  SpaceFamily family() const noexcept { return family_; }
  double s() const noexcept { return s_; }
  double p() const noexcept { return p_; }
  double q() const { return conjugate_exponent(p_); }

  /// Exponent w of the weight (1+|x|)^w inside the p-th power integral.
  double weight_exponent() const noexcept {
    return family_ == SpaceFamily::weight_ps ? p_ * s_ : 2.0 * s_;
  }

  std::string to_string() const {
    switch (family_) {
      case SpaceFamily::classic: return "H(" + format_number(s_) + ")";
      case SpaceFamily::weight_ps: return "Hsp(" + format_number(s_) + "," + format_number(p_) + ")";
      case SpaceFamily::weight_2s: return "Hps(" + format_number(p_) + "," + format_number(s_) + ")";
    }
    return {};
  }

  bool operator==(const SpaceSpec&) const = default;

private:
  SpaceSpec(SpaceFamily f, double s, double p) : family_(f), s_(s), p_(p) {
    if (!std::isfinite(s)) throw DomainError("SpaceSpec: s must be finite");
  }

  static double checked_p(double p) {
    if (!std::isfinite(p) || !(p > 1.0)) throw DomainError("SpaceSpec: p must lie in (1, inf)");
    return p;
  }

  SpaceFamily family_;
  double s_;
  double p_;
};

inline double weight_exponent(const SpaceSpec& space) noexcept { return space.weight_exponent(); }

// ---------------------------------------------------------------------------
// Closed-form test functions

/// (1+|x|)^{-t}
struct PowerLaw {
  double t;
};
/// 1 on [a, b], 0 elsewhere
struct Indicator {
  double a, b;
};
/// exp(-x^2 / (2 sigma^2))
struct Gaussian {
  double sigma;
};
/// exp(1 - 1/(1 - r^2)) with r = (x - c)/w on |r| < 1; peak value 1 at c.
struct Bump {
  double c, w;
};

class FunctionSpec {
public:
  using Form = std::variant<PowerLaw, Indicator, Gaussian, Bump>;

  template <class T>
    requires std::is_constructible_v<Form, T>
  FunctionSpec(T f) : form_(std::move(f)) {  // NOLINT(google-explicit-constructor)
    if (const auto* g = std::get_if<Gaussian>(&form_); g && !(g->sigma > 0.0))
      throw DomainError("gauss: sigma must be positive");
    if (const auto* b = std::get_if<Bump>(&form_); b && !(b->w > 0.0))
      throw DomainError("bump: width must be positive");
    if (const auto* i = std::get_if<Indicator>(&form_); i && !(i->b >= i->a))
      throw DomainError("indicator: need a <= b");
  }

  /// `powerlaw(t)`, `indicator(a,b)`, `gauss(sigma)`, `bump(c,w)`.
  static FunctionSpec parse(std::string_view text) {
    const auto c = parse_call(text);
    if (c.name == "powerlaw") {
      expect_arity(c, 1, 1);
      return PowerLaw{c.args[0]};
    }
    if (c.name == "indicator") {
      expect_arity(c, 2, 2);
      return Indicator{c.args[0], c.args[1]};
    }
    if (c.name == "gauss") {
      expect_arity(c, 1, 1);
      return Gaussian{c.args[0]};
    }
    if (c.name == "bump") {
      expect_arity(c, 2, 2);
      return Bump{c.args[0], c.args[1]};
    }
    throw ParseError("unknown function '" + c.name + "' (expected powerlaw, indicator, gauss, bump)");
  }

  double operator()(double x) const {
    return std::visit(
        [x](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, PowerLaw>) {
            return std::pow(1.0 + std::abs(x), -f.t);
          } else if constexpr (std::is_same_v<T, Indicator>) {
            return (x >= f.a && x <= f.b) ? 1.0 : 0.0;
          } else if constexpr (std::is_same_v<T, Gaussian>) {
            return std::exp(-x * x / (2.0 * f.sigma * f.sigma));
          } else {
            const double r = (x - f.c) / f.w;
            return std::abs(r) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r * r)) : 0.0;
          }
        },
        form_);
  }

  const Form& form() const noexcept { return form_; }

  std::string to_string() const {
    return std::visit(
        [](const auto& f) -> std::string {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, PowerLaw>) return "powerlaw(" + format_number(f.t) + ")";
          else if constexpr (std::is_same_v<T, Indicator>)
            return "indicator(" + format_number(f.a) + "," + format_number(f.b) + ")";
          else if constexpr (std::is_same_v<T, Gaussian>) return "gauss(" + format_number(f.sigma) + ")";
          else return "bump(" + format_number(f.c) + "," + format_number(f.w) + ")";
        },
        form_);
  }

private:
  Form form_;
};

// ---------------------------------------------------------------------------

/// Node values of a function on a shared, immutable grid.
class SampledFunction {
public:
  SampledFunction(std::shared_ptr<const Grid> grid, std::vector<double> values,
                  std::optional<FunctionSpec> tag = std::nullopt)
      : grid_(std::move(grid)), values_(std::move(values)), tag_(std::move(tag)) {
    if (!grid_) throw StructuralError("SampledFunction: null grid");
    if (values_.size() != grid_->size())
      throw StructuralError("SampledFunction: " + std::to_string(values_.size()) + " values for " +
                            std::to_string(grid_->size()) + " nodes");
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (!std::isfinite(values_[i]))
        throw NumericalError("SampledFunction: non-finite value at node " + std::to_string(i));
  }

  static SampledFunction sample(std::shared_ptr<const Grid> grid, const FunctionSpec& spec) {
    std::vector<double> v(grid->size());
    const auto x = grid->nodes();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = spec(x[i]);
    return {std::move(grid), std::move(v), spec};
  }

  static SampledFunction zeros(std::shared_ptr<const Grid> grid) {
    std::vector<double> v(grid->size(), 0.0);
    return {std::move(grid), std::move(v)};
  }

  const Grid& grid() const noexcept { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  const std::optional<FunctionSpec>& tag() const noexcept { return tag_; }
  std::size_t size() const noexcept { return values_.size(); }

private:
  std::shared_ptr<const Grid> grid_;
  std::vector<double> values_;
  std::optional<FunctionSpec> tag_;
};

/// ( Σ_i w_i |v_i|^p (1+|x_i|)^e )^{1/p}, scaled by max |v_i| against overflow.
inline double weighted_lp_sum_norm(const Grid& grid, std::span<const double> v, double p, double e) {
  double vmax = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) throw NumericalError("weighted_norm: non-finite sample");
    vmax = std::max(vmax, std::abs(x));
  }
  if (vmax == 0.0) return 0.0;
  const auto x = grid.nodes();
  const auto w = grid.weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]) / vmax;
    if (a == 0.0) continue;
    acc += w[i] * std::pow(a, p) * (e == 0.0 ? 1.0 : std::pow(1.0 + std::abs(x[i]), e));
  }
  return vmax * std::pow(acc, 1.0 / p);
}

inline double weighted_norm(const SampledFunction& f, const SpaceSpec& space) {
  return weighted_lp_sum_norm(f.grid(), f.values(), space.p(), space.weight_exponent());
}

/// Unweighted p-norm on the grid.
inline double lp_norm(const SampledFunction& f, double p) {
  return weighted_lp_sum_norm(f.grid(), f.values(), p, 0.0);
}

/// g = (1+|x|)^{w/p} f, an isometry onto the unweighted p-integrable functions.
inline SampledFunction to_unweighted(const SampledFunction& f, const SpaceSpec& space) {
  const double e = space.weight_exponent() / space.p();
  const auto x = f.grid().nodes();
  std::vector<double> g(f.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::pow(1.0 + std::abs(x[i]), e) * f.values()[i];
  return {f.grid_ptr(), std::move(g)};
}

/// Inverse of to_unweighted.
inline SampledFunction from_unweighted(const SampledFunction& g, const SpaceSpec& space) {
  const double e = -space.weight_exponent() / space.p();
  const auto x = g.grid().nodes();
  std::vector<double> f(g.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::pow(1.0 + std::abs(x[i]), e) * g.values()[i];
  return {g.grid_ptr(), std::move(f)};
}

/// Closed-form norm of (1+|x|)^{-t} in `space`, over [-R, R] when R > 0 and
/// over the whole line when R == 0.
inline double powerlaw_norm_closed_form(double t, const SpaceSpec& space, double R = 0.0) {
  const double p = space.p();
  const double b = p * t - space.weight_exponent();  // integrand (1+|x|)^{-b}
  double integral = 0.0;
  if (R == 0.0) {
    if (!(b > 1.0)) throw NumericalError("powerlaw norm diverges on the whole line (decay exponent <= 1)");
    integral = 2.0 / (b - 1.0);
  } else if (R > 0.0) {
    integral = b == 1.0 ? 2.0 * std::log1p(R) : 2.0 * (1.0 - std::pow(1.0 + R, 1.0 - b)) / (b - 1.0);
  } else {
    throw DomainError("powerlaw norm: R must be nonnegative");
  }
  return std::pow(integral, 1.0 / p);
}

}  // namespace wio
