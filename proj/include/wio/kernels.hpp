#pragma once

// Kernels bounded by the power envelope (1+|x|+|y|)^{-kappa}, the weight
// flattening that turns weighted-space operators into unweighted ones, and
// the closed-form majorant integral
//
//   ∫_R (1+|x|+|y|)^{-a} dy = 2 (1+|x|)^{1-a} / (a-1),   a > 1.

#include <wio/conditions.hpp>
#include <wio/errors.hpp>
#include <wio/parse.hpp>
#include <wio/spaces.hpp>

#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <variant>

namespace wio {

struct NoModulation {};
/// cos(omega x y)
struct CosineModulation {
  double omega;
};
/// sign(sin(x + y))
struct AlternatingModulation {};

using Modulation = std::variant<NoModulation, CosineModulation, AlternatingModulation>;

struct KernelSpec {
  double kappa = 2.0;
  double c_lower = 1.0;
  double c_upper = 1.0;
  Modulation modulation = NoModulation{};

  static KernelSpec envelope(double kappa, double c = 1.0) { return {kappa, c, c, NoModulation{}}; }
  static KernelSpec cosine(double kappa, double omega) { return {kappa, 1.0, 1.0, CosineModulation{omega}}; }
  static KernelSpec alternating(double kappa) { return {kappa, 1.0, 1.0, AlternatingModulation{}}; }

  /// `envelope(kappa)`, `envelope(kappa,c)`, `cosmod(kappa,omega)`, `altmod(kappa)`.
  static KernelSpec parse(std::string_view text) {
    const auto c = parse_call(text);
    if (c.name == "envelope") {
      expect_arity(c, 1, 2);
      if (c.args.size() == 2 && !(c.args[1] > 0.0)) throw ParseError("envelope: c must be positive");
      return envelope(c.args[0], c.args.size() == 2 ? c.args[1] : 1.0);
    }
    if (c.name == "cosmod") {
      expect_arity(c, 2, 2);
      return cosine(c.args[0], c.args[1]);
    }
    if (c.name == "altmod") {
      expect_arity(c, 1, 1);
      return alternating(c.args[0]);
    }
    throw ParseError("unknown kernel '" + c.name + "' (expected envelope, cosmod, altmod)");
  }

  bool unmodulated() const noexcept { return std::holds_alternative<NoModulation>(modulation); }

  std::string to_string() const {
    if (const auto* m = std::get_if<CosineModulation>(&modulation))
      return "cosmod(" + format_number(kappa) + "," + format_number(m->omega) + ")";
    if (std::holds_alternative<AlternatingModulation>(modulation)) return "altmod(" + format_number(kappa) + ")";
    if (c_upper == 1.0) return "envelope(" + format_number(kappa) + ")";
    return "envelope(" + format_number(kappa) + "," + format_number(c_upper) + ")";
  }
};

/// (1+|x|+|y|)^{-kappa}
inline double envelope_value(double kappa, double x, double y) {
  return std::pow(1.0 + std::abs(x) + std::abs(y), -kappa);
}

inline double kernel_eval(const KernelSpec& k, double x, double y) {
  const double base = k.c_upper * envelope_value(k.kappa, x, y);
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, NoModulation>) {
          return base;
        } else if constexpr (std::is_same_v<T, CosineModulation>) {
          return base * std::cos(m.omega * x * y);
        } else {
          const double s = std::sin(x + y);
          return s > 0.0 ? base : (s < 0.0 ? -base : 0.0);
        }
      },
      k.modulation);
}

// ---------------------------------------------------------------------------

struct EnvelopePoint {
  double x = 0.0;
  double y = 0.0;
  double ratio = 0.0;
};

struct EnvelopeReport {
  bool upper_ok = true;
  bool lower_ok = true;
  /// Largest |K| / (c_upper envelope) over the samples.
  EnvelopePoint worst_upper;
  /// Smallest |K| / (c_lower envelope) over the samples.
  EnvelopePoint worst_lower;
  std::size_t samples = 0;
};

/// Samples |K| against c_lower/c_upper times the claimed envelope. Sample
/// coordinates are |x| = tan(pi u / 2), u ~ U[0, 0.9999], with random signs,
/// plus every pair from a fixed lattice reaching |x| = 1e6.
template <class Kernel>
  requires std::invocable<Kernel, double, double>
EnvelopeReport envelope_check(Kernel&& kernel, double kappa_claimed, double c_lower, double c_upper,
                              std::size_t sample_count, std::uint64_t seed) {
  if (sample_count < 1) throw DomainError("envelope_check: sample_count must be >= 1");
  if (!(c_lower > 0.0) || !(c_upper > 0.0)) throw DomainError("envelope_check: constants must be positive");

  EnvelopeReport rep;
  rep.worst_upper.ratio = -1.0;
  rep.worst_lower.ratio = std::numeric_limits<double>::infinity();
  auto visit = [&](double x, double y) {
    const double kv = static_cast<double>(kernel(x, y));
    if (!std::isfinite(kv))
      throw NumericalError("envelope_check: non-finite kernel value at (" + format_number(x) + ", " +
                           format_number(y) + ")");
    const double env = envelope_value(kappa_claimed, x, y);
    const double up = std::abs(kv) / (c_upper * env);
    const double lo = std::abs(kv) / (c_lower * env);
    if (up > rep.worst_upper.ratio) rep.worst_upper = {x, y, up};
    if (lo < rep.worst_lower.ratio) rep.worst_lower = {x, y, lo};
    ++rep.samples;
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 0.9999);
  std::bernoulli_distribution coin(0.5);
  auto draw = [&] {
    const double r = std::tan(std::numbers::pi * u01(rng) / 2.0);
    return coin(rng) ? -r : r;
  };
  for (std::size_t i = 0; i < sample_count; ++i) {
    const double x = draw();
    const double y = draw();
    visit(x, y);
  }
  constexpr std::array<double, 9> lattice{-1e6, -1e3, -10.0, -1.0, 0.0, 1.0, 10.0, 1e3, 1e6};
  for (double x : lattice)
    for (double y : lattice) visit(x, y);

  constexpr double slack = 1e-12;
  rep.upper_ok = rep.worst_upper.ratio <= 1.0 + slack;
  rep.lower_ok = rep.worst_lower.ratio >= 1.0 - slack;
  return rep;
}

inline EnvelopeReport envelope_check(const KernelSpec& k, std::size_t sample_count, std::uint64_t seed) {
  return envelope_check([&k](double x, double y) { return kernel_eval(k, x, y); }, k.kappa, k.c_lower,
                        k.c_upper, sample_count, seed);
}

// ---------------------------------------------------------------------------

/// (1+|x|)^{exponent_x} K(x,y) (1+|y|)^{exponent_y}
struct FlattenedKernel {
  KernelSpec base;
  double exponent_x = 0.0;
  double exponent_y = 0.0;

  double operator()(double x, double y) const {
    double v = kernel_eval(base, x, y);
    if (exponent_x != 0.0) v *= std::pow(1.0 + std::abs(x), exponent_x);
    if (exponent_y != 0.0) v *= std::pow(1.0 + std::abs(y), exponent_y);
    return v;
  }
};

/// Moves the source and target weights into the kernel: an operator from
/// `source` to `target` has the same norm as the flattened operator between
/// unweighted L^{p1} and L^{p2}.
inline FlattenedKernel flatten_weights(const KernelSpec& k, const SpaceSpec& source, const SpaceSpec& target) {
  return {k, target.weight_exponent() / target.p(), -source.weight_exponent() / source.p()};
}

inline double majorant_integral(double x, double a) {
  if (!(a > 1.0)) throw DivergenceError("majorant_integral: exponent a = " + format_number(a) + " <= 1 diverges");
  return 2.0 * std::pow(1.0 + std::abs(x), 1.0 - a) / (a - 1.0);
}

/// ∫_{|y| > R} (1+|x|+|y|)^{-a} dy
inline double majorant_tail(double x, double a, double R) {
  if (!(a > 1.0)) throw DivergenceError("majorant_tail: exponent a = " + format_number(a) + " <= 1 diverges");
  if (!(R >= 0.0)) throw DomainError("majorant_tail: R must be nonnegative");
  return 2.0 * std::pow(1.0 + std::abs(x) + R, 1.0 - a) / (a - 1.0);
}

/// Upper bound on the part of the Hölder-majorized inner integral
/// ∫ (1+|x|+|y|)^{-a} dy, a = q1 (w1/p1 + kappa), that lies outside [-R, R].
/// The bound is attained at x = 0.
inline double tail_bound(const KernelSpec& k, const SpaceSpec& source, double R) {
  const double a = holder_majorant_exponent(source, k.kappa);
  if (!(a > 1.0))
    throw DivergenceError("tail_bound: majorant exponent " + format_number(a) +
                          " <= 1, kappa is below the inner threshold");
  return majorant_tail(0.0, a, R);
}

}  // namespace wio
