#pragma once

// Sufficient conditions on the kernel decay exponent kappa for
// K : X(s1, p1) -> X(s2, p2) to be bounded, where X is one of the three
// weighted-space families and |K(x,y)| <= c (1+|x|+|y|)^{-kappa}.
//
// Each condition is kappa > max(inner, outer): `inner` makes the y-integral
// after Hölder's inequality converge, `outer` makes the remaining x-integral
// converge. All of them require s1 < 0.

#include <wio/errors.hpp>
#include <wio/spaces.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace wio {

/// Which weighted-space family both source and target belong to. The numeric
/// values are the `--thm` selectors of the command-line tool.
enum class BoundVariant : int { h = 1, hsp = 2, hps = 3 };

inline BoundVariant bound_variant_from_int(int v) {
  if (v < 1 || v > 3) throw DomainError("variant selector must be 1, 2 or 3");
  return static_cast<BoundVariant>(v);
}

struct Thresholds {
  double inner;
  double outer;

  double max() const noexcept { return std::max(inner, outer); }
};

/// H(s1) -> H(s2).
inline Thresholds threshold_h(double s1, double s2) noexcept {
  return {0.5 - s1, 1.0 + s2 - s1};
}

/// Hsp(s1,p1) -> Hsp(s2,p2).
inline Thresholds threshold_hsp(double s1, double s2, double p1, double p2) {
  const double q1 = conjugate_exponent(p1);
  if (!std::isfinite(p2) || !(p2 > 1.0)) throw DomainError("threshold: p2 must lie in (1, inf)");
  return {1.0 / q1 - s1, 1.0 / p2 + 1.0 / q1 + s2 - s1};
}

/// Hps(p1,s1) -> Hps(p2,s2). The inner term comes from the source Hölder
/// factor (1+|y|)^{-2 s1/p1}, so it carries p1.
inline Thresholds threshold_hps(double s1, double s2, double p1, double p2) {
  const double q1 = conjugate_exponent(p1);
  if (!std::isfinite(p2) || !(p2 > 1.0)) throw DomainError("threshold: p2 must lie in (1, inf)");
  return {1.0 / q1 - 2.0 * s1 / p1, 1.0 / p2 + 1.0 / q1 + 2.0 * s2 / p2 - 2.0 * s1 / p1};
}

struct BoundednessQuery {
  BoundVariant variant = BoundVariant::h;
  double s1 = -0.25;
  double s2 = -0.25;
  double p1 = 2.0;
  double p2 = 2.0;
  double kappa = 1.5;

  static BoundednessQuery h(double s1, double s2, double kappa) {
    return {BoundVariant::h, s1, s2, 2.0, 2.0, kappa};
  }
  static BoundednessQuery hsp(double s1, double s2, double p1, double p2, double kappa) {
    BoundednessQuery q{BoundVariant::hsp, s1, s2, p1, p2, kappa};
    q.validate();
    return q;
  }
  static BoundednessQuery hps(double s1, double s2, double p1, double p2, double kappa) {
    BoundednessQuery q{BoundVariant::hps, s1, s2, p1, p2, kappa};
    q.validate();
    return q;
  }

  void validate() const {
    if (!std::isfinite(s1) || !std::isfinite(s2) || !std::isfinite(kappa))
      throw DomainError("query: s1, s2, kappa must be finite");
    if (!(p1 > 1.0) || !(p2 > 1.0) || !std::isfinite(p1) || !std::isfinite(p2))
      throw DomainError("query: p1, p2 must lie in (1, inf)");
    if (variant == BoundVariant::h && (p1 != 2.0 || p2 != 2.0))
      throw DomainError("query: the H(s) variant fixes p1 = p2 = 2");
  }

  SpaceSpec source() const {
    switch (variant) {
      case BoundVariant::h: return SpaceSpec::h(s1);
      case BoundVariant::hsp: return SpaceSpec::hsp(s1, p1);
      case BoundVariant::hps: return SpaceSpec::hps(p1, s1);
    }
    throw DomainError("query: bad variant");
  }

  SpaceSpec target() const {
    switch (variant) {
      case BoundVariant::h: return SpaceSpec::h(s2);
      case BoundVariant::hsp: return SpaceSpec::hsp(s2, p2);
      case BoundVariant::hps: return SpaceSpec::hps(p2, s2);
    }
    throw DomainError("query: bad variant");
  }

  Thresholds thresholds() const {
    switch (variant) {
      case BoundVariant::h: return threshold_h(s1, s2);
      case BoundVariant::hsp: return threshold_hsp(s1, s2, p1, p2);
      case BoundVariant::hps: return threshold_hps(s1, s2, p1, p2);
    }
    throw DomainError("query: bad variant");
  }

  bool operator==(const BoundednessQuery&) const = default;
};

enum class Binding { inner, outer };

inline const char* to_string(Binding b) noexcept { return b == Binding::inner ? "inner" : "outer"; }

struct ConditionReport {
  BoundednessQuery query;
  double inner_threshold = 0.0;
  double outer_threshold = 0.0;
  double threshold = 0.0;
  double margin = 0.0;
  bool applicable = false;
  bool satisfied = false;
  Binding binding = Binding::inner;
  std::string note;
};

inline ConditionReport check_boundedness(const BoundednessQuery& query) {
  query.validate();
  const auto t = query.thresholds();
  ConditionReport r;
  r.query = query;
  r.inner_threshold = t.inner;
  r.outer_threshold = t.outer;
  r.threshold = t.max();
  r.margin = query.kappa - r.threshold;
  r.applicable = query.s1 < 0.0;
  r.satisfied = r.applicable && r.margin > 0.0;
  r.binding = t.inner >= t.outer ? Binding::inner : Binding::outer;
  if (query.variant == BoundVariant::hps)
    r.note = "inner threshold is 1/q1 - 2*s1/p1, from the source Hoelder factor (1+|y|)^(-2*s1/p1)";
  return r;
}

/// Exponent a = q1 (w1/p1 + kappa) of the majorant (1+|x|+|y|)^{-a} left after
/// Hölder's inequality splits off the source weight. a > 1 iff kappa exceeds
/// the inner threshold.
inline double holder_majorant_exponent(const SpaceSpec& source, double kappa) {
  return source.q() * (source.weight_exponent() / source.p() + kappa);
}

}  // namespace wio
