#pragma once

// Truncation sweeps: operator-norm estimates on nested grids over an
// increasing radius schedule, log-log growth fits, the Hölder step of the
// boundedness estimate evaluated pointwise, and power-law witness probes.

#include <wio/conditions.hpp>
#include <wio/errors.hpp>
#include <wio/grid.hpp>
#include <wio/kernels.hpp>
#include <wio/operator.hpp>
#include <wio/spaces.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace wio {

struct SweepPlan {
  std::vector<BoundednessQuery> queries;
  /// Modulation and constants; each query supplies its own kappa.
  KernelSpec kernel = KernelSpec::envelope(2.0);
  std::vector<double> radii{10.0, 40.0, 160.0, 640.0};
  NestedGridParams grid;
  std::size_t node_budget = 4000;
  double gamma_tol = 0.05;
  double gamma_grow = 0.1;
  std::uint64_t seed = 0;
  IterationControl iteration;
  /// Record wall-clock time per cell. Off by default so output is reproducible.
  bool timing = false;
  /// Worker threads for independent cells; 0 reads WIO_THREADS (default 1).
  unsigned threads = 0;
};

enum class Verdict { saturating, growing, inconclusive };

inline const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::saturating: return "saturating";
    case Verdict::growing: return "growing";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

struct SweepCell {
  std::size_t query_index = 0;
  double R = 0.0;
  std::size_t nodes = 0;
  double norm = 0.0;
  bool certified = false;
  bool converged = false;
  std::optional<double> elapsed_ms;
  std::string error;  ///< non-empty when the cell failed

  bool usable() const noexcept { return error.empty() && converged && norm > 0.0; }
};

struct QuerySummary {
  BoundednessQuery query;
  ConditionReport condition;
  std::optional<double> gamma;
  Verdict verdict = Verdict::inconclusive;
};

struct SweepResult {
  std::vector<SweepCell> cells;  ///< query-major, radius-minor order
  std::vector<QuerySummary> summaries;
};

/// Least-squares slope of log(value) against log(R).
inline double fit_growth_exponent(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw DomainError("fit_growth_exponent: need at least 2 points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].first > 0.0) || !(points[i].second > 0.0))
      throw DomainError("fit_growth_exponent: R and values must be positive");
    if (i > 0 && !(points[i].first > points[i - 1].first))
      throw DomainError("fit_growth_exponent: R must be strictly increasing");
  }
  const double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [r, v] : points) {
    mx += std::log(r);
    my += std::log(v);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [r, v] : points) {
    const double dx = std::log(r) - mx;
    sxy += dx * (std::log(v) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

inline Verdict classify_growth(double gamma, double gamma_tol, double gamma_grow) noexcept {
  if (std::abs(gamma) < gamma_tol) return Verdict::saturating;
  if (gamma > gamma_grow) return Verdict::growing;
  return Verdict::inconclusive;
}

namespace detail {

inline unsigned worker_count(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("WIO_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return 1;
}

/// Runs body(i) for i in [0, n) on a few threads; each i writes only its own slot.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
}

inline void validate_radii(std::span<const double> radii) {
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || !std::isfinite(radii[i])) throw PlanError("sweep: radii must be positive and finite");
    if (i > 0 && !(radii[i] > radii[i - 1])) throw PlanError("sweep: radii must be strictly increasing");
  }
}

}  // namespace detail

inline SweepResult run_boundedness_sweep(const SweepPlan& plan) {
  SweepResult result;
  if (plan.queries.empty()) return result;
  detail::validate_radii(plan.radii);
  if (plan.radii.empty()) throw PlanError("sweep: empty radius schedule");
  for (const auto& q : plan.queries) q.validate();

  std::vector<std::shared_ptr<const Grid>> grids;
  for (auto& g : build_nested_grids(plan.radii, plan.grid)) grids.push_back(std::make_shared<const Grid>(std::move(g)));
  if (grids.back()->size() > plan.node_budget)
    throw PlanError("sweep: largest grid has " + std::to_string(grids.back()->size()) + " nodes, budget is " +
                    std::to_string(plan.node_budget));

  const std::size_t nr = plan.radii.size();
  result.cells.resize(plan.queries.size() * nr);
  detail::parallel_for(result.cells.size(), detail::worker_count(plan.threads), [&](std::size_t idx) {
    const std::size_t qi = idx / nr, li = idx % nr;
    const auto& query = plan.queries[qi];
    SweepCell& cell = result.cells[idx];
    cell.query_index = qi;
    cell.R = plan.radii[li];
    cell.nodes = grids[li]->size();
    const auto t0 = std::chrono::steady_clock::now();
    try {
      KernelSpec k = plan.kernel;
      k.kappa = query.kappa;
      const auto op = assemble(k, query.source(), query.target(), grids[li], grids[li]);
      const auto est = operator_norm(op, plan.iteration);
      cell.norm = est.value;
      cell.certified = est.certified;
      cell.converged = est.converged;
      if (!est.converged) cell.error = "norm iteration did not converge";
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
    if (plan.timing)
      cell.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  });

  for (std::size_t qi = 0; qi < plan.queries.size(); ++qi) {
    QuerySummary s;
    s.query = plan.queries[qi];
    s.condition = check_boundedness(s.query);
    std::vector<std::pair<double, double>> pts;
    for (std::size_t li = 0; li < nr; ++li) {
      const auto& c = result.cells[qi * nr + li];
      if (c.usable()) pts.emplace_back(c.R, c.norm);
    }
    if (pts.size() >= 2) {
      s.gamma = fit_growth_exponent(pts);
      s.verdict = classify_growth(*s.gamma, plan.gamma_tol, plan.gamma_grow);
    }
    result.summaries.push_back(std::move(s));
  }
  return result;
}

/// Fixed column order of the sweep CSV.
inline constexpr const char* sweep_csv_columns =
    "record,variant,s1,s2,p1,p2,kappa,threshold,margin,R,nodes,norm,certified,converged,elapsed_ms,gamma,verdict";

/// One `cell` row per (query, R) followed by one `summary` row per query.
/// Lines in `header` are written first, each prefixed with "# ".
inline void write_sweep_csv(std::ostream& os, const SweepResult& result, std::span<const std::string> header = {}) {
  for (const auto& h : header) os << "# " << h << '\n';
  os << sweep_csv_columns << '\n';
  auto query_fields = [&](const QuerySummary& s) {
    const auto& q = s.query;
    os << static_cast<int>(q.variant) << ',' << format_number(q.s1) << ',' << format_number(q.s2) << ','
       << format_number(q.p1) << ',' << format_number(q.p2) << ',' << format_number(q.kappa) << ','
       << format_number(s.condition.threshold) << ',' << format_number(s.condition.margin);
  };
  for (const auto& c : result.cells) {
    os << "cell,";
    query_fields(result.summaries[c.query_index]);
    os << ',' << format_number(c.R) << ',' << c.nodes << ',' << (c.error.empty() || c.converged ? format_number(c.norm) : "NA")
       << ',' << (c.certified ? 1 : 0) << ',' << (c.converged ? 1 : 0) << ','
       << (c.elapsed_ms ? format_number(std::round(*c.elapsed_ms * 1000.0) / 1000.0) : "NA") << ",,\n";
  }
  for (const auto& s : result.summaries) {
    os << "summary,";
    query_fields(s);
    os << ",,,,,,," << (s.gamma ? format_number(*s.gamma) : "NA") << ',' << to_string(s.verdict) << '\n';
  }
}

// ---------------------------------------------------------------------------

struct HolderStep {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// Checks the pointwise Hölder estimate
///   ∫ (1+|x|+|y|)^{-kappa} |f(y)| dy <= ||f||_source (∫ (1+|x|+|y|)^{-q1(a1+kappa)} dy)^{1/q1},
/// a1 = w1/p1, with the left side by quadrature on f's grid and the right side
/// from the weighted norm and the closed-form majorant.
inline HolderStep verify_holder_step(const KernelSpec& k, const SampledFunction& f, const BoundednessQuery& query,
                                     double x) {
  if (!k.unmodulated() || k.c_upper != 1.0)
    throw DomainError("verify_holder_step: needs an unmodulated envelope kernel with c_upper = 1");
  if (!(query.s1 < 0.0)) throw DomainError("verify_holder_step: needs s1 < 0");
  const auto source = query.source();
  const double a = holder_majorant_exponent(source, query.kappa);
  const double majorant = majorant_integral(x, a);

  const auto y = f.grid().nodes();
  const auto w = f.grid().weights();
  const auto v = f.values();
  HolderStep out;
  for (std::size_t j = 0; j < y.size(); ++j) out.lhs += w[j] * envelope_value(query.kappa, x, y[j]) * std::abs(v[j]);
  out.rhs = weighted_norm(f, source) * std::pow(majorant, 1.0 / source.q());
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-8);
  return out;
}

struct ProbeCell {
  double R = 0.0;
  std::size_t nodes = 0;
  double ratio = 0.0;
  std::string error;
};

/// Empirical ratios ||K f_t||_target / ||f_t||_source for the witness
/// f_t(y) = (1+|y|)^{-t} on nested grids truncated at each radius.
inline std::vector<ProbeCell> sharpness_probe(const BoundednessQuery& query, const KernelSpec& kernel, double t,
                                              std::span<const double> radii, const NestedGridParams& grid_params = {}) {
  query.validate();
  detail::validate_radii(radii);
  KernelSpec k = kernel;
  k.kappa = query.kappa;
  const auto source = query.source();
  const auto target = query.target();
  std::vector<ProbeCell> out;
  for (auto& g : build_nested_grids(radii, grid_params)) {
    auto grid = std::make_shared<const Grid>(std::move(g));
    ProbeCell c;
    c.R = grid->R();
    c.nodes = grid->size();
    try {
      const auto f = SampledFunction::sample(grid, PowerLaw{t});
      c.ratio = empirical_ratio(k, f, source, target, grid);
      if (!std::isfinite(c.ratio)) c.error = "non-finite ratio";
    } catch (const std::exception& e) {
      c.error = e.what();
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace wio
