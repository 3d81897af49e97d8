#pragma once

// Command-line front end. run_cli() is the whole program; tools/wio.cpp only
// forwards argv to it.
//
// Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 the requested
// condition does not apply (s1 >= 0).

#include <wio/conditions.hpp>
#include <wio/config.hpp>
#include <wio/corner.hpp>
#include <wio/errors.hpp>
#include <wio/grid.hpp>
#include <wio/kernels.hpp>
#include <wio/operator.hpp>
#include <wio/spaces.hpp>
#include <wio/sweep.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace wio {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_numerical = 2, exit_inapplicable = 3 };

namespace cli_detail {

using nlohmann::json;

inline constexpr const char* exit_code_footer =
    "Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 condition not applicable (s1 >= 0).\n"
    "Flags override values read from --config FILE (JSON). WIO_THREADS sets sweep worker threads.";

inline json report_header(const RunConfig& cfg) {
  return {{"tool", "wio"}, {"subcommand", cfg.subcommand}, {"config", cfg}};
}

inline json to_json(const ConditionReport& r) {
  return {{"variant", static_cast<int>(r.query.variant)},
          {"s1", r.query.s1},
          {"s2", r.query.s2},
          {"p1", r.query.p1},
          {"p2", r.query.p2},
          {"kappa", r.query.kappa},
          {"inner_threshold", r.inner_threshold},
          {"outer_threshold", r.outer_threshold},
          {"threshold", r.threshold},
          {"margin", r.margin},
          {"applicable", r.applicable},
          {"satisfied", r.satisfied},
          {"binding", to_string(r.binding)},
          {"note", r.note}};
}

inline std::optional<KernelSpec> parse_optional_kernel(const std::string& text) {
  if (text == "zero") return std::nullopt;
  return KernelSpec::parse(text);
}

class Emitter {
public:
  Emitter(const RunConfig& cfg, std::ostream& out) : cfg_(cfg), out_(out) {}

  void write(const std::string& text) const {
    if (cfg_.output.empty()) {
      out_ << text;
      return;
    }
    std::ofstream f(cfg_.output, std::ios::binary);
    if (!f) throw DomainError("cannot open output file '" + cfg_.output + "'");
    f << text;
  }

  void write_json(const json& j) const { write(j.dump(2) + "\n"); }

private:
  const RunConfig& cfg_;
  std::ostream& out_;
};

inline int cmd_check(const RunConfig& cfg, const Emitter& emit) {
  const QueryConfig qc{cfg.thm, cfg.s1, cfg.s2, cfg.p1, cfg.p2, cfg.kappa};
  const auto report = check_boundedness(qc.to_query());
  auto j = report_header(cfg);
  j["result"] = to_json(report);
  emit.write_json(j);
  return report.applicable ? exit_ok : exit_inapplicable;
}

inline int cmd_norm(const RunConfig& cfg, const Emitter& emit) {
  const auto grid = std::make_shared<const Grid>(GridSpec::parse(cfg.grid).build());
  const auto space = SpaceSpec::parse(cfg.space);
  const auto fs = FunctionSpec::parse(cfg.function);
  const auto f = SampledFunction::sample(grid, fs);
  auto j = report_header(cfg);
  j["result"] = {{"function", fs.to_string()}, {"space", space.to_string()}, {"nodes", grid->size()},
                 {"value", weighted_norm(f, space)}};
  emit.write_json(j);
  return exit_ok;
}

inline int cmd_apply(const RunConfig& cfg, const Emitter& emit) {
  const auto grid = std::make_shared<const Grid>(GridSpec::parse(cfg.grid).build());
  const auto k = KernelSpec::parse(cfg.kernel);
  const auto f = SampledFunction::sample(grid, FunctionSpec::parse(cfg.function));
  json values = json::array();
  for (double x : cfg.x) values.push_back({{"x", x}, {"value", apply_operator(k, f, x)}});
  auto j = report_header(cfg);
  j["result"] = {{"kernel", k.to_string()}, {"nodes", grid->size()}, {"values", values}};
  emit.write_json(j);
  return exit_ok;
}

inline int cmd_opnorm(const RunConfig& cfg, const Emitter& emit) {
  const auto grid = std::make_shared<const Grid>(GridSpec::parse(cfg.grid).build());
  const auto k = KernelSpec::parse(cfg.kernel);
  const auto op = assemble(k, SpaceSpec::parse(cfg.source), SpaceSpec::parse(cfg.target), grid, grid);
  const auto est = operator_norm(op);
  auto j = report_header(cfg);
  j["result"] = {{"kernel", k.to_string()},         {"source", op.source_space().to_string()},
                 {"target", op.target_space().to_string()}, {"nodes", grid->size()},
                 {"value", est.value},              {"certified", est.certified},
                 {"converged", est.converged},      {"iterations", est.iterations},
                 {"method", to_string(est.method)}};
  emit.write_json(j);
  return est.converged ? exit_ok : exit_numerical;
}

inline SweepPlan make_plan(const RunConfig& cfg, bool single_query_from_flags) {
  SweepPlan plan;
  if (single_query_from_flags || cfg.queries.empty()) {
    plan.queries.push_back(QueryConfig{cfg.thm, cfg.s1, cfg.s2, cfg.p1, cfg.p2, cfg.kappa}.to_query());
  } else {
    for (const auto& q : cfg.queries) plan.queries.push_back(q.to_query());
  }
  plan.kernel = KernelSpec::parse(cfg.kernel);
  plan.radii = cfg.radii;
  plan.grid = {cfg.inner_panels, cfg.inner_grading, cfg.annulus_panels, cfg.order};
  plan.node_budget = cfg.node_budget;
  plan.gamma_tol = cfg.gamma_tol;
  plan.gamma_grow = cfg.gamma_grow;
  plan.seed = cfg.seed;
  plan.timing = cfg.timing;
  return plan;
}

inline int cmd_sweep(const RunConfig& cfg, const Emitter& emit, bool single_query_from_flags) {
  const auto plan = make_plan(cfg, single_query_from_flags);
  const auto result = run_boundedness_sweep(plan);
  if (cfg.format == "json") {
    auto j = report_header(cfg);
    json cells = json::array(), summaries = json::array();
    for (const auto& c : result.cells)
      cells.push_back({{"query", c.query_index}, {"R", c.R}, {"nodes", c.nodes}, {"norm", c.norm},
                       {"certified", c.certified}, {"converged", c.converged},
                       {"elapsed_ms", c.elapsed_ms ? json(*c.elapsed_ms) : json(nullptr)}, {"error", c.error}});
    for (const auto& s : result.summaries)
      summaries.push_back({{"condition", to_json(s.condition)},
                           {"gamma", s.gamma ? json(*s.gamma) : json(nullptr)},
                           {"verdict", to_string(s.verdict)}});
    j["result"] = {{"cells", cells}, {"summaries", summaries}};
    emit.write_json(j);
  } else {
    std::ostringstream os;
    RunConfig recorded = cfg;
    recorded.output.clear();  // where the bytes go is not part of what produced them
    const std::vector<std::string> header{"wio sweep", "config: " + serialize_config(recorded)};
    write_sweep_csv(os, result, header);
    emit.write(os.str());
  }
  for (const auto& c : result.cells)
    if (!c.error.empty()) return exit_numerical;
  return exit_ok;
}

inline int cmd_corner(const RunConfig& cfg, const Emitter& emit) {
  const auto grid1 = std::make_shared<const Grid>(GridSpec::parse(cfg.grid).build());
  const auto grid2 = std::make_shared<const Grid>(GridSpec::parse(cfg.grid2).build());
  const auto fspec = FunctionSpec::parse(cfg.function);
  const auto gspec = FunctionSpec::parse(cfg.function2);
  const CornerSystem sys{parse_optional_kernel(cfg.kernel), parse_optional_kernel(cfg.kernel2),
                         SampledFunction::sample(grid2, fspec), SampledFunction::sample(grid1, gspec),
                         SpaceSpec::parse(cfg.space)};
  const auto sol = solve_corner(sys);
  auto j = report_header(cfg);
  j["result"] = {{"grid1", cfg.grid},
                 {"grid2", cfg.grid2},
                 {"nodes1", grid1->size()},
                 {"nodes2", grid2->size()},
                 {"k1", sys.k1 ? sys.k1->to_string() : "zero"},
                 {"k2", sys.k2 ? sys.k2->to_string() : "zero"},
                 {"F", fspec.to_string()},
                 {"G", gspec.to_string()},
                 {"space", sys.space.to_string()},
                 {"residual_1", sol.residual_1},
                 {"residual_2", sol.residual_2},
                 {"condition_estimate", sol.condition_estimate},
                 {"norm_C", sol.norm_c},
                 {"norm_D", sol.norm_d}};
  emit.write_json(j);
  if (!cfg.dump_csv.empty()) {
    std::ofstream f(cfg.dump_csv, std::ios::binary);
    if (!f) throw DomainError("cannot open '" + cfg.dump_csv + "'");
    f << "unknown,node,x,value\n";
    auto dump = [&f](const char* name, const SampledFunction& fn) {
      const auto x = fn.grid().nodes();
      for (std::size_t i = 0; i < fn.size(); ++i)
        f << name << ',' << i << ',' << format_number(x[i]) << ',' << format_number(fn.values()[i]) << '\n';
    };
    dump("C", sol.c);
    dump("D", sol.d);
  }
  return exit_ok;
}

inline int cmd_oracle_majorant(const RunConfig& cfg, const Emitter& emit) {
  if (cfg.x.size() != 1) throw DomainError("oracle majorant: exactly one --x value expected");
  auto j = report_header(cfg);
  j["result"] = {{"x", cfg.x[0]}, {"a", cfg.a}, {"value", majorant_integral(cfg.x[0], cfg.a)}};
  emit.write_json(j);
  return exit_ok;
}

inline int cmd_oracle_powerlaw(const RunConfig& cfg, const Emitter& emit) {
  const auto space = SpaceSpec::parse(cfg.space);
  auto j = report_header(cfg);
  j["result"] = {{"t", cfg.t}, {"space", space.to_string()}, {"R", cfg.R},
                 {"value", powerlaw_norm_closed_form(cfg.t, space, cfg.R)}};
  emit.write_json(j);
  return exit_ok;
}

inline std::string find_config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return {};
}

}  // namespace cli_detail

/// Runs the tool on `args` (without the program name).
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  using namespace cli_detail;
  auto fail = [&err](const char* kind, const std::string& msg, int code) {
    std::string line = msg;
    for (auto& ch : line)
      if (ch == '\n') ch = ' ';
    err << "error: " << kind << ": " << line << '\n';
    return code;
  };

  RunConfig cfg;
  try {
    if (const auto path = find_config_path(args); !path.empty()) cfg = load_config(path);
  } catch (const std::exception& e) {
    return fail("usage", e.what(), exit_usage);
  }

  CLI::App app{"Weighted-space integral operators with power-envelope kernels", "wio"};
  app.require_subcommand(1);
  app.footer(exit_code_footer);

  std::string config_path;
  auto common = [&](CLI::App* sub) {
    sub->footer(exit_code_footer);
    sub->add_option("--config", config_path, "JSON config file (flags override it)");
    sub->add_option("--output,-o", cfg.output, "Write the report here instead of standard output");
    sub->add_option("--seed", cfg.seed, "Seed recorded in the report")->capture_default_str();
  };
  auto query_flags = [&](CLI::App* sub) {
    sub->add_option("--thm", cfg.thm, "Space family: 1 = H(s), 2 = Hsp(s,p), 3 = Hps(p,s)")
        ->check(CLI::Range(1, 3))
        ->capture_default_str();
    sub->add_option("--s1", cfg.s1, "Source exponent s1")->capture_default_str();
    sub->add_option("--s2", cfg.s2, "Target exponent s2")->capture_default_str();
    sub->add_option("--p1", cfg.p1, "Source integrability p1 (ignored for --thm 1)")->capture_default_str();
    sub->add_option("--p2", cfg.p2, "Target integrability p2 (ignored for --thm 1)")->capture_default_str();
    sub->add_option("--kappa", cfg.kappa, "Kernel decay exponent")->capture_default_str();
  };
  auto grid_flag = [&](CLI::App* sub) {
    sub->add_option("--grid", cfg.grid, "Quadrature grid grid(R,panels,grading,order)")->capture_default_str();
  };

  auto* check = app.add_subcommand("check", "Evaluate the sufficient boundedness condition for kappa");
  common(check);
  query_flags(check);

  auto* norm = app.add_subcommand("norm", "Weighted norm of a sampled function");
  common(norm);
  grid_flag(norm);
  norm->add_option("--function", cfg.function, "powerlaw(t) | indicator(a,b) | gauss(sigma) | bump(c,w)")
      ->capture_default_str();
  norm->add_option("--space", cfg.space, "H(s) | Hsp(s,p) | Hps(p,s)")->capture_default_str();

  auto* apply = app.add_subcommand("apply", "Quadrature value of (Kf)(x)");
  common(apply);
  grid_flag(apply);
  apply->add_option("--kernel", cfg.kernel, "envelope(kappa[,c]) | cosmod(kappa,omega) | altmod(kappa)")
      ->capture_default_str();
  apply->add_option("--function", cfg.function, "Function f")->capture_default_str();
  apply->add_option("--x", cfg.x, "Evaluation points")->capture_default_str();

  auto* opnorm = app.add_subcommand("opnorm", "Discretized operator norm between two weighted spaces");
  common(opnorm);
  grid_flag(opnorm);
  opnorm->add_option("--kernel", cfg.kernel, "Kernel")->capture_default_str();
  opnorm->add_option("--source", cfg.source, "Source space")->capture_default_str();
  opnorm->add_option("--target", cfg.target, "Target space")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Operator norms over a truncation-radius schedule (CSV)");
  common(sweep);
  query_flags(sweep);
  sweep->add_option("--kernel", cfg.kernel, "Kernel modulation and constants; kappa comes from the query")
      ->capture_default_str();
  sweep->add_option("--radii", cfg.radii, "Increasing truncation radii")->delimiter(',')->capture_default_str();
  sweep->add_option("--inner-panels", cfg.inner_panels, "Panels on [0, R_0]")->capture_default_str();
  sweep->add_option("--inner-grading", cfg.inner_grading, "Panel grading on [0, R_0]")->capture_default_str();
  sweep->add_option("--annulus-panels", cfg.annulus_panels, "Panels per radius step")->capture_default_str();
  sweep->add_option("--order", cfg.order, "Gauss-Legendre points per panel")->capture_default_str();
  sweep->add_option("--node-budget", cfg.node_budget, "Maximum nodes of the largest grid")->capture_default_str();
  sweep->add_option("--gamma-tol", cfg.gamma_tol, "|gamma| below this is saturating")->capture_default_str();
  sweep->add_option("--gamma-grow", cfg.gamma_grow, "gamma above this is growing")->capture_default_str();
  sweep->add_flag("--timing", cfg.timing, "Record elapsed milliseconds per cell (output no longer reproducible)");
  sweep->add_option("--format", cfg.format, "csv (default) or json")
      ->check(CLI::IsMember({"auto", "csv", "json"}))
      ->capture_default_str();

  auto* corner = app.add_subcommand("corner", "Solve the coupled two-unknown integral system");
  common(corner);
  corner->add_option("--k1", cfg.kernel, "Kernel of the first equation, or zero")->capture_default_str();
  corner->add_option("--k2", cfg.kernel2, "Kernel of the second equation, or zero")->capture_default_str();
  corner->add_option("--f", cfg.function, "Right-hand side F(xi2)")->capture_default_str();
  corner->add_option("--g", cfg.function2, "Right-hand side G(xi1)")->capture_default_str();
  corner->add_option("--grid1", cfg.grid, "Grid for xi1")->capture_default_str();
  corner->add_option("--grid2", cfg.grid2, "Grid for xi2")->capture_default_str();
  corner->add_option("--space", cfg.space, "Space for residuals and solution norms")->capture_default_str();
  corner->add_option("--dump-csv", cfg.dump_csv, "Write C and D samples to this CSV file");

  auto* oracle = app.add_subcommand("oracle", "Closed-form reference values");
  oracle->footer(exit_code_footer);
  oracle->require_subcommand(1);
  auto* majorant = oracle->add_subcommand("majorant", "Integral of (1+|x|+|y|)^(-a) over the real line");
  common(majorant);
  majorant->add_option("--x", cfg.x, "Point x")->capture_default_str();
  majorant->add_option("--a", cfg.a, "Exponent a > 1")->capture_default_str();
  auto* plnorm = oracle->add_subcommand("powerlaw-norm", "Norm of (1+|x|)^(-t) in a weighted space");
  common(plnorm);
  plnorm->add_option("--t", cfg.t, "Decay exponent t")->capture_default_str();
  plnorm->add_option("--space", cfg.space, "Space")->capture_default_str();
  plnorm->add_option("--R", cfg.R, "Truncation radius (0 = whole line)")->capture_default_str();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return exit_ok;
    }
    return fail("usage", e.what(), exit_usage);
  }

  try {
    const Emitter emit(cfg, out);
    if (*check) return (cfg.subcommand = "check", cmd_check(cfg, emit));
    if (*norm) return (cfg.subcommand = "norm", cmd_norm(cfg, emit));
    if (*apply) return (cfg.subcommand = "apply", cmd_apply(cfg, emit));
    if (*opnorm) return (cfg.subcommand = "opnorm", cmd_opnorm(cfg, emit));
    if (*sweep) {
      cfg.subcommand = "sweep";
      if (cfg.format == "auto") cfg.format = "csv";
      return cmd_sweep(cfg, emit, sweep->count("--thm") > 0);
    }
    if (*corner) return (cfg.subcommand = "corner", cmd_corner(cfg, emit));
    if (*majorant) return (cfg.subcommand = "oracle majorant", cmd_oracle_majorant(cfg, emit));
    if (*plnorm) return (cfg.subcommand = "oracle powerlaw-norm", cmd_oracle_powerlaw(cfg, emit));
  } catch (const DomainError& e) {
    return fail("usage", e.what(), exit_usage);
  } catch (const StructuralError& e) {
    return fail("usage", e.what(), exit_usage);
  } catch (const NumericalError& e) {
    return fail("numerical", e.what(), exit_numerical);
  }
  return fail("usage", "no subcommand", exit_usage);
}

}  // namespace wio
