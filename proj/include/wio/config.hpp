#pragma once

// Run configuration shared by the command-line tool and JSON config files.
// Every default lives here and is echoed into each report.

#include <wio/conditions.hpp>
#include <wio/errors.hpp>
#include <wio/grid.hpp>
#include <wio/parse.hpp>

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

namespace wio {

struct GridSpec {
  double R = 1e4;
  int panels = 40;
  double grading = 1.3;
  int order = 8;

  /// `grid(R,panels,grading,order)`
  static GridSpec parse(std::string_view text) {
    const auto c = parse_call(text);
    if (c.name != "grid") throw ParseError("unknown grid '" + c.name + "' (expected grid(R,panels,grading,order))");
    expect_arity(c, 4, 4);
    GridSpec g{c.args[0], static_cast<int>(c.args[1]), c.args[2], static_cast<int>(c.args[3])};
    if (static_cast<double>(g.panels) != c.args[1] || static_cast<double>(g.order) != c.args[3])
      throw ParseError("grid: panels and order must be integers");
    return g;
  }

  Grid build() const { return build_grid(R, panels, grading, order); }

  std::string to_string() const {
    return "grid(" + format_number(R) + "," + std::to_string(panels) + "," + format_number(grading) + "," +
           std::to_string(order) + ")";
  }
};

struct QueryConfig {
  int thm = 1;
  double s1 = -0.25;
  double s2 = -0.25;
  double p1 = 2.0;
  double p2 = 2.0;
  double kappa = 1.5;

  BoundednessQuery to_query() const {
    BoundednessQuery q{bound_variant_from_int(thm), s1, s2, p1, p2, kappa};
    if (q.variant == BoundVariant::h) q.p1 = q.p2 = 2.0;
    q.validate();
    return q;
  }

  bool operator==(const QueryConfig&) const = default;
};

struct RunConfig {
  std::string subcommand;
  // boundedness query
  int thm = 1;
  double s1 = -0.25;
  double s2 = -0.25;
  double p1 = 2.0;
  double p2 = 2.0;
  double kappa = 1.5;
  // operators and functions
  std::string kernel = "envelope(2)";
  std::string kernel2 = "envelope(2)";
  std::string source = "H(-0.25)";
  std::string target = "H(-0.25)";
  std::string space = "H(-0.25)";
  std::string function = "powerlaw(1)";
  std::string function2 = "gauss(1)";
  std::string grid = "grid(10000,40,1.3,8)";
  std::string grid2 = "grid(10000,40,1.3,8)";
  std::vector<double> x{0.0};
  double a = 2.0;
  double t = 1.0;
  double R = 0.0;  ///< 0 means the whole line where a closed form allows it
  // sweep
  std::vector<QueryConfig> queries;
  std::vector<double> radii{10.0, 40.0, 160.0, 640.0};
  int inner_panels = 10;
  double inner_grading = 1.0;
  int annulus_panels = 6;
  int order = 8;
  std::size_t node_budget = 4000;
  double gamma_tol = 0.05;
  double gamma_grow = 0.1;
  bool timing = false;
  // output
  std::string output;
  std::string format = "auto";
  std::string dump_csv;
  std::uint64_t seed = 0;

  bool operator==(const RunConfig&) const = default;
};

inline void to_json(nlohmann::json& j, const QueryConfig& q) {
  j = {{"thm", q.thm}, {"s1", q.s1}, {"s2", q.s2}, {"p1", q.p1}, {"p2", q.p2}, {"kappa", q.kappa}};
}

namespace detail {

inline void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const char* what) {
  if (!j.is_object()) throw ParseError(std::string(what) + ": expected a JSON object");
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw ParseError(std::string(what) + ": unknown key '" + key + "'");
}

template <class T>
void read(const nlohmann::json& j, const char* key, T& field) {
  if (!j.contains(key)) return;
  try {
    field = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace detail

inline void from_json(const nlohmann::json& j, QueryConfig& q) {
  detail::reject_unknown(j, {"thm", "s1", "s2", "p1", "p2", "kappa"}, "query");
  detail::read(j, "thm", q.thm);
  detail::read(j, "s1", q.s1);
  detail::read(j, "s2", q.s2);
  detail::read(j, "p1", q.p1);
  detail::read(j, "p2", q.p2);
  detail::read(j, "kappa", q.kappa);
}

#define WIO_CONFIG_FIELDS(X)                                                                                     \
  X(subcommand) X(thm) X(s1) X(s2) X(p1) X(p2) X(kappa) X(kernel) X(kernel2) X(source) X(target) X(space)        \
  X(function) X(function2) X(grid) X(grid2) X(x) X(a) X(t) X(R) X(queries) X(radii) X(inner_panels)             \
  X(inner_grading) X(annulus_panels) X(order) X(node_budget) X(gamma_tol) X(gamma_grow) X(timing) X(output)      \
  X(format) X(dump_csv) X(seed)

inline void to_json(nlohmann::json& j, const RunConfig& c) {
  j = nlohmann::json::object();
#define WIO_WRITE(name) j[#name] = c.name;
  WIO_CONFIG_FIELDS(WIO_WRITE)
#undef WIO_WRITE
}

inline void from_json(const nlohmann::json& j, RunConfig& c) {
  static const std::set<std::string> known = {
#define WIO_NAME(name) #name,
      WIO_CONFIG_FIELDS(WIO_NAME)
#undef WIO_NAME
  };
  detail::reject_unknown(j, known, "config");
#define WIO_READ(name) detail::read(j, #name, c.name);
  WIO_CONFIG_FIELDS(WIO_READ)
#undef WIO_READ
}

#undef WIO_CONFIG_FIELDS

inline RunConfig parse_config(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return j.get<RunConfig>();
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("config: cannot open '" + path + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text);
}

inline std::string serialize_config(const RunConfig& c) { return nlohmann::json(c).dump(); }

}  // namespace wio
