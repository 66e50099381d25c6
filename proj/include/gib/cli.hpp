#pragma once

// Command-line front end: JSON run configurations, the five commands and
// their CSV/JSON tables. All information values are in nats.

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "gib/detail/parallel.hpp"
#include "gib/detail/random.hpp"
#include "gib/encoder.hpp"
#include "gib/errors.hpp"
#include "gib/frontier.hpp"
#include "gib/gaussian_model.hpp"
#include "gib/ib_solver.hpp"
#include "gib/measure.hpp"
#include "gib/oracle.hpp"

namespace gib::cli {

using json = nlohmann::json;

enum class Format { csv, json };

struct BetaGrid {
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 1;
  bool log_scale = false;

  static BetaGrid scalar(double beta) { return {beta, beta, 1, false}; }
  bool is_scalar() const { return count == 1; }

  std::vector<double> values() const {
    if (is_scalar()) return {start};
    return log_scale ? log_space(start, stop, count) : lin_space(start, stop, count);
  }
};

struct VerifyGrid {
  std::vector<std::vector<double>> lambda_sets{{0.5}, {0.3, 0.7}, {0.1, 0.5, 0.8}, {0.05, 0.45, 0.95}};
  std::vector<double> beta_factors{1.5, 3.0, 10.0, 100.0};
  std::size_t restarts = 8;
  bool full_matrix = true;
  std::vector<double> full_matrix_factors{3.0, 10.0};
  double tolerance = 1e-5;
};

struct RunConfig {
  // Exactly one of these is set.
  std::optional<Spectrum> spectrum;
  std::optional<JointGaussian> joint;

  std::vector<Measure> measures;
  std::optional<BetaGrid> beta;
  Format format = Format::csv;
  std::optional<std::string> path;
  std::uint64_t seed = 42;
  bool bounds = false;
  std::size_t threads = 1;
  double perturbation = 0.0;
  VerifyGrid verify;

  bool has_model() const { return spectrum.has_value() || joint.has_value(); }

  Spectrum model_spectrum() const {
    require(has_model(), ErrorKind::ConfigError, "config has no model");
    return spectrum ? *spectrum : gib::spectrum(*joint);
  }
};

/// Command-line overrides; each replaces the matching config field.
struct Overrides {
  std::optional<std::string> beta;
  std::optional<std::string> measure;
  std::optional<double> q;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  std::optional<double> perturbation;
};

// ---------------------------------------------------------------------------
// Config parsing

namespace detail {

[[noreturn]] inline void config_error(const std::string& msg) { fail(ErrorKind::ConfigError, msg); }

inline double number(const json& v, const std::string& what) {
  if (!v.is_number()) config_error(what + " must be a number");
  return v.get<double>();
}

inline std::vector<double> number_list(const json& v, const std::string& what) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) config_error(what + " must be a list of numbers");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(number(e, what));
  return out;
}

inline Eigen::MatrixXd matrix(const json& v, const std::string& what) {
  if (v.is_number()) return Eigen::MatrixXd::Constant(1, 1, v.get<double>());
  if (!v.is_array() || v.empty()) config_error(what + " must be a non-empty list of rows");
  const auto rows = static_cast<Eigen::Index>(v.size());
  Eigen::Index cols = -1;
  Eigen::MatrixXd m;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const std::vector<double> row = number_list(v[static_cast<std::size_t>(i)], what);
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      m.resize(rows, cols);
    }
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      fail(ErrorKind::DimensionMismatch, what + " has rows of different lengths");
    }
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = row[static_cast<std::size_t>(k)];
  }
  return m;
}

inline Eigen::VectorXd vector(const json& v, const std::string& what) {
  const std::vector<double> xs = number_list(v, what);
  return Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

inline void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) config_error("unknown key '" + key + "' in " + where);
  }
}

/// "shannon", "jeffreys", "renyi:<q>", or "renyi" with q taken from `default_q`.
inline Measure parse_measure_name(const std::string& text, std::optional<double> default_q = std::nullopt) {
  if (text == "shannon") return Measure::shannon();
  if (text == "jeffreys") return Measure::jeffreys();
  if (text == "renyi") {
    if (!default_q) config_error("measure 'renyi' needs an order q");
    return Measure::renyi(*default_q);
  }
  if (text.rfind("renyi:", 0) == 0) {
    const std::string tail = text.substr(6);
    std::size_t used = 0;
    double q = 0.0;
    try {
      q = std::stod(tail, &used);
    } catch (const std::exception&) {
      config_error("cannot read Renyi order from '" + text + "'");
    }
    if (used != tail.size()) config_error("cannot read Renyi order from '" + text + "'");
    return Measure::renyi(q);
  }
  config_error("unknown measure '" + text + "'");
}

inline Measure parse_measure(const json& v) {
  if (v.is_string()) return parse_measure_name(v.get<std::string>());
  if (v.is_object()) {
    reject_unknown(v, {"name", "q"}, "measure");
    if (!v.contains("name") || !v["name"].is_string()) config_error("measure object needs a 'name'");
    std::optional<double> q;
    if (v.contains("q")) q = number(v["q"], "measure q");
    return parse_measure_name(v["name"].get<std::string>(), q);
  }
  config_error("measure must be a string, an object or a list of those");
}

inline std::vector<Measure> parse_measures(const json& v) {
  std::vector<Measure> out;
  if (v.is_array()) {
    for (const auto& e : v) out.push_back(parse_measure(e));
  } else {
    out.push_back(parse_measure(v));
  }
  if (out.empty()) config_error("measure list is empty");
  return out;
}

inline std::vector<Measure> parse_measure_list(const std::string& text, std::optional<double> default_q) {
  std::vector<Measure> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_measure_name(item, default_q));
  if (out.empty()) config_error("measure list is empty");
  return out;
}

inline BetaGrid checked_grid(BetaGrid g) {
  if (g.is_scalar()) {
    require(std::isfinite(g.start) && g.start > 0.0, ErrorKind::OutOfRange, "beta must be positive and finite");
    return g;
  }
  if (g.count < 2) config_error("a beta sweep needs count >= 2");
  if (!(g.start < g.stop)) config_error("a beta sweep needs start < stop");
  require(std::isfinite(g.stop) && g.start > 0.0, ErrorKind::OutOfRange, "beta must be positive and finite");
  return g;
}

inline BetaGrid parse_beta(const json& v) {
  if (v.is_number()) return checked_grid(BetaGrid::scalar(v.get<double>()));
  if (!v.is_object()) config_error("beta must be a number or a {start, stop, count, scale} object");
  reject_unknown(v, {"start", "stop", "count", "scale"}, "beta");
  for (const char* k : {"start", "stop", "count"}) {
    if (!v.contains(k)) config_error(std::string("beta sweep needs '") + k + "'");
  }
  BetaGrid g;
  g.start = number(v["start"], "beta start");
  g.stop = number(v["stop"], "beta stop");
  if (!v["count"].is_number_integer() || v["count"].get<long long>() < 0) {
    config_error("beta count must be a nonnegative integer");
  }
  g.count = v["count"].get<std::size_t>();
  const std::string scale = v.value("scale", std::string("linear"));
  if (scale == "log") g.log_scale = true;
  else if (scale != "linear") config_error("beta scale must be 'linear' or 'log'");
  if (g.count < 2) config_error("a beta sweep needs count >= 2");
  return checked_grid(g);
}

/// "4", or "start:stop:count[:linear|log]".
inline BetaGrid parse_beta_text(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  auto num = [&](const std::string& s) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(s, &used);
    } catch (const std::exception&) {
      config_error("cannot read beta from '" + text + "'");
    }
    if (used != s.size()) config_error("cannot read beta from '" + text + "'");
    return x;
  };
  if (parts.size() == 1) return checked_grid(BetaGrid::scalar(num(parts[0])));
  if (parts.size() != 3 && parts.size() != 4) config_error("beta override must be B or start:stop:count[:scale]");
  BetaGrid g;
  g.start = num(parts[0]);
  g.stop = num(parts[1]);
  const double count = num(parts[2]);
  if (count < 0 || count != std::floor(count)) config_error("beta count must be a nonnegative integer");
  g.count = static_cast<std::size_t>(count);
  if (parts.size() == 4) {
    if (parts[3] == "log") g.log_scale = true;
    else if (parts[3] != "linear") config_error("beta scale must be 'linear' or 'log'");
  }
  if (g.count < 2) config_error("a beta sweep needs count >= 2");
  return checked_grid(g);
}

inline void parse_model(const json& v, RunConfig& cfg) {
  if (!v.is_object()) config_error("model must be an object");
  const bool eig = v.contains("eigenvalues");
  const bool cov = v.contains("sigma_x") || v.contains("sigma_y") || v.contains("sigma_xy");
  if (eig == cov) config_error("model needs exactly one of 'eigenvalues' or the covariance blocks");
  if (eig) {
    reject_unknown(v, {"eigenvalues", "r"}, "model");
    const std::vector<double> lambdas = number_list(v["eigenvalues"], "eigenvalues");
    std::vector<double> r;
    if (v.contains("r")) r = number_list(v["r"], "r");
    cfg.spectrum = spectrum_from_eigenvalues(lambdas, r);
    return;
  }
  reject_unknown(v, {"sigma_x", "sigma_y", "sigma_xy", "mean_x", "mean_y"}, "model");
  for (const char* k : {"sigma_x", "sigma_y", "sigma_xy"}) {
    if (!v.contains(k)) config_error(std::string("covariance model needs '") + k + "'");
  }
  Eigen::MatrixXd sx = matrix(v["sigma_x"], "sigma_x");
  Eigen::MatrixXd sy = matrix(v["sigma_y"], "sigma_y");
  Eigen::MatrixXd sxy = matrix(v["sigma_xy"], "sigma_xy");
  Eigen::VectorXd mx = v.contains("mean_x") ? vector(v["mean_x"], "mean_x") : Eigen::VectorXd::Zero(sx.rows());
  Eigen::VectorXd my = v.contains("mean_y") ? vector(v["mean_y"], "mean_y") : Eigen::VectorXd::Zero(sy.rows());
  cfg.joint.emplace(std::move(mx), std::move(my), std::move(sx), std::move(sy), std::move(sxy));
}

inline void parse_verify(const json& v, VerifyGrid& g) {
  if (!v.is_object()) config_error("verify must be an object");
  reject_unknown(v, {"lambda_sets", "beta_factors", "restarts", "full_matrix", "full_matrix_factors", "tolerance"},
                 "verify");
  if (v.contains("lambda_sets")) {
    if (!v["lambda_sets"].is_array() || v["lambda_sets"].empty()) config_error("lambda_sets must be a list");
    g.lambda_sets.clear();
    for (const auto& s : v["lambda_sets"]) g.lambda_sets.push_back(number_list(s, "lambda_sets"));
  }
  if (v.contains("beta_factors")) g.beta_factors = number_list(v["beta_factors"], "beta_factors");
  if (v.contains("full_matrix_factors")) {
    g.full_matrix_factors = number_list(v["full_matrix_factors"], "full_matrix_factors");
  }
  if (v.contains("restarts")) {
    if (!v["restarts"].is_number_integer() || v["restarts"].get<long long>() < 1) {
      config_error("restarts must be a positive integer");
    }
    g.restarts = v["restarts"].get<std::size_t>();
  }
  if (v.contains("full_matrix")) {
    if (!v["full_matrix"].is_boolean()) config_error("full_matrix must be true or false");
    g.full_matrix = v["full_matrix"].get<bool>();
  }
  if (v.contains("tolerance")) g.tolerance = number(v["tolerance"], "tolerance");
  for (double f : g.beta_factors) require(f > 1.0, ErrorKind::OutOfRange, "beta factors must exceed 1");
  for (double f : g.full_matrix_factors) require(f > 1.0, ErrorKind::OutOfRange, "beta factors must exceed 1");
}

}  // namespace detail

/// Builds a run configuration from a parsed JSON document. Unknown keys are rejected.
inline RunConfig parse_config(const json& doc) {
  using namespace detail;
  if (!doc.is_object()) config_error("config must be a JSON object");
  reject_unknown(doc, {"model", "measure", "beta", "output", "seed", "bounds", "threads", "verify"}, "config");
  RunConfig cfg;
  if (doc.contains("model")) parse_model(doc["model"], cfg);
  if (doc.contains("measure")) cfg.measures = parse_measures(doc["measure"]);
  if (doc.contains("beta")) cfg.beta = parse_beta(doc["beta"]);
  if (doc.contains("output")) {
    const json& o = doc["output"];
    if (!o.is_object()) config_error("output must be an object");
    reject_unknown(o, {"format", "path"}, "output");
    const std::string fmt = o.value("format", std::string("csv"));
    if (fmt == "json") cfg.format = Format::json;
    else if (fmt != "csv") config_error("output format must be 'csv' or 'json'");
    if (o.contains("path")) {
      if (!o["path"].is_string()) config_error("output path must be a string");
      cfg.path = o["path"].get<std::string>();
    }
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) config_error("seed must be a nonnegative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("bounds")) {
    if (!doc["bounds"].is_boolean()) config_error("bounds must be true or false");
    cfg.bounds = doc["bounds"].get<bool>();
  }
  if (doc.contains("threads")) {
    if (!doc["threads"].is_number_unsigned()) config_error("threads must be a nonnegative integer");
    cfg.threads = doc["threads"].get<std::size_t>();
  }
  if (doc.contains("verify")) parse_verify(doc["verify"], cfg.verify);
  return cfg;
}

inline RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ConfigError, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

inline void apply_overrides(RunConfig& cfg, const Overrides& o) {
  if (o.beta) cfg.beta = detail::parse_beta_text(*o.beta);
  if (o.measure) {
    cfg.measures = detail::parse_measure_list(*o.measure, o.q);
  } else if (o.q) {
    cfg.measures = {Measure::renyi(*o.q)};
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.output) {
    if (*o.output == "-") cfg.path.reset();
    else cfg.path = *o.output;
  }
  if (o.perturbation) cfg.perturbation = *o.perturbation;
}

// ---------------------------------------------------------------------------
// Tables

using Cell = std::variant<std::monostate, double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    require(row.size() == columns.size(), ErrorKind::DimensionMismatch, "row width does not match the header");
    rows.push_back(std::move(row));
  }
};

/// Numbers are written with 12 significant digits; -0 prints as 0.
inline std::string format_number(double v) {
  if (v == 0.0) v = 0.0;
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string join_numbers(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += format_number(v[i]);
  }
  return out;
}

inline void write_csv(const Table& t, std::ostream& out) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      std::visit(
          [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, double>) out << format_number(c);
            else if constexpr (std::is_same_v<T, long long>) out << c;
            else if constexpr (std::is_same_v<T, std::string>) out << c;
          },
          row[i]);
    }
    out << '\n';
  }
}

// JSON numbers go through the same 12-digit rendering, so both formats carry identical values.
inline void write_json(const Table& t, std::ostream& out) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    json obj = json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::visit(
          [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
              obj[t.columns[i]] = nullptr;
            } else if constexpr (std::is_same_v<T, double>) {
              if (std::isfinite(c)) obj[t.columns[i]] = std::stod(format_number(c));
              else obj[t.columns[i]] = format_number(c);
            } else {
              obj[t.columns[i]] = c;
            }
          },
          row[i]);
    }
    rows.push_back(std::move(obj));
  }
  out << rows.dump(2) << '\n';
}

inline void write_table(const Table& t, Format f, std::ostream& out) {
  if (f == Format::json) write_json(t, out);
  else write_csv(t, out);
}

namespace detail {

inline std::string measure_file_tag(const Measure& m) {
  std::string tag = m.label();
  for (char& c : tag) {
    if (c == ':') c = '_';
  }
  return tag;
}

inline void write_to_path(const Table& t, Format f, const std::string& path) {
  std::ofstream file(path);
  if (!file) fail(ErrorKind::ConfigError, "cannot open output file '" + path + "'");
  write_table(t, f, file);
}

// One table per measure. With an output path and several measures, each
// table goes to "<stem>.<measure><ext>"; on standard output they are merged
// under a single header.
inline void emit_per_measure(const RunConfig& cfg, const std::vector<Table>& tables, std::ostream& out) {
  if (!cfg.path) {
    Table merged{tables.front().columns, {}};
    for (const auto& t : tables) merged.rows.insert(merged.rows.end(), t.rows.begin(), t.rows.end());
    write_table(merged, cfg.format, out);
    return;
  }
  if (tables.size() == 1) {
    write_to_path(tables.front(), cfg.format, *cfg.path);
    return;
  }
  const std::filesystem::path base(*cfg.path);
  for (std::size_t i = 0; i < tables.size(); ++i) {
    std::filesystem::path p = base.parent_path() /
                              (base.stem().string() + "." + measure_file_tag(cfg.measures[i]) + base.extension().string());
    write_to_path(tables[i], cfg.format, p.string());
  }
}

inline void emit_single(const RunConfig& cfg, const Table& t, std::ostream& out) {
  if (cfg.path) write_to_path(t, cfg.format, *cfg.path);
  else write_table(t, cfg.format, out);
}

inline std::vector<Measure> measures_or_shannon(const RunConfig& cfg) {
  return cfg.measures.empty() ? std::vector<Measure>{Measure::shannon()} : cfg.measures;
}

inline std::vector<double> required_betas(const RunConfig& cfg) {
  if (!cfg.beta) config_error("this command needs 'beta'");
  return cfg.beta->values();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Commands. Each writes its table(s) and returns the process exit status;
// library errors propagate as exceptions (see run_command).

/// Columns: mode, lambda, r, beta_c, v (row of V, ';'-separated).
inline int cmd_spectrum(const RunConfig& cfg, std::ostream& out) {
  const Spectrum s = cfg.model_spectrum();
  Table t{{"mode", "lambda", "r", "beta_c", "v"}, {}};
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double bc = s.lambdas[i] < 1.0 ? critical_beta(s.lambdas[i]) : std::numeric_limits<double>::infinity();
    t.add({static_cast<long long>(i), s.lambdas[i], s.r_values[i], bc,
           join_numbers(s.v_rows.row(i).transpose())});
  }
  detail::emit_single(cfg, t, out);
  return 0;
}

/// Columns: beta, measure, mode, lambda, beta_c, u, active, omega_tx, omega_ty.
/// One row per mode and a closing "total" row per β.
inline int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  const Spectrum s = cfg.model_spectrum();
  const std::vector<double> betas = detail::required_betas(cfg);
  std::vector<Table> tables;
  for (const Measure& m : detail::measures_or_shannon(cfg)) {
    Table t{{"beta", "measure", "mode", "lambda", "beta_c", "u", "active", "omega_tx", "omega_ty"}, {}};
    for (double beta : betas) {
      const MixingSolution sol = solve_spectrum(s, m, beta);
      for (Eigen::Index i = 0; i < s.size(); ++i) {
        const bool on = sol.active[static_cast<std::size_t>(i)];
        const InfoPair p = on ? mode_information(s.lambdas[i], sol.u_values[i], m) : InfoPair{};
        const double bc =
            s.lambdas[i] < 1.0 ? critical_beta(s.lambdas[i]) : std::numeric_limits<double>::infinity();
        t.add({beta, m.label(), std::to_string(i), s.lambdas[i], bc, sol.u_values[i], static_cast<long long>(on),
               p.omega_tx, p.omega_ty});
      }
      const InfoPair total = solution_info(sol, s, m);
      t.add({beta, m.label(), std::string("total"), std::monostate{}, std::monostate{}, std::monostate{},
             static_cast<long long>(sol.active_count()), total.omega_tx, total.omega_ty});
    }
    tables.push_back(std::move(t));
  }
  detail::emit_per_measure(cfg, tables, out);
  return 0;
}

/// Columns: beta, measure, omega_tx, omega_ty, active_modes, and with bounds enabled dpi, sdpi.
inline int cmd_frontier(const RunConfig& cfg, std::ostream& out) {
  const Spectrum s = cfg.model_spectrum();
  const std::vector<double> betas = detail::required_betas(cfg);
  std::vector<Table> tables;
  for (const Measure& m : detail::measures_or_shannon(cfg)) {
    Table t{{"beta", "measure", "omega_tx", "omega_ty", "active_modes"}, {}};
    if (cfg.bounds) {
      t.columns.push_back("dpi");
      t.columns.push_back("sdpi");
    }
    const std::vector<InfoPoint> pts = sweep(s, m, betas, cfg.threads);
    std::vector<double> xs;
    for (const auto& p : pts) xs.push_back(p.omega_tx);
    const BoundCurves b = dpi_bounds(s, xs);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      std::vector<Cell> row{pts[k].beta, m.label(), pts[k].omega_tx, pts[k].omega_ty,
                            static_cast<long long>(pts[k].active_modes)};
      if (cfg.bounds) {
        row.emplace_back(b.dpi[k]);
        row.emplace_back(b.sdpi[k]);
      }
      t.add(std::move(row));
    }
    tables.push_back(std::move(t));
  }
  detail::emit_per_measure(cfg, tables, out);
  return 0;
}

/// Columns: beta, measure, i_tx, i_ty, i_ty_max, gap (Shannon information of each optimal encoder).
inline int cmd_crosseval(const RunConfig& cfg, std::ostream& out) {
  const Spectrum s = cfg.model_spectrum();
  const std::vector<double> betas = detail::required_betas(cfg);
  std::vector<Table> tables;
  for (const Measure& m : detail::measures_or_shannon(cfg)) {
    Table t{{"beta", "measure", "i_tx", "i_ty", "i_ty_max", "gap"}, {}};
    for (const auto& p : cross_evaluate(s, m, betas, cfg.threads)) {
      t.add({p.beta, m.label(), p.i_tx, p.i_ty, p.i_ty_max, p.gap});
    }
    tables.push_back(std::move(t));
  }
  detail::emit_per_measure(cfg, tables, out);
  return 0;
}

struct VerifyRow {
  std::string kind;
  Measure measure = Measure::shannon();
  Eigen::VectorXd lambdas;
  double beta = 0.0;
  OracleReport report;
  bool pass = false;
};

namespace detail {

inline std::vector<Measure> default_verify_measures() {
  return {Measure::renyi(0.0), Measure::renyi(0.5), Measure::renyi(1.0),
          Measure::renyi(1.5), Measure::renyi(2.0), Measure::jeffreys()};
}

// A fixed, well-conditioned mixing of the eigenbasis so the full-matrix
// search does not start from an axis-aligned model.
inline JointGaussian mixed_model(const Spectrum& s, std::uint64_t seed) {
  gib::detail::SeededRandom rng(seed);
  const auto n = s.size();
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) m(i, k) = (i == k ? 1.0 : 0.0) + 0.3 * rng.normal();
  }
  return transform_source(realize(s), m);
}

struct VerifyCase {
  bool full = false;
  Measure measure = Measure::shannon();
  Spectrum spectrum;
  std::optional<JointGaussian> joint;
  double beta = 0.0;
};

}  // namespace detail

/**
 * Runs the oracle over the verification grid and returns one row per case.
 *
 * Diagonal cases pass when the analytic and numeric weights agree within the
 * tolerance and the analytic loss is no worse than the numeric one (1e-7
 * slack). Full-matrix cases pass when no dense encoder beats the diagonal
 * solution's loss by the tolerance or more. Case k is seeded with seed + k.
 */
inline std::vector<VerifyRow> run_verify(const RunConfig& cfg) {
  const VerifyGrid& g = cfg.verify;
  const std::vector<Measure> measures = cfg.measures.empty() ? detail::default_verify_measures() : cfg.measures;

  std::vector<Spectrum> spectra;
  std::vector<std::optional<JointGaussian>> joints;
  if (cfg.has_model()) {
    spectra.push_back(cfg.model_spectrum());
    joints.push_back(cfg.joint);
  } else {
    for (const auto& set : g.lambda_sets) {
      spectra.push_back(spectrum_from_eigenvalues(set));
      joints.emplace_back();
    }
  }

  std::vector<detail::VerifyCase> cases;
  for (std::size_t si = 0; si < spectra.size(); ++si) {
    const Spectrum& s = spectra[si];
    const double base = s.min_lambda() < 1.0 ? critical_beta(s.min_lambda()) : 1.0;
    for (const Measure& m : measures) {
      for (double f : g.beta_factors) cases.push_back({false, m, s, std::nullopt, f * base});
    }
  }
  if (g.full_matrix) {
    for (std::size_t si = 0; si < spectra.size(); ++si) {
      const Spectrum& s = spectra[si];
      if (s.size() > 4) continue;
      const JointGaussian j = joints[si] ? *joints[si] : detail::mixed_model(s, cfg.seed + si);
      const double base = s.min_lambda() < 1.0 ? critical_beta(s.min_lambda()) : 1.0;
      for (const Measure& m : measures) {
        for (double f : g.full_matrix_factors) cases.push_back({true, m, s, j, f * base});
      }
    }
  }

  std::vector<VerifyRow> rows(cases.size());
  gib::detail::parallel_for(cases.size(), cfg.threads, [&](std::size_t k) {
    const auto& c = cases[k];
    OracleOptions opt;
    opt.restarts = g.restarts;
    VerifyRow& row = rows[k];
    row.measure = c.measure;
    row.lambdas = c.spectrum.lambdas;
    row.beta = c.beta;
    if (c.full) {
      row.kind = "full_matrix";
      row.report = minimize_loss_full_matrix(*c.joint, c.measure, c.beta, c.joint->nx(), cfg.seed + k, opt);
      row.pass = row.report.loss_analytic - row.report.loss_numeric < g.tolerance;
    } else {
      row.kind = "diagonal";
      opt.perturbation = cfg.perturbation;
      row.report = minimize_loss_diagonal(c.spectrum, c.measure, c.beta, cfg.seed + k, opt);
      row.pass = row.report.max_abs_diff < g.tolerance && row.report.loss_analytic <= row.report.loss_numeric + 1e-7;
    }
  });
  return rows;
}

/// Columns: kind, measure, lambdas, beta, u_analytic, u_numeric, loss_analytic,
/// loss_numeric, max_abs_diff, stationarity_residual, converged_restarts, pass.
/// Exit status 1 when any case fails.
inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const std::vector<VerifyRow> rows = run_verify(cfg);
  Table t{{"kind", "measure", "lambdas", "beta", "u_analytic", "u_numeric", "loss_analytic", "loss_numeric",
           "max_abs_diff", "stationarity_residual", "converged_restarts", "pass"},
          {}};
  bool all = true;
  for (const auto& r : rows) {
    all = all && r.pass;
    t.add({r.kind, r.measure.label(), join_numbers(r.lambdas), r.beta, join_numbers(r.report.u_analytic),
           join_numbers(r.report.u_numeric), r.report.loss_analytic, r.report.loss_numeric, r.report.max_abs_diff,
           r.report.stationarity_residual, static_cast<long long>(r.report.converged_restarts),
           static_cast<long long>(r.pass)});
  }
  detail::emit_single(cfg, t, out);
  return all ? 0 : 1;
}

// ---------------------------------------------------------------------------
// Dispatch

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"spectrum", "solve", "frontier", "crosseval", "verify"};
  return names;
}

/// Exit status for a library error: 2 for configuration and input-model problems, 3 for numerical failures.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigError:
    case ErrorKind::OutOfRange:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::NonPositiveDefinite:
    case ErrorKind::DegenerateMode:
      return 2;
    default:
      return 3;
  }
}

/// Single-line diagnostic: "gib-error <Kind>: <message>".
inline std::string diagnostic(ErrorKind kind, const std::string& message) {
  std::string line = "gib-error " + std::string(to_string(kind)) + ": " + message;
  for (char& c : line) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return line;
}

inline int run_command(const std::string& command, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (command == "spectrum") return cmd_spectrum(cfg, out);
    if (command == "solve") return cmd_solve(cfg, out);
    if (command == "frontier") return cmd_frontier(cfg, out);
    if (command == "crosseval") return cmd_crosseval(cfg, out);
    if (command == "verify") return cmd_verify(cfg, out);
    fail(ErrorKind::ConfigError, "unknown command '" + command + "'");
  } catch (const Error& e) {
    err << diagnostic(e.kind(), e.what()) << '\n';
    return exit_code(e.kind());
  }
}

/// Full command-line entry point: `gib <command> <config.json> [overrides]`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Gaussian information bottleneck solver (Shannon, Renyi-q, Jeffreys); information in nats"};
  std::string command;
  std::string config_path;
  Overrides o;
  app.add_option("command", command, "spectrum | solve | frontier | crosseval | verify")
      ->required()
      ->check(CLI::IsMember(command_names()));
  app.add_option("config", config_path, "JSON run configuration")->required();
  app.add_option("--beta", o.beta, "beta value, or start:stop:count[:linear|log]");
  app.add_option("--measure", o.measure, "shannon | jeffreys | renyi | renyi:<q>, comma-separated");
  app.add_option("--q", o.q, "Renyi order; alone it selects renyi:<q>");
  app.add_option("--seed", o.seed, "oracle seed");
  app.add_option("--output", o.output, "output path, '-' for standard output");
  app.add_option("--perturb", o.perturbation, "verify: offset added to analytic weights (checker self-test)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << diagnostic(ErrorKind::ConfigError, e.what()) << '\n';
    return 2;
  }
  RunConfig cfg;
  try {
    cfg = load_config(config_path);
    apply_overrides(cfg, o);
  } catch (const Error& e) {
    err << diagnostic(e.kind(), e.what()) << '\n';
    return exit_code(e.kind());
  }
  return run_command(command, cfg, out, err);
}

}  // namespace gib::cli
