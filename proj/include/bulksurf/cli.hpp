#pragma once

// Command-line front end: typed per-command key registry, flag and config
// file parsing, command dispatch, and CSV / JSON emission.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "bulksurf/ball_radial.hpp"
#include "bulksurf/disk_poisson.hpp"
#include "bulksurf/error.hpp"
#include "bulksurf/fem2d.hpp"
#include "bulksurf/format.hpp"
#include "bulksurf/shape_hessian.hpp"
#include "bulksurf/suites.hpp"

namespace bulksurf::cli {

using json = nlohmann::ordered_json;

enum class ConfigErrorKind { UnknownKey, MissingKey, TypeError };

inline const char* to_string(ConfigErrorKind k) {
  switch (k) {
    case ConfigErrorKind::UnknownKey: return "UnknownKey";
    case ConfigErrorKind::MissingKey: return "MissingKey";
    case ConfigErrorKind::TypeError: return "TypeError";
  }
  return "TypeError";
}

class ConfigError : public std::runtime_error {
 public:
  ConfigError(ConfigErrorKind kind, std::string key, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + key + ": " + detail), kind_(kind), key_(std::move(key)) {}
  ConfigErrorKind kind() const { return kind_; }
  const std::string& key() const { return key_; }

 private:
  ConfigErrorKind kind_;
  std::string key_;
};

enum class ValueType { Int, Real, Text, Flag, RealList };

using Value = std::variant<long long, double, std::string, bool, std::vector<double>>;

struct KeySpec {
  std::string name;
  ValueType type = ValueType::Real;
  std::optional<std::string> fallback;  // empty means required
  std::optional<double> min;            // inclusive lower bound for numbers
  std::optional<double> max;            // inclusive upper bound for numbers
  std::vector<std::string> choices;     // allowed text values
  bool even = false;
  bool positive = false;  // strict lower bound 0
};

struct CommandSpec {
  std::string name;
  std::string help;
  std::vector<KeySpec> keys;
};

inline KeySpec int_key(std::string name, std::optional<std::string> fallback, std::optional<double> min = {}) {
  KeySpec k;
  k.name = std::move(name);
  k.type = ValueType::Int;
  k.fallback = std::move(fallback);
  k.min = min;
  return k;
}

inline KeySpec real_key(std::string name, std::optional<std::string> fallback, bool positive = false) {
  KeySpec k;
  k.name = std::move(name);
  k.type = ValueType::Real;
  k.fallback = std::move(fallback);
  k.positive = positive;
  return k;
}

inline KeySpec text_key(std::string name, std::string fallback, std::vector<std::string> choices) {
  KeySpec k;
  k.name = std::move(name);
  k.type = ValueType::Text;
  k.fallback = std::move(fallback);
  k.choices = std::move(choices);
  return k;
}

inline const std::vector<CommandSpec>& command_registry() {
  static const std::vector<CommandSpec> specs = [] {
    const auto d = int_key("d", "2", 2);
    const auto grid_n = int_key("grid_n", "4096", 64);
    const auto c_i = real_key("c_i", std::nullopt);
    const auto c_b = real_key("c_b", std::nullopt);
    auto m_key = int_key("m", "128", 32);
    m_key.even = true;
    KeySpec boundary_data{"boundary_data", ValueType::Flag, "false"};
    KeySpec h = real_key("h", "0.02", true);
    h.max = 0.5;

    std::vector<CommandSpec> s;
    s.push_back({"eigen-ball", "principal eigenvalue on the ball by radial shooting",
                 {d, real_key("R", "1", true), c_i, c_b, grid_n}});
    s.push_back({"eigen-fem", "principal eigenvalue by P1 finite elements",
                 {text_key("domain", "disk", {"disk", "rectangle"}), h, real_key("a", "1", true),
                  real_key("b", "1", true), c_i, c_b, grid_n}});
    s.push_back({"hessian", "diagonal shape Hessian coefficients at the unit ball",
                 {d, c_i, c_b, int_key("k_min", "1", 1), int_key("k_max", "10", 1), grid_n}});
    s.push_back({"hessian-fd", "finite-difference shape Hessian on perturbed disks",
                 {c_i, c_b, int_key("k", "2", 1), real_key("t", "0.01", true), h,
                  text_key("profile", "smoothstep", {"smoothstep", "smooth"}), grid_n}});
    s.push_back({"regime-scan", "sign classification of a_k for 2 <= k <= k_max",
                 {d, c_i, c_b, int_key("k_max", "60", 2), grid_n}});
    s.push_back({"talenti", "randomized Talenti comparison suite on the disk",
                 {text_key("kind", "robin", {"robin", "dirichlet", "coupled"}), int_key("trials", "50", 1),
                  int_key("seed", "1", 0), int_key("n_r", "96", 32), m_key, real_key("robin_beta", "1", true),
                  real_key("tol", "1e-8"), boundary_data}});
    KeySpec aspects{"aspects", ValueType::RealList, "1,4,16,64"};
    aspects.min = 1.0;
    s.push_back({"nonexistence", "eigenvalue trend on stretched rectangles of area pi",
                 {real_key("c_i", "1"), real_key("c_b", "0"), aspects, real_key("h_max", "0.05", true)}});
    auto fk_m = m_key;
    fk_m.fallback = "128";
    s.push_back({"fk-check", "symmetrization inequality for the general-coefficient eigenvalue",
                 {int_key("trials", "20", 1), int_key("seed", "1", 0), int_key("n_r", "128", 32), fk_m,
                  real_key("tol", "1e-6")}});
    KeySpec list{"c_i_list", ValueType::RealList, "-1,-5,-20,-80,-200"};
    list.max = -1.0;
    s.push_back({"limit-gap", "gap lambda - c_i as c_i decreases, against the Robin limit", {d, list, grid_n}});
    for (auto& c : s) {
      c.keys.push_back(KeySpec{"out", ValueType::Text, c.name});
      for (auto& k : c.keys)
        if (k.name == "tol") k.min = 0.0;
    }
    return s;
  }();
  return specs;
}

inline const CommandSpec& command_spec(const std::string& name) {
  for (const auto& c : command_registry())
    if (c.name == name) return c;
  throw ConfigError(ConfigErrorKind::TypeError, "command", "unknown command '" + name + "'");
}

struct RunConfig {
  std::string command;
  std::map<std::string, Value> parameters;

  long long integer(const std::string& key) const { return std::get<long long>(parameters.at(key)); }
  double real(const std::string& key) const { return std::get<double>(parameters.at(key)); }
  const std::string& text(const std::string& key) const { return std::get<std::string>(parameters.at(key)); }
  bool flag(const std::string& key) const { return std::get<bool>(parameters.at(key)); }
  const std::vector<double>& list(const std::string& key) const {
    return std::get<std::vector<double>>(parameters.at(key));
  }
};

namespace detail {

inline void check_range(const KeySpec& k, double x) {
  if (!std::isfinite(x)) throw ConfigError(ConfigErrorKind::TypeError, k.name, "must be finite");
  if (k.positive && !(x > 0.0)) throw ConfigError(ConfigErrorKind::TypeError, k.name, "must be > 0");
  if (k.min && x < *k.min) throw ConfigError(ConfigErrorKind::TypeError, k.name, "must be >= " + format_double(*k.min));
  if (k.max && x > *k.max) throw ConfigError(ConfigErrorKind::TypeError, k.name, "must be <= " + format_double(*k.max));
}

inline Value convert(const KeySpec& k, const std::string& raw) {
  try {
    switch (k.type) {
      case ValueType::Int: {
        const long long v = parse_int(raw);
        check_range(k, static_cast<double>(v));
        if (k.even && v % 2 != 0) throw ConfigError(ConfigErrorKind::TypeError, k.name, "must be even");
        return v;
      }
      case ValueType::Real: {
        const double v = parse_double(raw);
        check_range(k, v);
        return v;
      }
      case ValueType::Text:
        if (!k.choices.empty() && std::find(k.choices.begin(), k.choices.end(), raw) == k.choices.end())
          throw ConfigError(ConfigErrorKind::TypeError, k.name, "'" + raw + "' is not an allowed value");
        if (raw.empty()) throw ConfigError(ConfigErrorKind::TypeError, k.name, "must not be empty");
        return raw;
      case ValueType::Flag:
        if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") return true;
        if (raw == "false" || raw == "0" || raw == "no" || raw == "off") return false;
        throw ConfigError(ConfigErrorKind::TypeError, k.name, "expected a boolean");
      case ValueType::RealList: {
        std::vector<double> out;
        std::stringstream ss(raw);
        for (std::string item; std::getline(ss, item, ',');) {
          out.push_back(parse_double(item));
          check_range(k, out.back());
        }
        if (out.empty()) throw ConfigError(ConfigErrorKind::TypeError, k.name, "expected a comma-separated list");
        return out;
      }
    }
  } catch (const Error&) {
    throw ConfigError(ConfigErrorKind::TypeError, k.name, "cannot parse '" + raw + "'");
  }
  throw ConfigError(ConfigErrorKind::TypeError, k.name, "unsupported type");
}

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  s = s.substr(b, e - b + 1);
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
    s = s.substr(1, s.size() - 2);
  return s;
}

/// Flat `key = value` lines; '#' starts a comment.
inline std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(ConfigErrorKind::TypeError, "config", "cannot open '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(ConfigErrorKind::TypeError, "config", "line " + std::to_string(number) + " is not key = value");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

inline std::set<std::string> all_keys() {
  std::set<std::string> keys;
  for (const auto& c : command_registry())
    for (const auto& k : c.keys) keys.insert(k.name);
  return keys;
}

}  // namespace detail

/// Parses `bulksurf <command> [--key value]... [--config file]`.
/// Returns std::nullopt when help was requested (already printed).
inline std::optional<RunConfig> parse_config(int argc, const char* const* argv, std::ostream& help_out = std::cout) {
  CLI::App app{"bulk-surface eigenvalue laboratory", "bulksurf"};
  app.set_help_flag("--help", "print this help");
  std::string command, config_path;
  std::string commands_help;
  for (const auto& c : command_registry()) commands_help += "\n  " + c.name + ": " + c.help;
  app.add_option("command", command, "one of:" + commands_help)->required();
  app.add_option("--config", config_path, "file of key = value lines; flags take precedence");
  std::map<std::string, std::string> flag_values;
  for (const auto& key : detail::all_keys()) {
    std::string users;
    for (const auto& c : command_registry())
      for (const auto& k : c.keys)
        if (k.name == key) users += (users.empty() ? "" : ", ") + c.name;
    app.add_option("--" + key, flag_values[key], "used by " + users);
  }
  app.allow_extras();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    help_out << app.help();
    return std::nullopt;
  } catch (const CLI::RequiredError&) {
    throw ConfigError(ConfigErrorKind::MissingKey, "command", "a command is required");
  } catch (const CLI::ArgumentMismatch& e) {
    throw ConfigError(ConfigErrorKind::TypeError, "argument", e.what());
  } catch (const CLI::ParseError& e) {
    throw ConfigError(ConfigErrorKind::TypeError, "argument", e.what());
  }

  if (const auto extras = app.remaining(); !extras.empty()) {
    std::string key = extras.front();
    for (const auto& x : extras)
      if (x.rfind("-", 0) == 0) {
        key = x;
        break;
      }
    key.erase(0, key.find_first_not_of('-'));
    throw ConfigError(ConfigErrorKind::UnknownKey, key, "not a recognised key");
  }

  const CommandSpec& spec = command_spec(command);
  std::map<std::string, std::string> raw;
  if (!config_path.empty()) raw = detail::read_config_file(config_path);
  for (const auto& key : detail::all_keys())
    if (app.get_option("--" + key)->count() > 0) raw[key] = flag_values[key];

  for (const auto& [key, _] : raw) {
    const bool known = std::any_of(spec.keys.begin(), spec.keys.end(), [&](const KeySpec& k) { return k.name == key; });
    if (!known) throw ConfigError(ConfigErrorKind::UnknownKey, key, "not accepted by '" + command + "'");
  }

  RunConfig cfg;
  cfg.command = command;
  for (const auto& k : spec.keys)
    if (auto it = raw.find(k.name); it != raw.end()) cfg.parameters[k.name] = detail::convert(k, it->second);
  for (const auto& k : spec.keys) {
    if (cfg.parameters.count(k.name)) continue;
    if (!k.fallback) throw ConfigError(ConfigErrorKind::MissingKey, k.name, "required by '" + command + "'");
    cfg.parameters[k.name] = detail::convert(k, *k.fallback);
  }
  if (command == "hessian" && cfg.integer("k_max") < cfg.integer("k_min"))
    throw ConfigError(ConfigErrorKind::TypeError, "k_max", "must be >= k_min");
  if (command == "limit-gap") {
    const auto& l = cfg.list("c_i_list");
    for (std::size_t i = 1; i < l.size(); ++i)
      if (!(l[i] < l[i - 1])) throw ConfigError(ConfigErrorKind::TypeError, "c_i_list", "must be strictly decreasing");
  }
  return cfg;
}

/// Table plus JSON sections produced by one command.
struct CommandOutput {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  json headline = json::object();
  json verdicts = json::object();
  json extra = json::object();
  bool passed = true;  // false makes the run exit with code 3
};

namespace detail {

inline std::string num(double x) { return format_double(x); }
inline std::string num(long long x) { return std::to_string(x); }
inline std::string num(int x) { return std::to_string(x); }
inline std::string num(std::size_t x) { return std::to_string(x); }

inline json parameters_json(const RunConfig& cfg) {
  json out = json::object();
  for (const auto& [key, value] : cfg.parameters)
    std::visit([&](const auto& v) { out[key] = v; }, value);
  return out;
}

inline CommandOutput run_eigen_ball(const RunConfig& c) {
  const auto e = solve_principal_ball(static_cast<int>(c.integer("d")), c.real("R"), c.real("c_i"), c.real("c_b"),
                                      static_cast<int>(c.integer("grid_n")));
  CommandOutput out;
  out.header = {"r", "u", "du"};
  for (std::size_t j = 0; j < e.r.size(); ++j) out.rows.push_back({num(e.r[j]), num(e.u[j]), num(e.du[j])});
  out.headline = {{"lambda", e.lambda},
                  {"lambda_bar", e.lambda_bar},
                  {"lambda_tilde", e.lambda_tilde},
                  {"v", e.v},
                  {"u_at_R", e.u_at_R()},
                  {"du_at_R", e.du_at_R},
                  {"d2u_at_R", e.d2u_at_R},
                  {"H", e.H},
                  {"shooting_residual", e.shooting_residual},
                  {"rayleigh_quotient", rayleigh_quotient(e)}};
  const double lo = std::min(e.c_i, -e.c_b), hi = std::max(e.c_i, -e.c_b);
  out.verdicts["strict_bracket"] = (lo == hi) ? (e.lambda == lo) : (lo < e.lambda && e.lambda < hi);
  out.verdicts["positive"] = e.v > 0.0 && std::all_of(e.u.begin(), e.u.end(), [](double x) { return x > 0.0; });
  return out;
}

inline CommandOutput run_eigen_fem(const RunConfig& c) {
  const bool disk = c.text("domain") == "disk";
  const Mesh mesh = disk ? make_disk_mesh(c.real("h")) : make_rectangle_mesh(c.real("a"), c.real("b"), c.real("h"));
  const auto e = lambda_fem(mesh, c.real("c_i"), c.real("c_b"));
  CommandOutput out;
  out.header = {"dof", "kind", "x", "y", "value"};
  const Index nv = static_cast<Index>(mesh.vertices.size());
  for (Index i = 0; i < e.coords.size(); ++i) {
    const bool bulk = i < nv;
    const auto& p = mesh.vertices[bulk ? i : mesh.boundary_loop[i - nv]];
    out.rows.push_back({num(static_cast<long long>(i)), bulk ? "bulk" : "surface", num(p[0]), num(p[1]), num(e.coords[i])});
  }
  out.headline = {{"lambda_h", e.lambda},
                  {"area", e.area},
                  {"perimeter", e.perimeter},
                  {"vertices", mesh.vertices.size()},
                  {"min_angle_degrees", mesh.min_angle_degrees()}};
  if (disk) {
    const auto ball = solve_principal_ball(2, 1.0, c.real("c_i"), c.real("c_b"), static_cast<int>(c.integer("grid_n")));
    const double delta = std::abs(e.lambda - ball.lambda);
    out.headline["lambda_radial"] = ball.lambda;
    out.headline["cross_check_delta"] = delta;
    out.verdicts["cross_check_within_1e-2"] = delta <= 1e-2;
    out.passed = delta <= 1e-2;
  }
  out.verdicts["eigenvector_positive"] = e.min_coord > 0.0;
  return out;
}

inline CommandOutput run_hessian(const RunConfig& c) {
  const int d = static_cast<int>(c.integer("d"));
  const int n = static_cast<int>(c.integer("grid_n"));
  const auto eig = solve_principal_ball(d, 1.0, c.real("c_i"), c.real("c_b"), n);
  const auto co = ball_coefficients(eig);
  const int k0 = static_cast<int>(c.integer("k_min")), k1 = static_cast<int>(c.integer("k_max"));
  const int steps = static_cast<int>(eig.r.size()) - 1;
  const auto rows = parallel_map(static_cast<std::size_t>(k1 - k0 + 1),
                                 [&](std::size_t i) { return hessian_row(k0 + static_cast<int>(i), eig, co, steps); });
  CommandOutput out;
  out.header = {"k", "sigma_k", "d_k", "p_k1", "q_k", "a_k"};
  for (const auto& r : rows)
    out.rows.push_back({num(r.k), num(r.sigma_k), num(r.d_k), num(r.p_k1), num(r.q_k), num(r.a_k)});
  out.headline = {{"lambda", eig.lambda},       {"coeff_alpha", co.coeff_alpha}, {"coeff_beta", co.coeff_beta},
                  {"coeff_gamma", co.coeff_gamma}, {"coeff_delta", co.coeff_delta}, {"mu", co.mu}};
  return out;
}

inline CommandOutput run_hessian_fd(const RunConfig& c) {
  const int k = static_cast<int>(c.integer("k"));
  const double ci = c.real("c_i"), cb = c.real("c_b");
  const auto eig = solve_principal_ball(2, 1.0, ci, cb, static_cast<int>(c.integer("grid_n")));
  const auto co = ball_coefficients(eig);
  const auto row = hessian_row(k, eig);
  const auto row2 = hessian_row(2, eig);
  const auto profile = c.text("profile") == "smooth" ? CutoffProfile::Smooth : CutoffProfile::Smoothstep;
  const double t = c.real("t");
  const auto fd = hessian_fd(k, ci, cb, t, c.real("h"), co.mu, profile);
  CommandOutput out;
  out.header = {"step", "L"};
  out.rows = {{num(-t), num(fd.l_minus)}, {num(0.0), num(fd.l_zero)}, {num(t), num(fd.l_plus)}};
  out.headline = {{"fd_value", fd.value}, {"a_k", row.a_k}, {"a_2", row2.a_k}, {"mu", co.mu}};
  bool ok;
  if (k == 1) {
    ok = std::abs(fd.value) <= 0.05 * std::abs(row2.a_k);
    out.verdicts["k1_below_5pct_of_a2"] = ok;
  } else {
    const double rel = std::abs(fd.value - row.a_k) / std::abs(row.a_k);
    out.headline["relative_error"] = rel;
    ok = rel <= 0.05;
    out.verdicts["within_5pct"] = ok;
  }
  out.passed = ok;
  return out;
}

inline CommandOutput run_regime_scan(const RunConfig& c) {
  const auto scan = regime_scan(static_cast<int>(c.integer("d")), c.real("c_i"), c.real("c_b"),
                                static_cast<int>(c.integer("k_max")), static_cast<int>(c.integer("grid_n")));
  CommandOutput out;
  out.header = {"k", "sigma_k", "a_k", "ratio"};
  for (const auto& r : scan.rows)
    out.rows.push_back({num(r.k), num(r.sigma_k), num(r.a_k), num(r.a_k / (1.0 + r.sigma_k))});
  out.headline = {{"lambda", scan.eig.lambda},
                  {"coeff_beta", scan.coeffs.coeff_beta},
                  {"mu", scan.coeffs.mu},
                  {"min_ratio", scan.min_ratio},
                  {"argmin_k", scan.argmin_k}};
  out.verdicts = {{"verdict", to_string(scan.verdict)},
                  {"tail", to_string(scan.tail)},
                  {"outside_proven_regime", scan.outside_proven_regime}};
  return out;
}

inline CommandOutput run_talenti(const RunConfig& c) {
  const std::string kind_name = c.text("kind");
  const TalentiKind kind = kind_name == "dirichlet" ? TalentiKind::Dirichlet
                           : kind_name == "coupled" ? TalentiKind::Coupled
                                                    : TalentiKind::Robin;
  const DiskGrid grid(static_cast<int>(c.integer("n_r")), static_cast<int>(c.integer("m")));
  const auto suite = talenti_suite(kind, static_cast<int>(c.integer("trials")),
                                   static_cast<std::uint64_t>(c.integer("seed")), grid, c.real("robin_beta"),
                                   c.real("tol"), c.flag("boundary_data"));
  CommandOutput out;
  out.header = {"trial", "holds", "worst_deficit", "worst_ring", "worst_cap", "integral_u", "integral_v", "asymmetry"};
  for (int p : {1, 2, 4}) {
    out.header.push_back("norm_u_p" + std::to_string(p));
    out.header.push_back("norm_v_p" + std::to_string(p));
  }
  json norms = json::array();
  for (const auto& t : suite.trials) {
    std::vector<std::string> row = {num(t.trial),
                                    t.comparison.holds ? "true" : "false",
                                    num(t.comparison.worst_deficit),
                                    num(t.comparison.worst_ring),
                                    num(t.comparison.worst_cap),
                                    num(t.integral_u),
                                    num(t.integral_v),
                                    num(t.asymmetry)};
    json rec = json::array();
    for (const auto& n : t.norms) {
      row.push_back(num(n.norm_u));
      row.push_back(num(n.norm_v));
      rec.push_back({{"p", n.p}, {"norm_u", n.norm_u}, {"norm_v", n.norm_v}});
    }
    norms.push_back({{"trial", t.trial}, {"norms", rec}});
    out.rows.push_back(std::move(row));
  }
  out.extra["norm_records"] = norms;
  out.headline = {{"violations", suite.violations}, {"worst_deficit", suite.worst_deficit}};
  out.verdicts["zero_violations"] = suite.violations == 0;
  out.passed = suite.violations == 0;
  if (kind == TalentiKind::Robin && !c.flag("boundary_data")) {
    out.headline["max_integral_gap"] = suite.max_integral_gap;
    out.verdicts["integrals_equal"] = suite.max_integral_gap <= 1e-8;
    out.passed = out.passed && suite.max_integral_gap <= 1e-8;
  }
  if (kind == TalentiKind::Robin) {
    if (std::isfinite(suite.min_l2_gain)) out.headline["min_l2_gain"] = suite.min_l2_gain;
    out.verdicts["rigidity_l2"] = suite.rigidity_holds;
    out.passed = out.passed && suite.rigidity_holds;
  }
  return out;
}

inline CommandOutput run_nonexistence(const RunConfig& c) {
  const double ci = c.real("c_i"), cb = c.real("c_b");
  const auto rows = nonexistence_scan(ci, cb, c.list("aspects"), c.real("h_max"));
  CommandOutput out;
  out.header = {"aspect", "area", "perimeter", "lambda_h", "upper_bound", "gap"};
  bool floor_ok = true, bound_ok = true, decreasing = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out.rows.push_back({num(r.aspect), num(r.area), num(r.perimeter), num(r.lambda_h), num(r.upper_bound),
                        num(r.lambda_h + cb)});
    floor_ok = floor_ok && r.above_floor;
    bound_ok = bound_ok && r.below_bound;
    if (i > 0 && rows[i].aspect > rows[i - 1].aspect) decreasing = decreasing && rows[i].lambda_h < rows[i - 1].lambda_h;
  }
  const double first = rows.front().lambda_h + cb, last = rows.back().lambda_h + cb;
  out.headline = {{"gap_first", first}, {"gap_last", last}, {"gap_ratio", last / first}};
  out.verdicts = {{"above_floor", floor_ok},
                  {"below_upper_bound", bound_ok},
                  {"gap_decreasing", decreasing},
                  {"gap_ratio_at_most_0.25", last / first <= 0.25}};
  out.passed = floor_ok && bound_ok && decreasing && last / first <= 0.25;
  return out;
}

inline CommandOutput run_fk_check(const RunConfig& c) {
  const DiskGrid grid(static_cast<int>(c.integer("n_r")), static_cast<int>(c.integer("m")));
  const auto suite = fk_suite(static_cast<int>(c.integer("trials")), static_cast<std::uint64_t>(c.integer("seed")),
                              grid, c.real("tol"));
  CommandOutput out;
  out.header = {"trial", "lambda", "lambda_symmetrized"};
  for (const auto& t : suite.trials) out.rows.push_back({num(t.trial), num(t.lambda), num(t.lambda_symmetrized)});
  out.headline = {{"min_gap", suite.min_gap}, {"violations", suite.violations}};
  out.verdicts["zero_violations"] = suite.violations == 0;
  out.passed = suite.violations == 0;
  return out;
}

inline CommandOutput run_limit_gap(const RunConfig& c) {
  const int d = static_cast<int>(c.integer("d"));
  const int n = static_cast<int>(c.integer("grid_n"));
  const auto& list = c.list("c_i_list");
  const auto pts = limit_gap_scan(d, list, n);
  const double robin = robin_eigenvalue(d, 1.0, n);
  CommandOutput out;
  out.header = {"c_i", "gap"};
  for (const auto& p : pts) out.rows.push_back({num(p.c_i), num(p.gap)});
  const double rel = std::abs(pts.back().gap - robin) / robin;
  out.headline = {{"robin_eigenvalue", robin}, {"last_gap", pts.back().gap}, {"relative_distance", rel}};
  out.verdicts["monotone"] = true;  // enforced by limit_gap_scan
  out.verdicts["within_1pct_of_robin"] = rel <= 0.01;
  out.passed = rel <= 0.01;
  return out;
}

}  // namespace detail

inline CommandOutput execute(const RunConfig& c) {
  if (c.command == "eigen-ball") return detail::run_eigen_ball(c);
  if (c.command == "eigen-fem") return detail::run_eigen_fem(c);
  if (c.command == "hessian") return detail::run_hessian(c);
  if (c.command == "hessian-fd") return detail::run_hessian_fd(c);
  if (c.command == "regime-scan") return detail::run_regime_scan(c);
  if (c.command == "talenti") return detail::run_talenti(c);
  if (c.command == "nonexistence") return detail::run_nonexistence(c);
  if (c.command == "fk-check") return detail::run_fk_check(c);
  if (c.command == "limit-gap") return detail::run_limit_gap(c);
  throw Error(ErrorCode::InvalidArgument, "unknown command " + c.command);
}

inline void write_csv(std::ostream& os, const CommandOutput& out) {
  for (std::size_t i = 0; i < out.header.size(); ++i) os << (i ? "," : "") << out.header[i];
  os << '\n';
  for (const auto& row : out.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
}

/// Runs a command and writes <out>.csv and <out>.json.
/// Exit codes: 0 success, 2 solver error, 3 failed verdict.
inline int run(const RunConfig& c, std::ostream& log = std::cerr) {
  const auto start = std::chrono::steady_clock::now();
  const std::string base = c.text("out");
  json summary = {{"command", c.command}, {"parameters", detail::parameters_json(c)}};
  int code = 0;
  CommandOutput out;
  try {
    out = execute(c);
    code = out.passed ? 0 : 3;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    summary["error"] = {{"code", to_string(e.code())}, {"message", e.what()}};
    code = 2;
  }
  summary["headline_numbers"] = out.headline;
  summary["verdicts"] = out.verdicts;
  for (const auto& [k, v] : out.extra.items()) summary[k] = v;
  summary["wall_time"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (code != 2) {
    std::ofstream csv(base + ".csv");
    if (!csv) {
      log << "error: cannot write " << base << ".csv\n";
      return 2;
    }
    write_csv(csv, out);
  }
  std::ofstream js(base + ".json");
  if (!js) {
    log << "error: cannot write " << base << ".json\n";
    return 2;
  }
  js << summary.dump(2) << '\n';
  return code;
}

}  // namespace bulksurf::cli
