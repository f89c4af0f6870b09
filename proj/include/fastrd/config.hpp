#pragma once

// Flat key=value run configuration and CSV output of experiment rows.

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "fastrd/bench.hpp"

namespace fastrd {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string problem = "heat1d";  // heat1d | predprey1d | heat2d | custom
  int N = 64;
  int Ny = 0;  // 0: same as N
  std::optional<double> ratio;
  std::optional<double> dt;
  double T = 1.0;
  int shift_order = 1;
  bool filter = true;
  double kappa_fraction = 1.0;
  bool kappa_adapt = false;
  int n_subdomains = 1;
  int overlap = 4;
  bool overlap_adapt = false;
  std::string output = "-";

  // sweep / dd studies
  std::vector<int> sizes{32, 64};
  std::vector<double> ratios{0.25, 0.5, 1, 2, 3, 4, 6, 8};
  std::vector<int> shift_orders{1, 3};
  std::vector<int> overlaps{4, 8, 16};
  double max_ratio = 64.0;
  double resolution = 0.1;
  int stability_steps = 500;

  // predator-prey
  std::string pp_form = "printed";  // printed | lotka_volterra
  double u_left = 1.0, u_right = 1.0, v_left = 1.0, v_right = 1.0;
  bool excite = true;
  std::string trajectory;  // empty: no dump
  int trajectory_stride = 10;

  // custom: homogeneous heat equation, sin x + perturbation * sin((N-1) x)
  double perturbation = 1e-6;

  double newton_tol = 1e-12;
  int newton_max_iter = 25;
  bool timing = true;  // off: wall_ms written as 0, output byte-stable

  int ny() const { return Ny > 0 ? Ny : N; }
  bool two_d() const { return problem == "heat2d"; }

  /// Time step on the x-grid: dt, or ratio * h^2 / 3 (ratio 1 by default).
  double time_step() const {
    if (dt) return *dt;
    const double h = pi / N;
    return ratio.value_or(1.0) * h * h / 3.0;
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || p != end || !std::isfinite(out))
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  return out;
}

inline int parse_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || p != end)
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected on/off, got '" + v + "'");
}

template <typename T, typename P>
std::vector<T> parse_list(const std::string& key, const std::string& v, P parse) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse(key, trim(item)));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

inline std::string choice(const std::string& key, const std::string& v,
                          std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (v == a) return v;
  std::string msg = key + ": '" + v + "' is not one of";
  for (const char* a : allowed) msg += std::string(" ") + a;
  throw ConfigError(msg);
}

}  // namespace detail

struct ConfigKey {
  std::string name;
  std::string default_value;
  std::string help;
  std::function<void(RunConfig&, const std::string&)> set;
};

/// Every accepted key with its default and description.
inline const std::vector<ConfigKey>& config_keys() {
  using namespace detail;
  static const std::vector<ConfigKey> keys = {
      {"problem", "heat1d", "heat1d | predprey1d | heat2d | custom",
       [](RunConfig& c, const std::string& v) {
         c.problem = choice("problem", v, {"heat1d", "predprey1d", "heat2d", "custom"});
       }},
      {"N", "64", "grid intervals (x direction)",
       [](RunConfig& c, const std::string& v) { c.N = parse_int("N", v); }},
      {"Ny", "0", "grid intervals in y for heat2d (0: same as N)",
       [](RunConfig& c, const std::string& v) { c.Ny = parse_int("Ny", v); }},
      {"ratio", "1", "time step as 3 dt / h^2 (exclusive with dt)",
       [](RunConfig& c, const std::string& v) { c.ratio = parse_real("ratio", v); }},
      {"dt", "", "time step (exclusive with ratio)",
       [](RunConfig& c, const std::string& v) { c.dt = parse_real("dt", v); }},
      {"T", "1", "final time",
       [](RunConfig& c, const std::string& v) { c.T = parse_real("T", v); }},
      {"shift_order", "1", "1 | 3 (3 is 1D only)",
       [](RunConfig& c, const std::string& v) {
         c.shift_order = parse_int("shift_order", v);
       }},
      {"filter", "on", "on | off",
       [](RunConfig& c, const std::string& v) { c.filter = parse_bool("filter", v); }},
      {"kappa_fraction", "1", "kappa = kappa_fraction * kappa_c",
       [](RunConfig& c, const std::string& v) {
         c.kappa_fraction = parse_real("kappa_fraction", v);
       }},
      {"kappa_adapt", "off", "raise kappa 10% when the top retained band keeps growing",
       [](RunConfig& c, const std::string& v) {
         c.kappa_adapt = parse_bool("kappa_adapt", v);
       }},
      {"n_subdomains", "1", "number of overlapping subdomains",
       [](RunConfig& c, const std::string& v) {
         c.n_subdomains = parse_int("n_subdomains", v);
       }},
      {"overlap", "4", "overlap width in grid intervals",
       [](RunConfig& c, const std::string& v) { c.overlap = parse_int("overlap", v); }},
      {"overlap_adapt", "off", "widen the overlap when interface disagreement grows",
       [](RunConfig& c, const std::string& v) {
         c.overlap_adapt = parse_bool("overlap_adapt", v);
       }},
      {"output", "-", "CSV output path ('-' for stdout)",
       [](RunConfig& c, const std::string& v) { c.output = v; }},
      {"sizes", "32,64", "sweep: grid sizes",
       [](RunConfig& c, const std::string& v) {
         c.sizes = parse_list<int>("sizes", v, parse_int);
       }},
      {"ratios", "0.25,0.5,1,2,3,4,6,8", "sweep: ratios 3 dt / h^2",
       [](RunConfig& c, const std::string& v) {
         c.ratios = parse_list<double>("ratios", v, parse_real);
       }},
      {"shift_orders", "1,3", "sweep: shift orders",
       [](RunConfig& c, const std::string& v) {
         c.shift_orders = parse_list<int>("shift_orders", v, parse_int);
       }},
      {"overlaps", "4,8,16", "dd: overlaps to study",
       [](RunConfig& c, const std::string& v) {
         c.overlaps = parse_list<int>("overlaps", v, parse_int);
       }},
      {"max_ratio", "64", "dd: upper end of the ratio bisection",
       [](RunConfig& c, const std::string& v) {
         c.max_ratio = parse_real("max_ratio", v);
       }},
      {"resolution", "0.1", "dd: bisection resolution in ratio",
       [](RunConfig& c, const std::string& v) {
         c.resolution = parse_real("resolution", v);
       }},
      {"stability_steps", "500", "dd: steps a run must survive to count as stable",
       [](RunConfig& c, const std::string& v) {
         c.stability_steps = parse_int("stability_steps", v);
       }},
      {"pp_form", "printed", "predator-prey v equation: printed | lotka_volterra",
       [](RunConfig& c, const std::string& v) {
         c.pp_form = choice("pp_form", v, {"printed", "lotka_volterra"});
       }},
      {"u_left", "1", "predator-prey base level of u at x=0",
       [](RunConfig& c, const std::string& v) { c.u_left = parse_real("u_left", v); }},
      {"u_right", "1", "predator-prey base level of u at x=pi",
       [](RunConfig& c, const std::string& v) { c.u_right = parse_real("u_right", v); }},
      {"v_left", "1", "predator-prey base level of v at x=0",
       [](RunConfig& c, const std::string& v) { c.v_left = parse_real("v_left", v); }},
      {"v_right", "1", "predator-prey base level of v at x=pi",
       [](RunConfig& c, const std::string& v) { c.v_right = parse_real("v_right", v); }},
      {"excite", "on", "predator-prey boundary excitation (1 + cos t)",
       [](RunConfig& c, const std::string& v) { c.excite = parse_bool("excite", v); }},
      {"trajectory", "", "predator-prey: CSV path for the trajectory dump",
       [](RunConfig& c, const std::string& v) { c.trajectory = v; }},
      {"trajectory_stride", "10", "predator-prey: steps between trajectory samples",
       [](RunConfig& c, const std::string& v) {
         c.trajectory_stride = parse_int("trajectory_stride", v);
       }},
      {"perturbation", "1e-6", "custom: amplitude of the sin((N-1)x) perturbation",
       [](RunConfig& c, const std::string& v) {
         c.perturbation = parse_real("perturbation", v);
       }},
      {"newton_tol", "1e-12", "pointwise Newton tolerance",
       [](RunConfig& c, const std::string& v) {
         c.newton_tol = parse_real("newton_tol", v);
       }},
      {"newton_max_iter", "25", "pointwise Newton iteration cap",
       [](RunConfig& c, const std::string& v) {
         c.newton_max_iter = parse_int("newton_max_iter", v);
       }},
      {"timing", "on", "record wall_ms (off: written as 0)",
       [](RunConfig& c, const std::string& v) { c.timing = parse_bool("timing", v); }},
  };
  return keys;
}

using Settings = std::vector<std::pair<std::string, std::string>>;

/// Splits `key=value` tokens (whitespace or newline separated, '#' starts a
/// comment). Rejects unknown keys, and ratio together with dt.
inline Settings parse_settings(std::string_view text) {
  Settings out;
  std::stringstream lines{std::string(text)};
  std::string line;
  while (std::getline(lines, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::stringstream words(line);
    std::string tok;
    while (words >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos || eq == 0)
        throw ConfigError("expected key=value, got '" + tok + "'");
      out.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
    }
  }
  bool has_ratio = false, has_dt = false;
  for (const auto& [k, v] : out) {
    bool known = false;
    for (const auto& key : config_keys()) known = known || key.name == k;
    if (!known) throw ConfigError("unknown key '" + k + "'");
    has_ratio = has_ratio || k == "ratio";
    has_dt = has_dt || k == "dt";
  }
  if (has_ratio && has_dt)
    throw ConfigError("ratio, dt: give exactly one of them, not both");
  return out;
}

/// Checks cross-key constraints.
inline void validate(const RunConfig& c) {
  if (c.ratio && c.dt) throw ConfigError("ratio, dt: give exactly one of them, not both");
  if (c.shift_order != 1 && c.shift_order != 3)
    throw ConfigError("shift_order: must be 1 or 3");
  if (c.two_d() && c.shift_order == 3)
    throw ConfigError("shift_order: third-order shifts are 1D only (problem=heat2d)");
  for (int s : c.shift_orders)
    if (s != 1 && s != 3) throw ConfigError("shift_orders: entries must be 1 or 3");
  if (c.N < 4) throw ConfigError("N: must be >= 4");
  if (c.Ny != 0 && c.Ny < 4) throw ConfigError("Ny: must be 0 or >= 4");
  for (int n : c.sizes)
    if (n < 4) throw ConfigError("sizes: entries must be >= 4");
  if (c.ratio && !(*c.ratio > 0.0)) throw ConfigError("ratio: must be > 0");
  if (c.dt && !(*c.dt > 0.0)) throw ConfigError("dt: must be > 0");
  for (double r : c.ratios)
    if (!(r > 0.0)) throw ConfigError("ratios: entries must be > 0");
  if (!(c.T > 0.0)) throw ConfigError("T: must be > 0");
  if (!(c.kappa_fraction > 0.0)) throw ConfigError("kappa_fraction: must be > 0");
  if (c.n_subdomains < 1) throw ConfigError("n_subdomains: must be >= 1");
  if (c.overlap < 0) throw ConfigError("overlap: must be >= 0");
  if (c.two_d() && c.n_subdomains > 1)
    throw ConfigError("n_subdomains: decomposition is 1D only (problem=heat2d)");
  if (c.n_subdomains > 1 && !c.two_d()) {
    try {
      make_layout(Grid1D(c.N), c.n_subdomains, c.overlap);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("n_subdomains, overlap: ") + e.what());
    }
  }
  if (!(c.max_ratio > 0.1) || !(c.resolution > 0.0))
    throw ConfigError("max_ratio, resolution: must be > 0.1 and > 0");
  if (c.stability_steps < 1) throw ConfigError("stability_steps: must be >= 1");
  if (c.trajectory_stride < 1) throw ConfigError("trajectory_stride: must be >= 1");
  if (c.problem == "predprey1d" &&
      !(c.u_left > 0 && c.u_right > 0 && c.v_left > 0 && c.v_right > 0))
    throw ConfigError("u_left, u_right, v_left, v_right: base levels must be > 0");
  if (!(c.newton_tol > 0.0) || c.newton_max_iter < 1)
    throw ConfigError("newton_tol, newton_max_iter: must be positive");
}

/// Applies settings layers in order (later layers override earlier ones) and
/// validates the result. A later ratio replaces an earlier dt and vice versa.
inline RunConfig build_config(std::initializer_list<Settings> layers) {
  RunConfig c;
  for (const Settings& layer : layers)
    for (const auto& [k, v] : layer) {
      if (k == "ratio") c.dt.reset();
      if (k == "dt") c.ratio.reset();
      for (const auto& key : config_keys())
        if (key.name == k) key.set(c, detail::trim(v));
    }
  validate(c);
  return c;
}

inline RunConfig parse_config(std::string_view text) {
  return build_config({parse_settings(text)});
}

/// Shortest round-trip-exact decimal with 17 significant digits.
inline std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, p);
}

inline constexpr std::string_view csv_header =
    "N,dt,ratio,shift_order,kappa,n_subdomains,overlap,err_l2,err_linf,stable,steps,"
    "wall_ms";

inline void emit_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
  os << csv_header << '\n';
  for (const SweepRow& r : rows)
    os << r.N << ',' << format_real(r.dt) << ',' << format_real(r.ratio) << ','
       << r.shift_order << ',' << format_real(r.kappa) << ',' << r.n_subdomains << ','
       << r.overlap << ',' << format_real(r.err_l2) << ',' << format_real(r.err_linf)
       << ',' << (r.stable ? 1 : 0) << ',' << r.steps << ',' << format_real(r.wall_ms)
       << '\n';
}

/// Writes to `path`, or stdout for "-". Throws std::runtime_error when the
/// file cannot be written.
inline void emit_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  if (path == "-") {
    emit_csv(rows, std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  emit_csv(rows, f);
  f.flush();
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

/// Reads rows written by emit_csv.
inline std::vector<SweepRow> parse_csv(std::string_view text) {
  std::stringstream ss{std::string(text)};
  std::string line;
  if (!std::getline(ss, line) || line != csv_header)
    throw std::runtime_error("parse_csv: missing or unexpected header");
  auto real = [](const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return detail::parse_real("csv", s);
  };
  auto integer = [](const std::string& s) { return detail::parse_int("csv", s); };
  std::vector<SweepRow> rows;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 12) throw std::runtime_error("parse_csv: expected 12 fields");
    SweepRow r;
    r.N = integer(f[0]);
    r.dt = real(f[1]);
    r.ratio = real(f[2]);
    r.shift_order = integer(f[3]);
    r.kappa = real(f[4]);
    r.n_subdomains = integer(f[5]);
    r.overlap = integer(f[6]);
    r.err_l2 = real(f[7]);
    r.err_linf = real(f[8]);
    r.stable = integer(f[9]) != 0;
    r.steps = integer(f[10]);
    r.wall_ms = real(f[11]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace fastrd
