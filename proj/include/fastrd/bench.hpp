#pragma once

// Test problems and experiment harness: the manufactured heat solution,
// the excited predator-prey system, accuracy sweeps over 3dt/h^2 and the
// overlap study for the decomposed postprocess.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <thread>
#include <vector>

#include "fastrd/solver1d.hpp"
#include "fastrd/solver2d.hpp"

namespace fastrd {

/// Discrete L2 (trapezoidal weights) and sup norms of u - reference,
/// accumulated over all components.
struct ErrorNorms {
  double l2 = 0.0;
  double linf = 0.0;
};

inline ErrorNorms error_norms(const Field& u, const Field& reference) {
  if (!u.compatible(reference))
    throw InvalidArgument("error_norms: fields live on different grids");
  const Grid1D& g = u.grid();
  const int m = u.components();
  ErrorNorms e;
  double sum = 0.0;
  for (int j = 0; j < g.nodes(); ++j) {
    const double w = (j == 0 || j == g.intervals()) ? 0.5 : 1.0;
    for (int c = 0; c < m; ++c) {
      const double d = u(j, c) - reference(j, c);
      sum += w * d * d;
      e.linf = std::max(e.linf, std::abs(d));
    }
  }
  e.l2 = std::sqrt(sum * g.spacing());
  return e;
}

inline ErrorNorms error_norms(const Field2D& u, const Field2D& reference) {
  if (!u.compatible(reference))
    throw InvalidArgument("error_norms: fields live on different grids");
  const Grid2D& g = u.grid();
  const int m = u.components();
  ErrorNorms e;
  double sum = 0.0;
  for (int j = 0; j < g.nodes_y(); ++j) {
    const double wy = (j == 0 || j == g.nodes_y() - 1) ? 0.5 : 1.0;
    for (int i = 0; i < g.nodes_x(); ++i) {
      const double w = wy * ((i == 0 || i == g.nodes_x() - 1) ? 0.5 : 1.0);
      for (int c = 0; c < m; ++c) {
        const double d = u(i, j, c) - reference(i, j, c);
        sum += w * d * d;
        e.linf = std::max(e.linf, std::abs(d));
      }
    }
  }
  e.l2 = std::sqrt(sum * g.x_axis().spacing() * g.y_axis().spacing());
  return e;
}

/// u*(x,t) = cos(t) ((x/pi)^4 + cos 3x), forced by s = u*_t - u*_xx.
struct ManufacturedCase {
  static double profile(double x) { return std::pow(x / pi, 4) + std::cos(3.0 * x); }
  static double profile_xx(double x) {
    return 12.0 * x * x / std::pow(pi, 4) - 9.0 * std::cos(3.0 * x);
  }

  double exact(double x, double t) const { return std::cos(t) * profile(x); }
  double exact_t(double x, double t) const { return -std::sin(t) * profile(x); }
  double exact_xx(double x, double t) const { return std::cos(t) * profile_xx(x); }
  double source(double x, double t) const { return exact_t(x, t) - exact_xx(x, t); }

  BoundaryValues1D boundary(double t) const { return {{exact(0.0, t)}, {exact(pi, t)}}; }

  ReactionSystem reaction() const {
    return source_reaction([this](Position p, double t) { return source(p.x, t); });
  }

  Field exact_field(const Grid1D& g, double t) const {
    return Field::sample(g, 1, [&](double x, int) { return exact(x, t); });
  }

  Problem1D problem(const Grid1D& g) const {
    return {g, reaction(), [this](double t) { return boundary(t); }, exact_field(g, 0.0),
            0.0};
  }
};

inline ManufacturedCase manufactured_heat_case() { return {}; }

/// Homogeneous heat equation from sin x + perturbation * sin((N-1) x). The
/// reference is the exact solution of the spatially discrete problem, so only
/// time stepping and filtering contribute to the error.
struct PerturbedHeatCase {
  double perturbation = 1e-6;

  Field exact_field(const Grid1D& g, double t) const {
    const int top = g.intervals() - 1;
    const double a1 = std::exp(discrete_laplacian_symbol(g, 1) * t);
    const double a2 = perturbation * std::exp(discrete_laplacian_symbol(g, top) * t);
    return Field::sample(g, 1, [&](double x, int) {
      return a1 * std::sin(x) + a2 * std::sin(top * x);
    });
  }

  Problem1D problem(const Grid1D& g) const {
    return {g, zero_reaction(1),
            [](double) { return BoundaryValues1D{{0.0}, {0.0}}; }, exact_field(g, 0.0),
            0.0};
  }
};

/// u*(x,y,t) = cos(t) p(x) q(y), p = (x/pi)^4 + cos 3x, q = cos 2y + (y/pi)^2.
struct ManufacturedCase2D {
  static double q(double y) { return std::cos(2.0 * y) + std::pow(y / pi, 2); }
  static double q_yy(double y) { return -4.0 * std::cos(2.0 * y) + 2.0 / (pi * pi); }

  double exact(double x, double y, double t) const {
    return std::cos(t) * ManufacturedCase::profile(x) * q(y);
  }
  double source(double x, double y, double t) const {
    const double p = ManufacturedCase::profile(x), pxx = ManufacturedCase::profile_xx(x);
    return -std::sin(t) * p * q(y) - std::cos(t) * (pxx * q(y) + p * q_yy(y));
  }

  BoundaryData2D boundary(const Grid2D& g, double t) const {
    return BoundaryData2D::sample(g, 1,
                                  [&](double x, double y, int) { return exact(x, y, t); });
  }
  Field2D exact_field(const Grid2D& g, double t) const {
    return Field2D::sample(g, 1, [&](double x, double y, int) { return exact(x, y, t); });
  }
  Problem2D problem(const Grid2D& g) const {
    return {g,
            source_reaction([this](Position p, double t) { return source(p.x, p.y, t); }),
            [this, g](double t) { return boundary(g, t); }, exact_field(g, 0.0), 0.0};
  }
};

/// Sign convention of the prey-predator coupling in the v equation.
enum class PredatorPreyForm {
  printed,        // v_t = v_xx - c u - d u v
  lotka_volterra  // v_t = v_xx - c v + d u v
};

/// u_t = u_xx + a u - b u v together with one of the two v equations, with
/// boundary values base * (1 + cos t) when excited, base otherwise.
struct PredatorPreyCase {
  double a = 1.2, b = 1.0, c = 0.1, d = 0.2;
  double u_left = 1.0, u_right = 1.0, v_left = 1.0, v_right = 1.0;
  bool excite = true;
  PredatorPreyForm form = PredatorPreyForm::printed;

  void rates(std::span<const double> y, std::span<double> f) const {
    const double u = y[0], v = y[1];
    f[0] = a * u - b * u * v;
    f[1] = form == PredatorPreyForm::printed ? -c * u - d * u * v : -c * v + d * u * v;
  }

  ReactionSystem reaction() const {
    PredatorPreyCase self = *this;
    return {2,
            [self](Position, double, std::span<const double> y, std::span<double> f) {
              self.rates(y, f);
            },
            [self](Position, double, std::span<const double> y, std::span<double> j) {
              const double u = y[0], v = y[1];
              j[0] = self.a - self.b * v;
              j[1] = -self.b * u;
              if (self.form == PredatorPreyForm::printed) {
                j[2] = -self.c - self.d * v;
                j[3] = -self.d * u;
              } else {
                j[2] = self.d * v;
                j[3] = -self.c + self.d * u;
              }
            }};
  }

  BoundaryValues1D boundary(double t) const {
    const double s = excite ? 1.0 + std::cos(t) : 1.0;
    return {{u_left * s, v_left * s}, {u_right * s, v_right * s}};
  }

  /// Linear interpolation of the t = 0 boundary values.
  Problem1D problem(const Grid1D& g) const {
    const auto bc = boundary(0.0);
    Field u0 = Field::sample(g, 2, [&](double x, int comp) {
      return bc.left[comp] + (bc.right[comp] - bc.left[comp]) * x / pi;
    });
    PredatorPreyCase self = *this;
    return {g, reaction(), [self](double t) { return self.boundary(t); }, std::move(u0),
            0.0};
  }
};

/// One experiment row (CSV columns of the CLI).
struct SweepRow {
  int N = 0;
  double dt = 0.0;
  double ratio = 0.0;
  int shift_order = 1;
  double kappa = 0.0;  // 0 when the filter is off
  int n_subdomains = 1;
  int overlap = 0;
  double err_l2 = std::numeric_limits<double>::quiet_NaN();
  double err_linf = std::numeric_limits<double>::quiet_NaN();
  bool stable = true;
  int steps = 0;
  double wall_ms = 0.0;
};

using SweepResult = std::vector<SweepRow>;

struct RunOptions {
  FilterConfig filter{};
  DecompositionConfig dd{};
  StepConfig step{};  // dt is overwritten per run
};

inline double ratio_to_dt(double ratio, double h) { return ratio * h * h / 3.0; }

namespace detail {

// dt adjusted down so that an integer number of steps lands on T.
inline std::pair<double, int> steps_to(double T, double dt_nominal) {
  const int n = std::max(1, static_cast<int>(std::ceil(T / dt_nominal - 1e-9)));
  return {T / n, n};
}

inline SweepRow row_header(const Grid1D& g, double dt, const RunOptions& opt,
                           const Solver1D& s) {
  SweepRow row;
  row.N = g.intervals();
  row.dt = dt;
  row.ratio = 3.0 * dt / (g.spacing() * g.spacing());
  row.shift_order = static_cast<int>(opt.filter.shift_order);
  row.kappa = opt.filter.enabled ? s.kappa() : 0.0;
  row.n_subdomains = opt.dd.n_subdomains;
  row.overlap = opt.dd.n_subdomains > 1 ? s.layout().overlap : 0;
  return row;
}

// Evaluates fn(i) for i in [0, n) on a few threads; result order is fixed.
template <typename Fn>
auto parallel_map(std::size_t n, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using R = decltype(fn(std::size_t{}));
  std::vector<R> out(n);
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w)
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < n; i += workers) out[i] = fn(i);
    }));
  for (auto& j : jobs) j.get();
  return out;
}

}  // namespace detail

/// Integrates the manufactured case to T on grid N at the given ratio.
inline SweepRow run_manufactured(const ManufacturedCase& mc, int N, double ratio,
                                 double T, const RunOptions& opt) {
  const Grid1D g(N);
  const auto [dt, n] = detail::steps_to(T, ratio_to_dt(ratio, g.spacing()));
  StepConfig sc = opt.step;
  sc.dt = dt;
  const auto t0 = std::chrono::steady_clock::now();
  Solver1D solver(mc.problem(g), sc, opt.filter, opt.dd);
  SweepRow row = detail::row_header(g, dt, opt, solver);
  const RunOutcome out = solver.run(n);
  row.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  row.stable = out.stable;
  row.steps = out.steps;
  if (out.stable) {
    const ErrorNorms e = error_norms(solver.solution(), mc.exact_field(g, solver.time()));
    row.err_l2 = e.l2;
    row.err_linf = e.linf;
  }
  return row;
}

/// Grid sizes x ratios x shift orders, each integrated to T (default 1).
/// Failed runs are recorded as unstable rows.
inline SweepResult run_accuracy_sweep(const ManufacturedCase& mc,
                                      const std::vector<int>& grid_sizes,
                                      const std::vector<double>& ratios,
                                      const std::vector<ShiftOrder>& shift_orders,
                                      const RunOptions& base = {}, double T = 1.0) {
  struct Job {
    int N;
    double ratio;
    ShiftOrder order;
  };
  std::vector<Job> jobs;
  for (int N : grid_sizes)
    for (ShiftOrder o : shift_orders)
      for (double r : ratios) jobs.push_back({N, r, o});
  return detail::parallel_map(jobs.size(), [&](std::size_t i) {
    RunOptions opt = base;
    opt.filter.shift_order = jobs[i].order;
    try {
      return run_manufactured(mc, jobs[i].N, jobs[i].ratio, T, opt);
    } catch (const std::exception&) {
      SweepRow row;
      row.N = jobs[i].N;
      row.ratio = jobs[i].ratio;
      row.shift_order = static_cast<int>(jobs[i].order);
      row.stable = false;
      return row;
    }
  });
}

struct Snapshot {
  double t = 0.0;
  Field u;
};

struct PredatorPreyResult {
  SweepRow row;
  double min_u = std::numeric_limits<double>::infinity();
  double min_v = std::numeric_limits<double>::infinity();
  std::vector<Snapshot> trajectory;
};

/// Integrates the predator-prey system to T and tracks min u, min v over the
/// run. Every `stride`-th level is kept in the trajectory (0 keeps none).
inline PredatorPreyResult run_predator_prey(const PredatorPreyCase& pp, int N,
                                            double ratio, double T,
                                            const RunOptions& opt = {}, int stride = 0) {
  const Grid1D g(N);
  const auto [dt, n] = detail::steps_to(T, ratio_to_dt(ratio, g.spacing()));
  StepConfig sc = opt.step;
  sc.dt = dt;
  const auto t0 = std::chrono::steady_clock::now();
  Solver1D solver(pp.problem(g), sc, opt.filter, opt.dd);
  PredatorPreyResult res;
  res.row = detail::row_header(g, dt, opt, solver);
  auto track = [&](const Field& u) {
    for (int j = 0; j < u.nodes(); ++j) {
      res.min_u = std::min(res.min_u, u(j, 0));
      res.min_v = std::min(res.min_v, u(j, 1));
    }
  };
  track(solver.solution());
  if (stride > 0) res.trajectory.push_back({solver.time(), solver.solution()});
  for (int i = 0; i < n; ++i) {
    const RunOutcome out = solver.run(1);
    if (!out.stable) {
      res.row.stable = false;
      break;
    }
    ++res.row.steps;
    track(solver.solution());
    if (stride > 0 && (i + 1) % stride == 0)
      res.trajectory.push_back({solver.time(), solver.solution()});
  }
  res.row.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  return res;
}

struct SteadyStateResult {
  bool reached = false;
  int steps = 0;
  double update_norm = 0.0;  // ||u^{n+1} - u^n||_inf / dt at the last step
};

/// Steps until ||u^{n+1} - u^n||_inf / dt < tol (or max_steps / failure).
inline SteadyStateResult run_to_steady_state(Problem1D problem, double ratio,
                                             double tol, int max_steps,
                                             const RunOptions& opt = {}) {
  StepConfig sc = opt.step;
  sc.dt = ratio_to_dt(ratio, problem.grid.spacing());
  Solver1D solver(std::move(problem), sc, opt.filter, opt.dd);
  SteadyStateResult res;
  for (int i = 0; i < max_steps; ++i) {
    if (!solver.run(1).stable) return res;
    res.steps = i + 1;
    double d = 0.0;
    auto a = solver.solution().values(), b = solver.previous().values();
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
    res.update_norm = d / sc.dt;
    if (i > 0 && res.update_norm < tol) {
      res.reached = true;
      return res;
    }
  }
  return res;
}

/// Largest ratio in [lo, hi] for which `stable(ratio)` holds, by bisection to
/// `resolution`. Returns lo when lo itself is unstable (caller checks) and hi
/// when hi is stable.
inline double bisect_max_stable(const std::function<bool(double)>& stable, double lo,
                                double hi, double resolution) {
  if (stable(hi)) return hi;
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    (stable(mid) ? lo : hi) = mid;
  }
  return lo;
}

struct DdStudyRow {
  SweepRow row;  // ratio = maximal stable ratio found
  bool saturated = false;
};

struct DdStudyOptions {
  double min_ratio = 0.1;
  double max_ratio = 64.0;
  double resolution = 0.1;
  int steps = 500;
  ShiftOrder shift_order = ShiftOrder::first;
  double kappa_fraction = 1.0;
};

/// True when the manufactured heat problem survives `steps` steps.
inline bool manufactured_stable(const ManufacturedCase& mc, int N, double ratio,
                                int steps, const RunOptions& opt) {
  const Grid1D g(N);
  StepConfig sc = opt.step;
  sc.dt = ratio_to_dt(ratio, g.spacing());
  Solver1D solver(mc.problem(g), sc, opt.filter, opt.dd);
  return solver.run(steps).stable;
}

/// Maximal stable ratio per overlap for the decomposed postprocess.
inline std::vector<DdStudyRow> run_dd_study(const ManufacturedCase& mc, int N,
                                            int n_subdomains,
                                            const std::vector<int>& overlaps,
                                            const DdStudyOptions& o = {}) {
  const Grid1D g(N);
  return detail::parallel_map(overlaps.size(), [&](std::size_t i) {
    RunOptions opt;
    opt.filter.shift_order = o.shift_order;
    opt.filter.kappa_fraction = o.kappa_fraction;
    opt.dd = {n_subdomains, n_subdomains > 1 ? overlaps[i] : 2, false, {}};
    const auto t0 = std::chrono::steady_clock::now();
    const double best = bisect_max_stable(
        [&](double r) { return manufactured_stable(mc, N, r, o.steps, opt); },
        o.min_ratio, o.max_ratio, o.resolution);
    DdStudyRow out;
    SweepRow& row = out.row;
    row.N = N;
    row.ratio = best;
    row.dt = ratio_to_dt(best, g.spacing());
    row.shift_order = static_cast<int>(o.shift_order);
    row.kappa = o.kappa_fraction * kappa_critical(row.dt, g.spacing());
    row.n_subdomains = n_subdomains;
    row.overlap = n_subdomains > 1 ? overlaps[i] : 0;
    row.stable = manufactured_stable(mc, N, best, o.steps, opt);
    row.steps = o.steps;
    row.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    const SubdomainLayout layout = make_layout(g, n_subdomains, opt.dd.overlap);
    out.saturated = n_subdomains > 1 && overlaps[i] >= layout.max_overlap();
    return out;
  });
}

}  // namespace fastrd
