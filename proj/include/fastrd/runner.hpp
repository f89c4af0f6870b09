#pragma once

// Executes a RunConfig: single runs, accuracy sweeps and overlap studies.

#include <chrono>
#include <fstream>
#include <string>
#include <vector>

#include "fastrd/config.hpp"

namespace fastrd {

struct RunReport {
  std::vector<SweepRow> rows;
  bool numerical_failure = false;
  std::vector<std::string> messages;  // warnings and failure reasons
};

inline RunOptions run_options(const RunConfig& c) {
  RunOptions o;
  o.filter.enabled = c.filter;
  o.filter.shift_order = c.shift_order == 3 ? ShiftOrder::third : ShiftOrder::first;
  o.filter.kappa_fraction = c.kappa_fraction;
  o.filter.kappa_adapt = c.kappa_adapt;
  o.dd.n_subdomains = c.n_subdomains;
  o.dd.overlap = c.overlap;
  o.dd.overlap_adapt = c.overlap_adapt;
  o.step.newton_tol = c.newton_tol;
  o.step.newton_max_iter = c.newton_max_iter;
  return o;
}

inline PredatorPreyCase predator_prey_case(const RunConfig& c) {
  PredatorPreyCase pp;
  pp.u_left = c.u_left;
  pp.u_right = c.u_right;
  pp.v_left = c.v_left;
  pp.v_right = c.v_right;
  pp.excite = c.excite;
  pp.form = c.pp_form == "lotka_volterra" ? PredatorPreyForm::lotka_volterra
                                          : PredatorPreyForm::printed;
  return pp;
}

namespace detail {

inline void write_trajectory(const std::vector<Snapshot>& traj, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << "t,x,u,v\n";
  for (const Snapshot& s : traj)
    for (int j = 0; j < s.u.nodes(); ++j)
      f << format_real(s.t) << ',' << format_real(s.u.grid().x(j)) << ','
        << format_real(s.u(j, 0)) << ',' << format_real(s.u(j, 1)) << '\n';
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

inline SweepRow run_1d(const RunConfig& c, Problem1D problem,
                       const std::function<Field(double)>& exact, RunReport& rep) {
  const Grid1D g = problem.grid;
  const RunOptions opt = run_options(c);
  const auto [dt, n] = steps_to(c.T, c.time_step());
  StepConfig sc = opt.step;
  sc.dt = dt;
  const auto t0 = std::chrono::steady_clock::now();
  Solver1D solver(std::move(problem), sc, opt.filter, opt.dd);
  SweepRow row = row_header(g, dt, opt, solver);
  const RunOutcome out = solver.run(n);
  row.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  row.stable = out.stable;
  row.steps = out.steps;
  if (out.stable && exact) {
    const ErrorNorms e = error_norms(solver.solution(), exact(solver.time()));
    row.err_l2 = e.l2;
    row.err_linf = e.linf;
  }
  if (!out.stable) rep.messages.push_back(out.failure);
  for (const auto& w : solver.warnings()) rep.messages.push_back(w);
  return row;
}

}  // namespace detail

/// One run per the config.
inline RunReport execute_run(const RunConfig& c) {
  RunReport rep;
  SweepRow row;
  if (c.problem == "heat1d") {
    const Grid1D g(c.N);
    ManufacturedCase mc;
    row = detail::run_1d(c, mc.problem(g),
                         [&](double t) { return mc.exact_field(g, t); }, rep);
  } else if (c.problem == "custom") {
    const Grid1D g(c.N);
    PerturbedHeatCase pc{c.perturbation};
    row = detail::run_1d(c, pc.problem(g),
                         [&](double t) { return pc.exact_field(g, t); }, rep);
  } else if (c.problem == "predprey1d") {
    const Grid1D g(c.N);
    const double ratio = 3.0 * c.time_step() / (g.spacing() * g.spacing());
    auto res = run_predator_prey(predator_prey_case(c), c.N, ratio, c.T, run_options(c),
                                 c.trajectory.empty() ? 0 : c.trajectory_stride);
    row = res.row;
    if (!c.trajectory.empty()) detail::write_trajectory(res.trajectory, c.trajectory);
    if (!row.stable) rep.messages.push_back("predator-prey run became unstable");
  } else {  // heat2d
    const Grid2D g(c.N, c.ny());
    ManufacturedCase2D mc;
    const auto [dt, n] = detail::steps_to(c.T, c.time_step());
    StepConfig sc = run_options(c).step;
    sc.dt = dt;
    const auto t0 = std::chrono::steady_clock::now();
    Solver2D solver(mc.problem(g), sc, c.filter, c.kappa_fraction);
    row.N = c.N;
    row.dt = dt;
    row.ratio = 3.0 * dt / std::pow(g.x_axis().spacing(), 2);
    row.shift_order = 1;
    row.kappa = c.filter ? solver.kappa() : 0.0;
    const RunOutcome out = solver.run(n);
    row.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    row.stable = out.stable;
    row.steps = out.steps;
    if (out.stable) {
      const ErrorNorms e = error_norms(solver.solution(), mc.exact_field(g, solver.time()));
      row.err_l2 = e.l2;
      row.err_linf = e.linf;
    } else {
      rep.messages.push_back(out.failure);
    }
  }
  rep.numerical_failure = !row.stable;
  if (!c.timing) row.wall_ms = 0.0;
  rep.rows.push_back(row);
  return rep;
}

/// Accuracy sweep on the manufactured heat case.
inline RunReport execute_sweep(const RunConfig& c) {
  if (c.problem != "heat1d")
    throw ConfigError("problem: sweep runs the manufactured heat1d case only");
  std::vector<ShiftOrder> orders;
  for (int s : c.shift_orders) orders.push_back(s == 3 ? ShiftOrder::third : ShiftOrder::first);
  RunReport rep;
  rep.rows = run_accuracy_sweep(manufactured_heat_case(), c.sizes, c.ratios, orders,
                                run_options(c), c.T);
  for (auto& r : rep.rows)
    if (!c.timing) r.wall_ms = 0.0;
  return rep;
}

/// Maximal stable ratio per overlap on the manufactured heat case.
inline RunReport execute_dd(const RunConfig& c) {
  if (c.problem != "heat1d")
    throw ConfigError("problem: dd runs the manufactured heat1d case only");
  DdStudyOptions o;
  o.max_ratio = c.max_ratio;
  o.resolution = c.resolution;
  o.steps = c.stability_steps;
  o.shift_order = c.shift_order == 3 ? ShiftOrder::third : ShiftOrder::first;
  o.kappa_fraction = c.kappa_fraction;
  RunReport rep;
  for (const DdStudyRow& d :
       run_dd_study(manufactured_heat_case(), c.N, c.n_subdomains, c.overlaps, o)) {
    SweepRow r = d.row;
    if (!c.timing) r.wall_ms = 0.0;
    if (d.saturated)
      rep.messages.push_back("overlap " + std::to_string(r.overlap) +
                             " is at or above the cap for N=" + std::to_string(c.N) +
                             ", n_subdomains=" + std::to_string(c.n_subdomains) +
                             " (saturated)");
    rep.rows.push_back(r);
  }
  return rep;
}

}  // namespace fastrd
