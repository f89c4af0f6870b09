#pragma once

// Dirichlet problem on (0,pi)^2: five-point Laplacian in the two-step
// scheme, and the 2D postprocess (filtered boundary traces, two-stage
// first-order shift, tensor sine filter, reconstruction).

#include <functional>
#include <string>
#include <vector>

#include "fastrd/postprocess.hpp"
#include "fastrd/solver1d.hpp"
#include "fastrd/stepper.hpp"

namespace fastrd {

/// Five-point Laplacian at interior nodes; boundary nodes get 0.
inline Field2D apply_laplacian_5pt(const Field2D& u) {
  const Grid2D& g = u.grid();
  const int m = u.components();
  const double ihx2 = 1.0 / std::pow(g.x_axis().spacing(), 2);
  const double ihy2 = 1.0 / std::pow(g.y_axis().spacing(), 2);
  Field2D out(g, m);
  for (int j = 1; j < g.nodes_y() - 1; ++j)
    for (int i = 1; i < g.nodes_x() - 1; ++i)
      for (int c = 0; c < m; ++c)
        out(i, j, c) = (u(i - 1, j, c) - 2.0 * u(i, j, c) + u(i + 1, j, c)) * ihx2 +
                       (u(i, j - 1, c) - 2.0 * u(i, j, c) + u(i, j + 1, c)) * ihy2;
  return out;
}

namespace detail {

inline void set_boundary(Field2D& u, const BoundaryData2D& bc) {
  const Grid2D& g = u.grid();
  const int m = u.components();
  if (bc.components != m)
    throw InvalidArgument("boundary data has wrong component count");
  bc.check_compatible(g);
  const int nx = g.nodes_x(), ny = g.nodes_y();
  for (int i = 0; i < nx; ++i)
    for (int c = 0; c < m; ++c) {
      u(i, 0, c) = bc.bottom[i * m + c];
      u(i, ny - 1, c) = bc.top[i * m + c];
    }
  for (int j = 0; j < ny; ++j)
    for (int c = 0; c < m; ++c) {
      u(0, j, c) = bc.left[j * m + c];
      u(nx - 1, j, c) = bc.right[j * m + c];
    }
}

inline Field2D implicit_interior_solve(double coef, const Field2D& rhs,
                                       const Field2D& guess,
                                       const ReactionSystem& reaction, double t,
                                       const StepConfig& cfg) {
  const Grid2D& g = rhs.grid();
  Field2D out(g, rhs.components());
  for (int j = 1; j < g.nodes_y() - 1; ++j)
    for (int i = 1; i < g.nodes_x() - 1; ++i) {
      try {
        auto sol = solve_implicit_point(
            coef, rhs.node(i, j), reaction,
            Position{g.x_axis().x(i), g.y_axis().x(j)}, t, guess.node(i, j), cfg);
        std::copy(sol.u.begin(), sol.u.end(), out.node(i, j).begin());
      } catch (const NewtonDivergence& e) {
        throw NewtonDivergence(g.index(i, j), e.residual());
      }
    }
  return out;
}

}  // namespace detail

/// Two-step scheme with the five-point Laplacian; `bc` is data at t_{n+1}.
inline Field2D step2d(const SchemeState2D& state, const ReactionSystem& reaction,
                      const StepConfig& cfg, const BoundaryData2D& bc) {
  cfg.validate();
  if (cfg.dt != state.dt)
    throw InvalidArgument("step2d: StepConfig.dt differs from SchemeState.dt");
  if (reaction.components != state.u_curr.components())
    throw InvalidArgument("step2d: reaction and field component counts differ");
  const Field2D& un = state.u_curr;
  const Field2D& um = state.u_prev;
  const Field2D ln = apply_laplacian_5pt(un);
  const Field2D lm = apply_laplacian_5pt(um);
  const double inv_2dt = 0.5 / cfg.dt;

  Field2D rhs(un.grid(), un.components());
  auto r = rhs.values();
  auto a = un.values(), b = um.values(), la = ln.values(), lb = lm.values();
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = (4.0 * a[i] - b[i]) * inv_2dt + 2.0 * la[i] - lb[i];

  Field2D next = detail::implicit_interior_solve(3.0 * inv_2dt, rhs, un, reaction,
                                                 state.time + cfg.dt, cfg);
  detail::set_boundary(next, bc);
  return next;
}

/// (u^1 - u^0)/dt = Lap u^0 + f(u^1).
inline Field2D startup_step2d(const Field2D& u0, const ReactionSystem& reaction,
                              const StepConfig& cfg, const BoundaryData2D& bc,
                              double t0 = 0.0) {
  cfg.validate();
  const Field2D l0 = apply_laplacian_5pt(u0);
  const double inv_dt = 1.0 / cfg.dt;
  Field2D rhs(u0.grid(), u0.components());
  auto r = rhs.values();
  auto a = u0.values(), la = l0.values();
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] * inv_dt + la[i];
  Field2D next =
      detail::implicit_interior_solve(inv_dt, rhs, u0, reaction, t0 + cfg.dt, cfg);
  detail::set_boundary(next, bc);
  return next;
}

/// Scales the 2D sine coefficients of each component of `w` (zero on the
/// boundary) by sigma(kappa k/Nx) * sigma(kappa l/Ny).
inline Field2D apply_filter_2d(const Field2D& w, const FilterSpec& spec) {
  const Grid2D& g = w.grid();
  const int m = w.components();
  const int nx = g.x_axis().intervals(), ny = g.y_axis().intervals();
  const int ix = nx - 1, iy = ny - 1;
  std::vector<double> cx(ix), cy(iy);
  for (int k = 1; k < nx; ++k) cx[k - 1] = spec.removed(k, nx);
  for (int l = 1; l < ny; ++l) cy[l - 1] = spec.removed(l, ny);

  Field2D out(g, m);
  std::vector<double> interior(static_cast<std::size_t>(ix) * iy), coeffs;
  for (int c = 0; c < m; ++c) {
    for (int j = 1; j < ny; ++j)
      for (int i = 1; i < nx; ++i) interior[(j - 1) * ix + (i - 1)] = w(i, j, c);
    coeffs = interior;
    sine_coefficients_2d(coeffs, iy, ix);
    // 1 - s_k s_l = c_k + c_l - c_k c_l with c = 1 - s.
    for (int l = 0; l < iy; ++l)
      for (int k = 0; k < ix; ++k)
        coeffs[l * ix + k] *= cx[k] + cy[l] - cx[k] * cy[l];
    sine_synthesis_2d(coeffs, iy, ix);
    for (int j = 1; j < ny; ++j)
      for (int i = 1; i < nx; ++i)
        out(i, j, c) = interior[(j - 1) * ix + (i - 1)] - coeffs[(j - 1) * ix + (i - 1)];
  }
  return out;
}

namespace detail {

inline Field trace_field(const Grid1D& g, int m, std::span<const double> data) {
  Field f(g, m);
  std::copy(data.begin(), data.end(), f.values().begin());
  return f;
}

}  // namespace detail

/// Filters the four boundary traces with the 1D first-order pipeline; the
/// corner values are unchanged, so compatibility is kept.
inline BoundaryData2D filter_boundary_data(const BoundaryData2D& bc, const Grid2D& g,
                                           const FilterSpec& spec) {
  BoundaryData2D out = bc;
  const int m = bc.components;
  auto run = [&](const Grid1D& axis, std::vector<double>& data) {
    Field f = filter_boundary_trace(detail::trace_field(axis, m, data), spec);
    std::copy(f.values().begin(), f.values().end(), data.begin());
  };
  run(g.x_axis(), out.bottom);
  run(g.x_axis(), out.top);
  run(g.y_axis(), out.left);
  run(g.y_axis(), out.right);
  return out;
}

/// Full 2D postprocess. The edges of the result equal the filtered boundary
/// data exactly.
inline Field2D postprocess2d(const Field2D& u, const BoundaryData2D& bc,
                             const FilterSpec& spec) {
  const BoundaryData2D filtered_bc = filter_boundary_data(bc, u.grid(), spec);
  auto [w, co] = shift2d(u, filtered_bc);
  return unshift2d(apply_filter_2d(w, spec), co);
}

/// 2D analogue of max_retained_root_modulus over tensor modes (k, l) with
/// sigma_k sigma_l > cutoff.
inline double max_retained_root_modulus_2d(const Grid2D& g, double dt,
                                           const FilterSpec& spec, double cutoff = 1e-12) {
  const int nx = g.x_axis().intervals(), ny = g.y_axis().intervals();
  double worst = 0.0;
  for (int l = 1; l < ny; ++l)
    for (int k = 1; k < nx; ++k) {
      const double s = spec.factor(k, nx) * spec.factor(l, ny);
      if (s <= cutoff) continue;
      const double lam = discrete_laplacian_symbol(g.x_axis(), k) +
                         discrete_laplacian_symbol(g.y_axis(), l);
      worst = std::max(worst, max_root_modulus(dt * lam, s));
    }
  return worst;
}

struct Problem2D {
  Grid2D grid;
  ReactionSystem reaction;
  std::function<BoundaryData2D(double t)> boundary;
  Field2D initial;
  double t0 = 0.0;
};

/// Drives the 2D scheme; only first-order shifts exist in 2D.
class Solver2D {
 public:
  Solver2D(Problem2D problem, StepConfig step, bool filter = true,
           double kappa_fraction = 1.0,
           double blowup_threshold = default_blowup_threshold)
      : problem_(std::move(problem)),
        step_(step),
        filter_(filter),
        kappa_fraction_(kappa_fraction),
        blowup_threshold_(blowup_threshold),
        curr_(problem_.initial),
        prev_(problem_.initial),
        time_(problem_.t0) {
    step_.validate();
    if (!(problem_.initial.grid() == problem_.grid) ||
        problem_.initial.components() != problem_.reaction.components)
      throw InvalidArgument("Solver2D: initial field does not match grid or reaction");
  }

  double kappa() const {
    return kappa_fraction_ * kappa_critical_2d(step_.dt,
                                               problem_.grid.x_axis().spacing(),
                                               problem_.grid.y_axis().spacing());
  }

  void advance() {
    const double t_next = time_ + step_.dt;
    const BoundaryData2D bc = problem_.boundary(t_next);
    Field2D next = steps_ == 0
                       ? startup_step2d(curr_, problem_.reaction, step_, bc, time_)
                       : step2d(SchemeState2D(curr_, prev_, time_, step_.dt),
                                problem_.reaction, step_, bc);
    if (filter_) next = postprocess2d(next, bc, FilterSpec{8, sigma8, kappa()});
    prev_ = std::move(curr_);
    curr_ = std::move(next);
    time_ = t_next;
    ++steps_;
  }

  RunOutcome run(int n) {
    RunOutcome out;
    for (int i = 0; i < n; ++i) {
      try {
        advance();
      } catch (const NewtonDivergence& e) {
        out.stable = false;
        out.failure = e.what();
        break;
      }
      ++out.steps;
      if (blown_up(curr_, blowup_threshold_)) {
        out.stable = false;
        out.failure = "blow-up at step " + std::to_string(steps_);
        break;
      }
    }
    return out;
  }

  const Field2D& solution() const { return curr_; }
  double time() const { return time_; }
  int steps() const { return steps_; }

 private:
  Problem2D problem_;
  StepConfig step_;
  bool filter_;
  double kappa_fraction_;
  double blowup_threshold_;
  Field2D curr_;
  Field2D prev_;
  double time_;
  int steps_ = 0;
};

}  // namespace fastrd
