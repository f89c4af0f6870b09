#pragma once

// Semi-implicit two-step scheme
//
//   (3u^{n+1} - 4u^n + u^{n-1}) / (2dt) = 2 Dxx u^n - Dxx u^{n-1} + f(u^{n+1})
//
// Diffusion is explicit (extrapolated), the reaction is implicit and solved
// node by node with Newton on the m x m Jacobian.

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <span>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <cmath>
#include <vector>

#include "fastrd/core.hpp"

namespace fastrd {

struct StepConfig {
  double dt = 0.0;
  double newton_tol = 1e-12;
  int newton_max_iter = 25;

  void validate() const {
    if (!(dt > 0.0)) throw InvalidArgument("StepConfig: dt must be > 0");
    if (!(newton_tol > 0.0))
      throw InvalidArgument("StepConfig: newton_tol must be > 0");
    if (newton_max_iter < 1)
      throw InvalidArgument("StepConfig: newton_max_iter must be >= 1");
  }
};

/// A pointwise implicit solve failed to reach newton_tol.
class NewtonDivergence : public std::runtime_error {
 public:
  NewtonDivergence(int node, double residual)
      : std::runtime_error(message(node, residual)),
        node_(node),
        residual_(residual) {}

  int node() const { return node_; }
  double residual() const { return residual_; }

 private:
  static std::string message(int node, double residual) {
    std::ostringstream os;
    os << "Newton failed at node " << node << " (residual " << residual
       << "); reduce dt or improve the initial guess";
    return os.str();
  }
  int node_;
  double residual_;
};

/// Dirichlet data for one time level: per-component values at x = 0 and pi.
struct BoundaryValues1D {
  std::vector<double> left;
  std::vector<double> right;
};

struct NewtonResult {
  std::vector<double> u;
  int iterations = 0;
  double residual = 0.0;
};

/// Solves coef*u - f(x, t, u) = rhs at one node.
///
/// The residual is measured on the equation divided by coef, i.e. in the
/// units of u, and accepted once ||r||_inf <= tol * max(1, ||u||_inf).
/// Throws NewtonDivergence (with node = -1; callers re-tag it) otherwise.
inline NewtonResult solve_implicit_point(double coef, std::span<const double> rhs,
                                         const ReactionSystem& reaction,
                                         Position pos, double t,
                                         std::span<const double> guess,
                                         const StepConfig& cfg) {
  const int m = reaction.components;
  std::vector<double> u(guess.begin(), guess.end());
  std::vector<double> f(m), jac(static_cast<std::size_t>(m) * m);
  Eigen::VectorXd r(m);
  Eigen::MatrixXd a(m, m);

  auto residual = [&] {
    reaction.eval(pos, t, u, f);
    double norm = 0.0, scale = 1.0;
    for (int i = 0; i < m; ++i) {
      r[i] = u[i] - (f[i] + rhs[i]) / coef;
      norm = std::max(norm, std::abs(r[i]));
      scale = std::max(scale, std::abs(u[i]));
    }
    return std::pair{norm, scale};
  };

  auto [res, scale] = residual();
  int it = 0;
  while (!(res <= cfg.newton_tol * scale)) {
    if (it == cfg.newton_max_iter || !std::isfinite(res))
      throw NewtonDivergence(-1, res);
    reaction.jacobian(pos, t, u, jac);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        a(i, j) = (i == j ? 1.0 : 0.0) - jac[i * m + j] / coef;
    const Eigen::VectorXd du = (m == 1) ? Eigen::VectorXd(r / a(0, 0))
                                        : Eigen::VectorXd(a.partialPivLu().solve(r));
    for (int i = 0; i < m; ++i) u[i] -= du[i];
    ++it;
    std::tie(res, scale) = residual();
  }
  return {std::move(u), it, res};
}

/// Solves 3u/(2dt) - f(u) = rhs at one node; the initial guess defaults to 0.
inline std::vector<double> newton_point_solve(std::span<const double> rhs,
                                              const ReactionSystem& reaction,
                                              Position pos, double t,
                                              const StepConfig& cfg,
                                              std::span<const double> guess = {}) {
  std::vector<double> zero;
  if (guess.empty()) {
    zero.assign(rhs.size(), 0.0);
    guess = zero;
  }
  return solve_implicit_point(1.5 / cfg.dt, rhs, reaction, pos, t, guess, cfg).u;
}

/// Central second difference at interior nodes; boundary nodes get 0.
inline Field apply_dxx(const Field& u) {
  const Grid1D& g = u.grid();
  const int m = u.components();
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  Field out(g, m);
  for (int j = 1; j < g.intervals(); ++j)
    for (int c = 0; c < m; ++c)
      out(j, c) = (u(j - 1, c) - 2.0 * u(j, c) + u(j + 1, c)) * inv_h2;
  return out;
}

namespace detail {

inline void set_boundary(Field& u, const BoundaryValues1D& bc) {
  const int m = u.components();
  if (static_cast<int>(bc.left.size()) != m ||
      static_cast<int>(bc.right.size()) != m)
    throw InvalidArgument("boundary data has wrong component count");
  const int last = u.grid().intervals();
  for (int c = 0; c < m; ++c) {
    u(0, c) = bc.left[c];
    u(last, c) = bc.right[c];
  }
}

// Solves coef*u - f(u) = rhs at every interior node, Newton started from
// `guess`. Each node writes only its own values.
inline Field implicit_interior_solve(double coef, const Field& rhs,
                                     const Field& guess,
                                     const ReactionSystem& reaction, double t,
                                     const StepConfig& cfg) {
  const Grid1D& g = rhs.grid();
  Field out(g, rhs.components());
  for (int j = 1; j < g.intervals(); ++j) {
    try {
      auto sol = solve_implicit_point(coef, rhs.node(j), reaction,
                                      Position{g.x(j), 0.0}, t, guess.node(j), cfg);
      std::copy(sol.u.begin(), sol.u.end(), out.node(j).begin());
    } catch (const NewtonDivergence& e) {
      throw NewtonDivergence(j, e.residual());
    }
  }
  return out;
}

}  // namespace detail

/// Advances (u^n, u^{n-1}) to u^{n+1}; boundary nodes take `bc` (data at
/// t_{n+1}). Newton at each node starts from u^n.
inline Field step(const SchemeState& state, const ReactionSystem& reaction,
                  const StepConfig& cfg, const BoundaryValues1D& bc) {
  cfg.validate();
  if (cfg.dt != state.dt)
    throw InvalidArgument("step: StepConfig.dt differs from SchemeState.dt");
  if (reaction.components != state.u_curr.components())
    throw InvalidArgument("step: reaction and field component counts differ");

  const Field& un = state.u_curr;
  const Field& um = state.u_prev;
  const Field dn = apply_dxx(un);
  const Field dm = apply_dxx(um);
  const double inv_2dt = 0.5 / cfg.dt;

  Field rhs(un.grid(), un.components());
  auto r = rhs.values();
  auto a = un.values(), b = um.values(), da = dn.values(), db = dm.values();
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = (4.0 * a[i] - b[i]) * inv_2dt + 2.0 * da[i] - db[i];

  Field next = detail::implicit_interior_solve(3.0 * inv_2dt, rhs, un, reaction,
                                               state.time + cfg.dt, cfg);
  detail::set_boundary(next, bc);
  return next;
}

/// Produces u^1 from u^0: (u^1 - u^0)/dt = Dxx u^0 + f(u^1).
inline Field startup_step(const Field& u0, const ReactionSystem& reaction,
                          const StepConfig& cfg, const BoundaryValues1D& bc,
                          double t0 = 0.0) {
  cfg.validate();
  if (reaction.components != u0.components())
    throw InvalidArgument("startup_step: reaction and field component counts differ");
  const Field d0 = apply_dxx(u0);
  const double inv_dt = 1.0 / cfg.dt;
  Field rhs(u0.grid(), u0.components());
  auto r = rhs.values();
  auto a = u0.values(), da = d0.values();
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] * inv_dt + da[i];

  Field next =
      detail::implicit_interior_solve(inv_dt, rhs, u0, reaction, t0 + cfg.dt, cfg);
  detail::set_boundary(next, bc);
  return next;
}

/// Roots of the per-mode recurrence of the scheme with f = 0,
///   3 z^2 - (4 + 4a) z + (1 + 2a) = 0,   a = dt * Lambda_k,
/// with an optional per-step damping `sigma` applied to each new level
/// (the filtered recurrence z^2 - sigma(4+4a)/3 z + sigma(1+2a)/3 = 0).
inline std::array<std::complex<double>, 2> recurrence_roots(double a,
                                                            double sigma = 1.0) {
  const double p = sigma * (4.0 + 4.0 * a) / 3.0;
  const double q = sigma * (1.0 + 2.0 * a) / 3.0;
  const std::complex<double> disc = std::sqrt(std::complex<double>(p * p - 4.0 * q));
  return {(p + disc) / 2.0, (p - disc) / 2.0};
}

inline double max_root_modulus(double a, double sigma = 1.0) {
  auto z = recurrence_roots(a, sigma);
  return std::max(std::abs(z[0]), std::abs(z[1]));
}

}  // namespace fastrd
