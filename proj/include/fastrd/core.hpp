#pragma once

// Shared domain types: uniform grids on (0,pi) and (0,pi)^2, node-major
// multi-component fields, the pointwise reaction interface and the
// two-level state carried by the time stepper.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fastrd {

inline constexpr double pi = std::numbers::pi;

/// Raised when a caller hands an operation inputs outside its contract.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Uniform grid on [0, pi] with both endpoints: x_j = j*pi/N, j = 0..N.
class Grid1D {
 public:
  static constexpr int min_intervals = 4;

  explicit Grid1D(int n_intervals) : n_(n_intervals) {
    if (n_intervals < min_intervals)
      throw InvalidArgument("Grid1D: n_intervals must be >= 4, got " +
                            std::to_string(n_intervals));
    h_ = pi / n_;
  }

  int intervals() const { return n_; }
  int nodes() const { return n_ + 1; }
  double spacing() const { return h_; }

  /// Node coordinate; the last node is exactly pi.
  double x(int j) const { return j == n_ ? pi : j * h_; }

  bool operator==(const Grid1D&) const = default;

 private:
  int n_;
  double h_;
};

inline Grid1D make_grid_1d(int n_intervals) { return Grid1D(n_intervals); }

/// Tensor-product grid on [0, pi]^2; node (i, j) sits at (x_i, y_j).
class Grid2D {
 public:
  Grid2D(int nx, int ny) : gx_(nx), gy_(ny) {}

  const Grid1D& x_axis() const { return gx_; }
  const Grid1D& y_axis() const { return gy_; }
  int nodes_x() const { return gx_.nodes(); }
  int nodes_y() const { return gy_.nodes(); }
  int nodes() const { return gx_.nodes() * gy_.nodes(); }
  /// Linear node index; x varies fastest.
  int index(int i, int j) const { return i + gx_.nodes() * j; }

  bool operator==(const Grid2D&) const = default;

 private:
  Grid1D gx_;
  Grid1D gy_;
};

/// Symbol of the second difference on sin(kx): 2 h^-2 (cos(hk) - 1).
inline double discrete_laplacian_symbol(const Grid1D& grid, int k) {
  const double h = grid.spacing();
  return 2.0 * (std::cos(h * k) - 1.0) / (h * h);
}

namespace detail {

// Node-major storage: the m values of one node are contiguous.
class NodeMajorStorage {
 public:
  NodeMajorStorage(int nodes, int components, double fill)
      : nodes_(nodes), m_(components) {
    if (components < 1)
      throw InvalidArgument("field needs at least one component");
    data_.assign(static_cast<std::size_t>(nodes) * components, fill);
  }

  int components() const { return m_; }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](double v) { return std::isfinite(v); });
  }
  double sup_norm() const {
    double s = 0.0;
    for (double v : data_) s = std::max(s, std::abs(v));
    return s;
  }

 protected:
  std::span<double> node_span(int node) {
    return {data_.data() + static_cast<std::size_t>(node) * m_,
            static_cast<std::size_t>(m_)};
  }
  std::span<const double> node_span(int node) const {
    return {data_.data() + static_cast<std::size_t>(node) * m_,
            static_cast<std::size_t>(m_)};
  }
  double& at(int node, int c) {
    return data_[static_cast<std::size_t>(node) * m_ + c];
  }
  double at(int node, int c) const {
    return data_[static_cast<std::size_t>(node) * m_ + c];
  }

  int nodes_;
  int m_;
  std::vector<double> data_;
};

}  // namespace detail

/// m-component solution values on the nodes of a Grid1D.
class Field : public detail::NodeMajorStorage {
 public:
  explicit Field(const Grid1D& grid, int components = 1, double fill = 0.0)
      : NodeMajorStorage(grid.nodes(), components, fill), grid_(grid) {}

  /// Samples fn(x, component) at every node.
  template <typename Fn>
  static Field sample(const Grid1D& grid, int components, Fn&& fn) {
    Field f(grid, components);
    for (int j = 0; j < grid.nodes(); ++j)
      for (int c = 0; c < components; ++c) f(j, c) = fn(grid.x(j), c);
    return f;
  }

  const Grid1D& grid() const { return grid_; }
  int nodes() const { return nodes_; }

  double& operator()(int j, int c = 0) { return at(j, c); }
  double operator()(int j, int c = 0) const { return at(j, c); }
  std::span<double> node(int j) { return node_span(j); }
  std::span<const double> node(int j) const { return node_span(j); }

  bool compatible(const Field& other) const {
    return grid_ == other.grid_ && m_ == other.m_;
  }

 private:
  Grid1D grid_;
};

/// m-component solution values on the nodes of a Grid2D.
class Field2D : public detail::NodeMajorStorage {
 public:
  explicit Field2D(const Grid2D& grid, int components = 1, double fill = 0.0)
      : NodeMajorStorage(grid.nodes(), components, fill), grid_(grid) {}

  template <typename Fn>
  static Field2D sample(const Grid2D& grid, int components, Fn&& fn) {
    Field2D f(grid, components);
    for (int j = 0; j < grid.nodes_y(); ++j)
      for (int i = 0; i < grid.nodes_x(); ++i)
        for (int c = 0; c < components; ++c)
          f(i, j, c) = fn(grid.x_axis().x(i), grid.y_axis().x(j), c);
    return f;
  }

  const Grid2D& grid() const { return grid_; }
  int nodes() const { return nodes_; }

  double& operator()(int i, int j, int c = 0) {
    return at(grid_.index(i, j), c);
  }
  double operator()(int i, int j, int c = 0) const {
    return at(grid_.index(i, j), c);
  }
  std::span<double> node(int i, int j) { return node_span(grid_.index(i, j)); }
  std::span<const double> node(int i, int j) const {
    return node_span(grid_.index(i, j));
  }

  bool compatible(const Field2D& other) const {
    return grid_ == other.grid_ && m_ == other.m_;
  }

 private:
  Grid2D grid_;
};

/// Dirichlet data on the four edges of (0,pi)^2 at one time level, sampled
/// on the grid lines, node-major per component: bottom = g_0(x) (y = 0),
/// top = g_pi(x) (y = pi), left = h_0(y) (x = 0), right = h_pi(y) (x = pi).
struct BoundaryData2D {
  int components = 1;
  std::vector<double> bottom, top, left, right;

  static BoundaryData2D zeros(const Grid2D& g, int m) {
    BoundaryData2D b;
    b.components = m;
    b.bottom.assign(static_cast<std::size_t>(g.nodes_x()) * m, 0.0);
    b.top = b.bottom;
    b.left.assign(static_cast<std::size_t>(g.nodes_y()) * m, 0.0);
    b.right = b.left;
    return b;
  }

  /// Traces of fn(x, y, component) on the four edges.
  template <typename Fn>
  static BoundaryData2D sample(const Grid2D& g, int m, Fn&& fn) {
    BoundaryData2D b = zeros(g, m);
    const Grid1D& gx = g.x_axis();
    const Grid1D& gy = g.y_axis();
    for (int i = 0; i < g.nodes_x(); ++i)
      for (int c = 0; c < m; ++c) {
        b.bottom[i * m + c] = fn(gx.x(i), 0.0, c);
        b.top[i * m + c] = fn(gx.x(i), pi, c);
      }
    for (int j = 0; j < g.nodes_y(); ++j)
      for (int c = 0; c < m; ++c) {
        b.left[j * m + c] = fn(0.0, gy.x(j), c);
        b.right[j * m + c] = fn(pi, gy.x(j), c);
      }
    return b;
  }

  /// Rejects corner mismatches, g_{0/pi}(0) = h_0(0/pi) and
  /// g_{0/pi}(pi) = h_pi(0/pi), above `tol`.
  void check_compatible(const Grid2D& g, double tol = 1e-10) const {
    const int m = components;
    const int lx = g.nodes_x() - 1, ly = g.nodes_y() - 1;
    if (bottom.size() != static_cast<std::size_t>(g.nodes_x()) * m ||
        top.size() != bottom.size() ||
        left.size() != static_cast<std::size_t>(g.nodes_y()) * m ||
        right.size() != left.size())
      throw InvalidArgument("BoundaryData2D: trace sizes do not match the grid");
    for (int c = 0; c < m; ++c) {
      const double d = std::max(
          {std::abs(bottom[c] - left[c]), std::abs(top[c] - left[ly * m + c]),
           std::abs(bottom[lx * m + c] - right[c]),
           std::abs(top[lx * m + c] - right[ly * m + c])});
      if (d > tol)
        throw InvalidArgument("BoundaryData2D: incompatible corner data (mismatch " +
                              std::to_string(d) + ")");
    }
  }
};

/// Spatial location handed to x-dependent reaction terms (y = 0 in 1D).
struct Position {
  double x = 0.0;
  double y = 0.0;
};

/// Pointwise nonlinear term f(x, t, u) of an m-species system together with
/// its m x m Jacobian (row-major, jac[i*m + j] = d f_i / d u_j). Only this
/// node-local Jacobian is ever formed.
struct ReactionSystem {
  using EvalFn = std::function<void(Position, double t, std::span<const double> u,
                                    std::span<double> f)>;
  using JacobianFn = std::function<void(Position, double t,
                                        std::span<const double> u,
                                        std::span<double> jac)>;

  int components = 1;
  EvalFn eval;
  JacobianFn jacobian;
};

/// f == 0.
inline ReactionSystem zero_reaction(int components = 1) {
  return {components,
          [](Position, double, std::span<const double>, std::span<double> f) {
            std::fill(f.begin(), f.end(), 0.0);
          },
          [](Position, double, std::span<const double>, std::span<double> j) {
            std::fill(j.begin(), j.end(), 0.0);
          }};
}

/// Scalar f(u) = rate * u.
inline ReactionSystem linear_reaction(double rate) {
  return {1,
          [rate](Position, double, std::span<const double> u,
                 std::span<double> f) { f[0] = rate * u[0]; },
          [rate](Position, double, std::span<const double>,
                 std::span<double> j) { j[0] = rate; }};
}

/// Scalar forcing f(x, t, u) = s(x, t), independent of u.
inline ReactionSystem source_reaction(std::function<double(Position, double)> s) {
  return {1,
          [s = std::move(s)](Position p, double t, std::span<const double>,
                             std::span<double> f) { f[0] = s(p, t); },
          [](Position, double, std::span<const double>, std::span<double> j) {
            j[0] = 0.0;
          }};
}

/// u^n, u^{n-1} and the clock of the two-step scheme.
template <typename F>
struct BasicSchemeState {
  F u_curr;
  F u_prev;
  double time = 0.0;
  double dt = 0.0;

  BasicSchemeState(F curr, F prev, double t, double step)
      : u_curr(std::move(curr)), u_prev(std::move(prev)), time(t), dt(step) {
    if (!u_curr.compatible(u_prev))
      throw InvalidArgument("SchemeState: u^n and u^{n-1} differ in grid or m");
    if (!(step > 0.0)) throw InvalidArgument("SchemeState: dt must be > 0");
  }
};

using SchemeState = BasicSchemeState<Field>;
using SchemeState2D = BasicSchemeState<Field2D>;

/// Non-finite values or a sup-norm above the threshold count as blow-up.
inline constexpr double default_blowup_threshold = 1e8;

template <typename F>
bool blown_up(const F& field, double threshold = default_blowup_threshold) {
  return !field.all_finite() || field.sup_norm() > threshold;
}

}  // namespace fastrd
