#pragma once

// Low-frequency shifts. Subtracting a few cosine modes makes a field vanish
// at x = 0 and x = pi (and, for the third-order shift, also its second
// derivative), so that its odd 2pi-periodic extension is smooth enough for
// a spectral filter. The inverse shifts add the modes back and restore the
// boundary values exactly.

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "fastrd/core.hpp"
#include "fastrd/filter.hpp"

namespace fastrd {

enum class ShiftOrder { first = 1, third = 3 };

/// Per component: u ~ alpha[0] + alpha[1] cos x.
struct ShiftCoeffs1 {
  std::vector<std::array<double, 2>> alpha;
  std::vector<double> left, right;  // u(0), u(pi) restored by unshift
};

/// Per component: u ~ sum_{j<4} alpha[j] cos(j x).
struct ShiftCoeffs3 {
  std::vector<std::array<double, 4>> alpha;
  std::vector<double> left, right;
};

template <typename Coeffs>
struct Shifted {
  Field v;
  Coeffs coeffs;
};

/// v = u - alpha1 - alpha2 cos x with alpha1 = (u_0 + u_pi)/2,
/// alpha2 = (u_0 - u_pi)/2, so that v(0) = v(pi) = 0.
inline Shifted<ShiftCoeffs1> shift1(const Field& u) {
  const Grid1D& g = u.grid();
  const int m = u.components();
  const int last = g.intervals();
  ShiftCoeffs1 co;
  co.alpha.resize(m);
  co.left.resize(m);
  co.right.resize(m);
  for (int c = 0; c < m; ++c) {
    co.left[c] = u(0, c);
    co.right[c] = u(last, c);
    co.alpha[c] = {0.5 * (u(0, c) + u(last, c)), 0.5 * (u(0, c) - u(last, c))};
  }
  Field v(g, m);
  for (int j = 1; j < last; ++j) {
    const double cx = std::cos(g.x(j));
    for (int c = 0; c < m; ++c)
      v(j, c) = u(j, c) - co.alpha[c][0] - co.alpha[c][1] * cx;
  }
  return {std::move(v), std::move(co)};
}

/// Solves the 4x4 system for the cosine amplitudes given endpoint values and
/// endpoint second derivatives:
///    a0 + a1 + a2 + a3 = u(0)
///    a0 - a1 + a2 - a3 = u(pi)
///       - a1 - 4a2 - 9a3 = u_xx(0)
///         a1 - 4a2 + 9a3 = u_xx(pi)
inline std::array<double, 4> third_order_alpha(double u0, double upi, double uxx0,
                                               double uxxpi) {
  const double a2 = -(uxx0 + uxxpi) / 8.0;
  const double a3 = (0.5 * (uxxpi - uxx0) - 0.5 * (u0 - upi)) / 8.0;
  const double a1 = 0.5 * (u0 - upi) - a3;
  const double a0 = 0.5 * (u0 + upi) - a2;
  return {a0, a1, a2, a3};
}

/// Third-order shift from endpoint values of u and the supplied endpoint
/// second derivatives (one per component).
inline Shifted<ShiftCoeffs3> shift3(const Field& u, std::span<const double> uxx_left,
                                    std::span<const double> uxx_right) {
  const Grid1D& g = u.grid();
  const int m = u.components();
  const int last = g.intervals();
  if (static_cast<int>(uxx_left.size()) != m || static_cast<int>(uxx_right.size()) != m)
    throw InvalidArgument("shift3: curvature estimates need one value per component");
  ShiftCoeffs3 co;
  co.alpha.resize(m);
  co.left.resize(m);
  co.right.resize(m);
  for (int c = 0; c < m; ++c) {
    co.left[c] = u(0, c);
    co.right[c] = u(last, c);
    co.alpha[c] = third_order_alpha(u(0, c), u(last, c), uxx_left[c], uxx_right[c]);
  }
  Field v(g, m);
  for (int j = 1; j < last; ++j) {
    const double x = g.x(j);
    const double c1 = std::cos(x), c2 = std::cos(2 * x), c3 = std::cos(3 * x);
    for (int c = 0; c < m; ++c) {
      const auto& a = co.alpha[c];
      v(j, c) = u(j, c) - a[0] - a[1] * c1 - a[2] * c2 - a[3] * c3;
    }
  }
  return {std::move(v), std::move(co)};
}

/// u_xx at a node recovered from the PDE and three time levels:
/// (3u^{n+1} - 4u^n + u^{n-1})/(2dt) - f(u^{n+1}).
inline std::vector<double> curvature_from_pde(const Field& next, const Field& curr,
                                              const Field& prev, int node,
                                              const ReactionSystem& reaction,
                                              double t_next, double dt) {
  const int m = next.components();
  std::vector<double> f(m), out(m);
  const Position pos{next.grid().x(node), 0.0};
  reaction.eval(pos, t_next, next.node(node), f);
  for (int c = 0; c < m; ++c)
    out[c] = (3.0 * next(node, c) - 4.0 * curr(node, c) + prev(node, c)) / (2.0 * dt) -
             f[c];
  return out;
}

/// Two-level variant for the startup step: (u^1 - u^0)/dt - f(u^1).
inline std::vector<double> curvature_from_pde(const Field& next, const Field& curr,
                                              int node, const ReactionSystem& reaction,
                                              double t_next, double dt) {
  const int m = next.components();
  std::vector<double> f(m), out(m);
  const Position pos{next.grid().x(node), 0.0};
  reaction.eval(pos, t_next, next.node(node), f);
  for (int c = 0; c < m; ++c) out[c] = (next(node, c) - curr(node, c)) / dt - f[c];
  return out;
}

/// Third-order shift with u_xx(0), u_xx(pi) estimated from three time levels.
inline Shifted<ShiftCoeffs3> shift3(const Field& next, const Field& curr,
                                    const Field& prev, const ReactionSystem& reaction,
                                    double t_next, double dt) {
  const int last = next.grid().intervals();
  return shift3(next, curvature_from_pde(next, curr, prev, 0, reaction, t_next, dt),
                curvature_from_pde(next, curr, prev, last, reaction, t_next, dt));
}

/// Odd 2pi-periodic extension of one component: w_j = v_j for j = 0..N,
/// w_{2N-j} = -v_j. Rejects inputs that do not vanish at 0 and pi.
inline std::vector<double> odd_extend(const Field& v, int component = 0) {
  const int n = v.grid().intervals();
  if (std::abs(v(0, component)) > endpoint_tolerance ||
      std::abs(v(n, component)) > endpoint_tolerance)
    throw InvalidArgument("odd_extend: field does not vanish at the endpoints");
  std::vector<double> w(2 * n, 0.0);
  for (int j = 1; j < n; ++j) {
    w[j] = v(j, component);
    w[2 * n - j] = -v(j, component);
  }
  return w;
}

/// Inverse first-order shift.
inline Field unshift(const Field& filtered_v, const ShiftCoeffs1& co) {
  const Grid1D& g = filtered_v.grid();
  const int m = filtered_v.components();
  const int last = g.intervals();
  Field u(g, m);
  for (int j = 1; j < last; ++j) {
    const double cx = std::cos(g.x(j));
    for (int c = 0; c < m; ++c)
      u(j, c) = filtered_v(j, c) + co.alpha[c][0] + co.alpha[c][1] * cx;
  }
  for (int c = 0; c < m; ++c) {
    u(0, c) = co.left[c];
    u(last, c) = co.right[c];
  }
  return u;
}

/// Inverse third-order shift.
inline Field unshift(const Field& filtered_v, const ShiftCoeffs3& co) {
  const Grid1D& g = filtered_v.grid();
  const int m = filtered_v.components();
  const int last = g.intervals();
  Field u(g, m);
  for (int j = 1; j < last; ++j) {
    const double x = g.x(j);
    const double c1 = std::cos(x), c2 = std::cos(2 * x), c3 = std::cos(3 * x);
    for (int c = 0; c < m; ++c) {
      const auto& a = co.alpha[c];
      u(j, c) = filtered_v(j, c) + a[0] + a[1] * c1 + a[2] * c2 + a[3] * c3;
    }
  }
  for (int c = 0; c < m; ++c) {
    u(0, c) = co.left[c];
    u(last, c) = co.right[c];
  }
  return u;
}

/// First-order shifts in x then y. alpha* are sampled on y nodes, beta* on
/// x nodes (node-major per component).
struct ShiftCoeffs2D {
  int components = 1;
  std::vector<double> alpha1, alpha2;  // functions of y
  std::vector<double> beta1, beta2;    // functions of x
  BoundaryData2D boundary;             // restored exactly by unshift2d
};

struct Shifted2D {
  Field2D w;
  ShiftCoeffs2D coeffs;
};

/// Homogenizes the x = 0, pi edges with the left/right data, then the
/// y = 0, pi edges with the bottom/top traces of the x-shifted field. The
/// result vanishes on all four edges.
inline Shifted2D shift2d(const Field2D& u, const BoundaryData2D& bc) {
  const Grid2D& g = u.grid();
  const int m = u.components();
  if (bc.components != m)
    throw InvalidArgument("shift2d: boundary data has wrong component count");
  bc.check_compatible(g);
  const int nx = g.nodes_x(), ny = g.nodes_y();
  const Grid1D& gx = g.x_axis();
  const Grid1D& gy = g.y_axis();

  ShiftCoeffs2D co;
  co.components = m;
  co.boundary = bc;
  co.alpha1.resize(static_cast<std::size_t>(ny) * m);
  co.alpha2.resize(co.alpha1.size());
  co.beta1.resize(static_cast<std::size_t>(nx) * m);
  co.beta2.resize(co.beta1.size());

  for (int j = 0; j < ny; ++j)
    for (int c = 0; c < m; ++c) {
      const double h0 = bc.left[j * m + c], hpi = bc.right[j * m + c];
      co.alpha1[j * m + c] = 0.5 * (h0 + hpi);
      co.alpha2[j * m + c] = 0.5 * (h0 - hpi);
    }
  const int top = ny - 1;
  for (int i = 0; i < nx; ++i) {
    const double cx = std::cos(gx.x(i));
    for (int c = 0; c < m; ++c) {
      const double vb = bc.bottom[i * m + c] - co.alpha1[c] - co.alpha2[c] * cx;
      const double vt =
          bc.top[i * m + c] - co.alpha1[top * m + c] - co.alpha2[top * m + c] * cx;
      co.beta1[i * m + c] = 0.5 * (vb + vt);
      co.beta2[i * m + c] = 0.5 * (vb - vt);
    }
  }

  Field2D w(g, m);
  for (int j = 1; j < ny - 1; ++j) {
    const double cy = std::cos(gy.x(j));
    for (int i = 1; i < nx - 1; ++i) {
      const double cx = std::cos(gx.x(i));
      for (int c = 0; c < m; ++c)
        w(i, j, c) = u(i, j, c) - co.alpha1[j * m + c] - co.alpha2[j * m + c] * cx -
                     co.beta1[i * m + c] - co.beta2[i * m + c] * cy;
    }
  }
  return {std::move(w), std::move(co)};
}

/// Reconstruction: u = w + alpha1(y) + alpha2(y) cos x + beta1(x) + beta2(x) cos y
/// in the interior; edges take the stored boundary data.
inline Field2D unshift2d(const Field2D& filtered_w, const ShiftCoeffs2D& co) {
  const Grid2D& g = filtered_w.grid();
  const int m = filtered_w.components();
  const int nx = g.nodes_x(), ny = g.nodes_y();
  Field2D u(g, m);
  for (int j = 1; j < ny - 1; ++j) {
    const double cy = std::cos(g.y_axis().x(j));
    for (int i = 1; i < nx - 1; ++i) {
      const double cx = std::cos(g.x_axis().x(i));
      for (int c = 0; c < m; ++c)
        u(i, j, c) = filtered_w(i, j, c) + co.alpha1[j * m + c] +
                     co.alpha2[j * m + c] * cx + co.beta1[i * m + c] +
                     co.beta2[i * m + c] * cy;
    }
  }
  const auto& b = co.boundary;
  for (int i = 0; i < nx; ++i)
    for (int c = 0; c < m; ++c) {
      u(i, 0, c) = b.bottom[i * m + c];
      u(i, ny - 1, c) = b.top[i * m + c];
    }
  for (int j = 0; j < ny; ++j)
    for (int c = 0; c < m; ++c) {
      u(0, j, c) = b.left[j * m + c];
      u(nx - 1, j, c) = b.right[j * m + c];
    }
  return u;
}

}  // namespace fastrd
