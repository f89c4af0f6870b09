#pragma once

// Overlapping strip decomposition of the 1D postprocess. The time step stays
// global; each subdomain is shifted, filtered and unshifted on its own, and
// overlapping results are blended with a linear partition of unity.

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fastrd/postprocess.hpp"

namespace fastrd {

struct SubdomainLayout {
  int n_intervals = 0;
  int n_subdomains = 1;
  int overlap = 0;                         // grid intervals shared by neighbours
  std::vector<std::pair<int, int>> ranges;  // inclusive node ranges [lo, hi]

  int max_overlap() const { return n_intervals / (2 * n_subdomains); }
};

inline constexpr int min_subdomain_interior_points = 8;

/// Near-equal split of 0..N at round(i N / N_d), each interior split extended
/// by overlap/2 to both sides.
inline SubdomainLayout make_layout(const Grid1D& grid, int n_subdomains, int overlap) {
  const int n = grid.intervals();
  if (n_subdomains < 1)
    throw InvalidArgument("make_layout: need at least one subdomain");
  SubdomainLayout layout{n, n_subdomains, overlap, {}};
  if (n_subdomains == 1) {
    layout.ranges.emplace_back(0, n);
    return layout;
  }
  if (overlap < 2 || overlap % 2 != 0)
    throw InvalidArgument("make_layout: overlap must be even and >= 2, got " +
                          std::to_string(overlap));
  std::vector<int> split(n_subdomains + 1);
  for (int i = 0; i <= n_subdomains; ++i)
    split[i] = static_cast<int>(std::lround(static_cast<double>(i) * n / n_subdomains));
  const int half = overlap / 2;
  for (int i = 0; i < n_subdomains; ++i) {
    if (split[i + 1] - split[i] < overlap)
      throw InvalidArgument("make_layout: overlap " + std::to_string(overlap) +
                            " exceeds the base width of subdomain " + std::to_string(i));
    const int lo = i == 0 ? 0 : split[i] - half;
    const int hi = i == n_subdomains - 1 ? n : split[i + 1] + half;
    if (hi - lo - 1 < min_subdomain_interior_points)
      throw InvalidArgument("make_layout: subdomain " + std::to_string(i) +
                            " has fewer than 8 interior points");
    layout.ranges.emplace_back(lo, hi);
  }
  return layout;
}

/// Weight of subdomain `s` at global node `j` (0 outside its range). The
/// weights of all subdomains sum to one at every node.
inline double blend_weight(const SubdomainLayout& layout, int s, int j) {
  const auto [lo, hi] = layout.ranges[s];
  if (j < lo || j > hi) return 0.0;
  const double o = layout.overlap;
  if (s > 0) {
    const int prev_hi = layout.ranges[s - 1].second;
    if (j <= prev_hi) return (j - lo) / o;
  }
  if (s + 1 < layout.n_subdomains) {
    const int next_lo = layout.ranges[s + 1].first;
    if (j >= next_lo) return (hi - j) / o;
  }
  return 1.0;
}

struct DdStats {
  FilterStats filter;
  /// Sum over overlaps of the squared disagreement between the two
  /// neighbouring filtered results.
  double interface_energy = 0.0;
};

/// Physical u_xx (per component) at a global node; used by the third-order
/// shift at subdomain ends.
using CurvatureAt = std::function<std::vector<double>(int node)>;

/// Postprocesses each subdomain separately and blends the overlaps. Global
/// boundary values are preserved exactly; N_d = 1 reproduces the
/// single-domain postprocess.
inline Field postprocess_dd(const Field& u, const SubdomainLayout& layout,
                            ShiftOrder order, const FilterSpec& spec,
                            const CurvatureAt& curvature = {},
                            DdStats* stats = nullptr) {
  const Grid1D& g = u.grid();
  const int m = u.components();
  if (layout.n_intervals != g.intervals())
    throw InvalidArgument("postprocess_dd: layout built for a different grid");
  if (order == ShiftOrder::third && !curvature)
    throw InvalidArgument("postprocess_dd: third-order shift needs curvature data");

  std::vector<Field> local;
  local.reserve(layout.n_subdomains);
  for (const auto& [lo, hi] : layout.ranges) {
    const Grid1D lg(hi - lo);
    Field piece(lg, m);
    for (int j = lo; j <= hi; ++j)
      for (int c = 0; c < m; ++c) piece(j - lo, c) = u(j, c);
    FilterStats* fs = stats ? &stats->filter : nullptr;
    if (order == ShiftOrder::first) {
      local.push_back(postprocess_shift1(piece, spec, fs));
    } else {
      // Second derivative in the local (0, pi) coordinate.
      const double scale = std::pow(static_cast<double>(hi - lo) / g.intervals(), 2);
      auto cl = curvature(lo), cr = curvature(hi);
      for (double& v : cl) v *= scale;
      for (double& v : cr) v *= scale;
      local.push_back(postprocess_shift3(piece, cl, cr, spec, fs));
    }
  }

  Field out(g, m);
  for (int s = 0; s < layout.n_subdomains; ++s) {
    const auto [lo, hi] = layout.ranges[s];
    for (int j = lo; j <= hi; ++j) {
      const double w = blend_weight(layout, s, j);
      for (int c = 0; c < m; ++c) out(j, c) += w * local[s](j - lo, c);
    }
  }

  if (stats)
    for (int s = 0; s + 1 < layout.n_subdomains; ++s) {
      const int lo = layout.ranges[s + 1].first, hi = layout.ranges[s].second;
      const int off_l = layout.ranges[s].first;
      for (int j = lo; j <= hi; ++j)
        for (int c = 0; c < m; ++c) {
          const double d = local[s](j - off_l, c) - local[s + 1](j - lo, c);
          stats->interface_energy += d * d;
        }
    }
  return out;
}

struct OverlapAdaptation {
  SubdomainLayout layout;
  bool changed = false;
  bool saturated = false;
  std::string warning;
};

/// Widens the overlap by two intervals when the last `rule.consecutive`
/// growth factors of the interface energy (recorded since the last change)
/// all exceed the threshold. Capped at N / (2 N_d); never shrinks.
inline OverlapAdaptation adapt_overlap(std::span<const double> growth_history,
                                       const SubdomainLayout& layout, const Grid1D& grid,
                                       GrowthRule rule = {}) {
  OverlapAdaptation result{layout, false, false, {}};
  const auto k = static_cast<std::size_t>(rule.consecutive);
  if (layout.n_subdomains == 1 || growth_history.size() < k) return result;
  for (std::size_t i = growth_history.size() - k; i < growth_history.size(); ++i)
    if (!(growth_history[i] > rule.growth_threshold)) return result;

  const int wanted = layout.overlap + 2;
  if (wanted > layout.max_overlap()) {
    result.saturated = true;
    result.warning = "overlap " + std::to_string(layout.overlap) +
                     " is at its cap; interface growth persists";
    return result;
  }
  try {
    result.layout = make_layout(grid, layout.n_subdomains, wanted);
    result.changed = true;
  } catch (const InvalidArgument& e) {
    result.saturated = true;
    result.warning = std::string("overlap cannot grow: ") + e.what();
  }
  return result;
}

}  // namespace fastrd
