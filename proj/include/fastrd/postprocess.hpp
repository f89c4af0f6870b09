#pragma once

// Per-step stabilizing postprocess for one segment of a 1D field:
// shift, odd extension (implicit in the sine transform), filter, inverse
// shift. The segment is treated as (0, pi) regardless of its physical length.

#include <span>
#include <vector>

#include "fastrd/filter.hpp"
#include "fastrd/shift.hpp"

namespace fastrd {

struct FilterStats {
  /// Pre-filter energy of the top quarter of retained modes, summed over
  /// components.
  double top_band_energy = 0.0;
};

namespace detail {

// Filters interior values of each component; records band energy.
inline Field filter_with_stats(const Field& v, const FilterSpec& spec,
                               FilterStats* stats) {
  const int n = v.grid().intervals();
  const int m = v.components();
  Field out(v.grid(), m);
  std::vector<double> interior(n - 1);
  for (int c = 0; c < m; ++c) {
    for (int j = 1; j < n; ++j) interior[j - 1] = v(j, c);
    auto b = sine_coefficients(interior);
    if (stats) stats->top_band_energy += top_band_energy(b, spec.kappa, n);
    filter_interior(interior, b, spec, n);
    for (int j = 1; j < n; ++j) out(j, c) = interior[j - 1];
  }
  return out;
}

}  // namespace detail

/// First-order-shift postprocess of a whole segment.
inline Field postprocess_shift1(const Field& u, const FilterSpec& spec,
                                FilterStats* stats = nullptr) {
  auto [v, co] = shift1(u);
  return unshift(detail::filter_with_stats(v, spec, stats), co);
}

/// Third-order-shift postprocess; `uxx_left/right` are the second
/// derivatives at the segment ends in the segment's own (0, pi) coordinate.
inline Field postprocess_shift3(const Field& u, std::span<const double> uxx_left,
                                std::span<const double> uxx_right,
                                const FilterSpec& spec, FilterStats* stats = nullptr) {
  auto [v, co] = shift3(u, uxx_left, uxx_right);
  return unshift(detail::filter_with_stats(v, spec, stats), co);
}

/// Removes high-frequency content from a boundary trace (samples on N+1
/// nodes) with the first-order shift pipeline. Endpoint values are kept.
inline Field filter_boundary_trace(const Field& trace, const FilterSpec& spec) {
  return postprocess_shift1(trace, spec);
}

}  // namespace fastrd
