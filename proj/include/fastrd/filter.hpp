#pragma once

// Order-8 spectral filter with stretching, its critical stretching factor,
// and filtering of shifted (endpoint-free) fields through their sine series.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "fastrd/core.hpp"
#include "fastrd/sine_transform.hpp"

namespace fastrd {

/// 1 - sigma8(xi), evaluated as (1-y)^4 (1 + 4y + 10y^2 + 20y^3) with
/// 1 - y = sin^2(pi xi / 2); accurate where sigma8 is close to 1.
inline double sigma8_complement(double xi) {
  xi = std::abs(xi);
  if (xi >= 1.0) return 1.0;
  const double sh = std::sin(0.5 * pi * xi);
  const double s = sh * sh;
  const double y = 0.5 * (1.0 + std::cos(pi * xi));
  const double s2 = s * s;
  return s2 * s2 * (1.0 + y * (4.0 + y * (10.0 + 20.0 * y)));
}

/// Eighth-order filter: (35 - 84y + 70y^2 - 20y^3) y^4 with
/// y = (1 + cos(pi xi)) / 2, and 0 for |xi| >= 1.
inline double sigma8(double xi) {
  xi = std::abs(xi);
  if (xi >= 1.0) return 0.0;
  const double y = 0.5 * (1.0 + std::cos(pi * xi));
  // The printed form cancels badly near xi = 0.
  if (y >= 0.5) return 1.0 - sigma8_complement(xi);
  const double y2 = y * y;
  return (35.0 - 84.0 * y + 70.0 * y2 - 20.0 * y2 * y) * y2 * y2;
}

/// Filter of order p applied as sigma(kappa * k / N). `complement`, when
/// set, returns 1 - sigma without cancellation.
struct FilterSpec {
  int order = 8;
  double (*sigma)(double) = sigma8;
  double kappa = 1.0;
  double (*complement)(double) = sigma8_complement;

  double factor(int k, int n_intervals) const {
    return sigma(kappa * k / n_intervals);
  }
  double removed(int k, int n_intervals) const {
    const double xi = kappa * k / n_intervals;
    return complement ? complement(xi) : 1.0 - sigma(xi);
  }
};

/// Smallest stretching for which every mode cut by the filter is exactly the
/// set of modes the explicit diffusion treatment would amplify:
/// pi / arccos(1 - 2h^2/(3dt)), and 1 when dt <= h^2/3.
inline double kappa_critical(double dt, double h) {
  if (!(dt > 0.0) || !(h > 0.0))
    throw InvalidArgument("kappa_critical: dt and h must be positive");
  const double arg = 1.0 - 2.0 * h * h / (3.0 * dt);
  if (arg <= -1.0) return 1.0;
  return pi / std::acos(arg);
}

/// Per-axis stretching on a 2D grid that cuts the worst retained tensor mode
/// (equal fractions of each axis' band). Equals kappa_critical with
/// h^2 -> 1/(1/hx^2 + 1/hy^2), i.e. h^2/2 on a square grid.
inline double kappa_critical_2d(double dt, double hx, double hy) {
  const double h_eff = 1.0 / std::sqrt(1.0 / (hx * hx) + 1.0 / (hy * hy));
  return kappa_critical(dt, h_eff);
}

inline constexpr double endpoint_tolerance = 1e-12;

/// Scales sine coefficients b_1..b_{N-1} in place by sigma(kappa k / N).
inline void filter_coefficients(std::span<double> coeffs, const FilterSpec& spec,
                                int n_intervals) {
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    coeffs[i] *= spec.factor(static_cast<int>(i) + 1, n_intervals);
}

/// Filters interior values in place given their sine coefficients.
///
/// The removed part (1 - sigma) b_k is synthesized and subtracted rather than
/// resynthesizing the whole series: modes with sigma ~ 1 then keep their
/// values to the last bit instead of picking up transform roundoff at every
/// step, which otherwise accumulates over long runs.
inline void filter_interior(std::span<double> interior, std::span<double> coeffs,
                            const FilterSpec& spec, int n_intervals) {
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    coeffs[i] *= spec.removed(static_cast<int>(i) + 1, n_intervals);
  const auto removed = sine_synthesis(coeffs);
  for (std::size_t i = 0; i < interior.size(); ++i) interior[i] -= removed[i];
}

/// Replaces the sine coefficients of each component of `v` (which must vanish
/// at both endpoints) by their filtered values.
inline Field apply_filter(const Field& v, const FilterSpec& spec) {
  const int n = v.grid().intervals();
  const int m = v.components();
  for (int c = 0; c < m; ++c)
    if (std::abs(v(0, c)) > endpoint_tolerance ||
        std::abs(v(n, c)) > endpoint_tolerance)
      throw InvalidArgument(
          "apply_filter: field does not vanish at the endpoints (component " +
          std::to_string(c) + "); shift it first");

  Field out(v.grid(), m);
  std::vector<double> interior(n - 1);
  for (int c = 0; c < m; ++c) {
    for (int j = 1; j < n; ++j) interior[j - 1] = v(j, c);
    auto b = sine_coefficients(interior);
    filter_interior(interior, b, spec, n);
    for (int j = 1; j < n; ++j) out(j, c) = interior[j - 1];
  }
  return out;
}

/// Highest mode index with a nonzero filter factor.
inline int retained_cutoff(double kappa, int n_intervals) {
  const int k = static_cast<int>(std::ceil(n_intervals / kappa)) - 1;
  return std::clamp(k, 0, n_intervals - 1);
}

/// Energy of the top quarter of retained modes, sum of b_k^2 over
/// 0.75 * cutoff < k <= cutoff. `coeffs` holds b_1..b_{N-1}.
inline double top_band_energy(std::span<const double> coeffs, double kappa,
                              int n_intervals) {
  const int cut = retained_cutoff(kappa, n_intervals);
  double e = 0.0;
  for (int k = cut; k > 0 && k > 0.75 * cut; --k) e += coeffs[k - 1] * coeffs[k - 1];
  return e;
}

struct GrowthRule {
  double growth_threshold = 1.05;
  int consecutive = 2;
};

/// Tracks a per-step energy and reports when it grew by more than the
/// threshold for `consecutive` steps in a row.
class GrowthMonitor {
 public:
  explicit GrowthMonitor(GrowthRule rule = {}) : rule_(rule) {}

  /// Returns true when the trigger fires; the streak restarts afterwards.
  bool observe(double energy) {
    const double growth =
        (has_prev_ && prev_ > 0.0) ? energy / prev_ : 1.0;
    last_growth_ = growth;
    prev_ = energy;
    has_prev_ = true;
    streak_ = growth > rule_.growth_threshold ? streak_ + 1 : 0;
    if (streak_ >= rule_.consecutive) {
      streak_ = 0;
      return true;
    }
    return false;
  }

  double last_growth() const { return last_growth_; }

 private:
  GrowthRule rule_;
  double prev_ = 0.0;
  double last_growth_ = 1.0;
  bool has_prev_ = false;
  int streak_ = 0;
};

/// Optional kappa tuning: the stretching grows by `increase` whenever the
/// pre-filter energy of the top retained band keeps growing.
class KappaMonitor {
 public:
  explicit KappaMonitor(GrowthRule rule = {}, double increase = 1.1)
      : monitor_(rule), increase_(increase) {}

  void observe(double energy) {
    if (monitor_.observe(energy)) multiplier_ *= increase_;
  }
  double multiplier() const { return multiplier_; }

 private:
  GrowthMonitor monitor_;
  double increase_;
  double multiplier_ = 1.0;
};

}  // namespace fastrd
