#pragma once

// Type-I discrete sine transform of interior node values, backed by FFTW's
// RODFT00 kind. For values v_1..v_{N-1} on a grid with N intervals the
// forward transform returns the sine-series coefficients b_1..b_{N-1} of the
// odd 2pi-periodic extension,
//
//   v_j = sum_k b_k sin(k x_j),   b_k = (2/N) sum_j v_j sin(k x_j).
//
// Plans are created once per size (FFTW_ESTIMATE, so results are
// deterministic) under a mutex; executing a plan is thread-safe.

#include <fftw3.h>

#include <map>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "fastrd/core.hpp"

namespace fastrd {

namespace detail {

class PlanCache {
 public:
  static fftw_plan get(int ny, int nx) {
    static PlanCache cache;
    std::lock_guard lock(cache.mutex_);
    auto key = std::pair{ny, nx};
    if (auto it = cache.plans_.find(key); it != cache.plans_.end())
      return it->second;
    std::vector<double> buf(static_cast<std::size_t>(ny) * nx);
    fftw_plan p =
        ny == 1 ? fftw_plan_r2r_1d(nx, buf.data(), buf.data(), FFTW_RODFT00,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED)
                : fftw_plan_r2r_2d(ny, nx, buf.data(), buf.data(), FFTW_RODFT00,
                                   FFTW_RODFT00, FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.plans_.emplace(key, p);
    return p;
  }

  ~PlanCache() {
    for (auto& [key, p] : plans_) fftw_destroy_plan(p);
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

// Unnormalized RODFT00 in place: Y_k = 2 sum_j X_j sin(pi (j+1)(k+1)/(n+1)).
inline void rodft00(std::span<double> data, int ny, int nx) {
  fftw_execute_r2r(PlanCache::get(ny, nx), data.data(), data.data());
}

}  // namespace detail

/// Interior values (size N-1) -> sine coefficients b_1..b_{N-1}.
inline std::vector<double> sine_coefficients(std::span<const double> interior) {
  std::vector<double> out(interior.begin(), interior.end());
  const int n = static_cast<int>(out.size());
  detail::rodft00(out, 1, n);
  const double scale = 1.0 / (n + 1);
  for (double& v : out) v *= scale;
  return out;
}

/// Sine coefficients -> interior values: v_j = sum_k b_k sin(k x_j).
inline std::vector<double> sine_synthesis(std::span<const double> coeffs) {
  std::vector<double> out(coeffs.begin(), coeffs.end());
  detail::rodft00(out, 1, static_cast<int>(out.size()));
  for (double& v : out) v *= 0.5;
  return out;
}

/// 2D versions over a row-major (ny x nx) block of interior values, x fastest.
inline void sine_coefficients_2d(std::span<double> block, int ny, int nx) {
  detail::rodft00(block, ny, nx);
  const double scale = 1.0 / ((nx + 1.0) * (ny + 1.0));
  for (double& v : block) v *= scale;
}

inline void sine_synthesis_2d(std::span<double> block, int ny, int nx) {
  detail::rodft00(block, ny, nx);
  for (double& v : block) v *= 0.25;
}

}  // namespace fastrd
