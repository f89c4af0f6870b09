#pragma once

// Quick invariant checks runnable from the command line.

#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "fastrd/bench.hpp"

namespace fastrd {

struct SelftestCheck {
  std::string name;
  std::function<bool()> run;
};

inline std::vector<SelftestCheck> selftest_checks() {
  return {
      {"sigma8 values at 0, 1/2, 1",
       [] {
         return std::abs(sigma8(0.0) - 1.0) <= 1e-14 && std::abs(sigma8(0.5) - 0.5) <= 1e-14 &&
                sigma8(1.0) == 0.0;
       }},
      {"kappa_c is 1 at the explicit limit",
       [] {
         const double h = pi / 64;
         return kappa_critical(h * h / 3.0, h) == 1.0 && kappa_critical(h * h, h) > 1.0;
       }},
      {"sine transform round trip",
       [] {
         std::vector<double> x(63);
         for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::cos(0.37 * i * i);
         const auto y = sine_synthesis(sine_coefficients(x));
         for (std::size_t i = 0; i < x.size(); ++i)
           if (std::abs(y[i] - x[i]) > 1e-12) return false;
         return true;
       }},
      {"shift1/unshift identity",
       [] {
         const Grid1D g(32);
         const Field u = Field::sample(g, 1, [](double x, int) { return std::exp(x); });
         auto [v, co] = shift1(u);
         const Field back = unshift(v, co);
         return v(0, 0) == 0.0 && v(32, 0) == 0.0 && back(0, 0) == u(0, 0) &&
                back(32, 0) == u(32, 0);
       }},
      {"unfiltered root leaves the unit disk above ratio 1",
       [] {
         const Grid1D g(64);
         const double h = g.spacing();
         const double top = discrete_laplacian_symbol(g, 63);
         return max_root_modulus(0.9 * h * h / 3 * top) <= 1.0 &&
                max_root_modulus(1.2 * h * h / 3 * top) > 1.0;
       }},
      {"retained modes stable at kappa_c (ratios 2, 4, 8)",
       [] {
         const Grid1D g(64);
         const double h = g.spacing();
         for (double r : {2.0, 4.0, 8.0}) {
           const double dt = r * h * h / 3;
           FilterSpec spec;
           spec.kappa = kappa_critical(dt, h);
           if (max_retained_root_modulus(g, dt, spec) > 1.0 + 1e-12) return false;
         }
         return true;
       }},
      {"filtered heat run stable at ratio 4",
       [] {
         const Grid1D g(64);
         StepConfig sc;
         sc.dt = ratio_to_dt(4.0, g.spacing());
         Solver1D s(PerturbedHeatCase{}.problem(g), sc);
         return s.run(300).stable;
       }},
      {"single-subdomain decomposition equals the plain postprocess",
       [] {
         const Grid1D g(64);
         const Field u = Field::sample(
             g, 1, [](double x, int) { return std::exp(x) + 1e-3 * std::sin(60 * x); });
         FilterSpec spec;
         spec.kappa = 2.0;
         const Field a = postprocess_shift1(u, spec);
         const Field b = postprocess_dd(u, make_layout(g, 1, 2), ShiftOrder::first, spec, {});
         for (int j = 0; j <= 64; ++j)
           if (std::abs(a(j, 0) - b(j, 0)) > 1e-12) return false;
         return true;
       }},
      {"manufactured source residual",
       [] {
         const ManufacturedCase mc;
         const double eps = 1e-4;
         for (double x : {0.3, 1.1, 2.9})
           for (double t : {0.2, 0.8}) {
             const double ut = (mc.exact(x, t + eps) - mc.exact(x, t - eps)) / (2 * eps);
             const double uxx = (mc.exact(x + eps, t) - 2 * mc.exact(x, t) +
                                 mc.exact(x - eps, t)) /
                                (eps * eps);
             if (std::abs(ut - uxx - mc.source(x, t)) > 1e-5) return false;
           }
         return true;
       }},
  };
}

/// Runs every check, printing one PASS/FAIL line each. True when all pass.
inline bool run_selftest(std::ostream& os) {
  bool ok = true;
  for (const auto& c : selftest_checks()) {
    bool pass = false;
    try {
      pass = c.run();
    } catch (const std::exception&) {
      pass = false;
    }
    os << (pass ? "PASS  " : "FAIL  ") << c.name << '\n';
    ok = ok && pass;
  }
  return ok;
}

}  // namespace fastrd
