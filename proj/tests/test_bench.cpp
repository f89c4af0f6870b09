#include <catch_amalgamated.hpp>

#include <cstring>

#include "fastrd/bench.hpp"

using namespace fastrd;
using Catch::Approx;

namespace {

// Classical RK4 on the reaction-only system.
std::vector<std::array<double, 2>> ode_orbit(const PredatorPreyCase& pp, double T, double h) {
  std::vector<std::array<double, 2>> out{{1.0, 1.0}};
  auto rhs = [&](std::array<double, 2> y) {
    std::array<double, 2> f{};
    pp.rates(y, f);
    return f;
  };
  std::array<double, 2> y{1.0, 1.0};
  const int n = static_cast<int>(std::lround(T / h));
  for (int i = 0; i < n; ++i) {
    auto k1 = rhs(y);
    auto k2 = rhs({y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]});
    auto k3 = rhs({y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]});
    auto k4 = rhs({y[0] + h * k3[0], y[1] + h * k3[1]});
    for (int c = 0; c < 2; ++c) y[c] += h / 6 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
    out.push_back(y);
  }
  return out;
}

// Closest return to the start after leaving its neighbourhood.
double closest_return(const std::vector<std::array<double, 2>>& orbit) {
  bool left = false;
  double best = 1e300;
  for (const auto& p : orbit) {
    const double d = std::hypot(p[0] - orbit[0][0], p[1] - orbit[0][1]);
    if (d > 0.3) left = true;
    if (left) best = std::min(best, d);
  }
  return left ? best : 1e300;
}

}  // namespace

TEST_CASE("manufactured case values") {
  const ManufacturedCase mc = manufactured_heat_case();
  CHECK(mc.exact(0, 0) == 1.0);
  CHECK(mc.exact(pi, 0) == Approx(0.0).margin(1e-15));
  CHECK(mc.boundary(0.7).left[0] == Approx(std::cos(0.7)).epsilon(1e-15));
  CHECK(mc.boundary(0.7).right[0] == Approx(0.0).margin(1e-15));
  for (double x : {0.0, 0.4, 1.9, pi})
    for (double t : {0.0, 0.3, 1.0}) {
      const double s = -std::sin(t) * (std::pow(x / pi, 4) + std::cos(3 * x)) -
                       std::cos(t) * (12 * x * x / std::pow(pi, 4) - 9 * std::cos(3 * x));
      CHECK(mc.source(x, t) == Approx(s).margin(1e-13));
      CHECK(std::abs(mc.exact_t(x, t) - mc.exact_xx(x, t) - mc.source(x, t)) <= 1e-10);
      // Independent finite-difference residual.
      const double e = 1e-4;
      const double ut = (mc.exact(x, t + e) - mc.exact(x, t - e)) / (2 * e);
      const double uxx = (mc.exact(x + e, t) - 2 * mc.exact(x, t) + mc.exact(x - e, t)) / (e * e);
      CHECK(std::abs(ut - uxx - mc.source(x, t)) <= 1e-5);
    }
}

TEST_CASE("2D manufactured source is consistent") {
  ManufacturedCase2D mc;
  const double e = 1e-4;
  for (double x : {0.3, 2.0})
    for (double y : {0.5, 2.8}) {
      const double t = 0.4;
      const double ut = (mc.exact(x, y, t + e) - mc.exact(x, y, t - e)) / (2 * e);
      const double lap = (mc.exact(x + e, y, t) + mc.exact(x - e, y, t) + mc.exact(x, y + e, t) +
                          mc.exact(x, y - e, t) - 4 * mc.exact(x, y, t)) /
                         (e * e);
      CHECK(std::abs(ut - lap - mc.source(x, y, t)) <= 1e-5);
    }
  const Grid2D g(8, 8);
  CHECK_NOTHROW(mc.boundary(g, 0.3).check_compatible(g));
}

TEST_CASE("error norms") {
  const Grid1D g(64);
  const Field a = Field::sample(g, 1, [](double x, int) { return std::exp(x); });
  const auto z = error_norms(a, a);
  CHECK(z.l2 == 0.0);
  CHECK(z.linf == 0.0);
  const Field s = Field::sample(g, 1, [](double x, int) { return std::exp(x) + std::sin(x); });
  CHECK(error_norms(s, a).l2 == Approx(std::sqrt(pi / 2)).margin(1e-3));
  const Field one = Field::sample(g, 1, [](double x, int) { return std::exp(x) + 1.0; });
  CHECK(error_norms(one, a).linf == Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(error_norms(a, Field(Grid1D(32), 1)), InvalidArgument);
}

TEST_CASE("predator-prey parameters and boundary excitation") {
  PredatorPreyCase pp;
  CHECK(pp.a == 1.2);
  CHECK(pp.b == 1.0);
  CHECK(pp.c == 0.1);
  CHECK(pp.d == 0.2);
  CHECK(pp.boundary(0).left == std::vector<double>{2.0, 2.0});
  CHECK(pp.boundary(pi).right[0] == Approx(0.0).margin(1e-15));
  pp.excite = false;
  CHECK(pp.boundary(pi).right == std::vector<double>{1.0, 1.0});
}

TEST_CASE("ODE oracle: which reaction form has a closed orbit") {
  PredatorPreyCase printed;
  const auto p = ode_orbit(printed, 60.0, 1e-3);
  // v' = -c u - d u v < 0 while u > 0: no return, v turns negative.
  CHECK(closest_return(p) > 0.1);
  double min_v = 1e300;
  for (const auto& y : p) min_v = std::min(min_v, y[1]);
  CHECK(min_v < 0.0);

  PredatorPreyCase lv;
  lv.form = PredatorPreyForm::lotka_volterra;
  const auto q = ode_orbit(lv, 60.0, 1e-3);
  CHECK(closest_return(q) < 1e-3);
  // The orbit does not spiral into the equilibrium (c/d, a/b) = (0.5, 1.2).
  const auto& end = q.back();
  CHECK(std::hypot(end[0] - 0.5, end[1] - 1.2) > 0.2);
}

TEST_CASE("accuracy sweep rows") {
  const ManufacturedCase mc;
  RunOptions opt;
  const auto rows = run_accuracy_sweep(mc, {32}, {0.5, 2.0}, {ShiftOrder::first, ShiftOrder::third}, opt);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].shift_order == 1);
  CHECK(rows[2].shift_order == 3);
  for (const auto& r : rows) {
    const double h = pi / r.N;
    CHECK(r.ratio == Approx(3 * r.dt / (h * h)).epsilon(1e-14));
    CHECK(r.dt * r.steps == Approx(1.0).epsilon(1e-12));
    CHECK(r.stable);
    CHECK(r.kappa >= 1.0);
  }

  SECTION("ratio 0.5 with filter off is within 2x of the filtered error") {
    RunOptions off;
    off.filter.enabled = false;
    const auto a = run_manufactured(mc, 32, 0.5, 1.0, off);
    CHECK(a.stable);
    CHECK(a.kappa == 0.0);
    for (const auto& r : {rows[0], rows[2]}) {
      CHECK(a.err_linf <= 2 * r.err_linf);
      CHECK(r.err_linf <= 2 * a.err_linf);
    }
  }
  SECTION("unstable runs are recorded, the sweep continues") {
    RunOptions off;
    off.filter.enabled = false;
    const auto r = run_accuracy_sweep(mc, {32}, {8.0, 0.5}, {ShiftOrder::first}, off);
    REQUIRE(r.size() == 2);
    CHECK_FALSE(r[0].stable);
    CHECK(std::isnan(r[0].err_linf));
    CHECK(r[1].stable);
  }
}

TEST_CASE("small time steps reach the spatial-error plateau") {
  const ManufacturedCase mc;
  RunOptions opt;
  opt.filter.shift_order = ShiftOrder::third;
  const double e1 = run_manufactured(mc, 32, 0.5, 1.0, opt).err_linf;
  const double e2 = run_manufactured(mc, 32, 0.25, 1.0, opt).err_linf;
  const double e3 = run_manufactured(mc, 32, 0.125, 1.0, opt).err_linf;
  CHECK(std::abs(e1 - e2) <= 0.05 * e2);
  CHECK(std::abs(e2 - e3) <= 0.05 * e3);
}

TEST_CASE("third-order shift is more accurate at large steps") {
  const ManufacturedCase mc;
  for (double ratio : {4.0, 8.0}) {
    RunOptions o1, o3;
    o3.filter.shift_order = ShiftOrder::third;
    const auto a = run_manufactured(mc, 64, ratio, 1.0, o1);
    const auto b = run_manufactured(mc, 64, ratio, 1.0, o3);
    REQUIRE(a.stable);
    REQUIRE(b.stable);
    CHECK(b.err_linf <= a.err_linf);
  }
}

TEST_CASE("sweep rows are bit-for-bit reproducible") {
  const ManufacturedCase mc;
  const auto a = run_accuracy_sweep(mc, {32, 48}, {1.0, 3.0}, {ShiftOrder::first, ShiftOrder::third});
  const auto b = run_accuracy_sweep(mc, {32, 48}, {1.0, 3.0}, {ShiftOrder::first, ShiftOrder::third});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::memcmp(&a[i].err_l2, &b[i].err_l2, sizeof(double)) == 0);
    CHECK(std::memcmp(&a[i].err_linf, &b[i].err_linf, sizeof(double)) == 0);
    CHECK(a[i].steps == b[i].steps);
  }
}

TEST_CASE("predator-prey run tracks minima and trajectory") {
  PredatorPreyCase pp;
  pp.form = PredatorPreyForm::lotka_volterra;
  const auto res = run_predator_prey(pp, 32, 2.0, 0.5, {}, 5);
  CHECK(res.row.stable);
  CHECK(res.row.steps > 0);
  CHECK(res.trajectory.size() == static_cast<std::size_t>(res.row.steps / 5 + 1));
  CHECK(res.trajectory.front().t == 0.0);
  CHECK(res.min_u >= 0.0);
  CHECK(res.min_v >= 0.0);
  CHECK(std::isnan(res.row.err_l2));
}

TEST_CASE("constant boundaries lead to a steady state") {
  PredatorPreyCase pp;
  pp.excite = false;
  pp.form = PredatorPreyForm::lotka_volterra;
  const auto r = run_to_steady_state(pp.problem(Grid1D(32)), 2.0, 1e-6, 200000);
  CHECK(r.reached);
  CHECK(r.update_norm < 1e-6);
}

TEST_CASE("bisection for the largest stable ratio") {
  const double r = bisect_max_stable([](double x) { return x <= 3.37; }, 0.1, 64, 0.1);
  CHECK(r <= 3.37);
  CHECK(r >= 3.27);
  CHECK(bisect_max_stable([](double) { return true; }, 0.1, 64, 0.1) == 64);
}

TEST_CASE("overlap study flags saturation and covers the single-domain case") {
  const ManufacturedCase mc;
  DdStudyOptions o;
  o.steps = 100;
  o.resolution = 0.5;
  const auto dd = run_dd_study(mc, 64, 2, {4, 16}, o);
  REQUIRE(dd.size() == 2);
  CHECK_FALSE(dd[0].saturated);
  CHECK(dd[1].saturated);
  CHECK(dd[0].row.n_subdomains == 2);
  CHECK(dd[0].row.overlap == 4);

  const auto single = run_dd_study(mc, 64, 1, {4}, o);
  RunOptions plain;
  const double ref = bisect_max_stable(
      [&](double r) { return manufactured_stable(mc, 64, r, o.steps, plain); }, o.min_ratio,
      o.max_ratio, o.resolution);
  CHECK(single[0].row.ratio == ref);
}
