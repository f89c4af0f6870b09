#include <catch_amalgamated.hpp>

#include "fastrd/filter.hpp"
#include "fastrd/postprocess.hpp"
#include "fastrd/solver1d.hpp"
#include "oracles.hpp"

using namespace fastrd;
using Catch::Approx;
using namespace oracle;

TEST_CASE("sigma8 reference values") {
  CHECK(std::abs(sigma8(0.0) - 1.0) <= 1e-14);
  CHECK(std::abs(sigma8(1.0)) <= 1e-14);
  CHECK(std::abs(sigma8(0.5) - 0.5) <= 1e-14);
  CHECK(sigma8(1.7) == 0.0);
  CHECK(sigma8(-0.3) == sigma8(0.3));
}

TEST_CASE("sigma8 agrees with the high-precision polynomial") {
  double worst = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double xi = -1.2 + 2.4 * i / 4000;
    worst = std::max(worst, std::abs(sigma8(xi) - static_cast<double>(sigma8_hp(Real(xi)))));
    CHECK(sigma8_complement(xi) ==
          Approx(static_cast<double>(1 - sigma8_hp(Real(xi)))).margin(1e-15));
  }
  CHECK(worst <= 1e-15);
}

TEST_CASE("sigma8 is a filter of order 8") {
  const Real h0("1e-8"), h1("1e-20");
  for (int n = 1; n <= 7; ++n) {
    INFO("derivative order " << n);
    CHECK(abs(centered_derivative(n, 0, h0)) <= 1e-6);
    CHECK(abs(backward_derivative(n, 1, h1)) <= 1e-6);
  }
  // Order exactly 8: the eighth derivative at 0 does not vanish.
  CHECK(abs(centered_derivative(8, 0, h0)) > 1.0);
}

TEST_CASE("kappa_critical") {
  const double h = pi / 64;
  CHECK(kappa_critical(h * h / 3, h) == 1.0);
  CHECK(kappa_critical(0.1 * h * h, h) == 1.0);
  CHECK(kappa_critical(h * h / 2, h) == Approx(pi / std::acos(-1.0 / 3.0)).epsilon(1e-14));
  CHECK(kappa_critical(h * h / 2, h) == Approx(1.6443).margin(1e-4));
  CHECK(kappa_critical(1e6 * h * h, h) > 1e2);
  CHECK(kappa_critical(2 * h * h, h) < kappa_critical(4 * h * h, h));
  CHECK_THROWS_AS(kappa_critical(0.0, h), InvalidArgument);
  CHECK_THROWS_AS(kappa_critical(1.0, -h), InvalidArgument);
}

TEST_CASE("sine transform round trip and fast/dense agreement") {
  for (int n : {5, 16, 63, 100}) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = std::sin(0.91 * i) + 0.1 * i;
    const auto b = sine_coefficients(x);
    const auto y = sine_synthesis(b);
    double worst = 0;
    for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(y[i] - x[i]));
    CHECK(worst <= 1e-12 * (1 + 0.1 * n));
    for (int k = 1; k <= n; k += 7) {
      double dense = 0;
      for (int j = 1; j <= n; ++j) dense += x[j - 1] * std::sin(pi * k * j / (n + 1));
      CHECK(b[k - 1] == Approx(2 * dense / (n + 1)).margin(1e-12));
    }
  }
}

TEST_CASE("apply_filter equals the dense Fourier sum for small N") {
  for (int n : {4, 8, 12, 16})
    for (double kappa : {1.0, 1.5, 3.0}) {
      const Grid1D g(n);
      const Field v = Field::sample(g, 1, [&](double x, int) {
        return x * (pi - x) * std::exp(std::sin(3 * x)) + 0.3 * std::sin((n - 1) * x);
      });
      std::vector<double> vals(n + 1);
      for (int j = 0; j <= n; ++j) vals[j] = v(j, 0);
      vals[n] = 0.0;
      Field vz = v;
      vz(n, 0) = 0.0;
      vz(0, 0) = 0.0;
      vals[0] = 0.0;
      FilterSpec spec;
      spec.kappa = kappa;
      const Field out = apply_filter(vz, spec);
      const auto oracle = dense_filter(vals, kappa);
      for (int j = 0; j <= n; ++j) CHECK(out(j, 0) == Approx(oracle[j]).margin(1e-12));
    }
}

TEST_CASE("apply_filter examples") {
  const Grid1D g(8);
  SECTION("single mode at half the cutoff") {
    FilterSpec spec;
    spec.kappa = 2.0;
    const Field v = Field::sample(g, 1, [](double x, int) { return std::sin(2 * x); });
    const Field out = apply_filter(v, spec);
    for (int j = 0; j <= 8; ++j) CHECK(out(j, 0) == Approx(0.5 * v(j, 0)).margin(1e-14));
  }
  SECTION("modes beyond the cutoff vanish") {
    FilterSpec spec;
    spec.kappa = 2.0;
    const Field v = Field::sample(g, 1, [](double x, int) { return std::sin(5 * x); });
    CHECK(apply_filter(v, spec).sup_norm() <= 1e-14);
  }
  SECTION("tiny stretching is the identity") {
    const Grid1D g32(32);
    FilterSpec spec;
    spec.kappa = 1e-6;
    const Field v = Field::sample(g32, 1, [](double x, int) { return x * (pi - x) * x; });
    const Field out = apply_filter(v, spec);
    for (int j = 0; j <= 32; ++j) CHECK(out(j, 0) == Approx(v(j, 0)).margin(1e-8));
  }
  SECTION("unshifted input is rejected") {
    const Field v = Field::sample(g, 1, [](double x, int) { return std::cos(x); });
    CHECK_THROWS_AS(apply_filter(v, FilterSpec{}), InvalidArgument);
  }
  SECTION("components are filtered independently") {
    const Field v = Field::sample(g, 2, [](double x, int c) { return std::sin((c + 1) * x); });
    FilterSpec spec;
    spec.kappa = 2.0;
    const Field out = apply_filter(v, spec);
    for (int j = 0; j <= 8; ++j) {
      CHECK(out(j, 0) == Approx(sigma8(0.25) * std::sin(g.x(j))).margin(1e-14));
      CHECK(out(j, 1) == Approx(0.5 * std::sin(2 * g.x(j))).margin(1e-14));
    }
  }
}

TEST_CASE("filter_boundary_trace") {
  const Grid1D g(16);
  FilterSpec spec;
  spec.kappa = 3.0;
  const Field c(g, 1, 2.5);
  const Field cc = filter_boundary_trace(c, spec);
  for (int j = 0; j <= 16; ++j) CHECK(cc(j, 0) == Approx(2.5).margin(1e-14));

  const Field cosx = Field::sample(g, 1, [](double x, int) { return std::cos(x); });
  const Field fc = filter_boundary_trace(cosx, spec);
  for (int j = 0; j <= 16; ++j) CHECK(fc(j, 0) == Approx(cosx(j, 0)).margin(1e-14));

  const Field osc = Field::sample(g, 1, [](double x, int) { return 1e-3 * std::sin(8 * x); });
  CHECK(filter_boundary_trace(osc, spec).sup_norm() <= 1e-15);
}

TEST_CASE("retained modes are stable for kappa >= kappa_c") {
  for (int n : {32, 64, 128})
    for (double ratio : {1.0, 1.5, 2.0, 4.0, 8.0, 16.0, 64.0}) {
      const Grid1D g(n);
      const double h = g.spacing();
      const double dt = ratio * h * h / 3;
      FilterSpec spec;
      spec.kappa = kappa_critical(dt, h);
      INFO("N=" << n << " ratio=" << ratio);
      CHECK(max_retained_root_modulus(g, dt, spec) <= 1.0 + 1e-12);
      spec.kappa *= 1.3;
      CHECK(max_retained_root_modulus(g, dt, spec) <= 1.0 + 1e-12);
    }
}

TEST_CASE("without the filter some mode is unstable above ratio 1") {
  const Grid1D g(64);
  const double h = g.spacing();
  FilterSpec none;
  none.kappa = 1e-9;  // sigma ~ 1 for every mode
  CHECK(max_retained_root_modulus(g, 2.0 * h * h / 3, none) > 1.0);
  CHECK(max_retained_root_modulus(g, 0.9 * h * h / 3, none) <= 1.0 + 1e-12);
}

TEST_CASE("filtered step expansion decays at order >= p - 2 away from the jump") {
  const auto error_at = sawtooth_error;
  const double t = 1.0;  // distance 1 from the jump
  const double e64 = error_at(64, t), e128 = error_at(128, t), e256 = error_at(256, t);
  CHECK(std::log2(e64 / e128) >= 6.0);
  CHECK(std::log2(e128 / e256) >= 6.0);

  for (int n : {64, 128, 256}) {
    const double h = pi / n;
    double near = 0;
    for (double tt : {0.5 * h, h, 2 * h}) near = std::max(near, error_at(n, tt));
    CHECK(near >= 0.1);
    CHECK(near <= pi);
  }
}

TEST_CASE("top band energy and growth monitors") {
  std::vector<double> b(63, 0.0);
  b[40] = 2.0;  // mode 41
  b[10] = 5.0;  // mode 11
  CHECK(retained_cutoff(1.0, 64) == 63);
  CHECK(retained_cutoff(2.0, 64) == 31);
  CHECK(top_band_energy(b, 1.0, 64) == 0.0);
  b[60] = 3.0;  // mode 61
  CHECK(top_band_energy(b, 1.0, 64) == 9.0);
  b[25] = 1.0;  // mode 26
  CHECK(top_band_energy(b, 2.0, 64) == 1.0);

  GrowthMonitor m;
  CHECK_FALSE(m.observe(1.0));
  CHECK_FALSE(m.observe(1.1));
  CHECK(m.observe(1.25));
  CHECK_FALSE(m.observe(1.3));
  CHECK_FALSE(m.observe(1.0));

  KappaMonitor km;
  for (double e : {1.0, 1.2, 1.5, 1.5}) km.observe(e);
  CHECK(km.multiplier() == Approx(1.1));
}
