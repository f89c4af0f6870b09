#include <catch_amalgamated.hpp>

#include "fastrd/bench.hpp"
#include "fastrd/solver2d.hpp"

using namespace fastrd;
using Catch::Approx;

namespace {

Field2D tensor_mode(const Grid2D& g, int k, int l) {
  return Field2D::sample(g, 1, [&](double x, double y, int) {
    return std::sin(k * x) * std::sin(l * y);
  });
}

}  // namespace

TEST_CASE("five-point Laplacian") {
  const Grid2D g(16, 12);
  CHECK(apply_laplacian_5pt(Field2D(g, 1, 2.0)).sup_norm() == 0.0);
  const Field2D lin = Field2D::sample(g, 1, [](double x, double y, int) { return x + y; });
  CHECK(apply_laplacian_5pt(lin).sup_norm() <= 1e-12);

  const Field2D u = tensor_mode(g, 3, 5);
  const Field2D d = apply_laplacian_5pt(u);
  const double lam =
      discrete_laplacian_symbol(g.x_axis(), 3) + discrete_laplacian_symbol(g.y_axis(), 5);
  for (int j = 1; j < 12; ++j)
    for (int i = 1; i < 16; ++i) CHECK(d(i, j, 0) == Approx(lam * u(i, j, 0)).margin(1e-11));
}

TEST_CASE("step2d follows the tensor-mode recurrence") {
  const Grid2D g(16, 16);
  StepConfig cfg;
  cfg.dt = 0.5 * std::pow(g.x_axis().spacing(), 2) / 6;
  const auto bc = BoundaryData2D::zeros(g, 1);
  CHECK(step2d(SchemeState2D(Field2D(g, 1), Field2D(g, 1), 0, cfg.dt), zero_reaction(), cfg, bc)
            .sup_norm() == 0.0);

  const Field2D u = tensor_mode(g, 4, 9);
  Field2D prev = u;
  for (auto& v : prev.values()) v *= 0.5;
  const Field2D next =
      step2d(SchemeState2D(u, prev, 0, cfg.dt), zero_reaction(), cfg, bc);
  const double lam =
      discrete_laplacian_symbol(g.x_axis(), 4) + discrete_laplacian_symbol(g.y_axis(), 9);
  const double amp = (4 - 0.5 + 2 * cfg.dt * lam * (2 - 0.5)) / 3;
  for (int j = 1; j < 16; ++j)
    for (int i = 1; i < 16; ++i) CHECK(next(i, j, 0) == Approx(amp * u(i, j, 0)).margin(1e-12));
}

TEST_CASE("unfiltered 2D limit is dt = h^2/6") {
  const Grid2D g(32, 32);
  const double h = g.x_axis().spacing();
  auto worst = [&](double dt) {
    double w = 0;
    for (int l = 1; l < 32; ++l)
      for (int k = 1; k < 32; ++k)
        w = std::max(w, max_root_modulus(dt * (discrete_laplacian_symbol(g.x_axis(), k) +
                                               discrete_laplacian_symbol(g.y_axis(), l))));
    return w;
  };
  CHECK(worst(0.95 * h * h / 6) <= 1.0 + 1e-12);
  CHECK(worst(1.05 * h * h / 6) > 1.0);
}

TEST_CASE("retained tensor modes are stable at kappa_c 2D") {
  for (auto [nx, ny] : {std::pair{32, 32}, std::pair{32, 48}, std::pair{64, 40}}) {
    const Grid2D g(nx, ny);
    const double hx = g.x_axis().spacing(), hy = g.y_axis().spacing();
    const double h_eff2 = 1 / (1 / (hx * hx) + 1 / (hy * hy));
    for (double f : {1.0, 2.0, 4.0, 10.0}) {
      const double dt = f * h_eff2 / 3;  // f = 1 is the unfiltered limit
      FilterSpec spec;
      spec.kappa = kappa_critical_2d(dt, hx, hy);
      INFO(nx << "x" << ny << " factor " << f);
      CHECK(max_retained_root_modulus_2d(g, dt, spec) <= 1.0 + 1e-12);
    }
  }
  const double h = pi / 32;
  CHECK(kappa_critical_2d(h * h / 6, h, h) == 1.0);
  CHECK(kappa_critical_2d(h * h / 3, h, h) == Approx(2.0).epsilon(1e-14));
}

TEST_CASE("tensor filter is separable") {
  const Grid2D g(16, 12);
  const Field2D w = Field2D::sample(g, 1, [](double x, double y, int) {
    return std::sin(x) * std::sin(2 * y) + 0.3 * std::sin(13 * x) * std::sin(y) +
           x * (pi - x) * y * (pi - y);
  });
  Field2D wz = w;
  for (int i = 0; i <= 16; ++i) wz(i, 0, 0) = wz(i, 12, 0) = 0;
  for (int j = 0; j <= 12; ++j) wz(0, j, 0) = wz(16, j, 0) = 0;
  FilterSpec spec;
  spec.kappa = 1.7;
  const Field2D joint = apply_filter_2d(wz, spec);

  // Filter each row in x, then each column in y, with the 1D filter.
  Field2D sep = wz;
  for (int j = 1; j < 12; ++j) {
    Field row(g.x_axis(), 1);
    for (int i = 0; i <= 16; ++i) row(i, 0) = sep(i, j, 0);
    const Field out = apply_filter(row, spec);
    for (int i = 0; i <= 16; ++i) sep(i, j, 0) = out(i, 0);
  }
  for (int i = 1; i < 16; ++i) {
    Field col(g.y_axis(), 1);
    for (int j = 0; j <= 12; ++j) col(j, 0) = sep(i, j, 0);
    const Field out = apply_filter(col, spec);
    for (int j = 0; j <= 12; ++j) sep(i, j, 0) = out(j, 0);
  }
  for (int j = 0; j <= 12; ++j)
    for (int i = 0; i <= 16; ++i) CHECK(joint(i, j, 0) == Approx(sep(i, j, 0)).margin(1e-12));
}

TEST_CASE("postprocess2d examples") {
  const Grid2D g(16, 16);
  FilterSpec spec;
  spec.kappa = 2.0;
  SECTION("cos x + cos y is absorbed by the shifts") {
    auto fn = [](double x, double y, int) { return std::cos(x) + std::cos(y); };
    const Field2D u = Field2D::sample(g, 1, fn);
    const Field2D out = postprocess2d(u, BoundaryData2D::sample(g, 1, fn), spec);
    for (int j = 0; j <= 16; ++j)
      for (int i = 0; i <= 16; ++i) CHECK(out(i, j, 0) == Approx(u(i, j, 0)).margin(1e-10));
  }
  SECTION("modes beyond the cutoff in both directions vanish") {
    const Field2D out = postprocess2d(tensor_mode(g, 10, 12), BoundaryData2D::zeros(g, 1), spec);
    CHECK(out.sup_norm() <= 1e-14);
  }
  SECTION("tiny stretching is the identity") {
    auto fn = [](double x, double y, int) { return std::exp(0.2 * x * y) + std::sin(7 * x); };
    const Field2D u = Field2D::sample(g, 1, fn);
    FilterSpec id;
    id.kappa = 1e-9;
    const Field2D out = postprocess2d(u, BoundaryData2D::sample(g, 1, fn), id);
    for (int j = 0; j <= 16; ++j)
      for (int i = 0; i <= 16; ++i) CHECK(out(i, j, 0) == Approx(u(i, j, 0)).margin(1e-8));
  }
  SECTION("edges equal the filtered boundary data") {
    auto fn = [](double x, double y, int) {
      return std::exp(0.2 * x * y) + 0.1 * std::sin(13 * x) * std::cos(y);
    };
    const auto bc = BoundaryData2D::sample(g, 1, fn);
    const Field2D out = postprocess2d(Field2D::sample(g, 1, fn), bc, spec);
    const auto fb = filter_boundary_data(bc, g, spec);
    for (int i = 0; i <= 16; ++i) {
      CHECK(out(i, 0, 0) == fb.bottom[i]);
      CHECK(out(i, 16, 0) == fb.top[i]);
      CHECK(out(0, i, 0) == fb.left[i]);
      CHECK(out(16, i, 0) == fb.right[i]);
    }
    CHECK_NOTHROW(fb.check_compatible(g));
  }
}

TEST_CASE("2D manufactured solution converges at second order in space") {
  ManufacturedCase2D mc;
  auto err = [&](int n) {
    const Grid2D g(n, n);
    StepConfig cfg;
    cfg.dt = 0.25 * std::pow(pi / 64, 2) / 6;
    const int steps = static_cast<int>(std::lround(0.05 / cfg.dt));
    cfg.dt = 0.05 / steps;
    Solver2D s(mc.problem(g), cfg, false);
    REQUIRE(s.run(steps).stable);
    return error_norms(s.solution(), mc.exact_field(g, s.time())).linf;
  };
  const double order = std::log2(err(16) / err(32));
  CHECK(order >= 1.8);
  CHECK(order <= 2.2);
}
