#include "fixtures.hpp"

#include "nsmhd/errors.hpp"

using namespace nsmhd;

TEST_CASE("curl of a gradient vanishes") {
  auto g2 = fx::grid(2, 16, 33);
  auto f2 = fx::scalar(g2, [](double x, double, double z) { return std::sin(x) * std::cosh(z) + z * z * z; });
  const VectorField gf2 = gradient(f2);
  CHECK(fx::max_abs(curl_2d(gf2)) <= 1e-10 * fx::max_abs(gf2));

  auto g3 = fx::grid(3, 8, 17);
  auto f3 = fx::scalar(g3, [](double x, double y, double z) { return std::cos(x + y) * std::exp(z); });
  const VectorField gf3 = gradient(f3);
  CHECK(fx::max_abs(curl_3d(gf3)) <= 1e-10 * fx::max_abs(gf3));
}

TEST_CASE("divergence of a curl vanishes") {
  auto g = fx::grid(3, 8, 17);
  auto a = fx::vector(g, {[](double x, double y, double z) { return std::sin(y) * z * z; },
                          [](double x, double, double z) { return std::cos(x) * std::sin(z); },
                          [](double x, double y, double z) { return std::sin(x + y) * z; }});
  const VectorField c = curl_3d(a);
  CHECK(fx::max_abs(divergence(c)) <= 1e-10 * fx::max_abs(c));
}

TEST_CASE("divergence of (sin x, 0) is cos x") {
  auto g = fx::grid(2, 16, 17);
  auto v = fx::vector(g, {[](double x, double, double) { return std::sin(x); }, nullptr});
  auto d = divergence(v);
  auto e = fx::scalar(g, [](double x, double, double) { return std::cos(x); });
  CHECK((d.values - e.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("strain of a rigid translation vanishes") {
  auto g = fx::grid(3, 8, 9);
  auto u = fx::vector(g, {[](double, double, double) { return 2.5; }, nullptr, nullptr});
  const TensorField s = strain(u);
  for (const auto& row : s.comps)
    for (const auto& c : row) CHECK(c.cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("Laplacian of a smooth field converges at second order") {
  double prev = 0.0;
  for (int nz : {17, 33, 65}) {
    auto g = fx::grid(2, 16, nz);
    auto u = fx::vector(g, {[](double x, double, double z) { return std::sin(x) * std::cos(2 * z); }, nullptr});
    GhostedVectorField gh{u, {}, {}};
    const double h = g->h();
    for (int i = 0; i < 2; ++i) {
      gh.ghost_lo.push_back(sample(*g, [&](double x, double, double) { return i ? 0.0 : std::sin(x) * std::cos(-2 * h); }).row(0));
      gh.ghost_hi.push_back(sample(*g, [&](double x, double, double) { return i ? 0.0 : std::sin(x) * std::cos(2 * (1 + h)); }).row(0));
    }
    const VectorField l = laplacian(gh);
    const Eigen::MatrixXd e = sample(*g, [](double x, double, double z) { return -5 * std::sin(x) * std::cos(2 * z); });
    const double err = (l.comps[0] - e).cwiseAbs().maxCoeff();
    if (prev > 0.0) CHECK(fx::order(prev, err) > 1.8);
    prev = err;
  }
}

TEST_CASE("inner products") {
  auto g3 = fx::grid(3, 8, 9);
  auto one = fx::scalar(g3, [](double, double, double) { return 1.0; });
  CHECK(inner_product(one, one) == doctest::Approx(39.4784176).epsilon(1e-9));
  auto s = fx::scalar(g3, [](double x, double, double) { return std::sin(x); });
  auto c = fx::scalar(g3, [](double x, double, double) { return std::cos(x); });
  CHECK(std::abs(inner_product(s, c)) < 1e-12);
  CHECK(inner_product(s, s) == doctest::Approx(2 * M_PI * M_PI).epsilon(1e-12));
  CHECK(inner_product(s, c) == inner_product(c, s));

  auto g2 = fx::grid(2, 8, 9);
  CHECK_THROWS_AS(inner_product(s, fx::scalar(g2, [](double, double, double) { return 1.0; })), UsageError);
}

TEST_CASE("differentiate rejects rank mismatches") {
  auto g = fx::grid(2, 8, 9);
  ScalarField f(g);
  CHECK_THROWS_AS(differentiate(f, DiffOp::curl), UsageError);
  CHECK_THROWS_AS(differentiate(f, DiffOp::strain), UsageError);
  CHECK_THROWS_AS(differentiate(VectorField(g), DiffOp::advect), UsageError);
  CHECK(std::holds_alternative<VectorField>(differentiate(f, DiffOp::grad)));
  CHECK(std::holds_alternative<ScalarField>(differentiate(VectorField(g), DiffOp::div)));
}

TEST_CASE("skew advection is antisymmetric for wall-tangent transport") {
  auto g = fx::grid(2, 16, 33);
  auto a = leray_project(fx::random_smooth(g, 1));
  auto u = fx::random_smooth(g, 2), w = fx::random_smooth(g, 3);
  const double lhs = inner_product(advect_skew(a, w), u);
  const double rhs = -inner_product(w, advect_skew(a, u));
  CHECK(std::abs(lhs - rhs) <= 1e-12 * fx::max_abs(a) * norm(u) * norm(w) * 100);
}

TEST_CASE("Leray projection sends wall-compatible gradients to zero") {
  auto g = fx::grid(2, 8, 33);
  auto u = fx::vector(g, {nullptr, [](double, double, double z) { return std::sin(M_PI * z); }});
  CHECK(fx::max_abs(leray_project(u)) < 1e-12);
  auto g3 = fx::grid(3, 8, 33);
  auto grad_phi = gradient(fx::scalar(g3, [](double x, double y, double z) {
    return std::cos(x) * std::sin(y) * std::cosh(z) + z * z * (1.5 - z);
  }));
  CHECK(fx::max_abs(leray_project(grad_phi)) < 1e-10 * fx::max_abs(grad_phi));
}

TEST_CASE("Leray projection fixes admissible fields") {
  auto g = fx::grid(2, 8, 33);
  auto u = fx::vector(g, {[](double, double, double z) { return std::cos(M_PI * z); }, nullptr});
  CHECK(fx::max_abs(leray_project(u) - u) < 1e-12);
}

TEST_CASE("Leray projection of (0, z(1-z)) matches a 1D boundary-value oracle") {
  auto g = fx::grid(2, 8, 33);
  auto u = fx::vector(g, {nullptr, [](double, double, double z) { return z * (1 - z); }});
  ScalarField q;
  const VectorField pu = projector_for(g)->project(u, q);
  // 1D oracle at 10x resolution: phi'' = 1 - 2z, phi'(0) = phi'(1) = 0,
  // by cumulative trapezoid of phi' = z - z^2 from the flux form
  const int n = 10 * (g->nz() - 1) + 1;
  const double h = 1.0 / (n - 1);
  Eigen::VectorXd slope(n), phi(n);
  slope(0) = 0.0;
  for (int i = 1; i < n; ++i) slope(i) = slope(i - 1) + h * (1.0 - (2 * i - 1) * h);
  phi(0) = 0.0;
  for (int i = 1; i < n; ++i) phi(i) = phi(i - 1) + 0.5 * h * (slope(i - 1) + slope(i));
  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += (i == 0 || i == n - 1 ? 0.5 : 1.0) * h * phi(i);
  phi.array() -= mean;
  CHECK(std::abs(slope(n - 1)) < 1e-12);
  // u - grad phi = 0 for this pure z field
  CHECK(fx::max_abs(pu) < 1e-12);
  double err = 0.0;
  for (int i = 0; i < g->nz(); ++i) err = std::max(err, std::abs(q.values(i, 3) - phi(10 * i)));
  CHECK(err < 1e-4);
}

TEST_CASE("Leray projection: divergence, trace, idempotence, symmetry") {
  for (auto spec : {GridSpec{2, 32, 33}, GridSpec{3, 8, 17}}) {
    auto g = build_grid(spec);
    auto u = fx::random_smooth(g, 11), w = fx::random_smooth(g, 12);
    const VectorField pu = leray_project(u), pw = leray_project(w);
    CHECK(relative_divergence(pu) < 1e-10);
    CHECK(pu.normal().row(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(pu.normal().row(g->nz() - 1).cwiseAbs().maxCoeff() == 0.0);
    CHECK(norm(leray_project(pu) - pu) <= 1e-12 * norm(u));
    CHECK(std::abs(inner_product(pu, w) - inner_product(u, pw)) <= 1e-10 * norm(u) * norm(w));
    CHECK(std::abs(inner_product(pu, u - pu)) <= 1e-10 * norm(u) * norm(u));
  }
}

TEST_CASE("projection potential of a non-gradient field converges") {
  // X = curl(sin x z^2) is solenoidal with d_z q = X_z on the walls:
  // q = -cosh(z) cos(x) / sinh(1)
  double prev = 0.0;
  for (int nz : {17, 33, 65}) {
    auto g = fx::grid(2, 8, nz);
    auto x = fx::vector(g, {[](double x, double, double z) { return 2 * z * std::sin(x); },
                            [](double x, double, double z) { return -z * z * std::cos(x); }});
    ScalarField q;
    projector_for(g)->project(x, q);
    auto e = fx::scalar(g, [](double x, double, double z) { return -std::cosh(z) * std::cos(x) / std::sinh(1.0); });
    const double err = fx::max_abs(q - e);
    if (prev > 0.0) CHECK(fx::order(prev, err) > 1.8);
    prev = err;
  }
}

TEST_CASE("divergence splits into normal and tangential parts at the wall rows") {
  auto g = fx::grid(2, 16, 33);
  auto v = leray_project(fx::random_smooth(g, 5));
  const ScalarField d = divergence(v);
  const Eigen::MatrixXd dn = partial(*g, v.normal(), 1);
  const Eigen::MatrixXd dt = partial(*g, v.comps[0], 0);
  for (int row : {0, 1, g->nz() - 2, g->nz() - 1})
    CHECK((d.values.row(row) - dn.row(row) - dt.row(row)).cwiseAbs().maxCoeff() < 1e-12);
  // on the walls the tangential part vanishes with v . n
  CHECK(partial(*g, v.normal(), 0).row(0).cwiseAbs().maxCoeff() == 0.0);
}
