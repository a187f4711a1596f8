#include "fixtures.hpp"

#include "nsmhd/errors.hpp"

using namespace nsmhd;

TEST_CASE("tangential spacing is 2 pi / n") {
  auto g = fx::grid(2, 8, 9);
  CHECK(g->dx() == doctest::Approx(0.7853981633974483).epsilon(1e-15));
}

TEST_CASE("conormal weight vanishes at the walls and is positive inside") {
  for (int nz : {8, 9, 33}) {
    auto g = fx::grid(2, 8, nz);
    const auto& phi = g->phi_weight();
    CHECK(phi(0) == 0.0);
    CHECK(phi(nz - 1) == 0.0);
    for (int i = 1; i < nz - 1; ++i) CHECK(phi(i) > 0.0);
  }
}

TEST_CASE("z nodes run from 0 to 1 strictly increasing") {
  auto g = fx::grid(3, 8, 17);
  const auto& z = g->z_nodes();
  CHECK(z(0) == 0.0);
  CHECK(z(16) == 1.0);
  for (int i = 1; i < 17; ++i) CHECK(z(i) > z(i - 1));
}

TEST_CASE("quadrature weights sum to the domain volume") {
  for (int nz : {8, 13, 64}) {
    auto g3 = fx::grid(3, 8, nz);
    CHECK(std::abs(g3->quad_weights().sum() / (4 * M_PI * M_PI) - 1.0) < 1e-12);
    CHECK(g3->volume() == doctest::Approx(39.47841760435743));
    auto g2 = fx::grid(2, 6, nz);
    CHECK(std::abs(g2->quad_weights().sum() / (2 * M_PI) - 1.0) < 1e-12);
  }
}

TEST_CASE("quadrature of band-limited cubic integrands matches a refined oracle") {
  auto integrate = [](int nt, int nz) {
    auto g = fx::grid(3, nt, nz);
    const Eigen::MatrixXd f = sample(*g, [](double x, double y, double z) {
      return (1.0 + std::cos(x) * std::cos(x)) * (2.0 - 3.0 * z + z * z * z) + std::sin(y) * z * z;
    });
    return (g->quad_weights().array() * f.array()).sum();
  };
  const double coarse = integrate(8, 9), oracle = integrate(32, 33);
  CHECK(std::abs(coarse - oracle) <= 1e-10 * std::abs(oracle));
  // closed form: (2 pi)^2 * 3/2 * (2 - 3/2 + 1/4)
  CHECK(std::abs(oracle - 4 * M_PI * M_PI * 1.5 * 0.75) <= 1e-10 * std::abs(oracle));
}

TEST_CASE("resolution below the minimum names the field") {
  auto expect = [](GridSpec s, const char* field) {
    try {
      build_grid(s);
      FAIL("no error");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(field) != std::string::npos);
    }
  };
  expect({2, 2, 9}, "n_tangential");
  expect({2, 7, 9}, "n_tangential");
  expect({2, 8, 4}, "n_normal");
  expect({4, 8, 9}, "dim");
}

TEST_CASE("tangential transform round trip") {
  auto g = fx::grid(3, 8, 9);
  Eigen::MatrixXd f = Eigen::MatrixXd::Random(g->nz(), g->nt());
  const Eigen::MatrixXd back = g->transform().inverse(g->transform().forward(f));
  CHECK((back - f).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("normal first derivative is exact for quadratics and converges") {
  auto g = fx::grid(2, 4, 9);
  const Eigen::MatrixXd q = sample(*g, [](double, double, double z) { return 1 + 2 * z - 3 * z * z; });
  const Eigen::MatrixXd dq = stencil::d1(q, g->h());
  const Eigen::MatrixXd exact = sample(*g, [](double, double, double z) { return 2 - 6 * z; });
  CHECK((dq - exact).cwiseAbs().maxCoeff() < 1e-12);

  double prev = 0.0;
  for (int nz : {17, 33, 65}) {
    auto gg = fx::grid(2, 4, nz);
    const Eigen::MatrixXd f = sample(*gg, [](double, double, double z) { return std::sin(3 * z); });
    const Eigen::MatrixXd e = sample(*gg, [](double, double, double z) { return 3 * std::cos(3 * z); });
    const double err = (stencil::d1(f, gg->h()) - e).cwiseAbs().maxCoeff();
    if (prev > 0.0) CHECK(fx::order(prev, err) > 1.8);
    prev = err;
  }
}

TEST_CASE("conormal stencils agree with symbolic derivatives to scheme order") {
  double prev1 = 0.0, prev3 = 0.0;
  for (int n : {16, 32, 64}) {
    auto g = fx::grid(2, n, n + 1);
    auto f = fx::scalar(g, [](double x, double, double z) { return std::sin(x) * std::exp(z); });
    const Eigen::MatrixXd z1 = partial(*g, f.values, 0);
    const Eigen::MatrixXd z1e = sample(*g, [](double x, double, double z) { return std::cos(x) * std::exp(z); });
    const Eigen::MatrixXd z3 = g->phi_weight().asDiagonal() * partial(*g, f.values, 1);
    const Eigen::MatrixXd z3e = sample(*g, [](double x, double, double z) {
      return z * (1 - z) * std::sin(x) * std::exp(z);
    });
    const double e1 = (z1 - z1e).cwiseAbs().maxCoeff(), e3 = (z3 - z3e).cwiseAbs().maxCoeff();
    CHECK(e1 < 1e-12);
    if (prev3 > 0.0) CHECK(fx::order(prev3, e3) > 1.8);
    prev1 = e1;
    prev3 = e3;
  }
  CHECK(prev1 < 1e-12);
}
