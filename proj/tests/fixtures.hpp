#pragma once

#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "nsmhd/boundary.hpp"
#include "nsmhd/elliptic.hpp"
#include "nsmhd/field_ops.hpp"
#include "nsmhd/geometry.hpp"

namespace fx {

using Fn = std::function<double(double, double, double)>;

inline nsmhd::GridPtr grid(int dim, int nt, int nz) {
  return nsmhd::build_grid(nsmhd::GridSpec{dim, nt, nz});
}

inline nsmhd::ScalarField scalar(const nsmhd::GridPtr& g, const Fn& f) {
  return nsmhd::ScalarField(g, nsmhd::sample(*g, f));
}

/// Components in axis order; missing ones are zero.
inline nsmhd::VectorField vector(const nsmhd::GridPtr& g, const std::vector<Fn>& f) {
  nsmhd::VectorField u(g);
  for (size_t i = 0; i < f.size(); ++i)
    if (f[i]) u.comps[i] = nsmhd::sample(*g, f[i]);
  return u;
}

/// Smooth random field with nonzero normal trace.
inline nsmhd::VectorField random_smooth(const nsmhd::GridPtr& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  nsmhd::VectorField u(g);
  for (auto& comp : u.comps) {
    const double a = c(rng), b = c(rng), d = c(rng), e = c(rng);
    comp = nsmhd::sample(*g, [&](double x, double y, double z) {
      return a * std::cos(x + 2 * z) + b * std::sin(2 * x - y) * z * z + d * std::exp(z) +
             e * std::cos(y) * std::sin(3 * z);
    });
  }
  return u;
}

inline double max_abs(const nsmhd::VectorField& u) {
  double m = 0.0;
  for (const auto& c : u.comps) m = std::max(m, c.cwiseAbs().maxCoeff());
  return m;
}

inline double max_abs(const nsmhd::ScalarField& f) { return f.values.cwiseAbs().maxCoeff(); }

inline double order(double coarse, double fine) { return std::log2(coarse / fine); }

/// Robin profile on [0,1]: f = cos(a (z - 1/2)) with a tan(a/2) = 2 zeta, so
/// that f'(0) = 2 zeta f(0) and f'(1) = -2 zeta f(1).
inline double robin_wavenumber(double zeta) {
  double lo = 1e-9, hi = M_PI - 1e-9;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * std::tan(0.5 * mid) < 2.0 * zeta ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace fx
