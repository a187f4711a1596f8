#pragma once

#include <Eigen/Core>

#include <vector>

#include "nsmhd/geometry.hpp"

namespace nsmhd {

/// One real per node, stored `nz x nt`.
struct ScalarField {
  GridPtr grid;
  Eigen::MatrixXd values;

  ScalarField() = default;
  explicit ScalarField(GridPtr g)
      : grid(std::move(g)), values(Eigen::MatrixXd::Zero(grid->nz(), grid->nt())) {}
  ScalarField(GridPtr g, Eigen::MatrixXd v) : grid(std::move(g)), values(std::move(v)) {}
};

/// `dim` components; the last one is wall-normal.
struct VectorField {
  GridPtr grid;
  std::vector<Eigen::MatrixXd> comps;

  VectorField() = default;
  explicit VectorField(GridPtr g) : grid(std::move(g)) {
    comps.assign(grid->dim(), Eigen::MatrixXd::Zero(grid->nz(), grid->nt()));
  }

  int dim() const { return int(comps.size()); }
  Eigen::MatrixXd& normal() { return comps.back(); }
  const Eigen::MatrixXd& normal() const { return comps.back(); }
};

/// Rank-2 field, `comps[i][j]`; for a gradient this is d_j u_i.
struct TensorField {
  GridPtr grid;
  std::vector<std::vector<Eigen::MatrixXd>> comps;

  TensorField() = default;
  explicit TensorField(GridPtr g) : grid(std::move(g)) {
    const int d = grid->dim();
    comps.assign(d, std::vector<Eigen::MatrixXd>(
                        d, Eigen::MatrixXd::Zero(grid->nz(), grid->nt())));
  }
  int dim() const { return int(comps.size()); }
};

/// A vector field plus one ghost row per component beyond each wall
/// (z = -h and z = 1 + h).
struct GhostedVectorField {
  VectorField field;
  std::vector<Eigen::RowVectorXd> ghost_lo;
  std::vector<Eigen::RowVectorXd> ghost_hi;
};

inline VectorField operator+(VectorField a, const VectorField& b) {
  for (int i = 0; i < a.dim(); ++i) a.comps[i] += b.comps[i];
  return a;
}
inline VectorField operator-(VectorField a, const VectorField& b) {
  for (int i = 0; i < a.dim(); ++i) a.comps[i] -= b.comps[i];
  return a;
}
inline VectorField operator*(double s, VectorField a) {
  for (auto& c : a.comps) c *= s;
  return a;
}
inline ScalarField operator+(ScalarField a, const ScalarField& b) {
  a.values += b.values;
  return a;
}
inline ScalarField operator-(ScalarField a, const ScalarField& b) {
  a.values -= b.values;
  return a;
}
inline ScalarField operator*(double s, ScalarField a) {
  a.values *= s;
  return a;
}

/// a += s * b
inline void axpy(double s, const VectorField& b, VectorField& a) {
  for (int i = 0; i < a.dim(); ++i) a.comps[i] += s * b.comps[i];
}

inline bool all_finite(const VectorField& u) {
  for (const auto& c : u.comps)
    if (!c.allFinite()) return false;
  return true;
}

/// Samples f(x, y, z) on the grid (y is ignored in 2D).
template <typename Fn>
Eigen::MatrixXd sample(const ChannelGrid& g, Fn&& f) {
  Eigen::MatrixXd out(g.nz(), g.nt());
  for (int ix = 0; ix < g.nx(); ++ix)
    for (int iy = 0; iy < g.ny(); ++iy) {
      const int c = g.column(ix, iy);
      for (int iz = 0; iz < g.nz(); ++iz) out(iz, c) = f(g.x(ix), g.y(iy), g.z_nodes()(iz));
    }
  return out;
}

}  // namespace nsmhd
