#include "nsmhd/boundary.hpp"

#include "nsmhd/field_ops.hpp"

#include <tuple>

namespace nsmhd {

namespace {

// Tangential divergence on the two wall rows.
std::pair<Eigen::RowVectorXd, Eigen::RowVectorXd> wall_tangential_div(const VectorField& f) {
  const auto& g = *f.grid;
  Eigen::RowVectorXd lo = Eigen::RowVectorXd::Zero(g.nt());
  Eigen::RowVectorXd hi = lo;
  for (int j = 0; j + 1 < g.dim(); ++j) {
    const Eigen::MatrixXd d = partial(g, f.comps[j], j);
    lo += d.row(0);
    hi += d.row(g.nz() - 1);
  }
  return {lo, hi};
}

// Pi(omega x n) + 2 zeta Pi f on one wall, per tangential component.
std::vector<Eigen::RowVectorXd> wall_relation(const VectorField& f, double zeta, bool upper,
                                              bool vorticity_form) {
  const auto& g = *f.grid;
  const int d = g.dim();
  const int row = upper ? g.nz() - 1 : 0;
  const double nz = outward_normal(upper);
  std::vector<Eigen::RowVectorXd> out;
  for (int i = 0; i + 1 < d; ++i) {
    Eigen::RowVectorXd dzf = stencil::wall_d1(f.comps[i], g.h(), upper);
    const Eigen::RowVectorXd dif = partial(g, f.normal(), i).row(row);
    // vorticity: n_z (d_z f_i - d_i f_z); strain: n_z (d_z f_i + d_i f_z)
    Eigen::RowVectorXd r = nz * (vorticity_form ? Eigen::RowVectorXd(dzf - dif) : Eigen::RowVectorXd(dzf + dif));
    r += 2.0 * zeta * f.comps[i].row(row);
    out.push_back(std::move(r));
  }
  return out;
}

double sup_wall(const VectorField& f, double zeta, bool vorticity_form) {
  double s = 0.0;
  for (bool upper : {false, true})
    for (const auto& r : wall_relation(f, zeta, upper, vorticity_form))
      s = std::max(s, r.cwiseAbs().maxCoeff());
  return s;
}

}  // namespace

void ghost_rows(const VectorField& f, const WallClosure& c, const Eigen::RowVectorXd& div_lo,
                const Eigen::RowVectorXd& div_hi, std::vector<Eigen::RowVectorXd>& lo,
                std::vector<Eigen::RowVectorXd>& hi) {
  const auto& g = *f.grid;
  const int n = g.nz();
  const int d = g.dim();
  const double h = g.h();
  const bool navier = c.variant == ClosureVariant::navier;
  const double z = navier ? c.zeta : 0.0;
  lo.clear();
  hi.clear();
  for (int i = 0; i + 1 < d; ++i) {
    const auto& u = f.comps[i];
    // lower: d_z u = 2 zeta u, upper: d_z u = -2 zeta u
    lo.push_back(u.row(1) - 4.0 * h * z * u.row(0));
    hi.push_back(u.row(n - 2) - 4.0 * h * z * u.row(n - 1));
  }
  const auto& w = f.normal();
  if (z != 0.0) {
    lo.push_back(-w.row(1) - h * h * 2.0 * z * div_lo);
    hi.push_back(-w.row(n - 2) + h * h * 2.0 * z * div_hi);
  } else {
    lo.push_back(-w.row(1));
    hi.push_back(-w.row(n - 2));
  }
}

GhostedVectorField close_ghosts(const VectorField& f, const WallClosure& c) {
  const int n = f.grid->nz();
  GhostedVectorField out{f, {}, {}};
  out.field.normal().row(0).setZero();
  out.field.normal().row(n - 1).setZero();
  Eigen::RowVectorXd div_lo, div_hi;
  if (c.variant == ClosureVariant::navier && c.zeta != 0.0)
    std::tie(div_lo, div_hi) = wall_tangential_div(f);
  ghost_rows(f, c, div_lo, div_hi, out.ghost_lo, out.ghost_hi);
  return out;
}

VectorField eta_quantity(const VectorField& f, double zeta) {
  const auto& g = *f.grid;
  const int d = g.dim();
  const int n = g.nz();
  VectorField eta(f.grid);
  Eigen::VectorXd nz(n);
  for (int k = 0; k < n; ++k) nz(k) = outward_normal(g.z_nodes()(k) > 0.5);
  for (int i = 0; i + 1 < d; ++i) {
    Eigen::MatrixXd dz = stencil::d1(f.comps[i], g.h());
    dz.row(0) = stencil::wall_d1(f.comps[i], g.h(), false);
    dz.row(n - 1) = stencil::wall_d1(f.comps[i], g.h(), true);
    const Eigen::MatrixXd di = partial(g, f.normal(), i);
    eta.comps[i] = nz.asDiagonal() * (dz + di) + 2.0 * zeta * f.comps[i];
  }
  return eta;
}

double wall_vorticity_residual(const VectorField& f, double zeta) {
  return sup_wall(f, zeta, true);
}

double eta_wall_trace(const VectorField& f, double zeta) { return sup_wall(f, zeta, false); }

double robin_residual(const VectorField& f, double zeta) {
  const auto& g = *f.grid;
  double s = 0.0;
  for (bool upper : {false, true}) {
    const int row = upper ? g.nz() - 1 : 0;
    for (int i = 0; i + 1 < g.dim(); ++i) {
      const Eigen::RowVectorXd r = outward_normal(upper) * stencil::wall_d1(f.comps[i], g.h(), upper) +
                                   2.0 * zeta * f.comps[i].row(row);
      s = std::max(s, r.cwiseAbs().maxCoeff());
    }
  }
  return s;
}

double wall_tangential_energy(const VectorField& f) {
  const auto& g = *f.grid;
  double s = 0.0;
  for (int i = 0; i + 1 < g.dim(); ++i)
    s += f.comps[i].row(0).squaredNorm() + f.comps[i].row(g.nz() - 1).squaredNorm();
  return s * g.tangential_cell();
}

}  // namespace nsmhd
