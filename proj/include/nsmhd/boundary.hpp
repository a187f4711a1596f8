#pragma once

#include "nsmhd/fields.hpp"

namespace nsmhd {

// Wall convention: outward normals are (0, 0, -1) at z = 0 and (0, 0, +1) at
// z = 1. In 2D the normal is the second component.

enum class ClosureVariant { navier, slip };

/// Ghost-layer rule for one field. `navier` imposes f . n = 0 and
/// d_n f_tau = -2 zeta f_tau; `slip` imposes only f . n = 0 and mirrors the
/// tangential components evenly.
struct WallClosure {
  double zeta = 0.0;
  ClosureVariant variant = ClosureVariant::navier;
};

inline double outward_normal(bool upper) { return upper ? 1.0 : -1.0; }

/// Fills ghost rows at z = -h and z = 1 + h.
///
/// Tangential components: centered Robin relation through the wall node
/// (navier) or even reflection (slip). Normal component: the wall value is
/// zeroed and the ghost is the quadratic through the wall whose curvature
/// matches d_zz f_n = -div_tau(d_z f_tau) with d_z f_tau from the Robin
/// relation, so the Laplacian of f_n stays consistent up to the wall.
GhostedVectorField close_ghosts(const VectorField& f, const WallClosure& c);

/// The ghost rows of close_ghosts alone, given the tangential divergence of
/// f on the two wall rows (only read by the navier rule with zeta != 0).
void ghost_rows(const VectorField& f, const WallClosure& c, const Eigen::RowVectorXd& div_lo,
                const Eigen::RowVectorXd& div_hi, std::vector<Eigen::RowVectorXd>& lo,
                std::vector<Eigen::RowVectorXd>& hi);

/// eta = Pi((grad f + grad f^T) n) + 2 zeta Pi f, with n taken from the
/// nearer wall. Wall rows use one-sided second-order normal derivatives, so
/// the trace is a genuine discretization error for Navier-closed data.
VectorField eta_quantity(const VectorField& f, double zeta);

/// sup over both walls of |Pi(omega x n) + 2 zeta Pi f|.
double wall_vorticity_residual(const VectorField& f, double zeta);

/// sup over both walls of |d_n f_tau + 2 zeta f_tau|.
double robin_residual(const VectorField& f, double zeta);

/// sup over both walls of |eta|.
double eta_wall_trace(const VectorField& f, double zeta);

/// Integral over both walls of |f_tau|^2.
double wall_tangential_energy(const VectorField& f);

}  // namespace nsmhd
