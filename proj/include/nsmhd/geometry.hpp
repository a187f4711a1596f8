#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <complex>
#include <memory>
#include <tuple>

namespace nsmhd {

/// Resolution of the channel T^{dim-1} x (0,1).
struct GridSpec {
  int dim = 2;
  int n_tangential = 64;  ///< points per periodic direction (period 2*pi)
  int n_normal = 65;      ///< nodes across [0,1], walls included

  friend bool operator<(const GridSpec& a, const GridSpec& b) {
    return std::tie(a.dim, a.n_tangential, a.n_normal) <
           std::tie(b.dim, b.n_tangential, b.n_normal);
  }
  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return std::tie(a.dim, a.n_tangential, a.n_normal) ==
           std::tie(b.dim, b.n_tangential, b.n_normal);
  }
};

class TangentialTransform;

/// Periodic-in-tangential, bounded-in-normal collocation grid.
///
/// Node values of a scalar live in an `nz x nt` column-major matrix: column
/// `t = ix * ny + iy` holds one wall-normal line, so the flat memory order is
/// row-major over (ix, iy, iz). In 2D `ny == 1`.
///
/// The normal direction carries the diagonal norm of a fourth-order
/// summation-by-parts first derivative; those weights double as the
/// quadrature (exact for cubics in z).
class ChannelGrid {
 public:
  explicit ChannelGrid(const GridSpec& spec);
  ~ChannelGrid();
  ChannelGrid(const ChannelGrid&) = delete;
  ChannelGrid& operator=(const ChannelGrid&) = delete;

  const GridSpec& spec() const { return spec_; }
  int dim() const { return spec_.dim; }
  int nx() const { return spec_.n_tangential; }
  int ny() const { return spec_.dim == 3 ? spec_.n_tangential : 1; }
  int nz() const { return spec_.n_normal; }
  int nt() const { return nx() * ny(); }
  Eigen::Index size() const { return Eigen::Index(nz()) * nt(); }

  double dx() const { return dx_; }  ///< tangential spacing
  double h() const { return h_; }    ///< normal spacing
  double volume() const;

  double x(int ix) const { return ix * dx_; }
  double y(int iy) const { return iy * dx_; }
  int column(int ix, int iy) const { return ix * ny() + iy; }

  const Eigen::VectorXd& z_nodes() const { return z_; }
  /// Normal quadrature weights; they sum to 1.
  const Eigen::VectorXd& z_weights() const { return wz_; }
  /// Tangential cell measure (2*pi/nx)^(dim-1).
  double tangential_cell() const { return cell_; }
  /// Per-node volume weights, `nz x nt`.
  Eigen::MatrixXd quad_weights() const;
  /// Conormal weight phi(z) = z (1 - z) at the nodes.
  const Eigen::VectorXd& phi_weight() const { return phi_; }

  /// Number of retained complex tangential modes of a real field.
  int n_modes() const { return n_modes_; }
  /// Wavenumbers per mode. The `_eff` variants zero the Nyquist entries and
  /// are used by first derivatives; `k2` is the full |k|^2.
  const Eigen::ArrayXd& kx_eff() const { return kx_eff_; }
  const Eigen::ArrayXd& ky_eff() const { return ky_eff_; }
  const Eigen::ArrayXd& k2() const { return k2_; }
  const Eigen::ArrayXd& k2_eff() const { return k2_eff_; }

  const TangentialTransform& transform() const { return *transform_; }

 private:
  GridSpec spec_;
  double dx_ = 0.0;
  double h_ = 0.0;
  double cell_ = 0.0;
  Eigen::VectorXd z_, wz_, phi_;
  int n_modes_ = 0;
  Eigen::ArrayXd kx_eff_, ky_eff_, k2_, k2_eff_;
  std::unique_ptr<TangentialTransform> transform_;
};

using GridPtr = std::shared_ptr<const ChannelGrid>;

/// Validates `spec` and builds the grid.
/// Throws ConfigError naming the offending field when the resolution is
/// below the minimum (n_tangential >= 4 and even, n_normal >= 8).
GridPtr build_grid(const GridSpec& spec);
void validate_grid(const GridSpec& spec);

/// Real-to-complex FFT over the tangential directions of every z level.
/// Spectral data are `nz x n_modes` complex, one mode per column.
class TangentialTransform {
 public:
  explicit TangentialTransform(const ChannelGrid& grid);
  ~TangentialTransform();
  TangentialTransform(const TangentialTransform&) = delete;
  TangentialTransform& operator=(const TangentialTransform&) = delete;

  Eigen::MatrixXcd forward(const Eigen::MatrixXd& values) const;
  /// Normalized inverse; consumes a copy of `modes`.
  Eigen::MatrixXd inverse(Eigen::MatrixXcd modes) const;

 private:
  struct Plans;
  int nz_, nt_, n_modes_;
  std::unique_ptr<Plans> plans_;
};

namespace stencil {

/// Fourth-order (second-order at the boundary) SBP first derivative along z,
/// applied to every column of `f`.
Eigen::MatrixXd d1(const Eigen::MatrixXd& f, double h);

/// The same operator as an `n x n` sparse matrix.
Eigen::SparseMatrix<double> d1_matrix(int n, double h);

/// Second-order one-sided derivative at a wall, one value per column.
/// `upper == false` gives z = 0, `true` gives z = 1 (both in +z direction).
Eigen::RowVectorXd wall_d1(const Eigen::MatrixXd& f, double h, bool upper);

/// Three-point second derivative using explicit ghost rows at z = -h and
/// z = 1 + h.
Eigen::MatrixXd d2(const Eigen::MatrixXd& f, const Eigen::RowVectorXd& ghost_lo,
                   const Eigen::RowVectorXd& ghost_hi, double h);

}  // namespace stencil

}  // namespace nsmhd
