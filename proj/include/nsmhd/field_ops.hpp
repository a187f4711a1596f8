#pragma once

#include <Eigen/SparseCholesky>

#include <map>
#include <memory>
#include <variant>

#include "nsmhd/fields.hpp"

namespace nsmhd {

// Partial derivatives of node values. Axis `dim - 1` is the wall normal and
// uses the SBP stencil; the tangential axes are differentiated spectrally.
Eigen::MatrixXd partial(const ChannelGrid& g, const Eigen::MatrixXd& f, int axis);

/// Tangential derivatives from precomputed modes (saves a forward FFT).
Eigen::MatrixXd partial_from_modes(const ChannelGrid& g, const Eigen::MatrixXcd& modes,
                                   int axis);

VectorField gradient(const ScalarField& f);
/// comps[i][j] = d_j u_i
TensorField gradient(const VectorField& u);
ScalarField divergence(const VectorField& u);
/// In 2D the vorticity is the single out-of-plane component
/// w_y = d_z u_x - d_x u_z (the plane is (x, z) embedded in R^3).
ScalarField curl_2d(const VectorField& u);
VectorField curl_3d(const VectorField& u);
/// S u = (grad u + grad u^T) / 2
TensorField strain(const VectorField& u);
/// Componentwise Laplacian; the normal direction consumes the ghost rows.
VectorField laplacian(const GhostedVectorField& u);
/// Convective form (a . grad) w.
VectorField advect(const VectorField& by, const VectorField& w);
/// Skew-symmetric form ((a . grad) w + div(a (x) w)) / 2. Its L2 adjoint is
/// its negative whenever a . n = 0 at the walls.
VectorField advect_skew(const VectorField& by, const VectorField& w);

enum class DiffOp { grad, div, curl, laplacian, strain, advect };

using AnyField = std::variant<ScalarField, VectorField, TensorField, GhostedVectorField>;

/// Rank-generic dispatcher. Throws UsageError on a rank mismatch (e.g. the
/// curl of a scalar) or when `advect` is requested without `by`.
AnyField differentiate(const AnyField& f, DiffOp op, const VectorField* by = nullptr);

double inner_product(const ScalarField& a, const ScalarField& b);
double inner_product(const VectorField& a, const VectorField& b);
double inner_product(const TensorField& a, const TensorField& b);
double norm(const ScalarField& a);
double norm(const VectorField& a);
double norm(const TensorField& a);

/// Relative discrete divergence max|div u| / max|grad u|, the size used in
/// the FieldState invariants.
double relative_divergence(const VectorField& u);

/// Orthogonal projection (in the quadrature inner product) onto discretely
/// divergence-free fields with zero normal component on both walls.
///
/// The wall-normal component is first restricted to interior nodes; per
/// tangential mode the potential then solves the SPD system assembled from
/// the divergence and its adjoint gradient, so the result is idempotent and
/// self-adjoint to round-off.
class LerayProjector {
 public:
  explicit LerayProjector(GridPtr grid);

  VectorField project(const VectorField& u) const;
  /// Also returns the potential q with u - P u = G q, gauge-fixed to zero mean.
  VectorField project(const VectorField& u, ScalarField& potential) const;

  const GridPtr& grid() const { return grid_; }

 private:
  using Factor = Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower,
                                       Eigen::NaturalOrdering<int>>;
  VectorField apply(const VectorField& u, ScalarField* potential) const;

  GridPtr grid_;
  Eigen::SparseMatrix<double> d1_;
  Eigen::SparseMatrix<double> hd_;  // H * D_z  (n x n-2)
  std::map<double, std::unique_ptr<Factor>> factors_;
  std::vector<const Factor*> mode_factor_;
};

/// Shared, per-grid projector (built once, then read-only).
std::shared_ptr<const LerayProjector> projector_for(const GridPtr& grid);

VectorField leray_project(const VectorField& u);

}  // namespace nsmhd
