#pragma once

#include "nsmhd/boundary.hpp"
#include "nsmhd/fields.hpp"

namespace nsmhd {

/// Delta phi = rhs in the channel, d_n phi = neumann_{lo,hi} on the walls
/// (outward normal derivative, one value per wall column).
struct PoissonProblem {
  ScalarField rhs;
  Eigen::RowVectorXd neumann_lo;
  Eigen::RowVectorXd neumann_hi;
  bool mean_zero = true;
};

struct PoissonSolution {
  ScalarField phi;
  /// Relative compatibility defect that was removed from the source.
  double compatibility_defect = 0.0;
  /// max |Delta phi - rhs| / max |rhs| after the solve.
  double residual = 0.0;
};

/// Relative tolerance above which Neumann data count as incompatible.
inline constexpr double kCompatibilityTolerance = 1e-8;

/// Spectral in the tangential directions, three-point in z with the Neumann
/// data entering through ghost nodes. The discrete operator is conservative
/// for trapezoidal weights; its exact solvability defect is measured with
/// those weights. Defects up to kCompatibilityTolerance (relative) are
/// subtracted uniformly from the source, larger ones raise
/// IncompatibleDataError.
PoissonSolution solve_poisson_neumann(const PoissonProblem& p);

/// Discrete Laplacian of the Poisson solver with Neumann ghost data.
ScalarField neumann_laplacian(const ScalarField& phi, const Eigen::RowVectorXd& neumann_lo,
                              const Eigen::RowVectorXd& neumann_hi);

/// Divergence with the second-order SBP z-derivative, conservative for the
/// trapezoidal weights; used for Poisson sources.
ScalarField conservative_divergence(const VectorField& u);

struct PressureParts {
  ScalarField p1;  ///< "Euler" part: nonlinear source and wall flux
  ScalarField p2;  ///< harmonic part driven by eps * Delta v . n on the walls
  double defect1 = 0.0;
  double defect2 = 0.0;
};

/// Splits the reduced pressure P = p - (|v|^2 - |H|^2)/2 into
///   Delta P1 = -div(v.grad v - H.grad H),  d_n P1 = -(v.grad v - H.grad H).n
///   Delta P2 = 0,                          d_n P2 = eps Delta v . n
/// Delta v . n at the walls comes from the ghost layer of `closure`.
PressureParts pressure_decompose(const VectorField& v, const VectorField& H, double epsilon,
                                 const WallClosure& closure);

}  // namespace nsmhd
