#include "nsmhd/elliptic.hpp"

#include <cmath>
#include <string>

#include "nsmhd/errors.hpp"
#include "nsmhd/field_ops.hpp"

namespace nsmhd {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;

// Second-order SBP derivative: centered inside, one-sided at the walls.
MatrixXd d1_trapezoid(const MatrixXd& f, double h) {
  const Eigen::Index n = f.rows();
  MatrixXd out(n, f.cols());
  out.row(0) = (f.row(1) - f.row(0)) / h;
  out.middleRows(1, n - 2) = (f.bottomRows(n - 2) - f.topRows(n - 2)) / (2.0 * h);
  out.row(n - 1) = (f.row(n - 1) - f.row(n - 2)) / h;
  return out;
}

Eigen::VectorXd trapezoid_weights(int n, double h) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, h);
  w(0) = w(n - 1) = 0.5 * h;
  return w;
}

// Solves the tridiagonal system with constant interior coefficients
// (sub, diag, sup) and modified first/last rows; `b` is overwritten.
void thomas(double diag0, double sup0, double sub, double diag, double sup, double subn,
            double diagn, Eigen::Ref<Eigen::VectorXcd> b) {
  const Eigen::Index n = b.size();
  Eigen::VectorXd c(n);
  double beta = diag0;
  c(0) = sup0 / beta;
  b(0) /= beta;
  for (Eigen::Index i = 1; i < n; ++i) {
    const double a = i == n - 1 ? subn : sub;
    const double d = i == n - 1 ? diagn : diag;
    beta = d - a * c(i - 1);
    c(i) = i == n - 1 ? 0.0 : sup / beta;
    b(i) = (b(i) - a * b(i - 1)) / beta;
  }
  for (Eigen::Index i = n - 2; i >= 0; --i) b(i) -= c(i) * b(i + 1);
}

double weighted_mean(const ScalarField& f) {
  const auto& g = *f.grid;
  return g.tangential_cell() * (g.z_weights().transpose() * f.values).sum() / g.volume();
}

}  // namespace

ScalarField conservative_divergence(const VectorField& u) {
  const auto& g = *u.grid;
  ScalarField out(u.grid, d1_trapezoid(u.normal(), g.h()));
  for (int j = 0; j + 1 < g.dim(); ++j) out.values += partial(g, u.comps[j], j);
  return out;
}

ScalarField neumann_laplacian(const ScalarField& phi, const Eigen::RowVectorXd& neumann_lo,
                              const Eigen::RowVectorXd& neumann_hi) {
  const auto& g = *phi.grid;
  const int n = g.nz();
  const double h = g.h();
  // d_z phi(0) = -g_lo, d_z phi(1) = g_hi
  const Eigen::RowVectorXd ghost_lo = phi.values.row(1) + 2.0 * h * neumann_lo;
  const Eigen::RowVectorXd ghost_hi = phi.values.row(n - 2) + 2.0 * h * neumann_hi;
  MatrixXcd modes = g.transform().forward(phi.values);
  for (int m = 0; m < g.n_modes(); ++m) modes.col(m) *= -g.k2()(m);
  return ScalarField(phi.grid, g.transform().inverse(std::move(modes)) +
                                   stencil::d2(phi.values, ghost_lo, ghost_hi, h));
}

PoissonSolution solve_poisson_neumann(const PoissonProblem& p) {
  const auto& g = *p.rhs.grid;
  const int n = g.nz();
  const double h = g.h();
  const double ih2 = 1.0 / (h * h);
  if (p.neumann_lo.size() != g.nt() || p.neumann_hi.size() != g.nt())
    throw UsageError("Neumann data must have one value per wall column");

  // Ghost elimination moves the wall data into the first and last rows.
  MatrixXd b = p.rhs.values;
  b.row(0) -= 2.0 * p.neumann_lo / h;
  b.row(n - 1) -= 2.0 * p.neumann_hi / h;

  // Solvability of the mean mode: trapezoid-weighted sum of b must vanish.
  const Eigen::VectorXd wt = trapezoid_weights(n, h);
  const double defect = (wt.transpose() * b).sum() / g.nt();
  const double scale = ((wt.transpose() * p.rhs.values.cwiseAbs()).sum() +
                        p.neumann_lo.cwiseAbs().sum() + p.neumann_hi.cwiseAbs().sum()) /
                       g.nt();
  const double rel = scale > 0.0 ? std::abs(defect) / scale : std::abs(defect);
  if (rel > kCompatibilityTolerance)
    throw IncompatibleDataError(
        "Neumann data incompatible with source (relative defect " + std::to_string(rel) + ")",
        rel);
  MatrixXd src = p.rhs.values;
  src.array() -= defect;  // uniform shift; sum(wt) == 1
  b.array() -= defect;

  MatrixXcd bh = g.transform().forward(b);
  for (int m = 0; m < g.n_modes(); ++m) {
    const double k2 = g.k2()(m);
    if (k2 == 0.0) {
      // Pin phi_0 = 0 and solve the remaining rows; the dropped first row
      // holds by compatibility.
      Eigen::VectorXcd rhs = bh.col(m).tail(n - 1);
      thomas(-2.0 * ih2, ih2, ih2, -2.0 * ih2, ih2, 2.0 * ih2, -2.0 * ih2, rhs);
      bh(0, m) = 0.0;
      bh.col(m).tail(n - 1) = rhs;
    } else {
      thomas(-2.0 * ih2 - k2, 2.0 * ih2, ih2, -2.0 * ih2 - k2, ih2, 2.0 * ih2, -2.0 * ih2 - k2,
             bh.col(m));
    }
  }
  PoissonSolution out;
  out.phi = ScalarField(p.rhs.grid, g.transform().inverse(std::move(bh)));
  if (p.mean_zero) out.phi.values.array() -= weighted_mean(out.phi);
  out.compatibility_defect = rel;

  const ScalarField lap = neumann_laplacian(out.phi, p.neumann_lo, p.neumann_hi);
  const double rhs_max = src.cwiseAbs().maxCoeff();
  const double res = (lap.values - src).cwiseAbs().maxCoeff();
  out.residual = rhs_max > 0.0 ? res / rhs_max : res;
  const double bound = rhs_max > 0.0 ? 1e-9 * rhs_max : 1e-12;
  const double data_max = std::max(p.neumann_lo.cwiseAbs().maxCoeff(),
                                   p.neumann_hi.cwiseAbs().maxCoeff());
  if (res > std::max(bound, 1e-12 * data_max / h))
    throw NumericalError("Poisson residual " + std::to_string(res) + " exceeds tolerance");
  return out;
}

PressureParts pressure_decompose(const VectorField& v, const VectorField& H, double epsilon,
                                 const WallClosure& closure) {
  const auto& g = *v.grid;
  const int n = g.nz();
  const VectorField nl = advect(v, v) - advect(H, H);

  PressureParts out;
  try {
    PoissonProblem p1{-1.0 * conservative_divergence(nl), nl.normal().row(0),
                      -nl.normal().row(n - 1), true};
    PoissonSolution s = solve_poisson_neumann(p1);
    out.p1 = std::move(s.phi);
    out.defect1 = s.compatibility_defect;
  } catch (const IncompatibleDataError& e) {
    throw IncompatibleDataError(std::string("P1 subproblem: ") + e.what(), e.defect());
  }

  const GhostedVectorField gv = close_ghosts(v, closure);
  const VectorField lap = laplacian(gv);
  try {
    PoissonProblem p2{ScalarField(v.grid), -epsilon * lap.normal().row(0),
                      epsilon * lap.normal().row(n - 1), true};
    PoissonSolution s = solve_poisson_neumann(p2);
    out.p2 = std::move(s.phi);
    out.defect2 = s.compatibility_defect;
  } catch (const IncompatibleDataError& e) {
    throw IncompatibleDataError(std::string("P2 subproblem: ") + e.what(), e.defect());
  }
  return out;
}

}  // namespace nsmhd
