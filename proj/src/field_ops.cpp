#include "nsmhd/field_ops.hpp"

#include <mutex>

#include "nsmhd/errors.hpp"

namespace nsmhd {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;

const std::complex<double> kI(0.0, 1.0);

void require_same_grid(const GridPtr& a, const GridPtr& b) {
  if (!a || !b || !(a == b || a->spec() == b->spec()))
    throw UsageError("fields live on different grids");
}

MatrixXd d1_complex_part(const MatrixXcd& modes, double h, bool imag) {
  return stencil::d1(imag ? MatrixXd(modes.imag()) : MatrixXd(modes.real()), h);
}

}  // namespace

Eigen::MatrixXd partial_from_modes(const ChannelGrid& g, const MatrixXcd& modes, int axis) {
  const Eigen::ArrayXd& k = axis == 0 ? g.kx_eff() : g.ky_eff();
  MatrixXcd d = modes;
  for (int m = 0; m < g.n_modes(); ++m) d.col(m) *= kI * k(m);
  return g.transform().inverse(std::move(d));
}

Eigen::MatrixXd partial(const ChannelGrid& g, const MatrixXd& f, int axis) {
  if (axis < 0 || axis >= g.dim()) throw UsageError("derivative axis out of range");
  if (axis == g.dim() - 1) return stencil::d1(f, g.h());
  return partial_from_modes(g, g.transform().forward(f), axis);
}

VectorField gradient(const ScalarField& f) {
  const auto& g = *f.grid;
  VectorField out(f.grid);
  const MatrixXcd modes = g.transform().forward(f.values);
  for (int j = 0; j + 1 < g.dim(); ++j) out.comps[j] = partial_from_modes(g, modes, j);
  out.normal() = stencil::d1(f.values, g.h());
  return out;
}

TensorField gradient(const VectorField& u) {
  const auto& g = *u.grid;
  TensorField out(u.grid);
  for (int i = 0; i < g.dim(); ++i) {
    const MatrixXcd modes = g.transform().forward(u.comps[i]);
    for (int j = 0; j + 1 < g.dim(); ++j) out.comps[i][j] = partial_from_modes(g, modes, j);
    out.comps[i][g.dim() - 1] = stencil::d1(u.comps[i], g.h());
  }
  return out;
}

ScalarField divergence(const VectorField& u) {
  const auto& g = *u.grid;
  ScalarField out(u.grid, stencil::d1(u.normal(), g.h()));
  for (int j = 0; j + 1 < g.dim(); ++j) out.values += partial(g, u.comps[j], j);
  return out;
}

ScalarField curl_2d(const VectorField& u) {
  const auto& g = *u.grid;
  if (g.dim() != 2) throw UsageError("curl_2d needs a 2D field");
  return ScalarField(u.grid, stencil::d1(u.comps[0], g.h()) - partial(g, u.comps[1], 0));
}

VectorField curl_3d(const VectorField& u) {
  const auto& g = *u.grid;
  if (g.dim() != 3) throw UsageError("curl_3d needs a 3D field");
  const TensorField du = gradient(u);
  VectorField w(u.grid);
  const auto& d = du.comps;
  w.comps[0] = d[2][1] - d[1][2];
  w.comps[1] = d[0][2] - d[2][0];
  w.comps[2] = d[1][0] - d[0][1];
  return w;
}

TensorField strain(const VectorField& u) {
  TensorField du = gradient(u);
  TensorField s(u.grid);
  for (int i = 0; i < du.dim(); ++i)
    for (int j = 0; j < du.dim(); ++j)
      s.comps[i][j] = 0.5 * (du.comps[i][j] + du.comps[j][i]);
  return s;
}

VectorField laplacian(const GhostedVectorField& u) {
  const auto& g = *u.field.grid;
  VectorField out(u.field.grid);
  for (int i = 0; i < g.dim(); ++i) {
    MatrixXcd modes = g.transform().forward(u.field.comps[i]);
    for (int m = 0; m < g.n_modes(); ++m) modes.col(m) *= -g.k2()(m);
    out.comps[i] = g.transform().inverse(std::move(modes)) +
                   stencil::d2(u.field.comps[i], u.ghost_lo[i], u.ghost_hi[i], g.h());
  }
  return out;
}

VectorField advect(const VectorField& by, const VectorField& w) {
  require_same_grid(by.grid, w.grid);
  const auto& g = *w.grid;
  VectorField out(w.grid);
  for (int i = 0; i < g.dim(); ++i) {
    const MatrixXcd modes = g.transform().forward(w.comps[i]);
    for (int j = 0; j < g.dim(); ++j) {
      const MatrixXd dj = j == g.dim() - 1 ? stencil::d1(w.comps[i], g.h())
                                           : partial_from_modes(g, modes, j);
      out.comps[i].array() += by.comps[j].array() * dj.array();
    }
  }
  return out;
}

VectorField advect_skew(const VectorField& by, const VectorField& w) {
  require_same_grid(by.grid, w.grid);
  const auto& g = *w.grid;
  VectorField out = advect(by, w);
  for (int i = 0; i < g.dim(); ++i) {
    MatrixXd flux_div = stencil::d1(by.normal().cwiseProduct(w.comps[i]), g.h());
    for (int j = 0; j + 1 < g.dim(); ++j)
      flux_div += partial(g, by.comps[j].cwiseProduct(w.comps[i]), j);
    out.comps[i] = 0.5 * (out.comps[i] + flux_div);
  }
  return out;
}

AnyField differentiate(const AnyField& f, DiffOp op, const VectorField* by) {
  auto fail = [](const char* what) -> AnyField { throw UsageError(what); };
  switch (op) {
    case DiffOp::grad:
      if (auto* s = std::get_if<ScalarField>(&f)) return gradient(*s);
      if (auto* v = std::get_if<VectorField>(&f)) return gradient(*v);
      return fail("grad needs a scalar or vector field");
    case DiffOp::div:
      if (auto* v = std::get_if<VectorField>(&f)) return divergence(*v);
      return fail("div needs a vector field");
    case DiffOp::curl:
      if (auto* v = std::get_if<VectorField>(&f)) {
        if (v->grid->dim() == 2) return curl_2d(*v);
        return curl_3d(*v);
      }
      return fail("curl needs a vector field");
    case DiffOp::laplacian:
      if (auto* gv = std::get_if<GhostedVectorField>(&f)) return laplacian(*gv);
      return fail("laplacian needs a ghost-closed vector field (see close_ghosts)");
    case DiffOp::strain:
      if (auto* v = std::get_if<VectorField>(&f)) return strain(*v);
      return fail("strain needs a vector field");
    case DiffOp::advect:
      if (!by) return fail("advect needs an advecting velocity");
      if (auto* v = std::get_if<VectorField>(&f)) return advect(*by, *v);
      return fail("advect needs a vector field");
  }
  return fail("unknown operator");
}

double inner_product(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid);
  const auto& g = *a.grid;
  return g.tangential_cell() *
         (g.z_weights().asDiagonal() * a.values.cwiseProduct(b.values)).sum();
}

double inner_product(const VectorField& a, const VectorField& b) {
  require_same_grid(a.grid, b.grid);
  if (a.dim() != b.dim()) throw UsageError("vector fields of different rank");
  const auto& g = *a.grid;
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    s += (g.z_weights().asDiagonal() * a.comps[i].cwiseProduct(b.comps[i])).sum();
  return s * g.tangential_cell();
}

double inner_product(const TensorField& a, const TensorField& b) {
  require_same_grid(a.grid, b.grid);
  const auto& g = *a.grid;
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j)
      s += (g.z_weights().asDiagonal() * a.comps[i][j].cwiseProduct(b.comps[i][j])).sum();
  return s * g.tangential_cell();
}

double norm(const ScalarField& a) { return std::sqrt(inner_product(a, a)); }
double norm(const VectorField& a) { return std::sqrt(inner_product(a, a)); }
double norm(const TensorField& a) { return std::sqrt(inner_product(a, a)); }

double relative_divergence(const VectorField& u) {
  const double div = divergence(u).values.cwiseAbs().maxCoeff();
  const TensorField du = gradient(u);
  double scale = 0.0;
  for (const auto& row : du.comps)
    for (const auto& c : row) scale = std::max(scale, c.cwiseAbs().maxCoeff());
  return scale > 0.0 ? div / scale : div;
}

LerayProjector::LerayProjector(GridPtr grid) : grid_(std::move(grid)) {
  const auto& g = *grid_;
  const int n = g.nz();
  d1_ = stencil::d1_matrix(n, g.h());
  Eigen::SparseMatrix<double> hmat(n, n);
  hmat.reserve(Eigen::VectorXi::Constant(n, 1));
  for (int i = 0; i < n; ++i) hmat.insert(i, i) = g.z_weights()(i);
  // D_z acts on interior normal values (walls pinned to zero).
  Eigen::SparseMatrix<double> dz = d1_.middleCols(1, n - 2);
  hd_ = hmat * dz;
  Eigen::SparseMatrix<double> hint_inv(n - 2, n - 2);
  hint_inv.reserve(Eigen::VectorXi::Constant(n - 2, 1));
  for (int i = 0; i < n - 2; ++i) hint_inv.insert(i, i) = 1.0 / g.z_weights()(i + 1);
  const Eigen::SparseMatrix<double> m0 = hd_ * hint_inv * Eigen::SparseMatrix<double>(hd_.transpose());

  mode_factor_.assign(g.n_modes(), nullptr);
  for (int m = 0; m < g.n_modes(); ++m) {
    const double k2 = g.k2_eff()(m);
    if (k2 == 0.0) continue;
    auto it = factors_.find(k2);
    if (it == factors_.end()) {
      Eigen::SparseMatrix<double> mk = m0 + k2 * hmat;
      auto f = std::make_unique<Factor>(mk);
      if (f->info() != Eigen::Success)
        throw NumericalError("projection matrix factorization failed");
      it = factors_.emplace(k2, std::move(f)).first;
    }
    mode_factor_[m] = it->second.get();
  }
}

VectorField LerayProjector::project(const VectorField& u) const {
  return apply(u, nullptr);
}

VectorField LerayProjector::project(const VectorField& u, ScalarField& potential) const {
  return apply(u, &potential);
}

VectorField LerayProjector::apply(const VectorField& u, ScalarField* potential) const {
  require_same_grid(u.grid, grid_);
  const auto& g = *grid_;
  const int d = g.dim();
  const int n = g.nz();
  const auto& tr = g.transform();

  std::vector<MatrixXcd> uh(d);
  for (int i = 0; i < d; ++i) uh[i] = tr.forward(u.comps[i]);
  MatrixXcd& nh = uh[d - 1];
  MatrixXcd raw_normal;
  if (potential) raw_normal = nh;
  nh.row(0).setZero();
  nh.row(n - 1).setZero();

  // Divergence of every mode at once.
  MatrixXcd div(n, g.n_modes());
  div.real() = d1_complex_part(nh, g.h(), false);
  div.imag() = d1_complex_part(nh, g.h(), true);
  for (int m = 0; m < g.n_modes(); ++m) {
    div.col(m) += kI * g.kx_eff()(m) * uh[0].col(m);
    if (d == 3) div.col(m) += kI * g.ky_eff()(m) * uh[1].col(m);
  }

  MatrixXcd q = MatrixXcd::Zero(n, g.n_modes());
  const Eigen::VectorXd& w = g.z_weights();
  MatrixXd rhs(n, 2);
  for (int m = 0; m < g.n_modes(); ++m) {
    const Factor* f = mode_factor_[m];
    if (!f) {
      if (potential) {
        // cumulative trapezoid of the removed normal component
        for (int i = 1; i < n; ++i)
          q(i, m) = q(i - 1, m) + 0.5 * g.h() * (raw_normal(i - 1, m) + raw_normal(i, m));
      }
      nh.col(m).setZero();
      continue;
    }
    rhs.col(0) = -(w.array() * div.col(m).real().array()).matrix();
    rhs.col(1) = -(w.array() * div.col(m).imag().array()).matrix();
    const MatrixXd sol = f->solve(rhs);
    q.col(m).real() = sol.col(0);
    q.col(m).imag() = sol.col(1);
    uh[0].col(m) -= kI * g.kx_eff()(m) * q.col(m);
    if (d == 3) uh[1].col(m) -= kI * g.ky_eff()(m) * q.col(m);
  }
  // Normal component of G q, interior only.
  MatrixXcd gq(n, g.n_modes());
  gq.real() = d1_complex_part(q, g.h(), false);
  gq.imag() = d1_complex_part(q, g.h(), true);
  for (int m = 0; m < g.n_modes(); ++m)
    if (mode_factor_[m]) nh.col(m) -= gq.col(m);
  nh.row(0).setZero();
  nh.row(n - 1).setZero();

  VectorField out(u.grid);
  for (int i = 0; i < d; ++i) out.comps[i] = tr.inverse(std::move(uh[i]));
  out.normal().row(0).setZero();
  out.normal().row(n - 1).setZero();

  if (potential) {
    ScalarField p(u.grid, tr.inverse(std::move(q)));
    const double mean = inner_product(p, ScalarField(u.grid, MatrixXd::Ones(n, g.nt()))) / g.volume();
    p.values.array() -= mean;
    *potential = std::move(p);
  }
  return out;
}

std::shared_ptr<const LerayProjector> projector_for(const GridPtr& grid) {
  static std::mutex mutex;
  static std::map<GridSpec, std::shared_ptr<const LerayProjector>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[grid->spec()];
  if (!slot) slot = std::make_shared<const LerayProjector>(grid);
  return slot;
}

VectorField leray_project(const VectorField& u) { return projector_for(u.grid)->project(u); }

}  // namespace nsmhd
