#include "nsmhd/geometry.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "nsmhd/errors.hpp"

namespace nsmhd {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Diagonal norm and boundary rows of the (2,4) SBP first derivative.
constexpr double kNormBoundary[4] = {17.0 / 48, 59.0 / 48, 43.0 / 48, 49.0 / 48};
constexpr double kD1Boundary[4][6] = {
    {-24.0 / 17, 59.0 / 34, -4.0 / 17, -3.0 / 34, 0.0, 0.0},
    {-0.5, 0.0, 0.5, 0.0, 0.0, 0.0},
    {4.0 / 43, -59.0 / 86, 0.0, 59.0 / 86, -4.0 / 43, 0.0},
    {3.0 / 98, 0.0, -59.0 / 98, 0.0, 32.0 / 49, -4.0 / 49}};

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct TangentialTransform::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

TangentialTransform::TangentialTransform(const ChannelGrid& grid)
    : nz_(grid.nz()), nt_(grid.nt()), n_modes_(grid.n_modes()),
      plans_(std::make_unique<Plans>()) {
  Eigen::MatrixXd real(nz_, nt_);
  Eigen::MatrixXcd spec(nz_, n_modes_);
  int dims[2] = {grid.nx(), grid.ny()};
  const int rank = grid.dim() == 3 ? 2 : 1;
  auto* in = real.data();
  auto* out = reinterpret_cast<fftw_complex*>(spec.data());
  std::lock_guard<std::mutex> lock(planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans_->r2c = fftw_plan_many_dft_r2c(rank, dims, nz_, in, nullptr, nz_, 1, out,
                                       nullptr, nz_, 1, flags);
  plans_->c2r = fftw_plan_many_dft_c2r(rank, dims, nz_, out, nullptr, nz_, 1, in,
                                       nullptr, nz_, 1, flags | FFTW_DESTROY_INPUT);
  if (!plans_->r2c || !plans_->c2r)
    throw NumericalError("FFTW failed to build tangential transform plans");
}

TangentialTransform::~TangentialTransform() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plans_->r2c) fftw_destroy_plan(plans_->r2c);
  if (plans_->c2r) fftw_destroy_plan(plans_->c2r);
}

Eigen::MatrixXcd TangentialTransform::forward(const Eigen::MatrixXd& values) const {
  Eigen::MatrixXd in = values;
  Eigen::MatrixXcd out(nz_, n_modes_);
  fftw_execute_dft_r2c(plans_->r2c, in.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

Eigen::MatrixXd TangentialTransform::inverse(Eigen::MatrixXcd modes) const {
  Eigen::MatrixXd out(nz_, nt_);
  fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(modes.data()),
                       out.data());
  out /= double(nt_);
  return out;
}

ChannelGrid::ChannelGrid(const GridSpec& spec) : spec_(spec) {
  const int n = nz();
  dx_ = kTwoPi / nx();
  h_ = 1.0 / (n - 1);
  cell_ = spec_.dim == 3 ? dx_ * dx_ : dx_;

  z_ = Eigen::VectorXd::LinSpaced(n, 0.0, 1.0);
  wz_ = Eigen::VectorXd::Constant(n, h_);
  for (int i = 0; i < 4; ++i) {
    wz_(i) = kNormBoundary[i] * h_;
    wz_(n - 1 - i) = kNormBoundary[i] * h_;
  }
  phi_ = z_.array() * (1.0 - z_.array());
  phi_(0) = 0.0;
  phi_(n - 1) = 0.0;

  const int half_y = ny() / 2 + 1;
  if (spec_.dim == 2) {
    n_modes_ = nx() / 2 + 1;
    kx_eff_.resize(n_modes_);
    ky_eff_ = Eigen::ArrayXd::Zero(n_modes_);
    k2_.resize(n_modes_);
    for (int m = 0; m < n_modes_; ++m) {
      k2_(m) = double(m) * m;
      kx_eff_(m) = (m == nx() / 2) ? 0.0 : double(m);
    }
  } else {
    n_modes_ = nx() * half_y;
    kx_eff_.resize(n_modes_);
    ky_eff_.resize(n_modes_);
    k2_.resize(n_modes_);
    for (int ix = 0; ix < nx(); ++ix) {
      const double kx = ix <= nx() / 2 ? ix : ix - nx();
      for (int iky = 0; iky < half_y; ++iky) {
        const int m = ix * half_y + iky;
        k2_(m) = kx * kx + double(iky) * iky;
        kx_eff_(m) = (ix == nx() / 2) ? 0.0 : kx;
        ky_eff_(m) = (iky == ny() / 2) ? 0.0 : double(iky);
      }
    }
  }
  k2_eff_ = kx_eff_.square() + ky_eff_.square();
  transform_ = std::make_unique<TangentialTransform>(*this);
}

ChannelGrid::~ChannelGrid() = default;

double ChannelGrid::volume() const {
  return std::pow(kTwoPi, spec_.dim - 1);
}

Eigen::MatrixXd ChannelGrid::quad_weights() const {
  return (wz_ * cell_).replicate(1, nt());
}

void validate_grid(const GridSpec& spec) {
  if (spec.dim != 2 && spec.dim != 3)
    throw ConfigError("dim must be 2 or 3, got " + std::to_string(spec.dim));
  if (spec.n_tangential < 4 || spec.n_tangential % 2 != 0)
    throw ConfigError("n_tangential must be even and >= 4, got " +
                      std::to_string(spec.n_tangential));
  if (spec.n_normal < 8)
    throw ConfigError("n_normal must be >= 8, got " + std::to_string(spec.n_normal));
}

GridPtr build_grid(const GridSpec& spec) {
  validate_grid(spec);
  return std::make_shared<const ChannelGrid>(spec);
}

namespace stencil {

Eigen::MatrixXd d1(const Eigen::MatrixXd& f, double h) {
  const Eigen::Index n = f.rows();
  const Eigen::Index cols = f.cols();
  Eigen::MatrixXd out(n, cols);
  const double inv = 1.0 / h;
  constexpr double a1 = 2.0 / 3.0, a2 = 1.0 / 12.0;
  for (Eigen::Index c = 0; c < cols; ++c) {
    const double* u = f.col(c).data();
    double* d = out.col(c).data();
    for (int i = 0; i < 4; ++i) {
      double lo = 0.0, hi = 0.0;
      for (int j = 0; j < 6; ++j) {
        lo += kD1Boundary[i][j] * u[j];
        hi -= kD1Boundary[i][j] * u[n - 1 - j];
      }
      d[i] = lo * inv;
      d[n - 1 - i] = hi * inv;
    }
    for (Eigen::Index i = 4; i < n - 4; ++i)
      d[i] = (a1 * (u[i + 1] - u[i - 1]) - a2 * (u[i + 2] - u[i - 2])) * inv;
  }
  return out;
}

Eigen::SparseMatrix<double> d1_matrix(int n, double h) {
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 6; ++j) {
      if (kD1Boundary[i][j] == 0.0) continue;
      t.emplace_back(i, j, kD1Boundary[i][j] / h);
      t.emplace_back(n - 1 - i, n - 1 - j, -kD1Boundary[i][j] / h);
    }
  for (int i = 4; i < n - 4; ++i) {
    t.emplace_back(i, i - 2, 1.0 / (12 * h));
    t.emplace_back(i, i - 1, -2.0 / (3 * h));
    t.emplace_back(i, i + 1, 2.0 / (3 * h));
    t.emplace_back(i, i + 2, -1.0 / (12 * h));
  }
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Eigen::RowVectorXd wall_d1(const Eigen::MatrixXd& f, double h, bool upper) {
  const Eigen::Index n = f.rows();
  if (!upper) return (-3.0 * f.row(0) + 4.0 * f.row(1) - f.row(2)) / (2.0 * h);
  return (3.0 * f.row(n - 1) - 4.0 * f.row(n - 2) + f.row(n - 3)) / (2.0 * h);
}

Eigen::MatrixXd d2(const Eigen::MatrixXd& f, const Eigen::RowVectorXd& ghost_lo,
                   const Eigen::RowVectorXd& ghost_hi, double h) {
  const Eigen::Index n = f.rows();
  const double inv = 1.0 / (h * h);
  Eigen::MatrixXd out(n, f.cols());
  out.row(0) = (ghost_lo - 2.0 * f.row(0) + f.row(1)) * inv;
  out.middleRows(1, n - 2) =
      (f.topRows(n - 2) - 2.0 * f.middleRows(1, n - 2) + f.bottomRows(n - 2)) * inv;
  out.row(n - 1) = (f.row(n - 2) - 2.0 * f.row(n - 1) + ghost_hi) * inv;
  return out;
}

}  // namespace stencil

}  // namespace nsmhd
