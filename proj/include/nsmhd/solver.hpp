#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nsmhd/config.hpp"
#include "nsmhd/fields.hpp"

namespace nsmhd {

/// Velocity and magnetic field at one time level.
struct FieldState {
  double t = 0.0;
  VectorField v;
  VectorField H;
};

/// Throws NumericalError when a field is non-finite, has a nonzero normal
/// trace or a relative divergence above `div_tol`.
void check_invariants(const FieldState& s, double div_tol = 1e-9);

std::vector<std::string> initial_condition_names();

/// Named analytic data, Leray-projected onto the admissible space:
///   taylor-green-channel  ic.k (1), ic.amplitude (1), ic.magnetic (0.5)
///   parallel-shear        v = (a cos(k pi z), 0, 0), H = 0; ic.k, ic.amplitude
///   elsasser              v = H = (a cos(pi z), 0, 0); ic.amplitude
///   random-smooth         ic.seed, ic.modes (<= 3), ic.amplitude, ic.magnetic;
///                         built from stream-function modes whose wall
///                         profiles satisfy the Navier relation for zeta_v
///                         (velocity) and zeta_H (magnetic field)
FieldState initial_condition(const GridPtr& grid, const SimConfig& cfg);

/// The unprojected analytic field behind random-smooth: divergence-free and
/// tangent to the walls in the continuum, satisfying the Navier relation for
/// `zeta`, but only discretely divergence-free up to truncation error.
VectorField navier_mode_field(const GridPtr& grid, std::uint64_t seed, int modes, double zeta);

/// Largest step allowed by dt <= 0.5 min(h / |u|, h^2 / (2 dim eps)), with h
/// the smallest spacing and |u| the largest pointwise |v| + |H|.
double cfl_limit(const FieldState& s, double epsilon);
void check_cfl(const FieldState& s, const SimConfig& cfg);

/// RK4 in time with the Leray projection applied to every stage derivative.
/// Nonlinear terms use the skew-symmetric form; the viscous term closes the
/// walls with the Navier rule for v and H.
class Stepper {
 public:
  Stepper(GridPtr grid, const SimConfig& cfg);

  /// Projected time derivative of (v, H). `pressure` receives the mean-zero
  /// potential removed from the momentum derivative.
  void rhs(const VectorField& v, const VectorField& H, VectorField& dv, VectorField& dH,
           ScalarField* pressure = nullptr) const;

  /// Reduced pressure P seen by the scheme at (v, H).
  ScalarField projection_pressure(const VectorField& v, const VectorField& H) const;

  /// One step. When `k1_v`/`k1_H` are given they receive the derivative at
  /// the start of the step.
  FieldState step(const FieldState& s, double dt, VectorField* k1_v = nullptr,
                  VectorField* k1_H = nullptr) const;

 private:
  void viscous_term(const VectorField& f, double zeta, const std::vector<Eigen::MatrixXcd>& modes,
                    std::vector<Eigen::MatrixXcd>& spectral, std::vector<Eigen::MatrixXd>& out) const;

  GridPtr grid_;
  double epsilon_;
  double zeta_v_, zeta_H_;
  bool viscous_;
};

FieldState step_viscous(const FieldState& s, const SimConfig& cfg);
FieldState step_ideal(const FieldState& s, const SimConfig& cfg);

struct CheckpointRef {
  double t = 0.0;
  std::string path;
};

/// Diagnostics of one run. Every series in the first block has one entry per
/// sample time `t`; the N_m block has its own sample times `nm_t`.
struct RunRecord {
  SimConfig config;
  double dt = 0.0;
  long steps = 0;

  std::vector<double> t;
  std::vector<double> energy;       ///< (||v||^2 + ||H||^2) / 2
  std::vector<double> strain_v;     ///< ||S v||^2
  std::vector<double> strain_H;     ///< ||S H||^2
  std::vector<double> wall_v;       ///< wall integral of |v_tau|^2
  std::vector<double> wall_H;       ///< wall integral of |H_tau|^2
  std::vector<double> energy_rate;  ///< (v, dv/dt) + (H, dH/dt) of the semi-discrete system
  std::vector<double> div_v;
  std::vector<double> div_H;
  std::vector<double> wall_vorticity_v;
  std::vector<double> wall_vorticity_H;
  std::vector<double> cross_helicity;  ///< (v, H)

  std::vector<double> nm_t;
  std::vector<double> nm;
  std::array<std::vector<double>, 6> nm_parts;
  std::vector<double> hessian_v;  ///< ||grad^2 v||^2 at nm_t
  std::vector<double> hessian_H;

  std::vector<CheckpointRef> checkpoints;
};

/// Called with each sampled state (the same cadence as the record series).
using StateObserver = std::function<void(const FieldState&)>;

/// Integrates from the configured initial condition to t_end. Step errors
/// are rethrown with the step index in the message. When `dt` does not
/// divide t_end the final step is shortened.
RunRecord run(const SimConfig& cfg, const StateObserver& observer = {});

/// As above from an explicit initial state.
RunRecord run_from(const SimConfig& cfg, FieldState initial, const StateObserver& observer = {});

}  // namespace nsmhd
